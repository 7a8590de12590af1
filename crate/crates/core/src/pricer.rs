//! Closed-form prices of the defaultable zero-coupon bond.
//!
//! Work is done in the relative variables `x = V / e^{-r(T-t)}` and
//! `u = C / e^{-r(T-t)}`, where the pricing equation has constant
//! coefficients `(λ_i, λ_i + b, s_V)` on each inter-date interval. Every binary
//! is priced with coefficients `(0, b, s_V)` and the intensity enters through
//! explicit exponential prefactors.

use alloc::vec::Vec;

use crate::binaries::{price_binary_with, shift_coefficients, BinaryKind, BinaryPrice, BinarySpec, BsCoefficients};
use crate::error::bail;
use crate::intbin::{integrate_weighted, WeightedIntegralSpec};
use crate::math::{exp, log};
use crate::mvn::{MvnConfig, Sign, SignVector};
use crate::quadrature::QuadConfig;
use crate::{Error, Result};

/// Market data: short rate, firm payout rate and firm volatility.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketParams {
    /// Risk-free short rate `r`.
    pub r: f64,
    /// Firm dividend (payout) rate `b`.
    pub b: f64,
    /// Firm value volatility `s_V`.
    pub s_v: f64,
}

impl MarketParams {
    /// Validated constructor.
    pub fn new(r: f64, b: f64, s_v: f64) -> Result<Self> {
        if !r.is_finite() || !b.is_finite() {
            bail!(Domain, "rates must be finite (r={r}, b={b})");
        }
        if !(s_v > 0.0) || !s_v.is_finite() {
            bail!(Domain, "firm volatility must be positive, got {s_v}");
        }
        Ok(MarketParams { r, b, s_v })
    }

    fn relative_coeffs(&self) -> BsCoefficients {
        BsCoefficients { r: 0.0, q: self.b, sigma: self.s_v }
    }
}

/// Announcing dates `0 = t_0 < t_1 < … < t_N = T`, step intensities and barriers.
#[derive(Debug, Clone, PartialEq)]
pub struct DefaultSchedule {
    dates: Vec<f64>,
    intensities: Vec<f64>,
    barriers: Vec<f64>,
}

impl DefaultSchedule {
    /// `announcing` holds `t_1..t_N` (the last one is the maturity), `intensities`
    /// holds `λ_0..λ_{N-1}` and `barriers` holds `K_1..K_N`.
    ///
    /// A barrier of `0` disables the structural default at that date.
    pub fn new(announcing: &[f64], intensities: &[f64], barriers: &[f64]) -> Result<Self> {
        let n = announcing.len();
        if n == 0 {
            bail!(Invalid, "at least one announcing date is required");
        }
        if intensities.len() != n || barriers.len() != n {
            bail!(
                Invalid,
                "expected {n} intensities and {n} barriers, got {} and {}",
                intensities.len(),
                barriers.len()
            );
        }
        if announcing.iter().any(|d| !d.is_finite()) {
            bail!(Domain, "announcing dates must be finite");
        }
        let mut dates = Vec::with_capacity(n + 1);
        dates.push(0.0);
        dates.extend_from_slice(announcing);
        for (k, w) in dates.windows(2).enumerate() {
            if w[1] <= w[0] {
                bail!(Schedule, "announcing dates must be strictly increasing: t_{k}={} >= t_{}={}", w[0], k + 1, w[1]);
            }
        }
        if let Some(l) = intensities.iter().find(|l| !(**l >= 0.0) || !l.is_finite()) {
            bail!(Domain, "intensities must be finite and non-negative, got {l}");
        }
        if let Some(k) = barriers.iter().find(|k| !(**k >= 0.0) || !k.is_finite()) {
            bail!(Domain, "barriers must be finite and non-negative, got {k}");
        }
        Ok(DefaultSchedule { dates, intensities: intensities.to_vec(), barriers: barriers.to_vec() })
    }

    /// Number of intervals `N`.
    pub fn len(&self) -> usize {
        self.intensities.len()
    }

    /// Always false for a validated schedule.
    pub fn is_empty(&self) -> bool {
        self.intensities.is_empty()
    }

    /// `t_0..t_N`.
    pub fn dates(&self) -> &[f64] {
        &self.dates
    }

    /// `λ_0..λ_{N-1}`.
    pub fn intensities(&self) -> &[f64] {
        &self.intensities
    }

    /// `K_1..K_N`.
    pub fn barriers(&self) -> &[f64] {
        &self.barriers
    }

    /// Maturity `T = t_N`.
    pub fn maturity(&self) -> f64 {
        self.dates[self.dates.len() - 1]
    }

    /// `∫_from^to λ(s) ds` for the step intensity.
    pub fn cumulative_hazard(&self, from: f64, to: f64) -> f64 {
        let mut h = 0.0;
        for (k, &lam) in self.intensities.iter().enumerate() {
            let lo = self.dates[k].max(from);
            let hi = self.dates[k + 1].min(to);
            if hi > lo {
                h += lam * (hi - lo);
            }
        }
        h
    }

    /// Copy with different intensities.
    pub fn with_intensities(&self, intensities: &[f64]) -> Result<Self> {
        Self::new(&self.dates[1..], intensities, &self.barriers)
    }

    /// Copy with different barriers.
    pub fn with_barriers(&self, barriers: &[f64]) -> Result<Self> {
        Self::new(&self.dates[1..], &self.intensities, barriers)
    }
}

/// How much the bondholder recovers at default.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RecoveryModel {
    /// `min{e^{-r(T-t)}, R·V/n}`: a share of the firm value, capped at the riskless bond.
    Endogenous {
        /// Recovery rate `R ∈ [0, 1]`.
        rate: f64,
        /// Number of bonds `n > 0`.
        bonds: f64,
    },
    /// `R·e^{-r(T-t)}`.
    Exogenous {
        /// Recovery rate `R ∈ [0, 1]`.
        rate: f64,
    },
}

impl RecoveryModel {
    /// Validate the rate and bond count.
    pub fn validate(&self) -> Result<()> {
        let rate = self.rate();
        if !(0.0..=1.0).contains(&rate) {
            bail!(Domain, "recovery rate must lie in [0, 1], got {rate}");
        }
        if let RecoveryModel::Endogenous { bonds, .. } = *self {
            if !(bonds > 0.0) || !bonds.is_finite() {
                bail!(Domain, "bond count must be positive, got {bonds}");
            }
        }
        Ok(())
    }

    /// Recovery rate `R`.
    pub fn rate(&self) -> f64 {
        match *self {
            RecoveryModel::Endogenous { rate, .. } | RecoveryModel::Exogenous { rate } => rate,
        }
    }

    /// Relative recovery `min{1, R x / n}` (endogenous) or `R` (exogenous) at relative spot `x`.
    pub fn relative_recovery(&self, x: f64) -> f64 {
        match *self {
            RecoveryModel::Endogenous { rate, bonds } => (rate * x / bonds).min(1.0),
            RecoveryModel::Exogenous { rate } => rate,
        }
    }
}

/// Which closed-form branch applies to an endogenous-recovery bond.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Every barrier is at most `n/R`.
    BarriersBelowThreshold,
    /// Every barrier exceeds `n/R`.
    BarriersAboveThreshold,
    /// `R = 0`: nothing is recovered and only the survival term remains.
    NoRecovery,
}

/// Classify the barrier regime; ties `K_i = n/R` belong to the first case.
pub fn detect_regime(schedule: &DefaultSchedule, rate: f64, bonds: f64) -> Result<Regime> {
    if rate == 0.0 {
        return Ok(Regime::NoRecovery);
    }
    let threshold = bonds / rate;
    let below = schedule.barriers.iter().filter(|&&k| k <= threshold).count();
    let above = schedule.len() - below;
    match (below, above) {
        (_, 0) => Ok(Regime::BarriersBelowThreshold),
        (0, _) => Ok(Regime::BarriersAboveThreshold),
        _ => Err(Error::UnsupportedRegime { below, above, threshold }),
    }
}

/// How binaries are evaluated while assembling a price.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Assembly {
    /// Price every binary directly with coefficients `(0, b, s_V)`.
    #[default]
    Direct,
    /// Price with the interval's own coefficients `(λ_i, λ_i + b, s_V)` and map
    /// back with the rate-shift relation.
    ShiftedCoefficients,
}

/// Accuracy settings.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PricerConfig {
    /// Normal CDF settings.
    pub mvn: MvnConfig,
    /// Quadrature settings for the integral terms.
    pub quad: QuadConfig,
    /// Binary evaluation route.
    pub assembly: Assembly,
}

/// Error budget of a closed-form evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Diagnostics {
    /// Bound on the contribution of normal CDF errors.
    pub cdf_error: f64,
    /// Summed quadrature error estimates.
    pub quad_error: f64,
    /// Whether every quadrature met its tolerance.
    pub quad_converged: bool,
    /// Number of binary or integral terms assembled.
    pub terms: usize,
}

/// Relative price `u_i(x, t)` with diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativePrice {
    /// `u_i(x, t)`.
    pub value: f64,
    /// Interval index `i`.
    pub interval: usize,
    /// Error budget.
    pub diagnostics: Diagnostics,
}

/// Full output of a pricing call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceReport {
    /// Bond price `C`.
    pub price: f64,
    /// Relative price `u = C / e^{-r(T-t)}`.
    pub relative_price: f64,
    /// Relative firm value `x = V / e^{-r(T-t)}`.
    pub relative_spot: f64,
    /// Default-free bond `e^{-r(T-t)}`.
    pub riskless: f64,
    /// Survival probability `W` (exogenous recovery only).
    pub survival_prob: Option<f64>,
    /// Credit spread.
    pub credit_spread: f64,
    /// Interval index `i` with `t_i <= t < t_{i+1}`.
    pub interval_index: usize,
    /// Error budget.
    pub diagnostics: Diagnostics,
}

/// Index `i` with `t_i <= t < t_{i+1}`.
pub fn locate_interval(schedule: &DefaultSchedule, t: f64) -> Result<usize> {
    if t.is_nan() || t < 0.0 || t >= schedule.maturity() {
        bail!(Domain, "evaluation time {t} outside [0, {})", schedule.maturity());
    }
    Ok(schedule.dates[1..].iter().take_while(|&&d| d <= t).count())
}

struct Assembler<'a> {
    schedule: &'a DefaultSchedule,
    coeffs: BsCoefficients,
    x: f64,
    t: f64,
    interval: usize,
    cfg: &'a PricerConfig,
    terms: Vec<f64>,
    diag: Diagnostics,
}

impl<'a> Assembler<'a> {
    fn new(
        params: &MarketParams,
        schedule: &'a DefaultSchedule,
        x: f64,
        t: f64,
        cfg: &'a PricerConfig,
    ) -> Result<Self> {
        if !(x > 0.0) || !x.is_finite() {
            bail!(Domain, "relative firm value must be positive and finite, got {x}");
        }
        let interval = locate_interval(schedule, t)?;
        Ok(Assembler {
            schedule,
            coeffs: params.relative_coeffs(),
            x,
            t,
            interval,
            cfg,
            terms: Vec::new(),
            diag: Diagnostics { quad_converged: true, ..Diagnostics::default() },
        })
    }

    /// `t_{i+1}..t_{last}` paired with `K_{i+1}..K_{last}`.
    fn chain(&self, last: usize) -> (Vec<f64>, Vec<f64>) {
        let i = self.interval;
        (self.schedule.dates[i + 1..=last].to_vec(), self.schedule.barriers[i..last].to_vec())
    }

    fn spec(&self, kind: BinaryKind, strikes: Vec<f64>, expiries: Vec<f64>, last_sign: Sign) -> Result<BinarySpec> {
        let m = strikes.len();
        let mut signs = SignVector::all_plus(m);
        signs.0[m - 1] = last_sign;
        BinarySpec::new(kind, signs, strikes, expiries, self.coeffs)
    }

    fn binary(&self, spec: &BinarySpec) -> Result<BinaryPrice> {
        match self.cfg.assembly {
            Assembly::Direct => price_binary_with(spec, self.x, self.t, &self.cfg.mvn),
            Assembly::ShiftedCoefficients => {
                let lam = self.schedule.intensities[self.interval];
                let (scale, shifted) = shift_coefficients(spec, lam, self.t)?;
                let p = price_binary_with(&shifted, self.x, self.t, &self.cfg.mvn)?;
                Ok(BinaryPrice { price: scale * p.price, error: scale * p.error })
            }
        }
    }

    /// `factor × F(x, t)`.
    fn add_binary(&mut self, factor: f64, spec: &BinarySpec) -> Result<()> {
        let p = self.binary(spec)?;
        self.terms.push(factor * p.price);
        self.diag.cdf_error += factor.abs() * p.error;
        self.diag.terms += 1;
        Ok(())
    }

    /// `factor × ∫ g(τ) Σ c_k F_k(x, t; …, τ) dτ`.
    fn add_integral(&mut self, factor: f64, spec: &WeightedIntegralSpec) -> Result<()> {
        if spec.weight_rate() == 0.0 || factor == 0.0 {
            return Ok(());
        }
        let mut worst = 0.0f64;
        let r = integrate_weighted(
            spec,
            |tau| {
                let mut sum = 0.0;
                let mut err = 0.0;
                for (c, leg) in spec.legs() {
                    let p = self.binary(&leg.with_last_expiry(tau)?)?;
                    sum += c * p.price;
                    err += c.abs() * p.error;
                }
                worst = worst.max(err);
                Ok(sum)
            },
            &self.cfg.quad,
        )?;
        self.terms.push(factor * r.value);
        self.diag.quad_error += factor.abs() * r.error;
        self.diag.cdf_error += factor.abs() * worst * spec.weight_mass();
        self.diag.quad_converged &= r.converged;
        self.diag.terms += 1;
        Ok(())
    }

    /// `e^{-Λ(t, s)}` with the exponent accumulated before exponentiation.
    fn survival_factor(&self, s: f64) -> f64 {
        exp(-self.schedule.cumulative_hazard(self.t, s))
    }

    fn finish(self) -> RelativePrice {
        RelativePrice { value: crate::math::pairwise_sum(&self.terms), interval: self.interval, diagnostics: self.diag }
    }

    /// `e^{-Λ(t,T)} B^{+…+}_{K_{i+1}…K_N}(x, t; t_{i+1}, …, t_N)`.
    fn add_survival(&mut self) -> Result<()> {
        let n = self.schedule.len();
        let (expiries, strikes) = self.chain(n);
        let spec = self.spec(BinaryKind::Bond, strikes, expiries, Sign::Plus)?;
        let f = self.survival_factor(self.schedule.maturity());
        self.add_binary(f, &spec)
    }

    /// Intensity-recovery integrals over every interval from `i` on.
    fn add_intensity_recovery(&mut self, threshold: f64, ratio: f64) -> Result<()> {
        let i = self.interval;
        let n = self.schedule.len();
        let dates = self.schedule.dates.clone();
        let lambdas = self.schedule.intensities.clone();
        // Current interval: λ_i ∫_t^{t_{i+1}} e^{-λ_i(τ-t)} [B^+_{n/R} + (R/n) A^-_{n/R}](x,t;τ) dτ.
        let b = self.spec(BinaryKind::Bond, alloc::vec![threshold], alloc::vec![dates[i + 1]], Sign::Plus)?;
        let a = self.spec(BinaryKind::Asset, alloc::vec![threshold], alloc::vec![dates[i + 1]], Sign::Minus)?;
        let spec = WeightedIntegralSpec::new(b, lambdas[i], self.t, self.t, dates[i + 1])?.with_leg(ratio, a)?;
        self.add_integral(1.0, &spec)?;
        // Later intervals m: e^{-Λ(t,t_m)} λ_m ∫_{t_m}^{t_{m+1}} e^{-λ_m(τ-t_m)} [B^{+…+ +} + (R/n) A^{+…+ -}] dτ.
        for m in (i + 1)..n {
            let (mut expiries, mut strikes) = self.chain(m);
            expiries.push(dates[m + 1]);
            strikes.push(threshold);
            let b = self.spec(BinaryKind::Bond, strikes.clone(), expiries.clone(), Sign::Plus)?;
            let a = self.spec(BinaryKind::Asset, strikes, expiries, Sign::Minus)?;
            let spec =
                WeightedIntegralSpec::new(b, lambdas[m], dates[m], dates[m], dates[m + 1])?.with_leg(ratio, a)?;
            let f = self.survival_factor(dates[m]);
            self.add_integral(f, &spec)?;
        }
        Ok(())
    }
}

/// Relative price `u_i(x, t)` for endogenous recovery.
pub fn relative_price_endogenous(
    params: &MarketParams,
    schedule: &DefaultSchedule,
    recovery: &RecoveryModel,
    x: f64,
    t: f64,
    cfg: &PricerConfig,
) -> Result<RelativePrice> {
    recovery.validate()?;
    let RecoveryModel::Endogenous { rate, bonds } = *recovery else {
        bail!(Invalid, "endogenous pricing requires an endogenous recovery model");
    };
    let regime = detect_regime(schedule, rate, bonds)?;
    let mut asm = Assembler::new(params, schedule, x, t, cfg)?;
    let i = asm.interval;
    let n = schedule.len();
    let dates = schedule.dates.clone();
    match regime {
        Regime::NoRecovery => asm.add_survival()?,
        Regime::BarriersBelowThreshold => {
            let threshold = bonds / rate;
            let ratio = rate / bonds;
            asm.add_survival()?;
            // Barrier defaults: (R/n) e^{-Λ(t,t_{m+1})} A^{+…+ -}_{K_{i+1}…K_{m+1}}.
            for m in i..n {
                let (expiries, strikes) = asm.chain(m + 1);
                let spec = asm.spec(BinaryKind::Asset, strikes, expiries, Sign::Minus)?;
                let f = ratio * asm.survival_factor(dates[m + 1]);
                asm.add_binary(f, &spec)?;
            }
            asm.add_intensity_recovery(threshold, ratio)?;
        }
        Regime::BarriersAboveThreshold => {
            let threshold = bonds / rate;
            let ratio = rate / bonds;
            for m in i..n {
                let f = asm.survival_factor(dates[m + 1]);
                let (mut expiries, mut strikes) = asm.chain(m);
                expiries.push(dates[m + 1]);
                strikes.push(threshold);
                let b = asm.spec(BinaryKind::Bond, strikes.clone(), expiries.clone(), Sign::Plus)?;
                let a = asm.spec(BinaryKind::Asset, strikes, expiries, Sign::Minus)?;
                asm.add_binary(f, &b)?;
                asm.add_binary(f * ratio, &a)?;
                if m + 1 < n {
                    let (expiries, strikes) = asm.chain(m + 1);
                    let b = asm.spec(BinaryKind::Bond, strikes, expiries, Sign::Plus)?;
                    asm.add_binary(-f, &b)?;
                }
            }
            asm.add_intensity_recovery(threshold, ratio)?;
        }
    }
    Ok(asm.finish())
}

/// Survival probability `W_i(x, t)` of no default in `(t, T]`, with its CDF error.
pub fn survival_probability_with(
    params: &MarketParams,
    schedule: &DefaultSchedule,
    x: f64,
    t: f64,
    cfg: &PricerConfig,
) -> Result<RelativePrice> {
    let mut asm = Assembler::new(params, schedule, x, t, cfg)?;
    asm.add_survival()?;
    let mut out = asm.finish();
    out.value = out.value.clamp(0.0, 1.0);
    Ok(out)
}

/// Survival probability `W_i(x, t)` at relative firm value `x`.
pub fn survival_probability(params: &MarketParams, schedule: &DefaultSchedule, x: f64, t: f64) -> Result<f64> {
    survival_probability_with(params, schedule, x, t, &PricerConfig::default()).map(|w| w.value)
}

fn check_firm_value(v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        bail!(Domain, "firm value must be positive and finite, got {v}");
    }
    Ok(())
}

fn spread(relative_price: f64, horizon: f64) -> f64 {
    (-log(relative_price) / horizon).max(0.0)
}

/// Bond price with endogenous recovery at firm value `v`.
pub fn price_endogenous(
    params: &MarketParams,
    schedule: &DefaultSchedule,
    recovery: &RecoveryModel,
    v: f64,
    t: f64,
    cfg: &PricerConfig,
) -> Result<PriceReport> {
    check_firm_value(v)?;
    let riskless = riskless_bond(params, schedule, t)?;
    endogenous_report(params, schedule, recovery, v / riskless, t, cfg)
}

fn endogenous_report(
    params: &MarketParams,
    schedule: &DefaultSchedule,
    recovery: &RecoveryModel,
    x: f64,
    t: f64,
    cfg: &PricerConfig,
) -> Result<PriceReport> {
    let riskless = riskless_bond(params, schedule, t)?;
    let u = relative_price_endogenous(params, schedule, recovery, x, t, cfg)?;
    Ok(PriceReport {
        price: riskless * u.value,
        relative_price: u.value,
        relative_spot: x,
        riskless,
        survival_prob: None,
        credit_spread: spread(u.value, schedule.maturity() - t),
        interval_index: u.interval,
        diagnostics: u.diagnostics,
    })
}

/// Bond price with exogenous recovery at firm value `v`.
pub fn price_exogenous(
    params: &MarketParams,
    schedule: &DefaultSchedule,
    recovery: &RecoveryModel,
    v: f64,
    t: f64,
    cfg: &PricerConfig,
) -> Result<PriceReport> {
    check_firm_value(v)?;
    let riskless = riskless_bond(params, schedule, t)?;
    exogenous_report(params, schedule, recovery, v / riskless, t, cfg)
}

fn exogenous_report(
    params: &MarketParams,
    schedule: &DefaultSchedule,
    recovery: &RecoveryModel,
    x: f64,
    t: f64,
    cfg: &PricerConfig,
) -> Result<PriceReport> {
    recovery.validate()?;
    let RecoveryModel::Exogenous { rate } = *recovery else {
        bail!(Invalid, "exogenous pricing requires an exogenous recovery model");
    };
    let riskless = riskless_bond(params, schedule, t)?;
    let w = survival_probability_with(params, schedule, x, t, cfg)?;
    let relative = rate + (1.0 - rate) * w.value;
    let mut diagnostics = w.diagnostics;
    diagnostics.cdf_error *= 1.0 - rate;
    Ok(PriceReport {
        price: rate * riskless + (1.0 - rate) * w.value * riskless,
        relative_price: relative,
        relative_spot: x,
        riskless,
        survival_prob: Some(w.value),
        credit_spread: spread(relative, schedule.maturity() - t),
        interval_index: w.interval,
        diagnostics,
    })
}

/// How the firm value is quoted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Spot {
    /// Firm value `V`.
    Firm(f64),
    /// Relative firm value `x = V / e^{-r(T-t)}`.
    Relative(f64),
}

/// Price under either recovery model.
pub fn price(
    params: &MarketParams,
    schedule: &DefaultSchedule,
    recovery: &RecoveryModel,
    spot: Spot,
    t: f64,
    cfg: &PricerConfig,
) -> Result<PriceReport> {
    let riskless = riskless_bond(params, schedule, t)?;
    let x = match spot {
        Spot::Firm(v) => {
            check_firm_value(v)?;
            v / riskless
        }
        Spot::Relative(x) => x,
    };
    match recovery {
        RecoveryModel::Endogenous { .. } => endogenous_report(params, schedule, recovery, x, t, cfg),
        RecoveryModel::Exogenous { .. } => exogenous_report(params, schedule, recovery, x, t, cfg),
    }
}

/// Credit spread `-ln(C / e^{-r(T-t)}) / (T - t)`.
pub fn credit_spread(
    params: &MarketParams,
    schedule: &DefaultSchedule,
    recovery: &RecoveryModel,
    v: f64,
    t: f64,
    cfg: &PricerConfig,
) -> Result<f64> {
    if t >= schedule.maturity() {
        bail!(Domain, "credit spread is undefined at or after maturity (t={t})");
    }
    price(params, schedule, recovery, Spot::Firm(v), t, cfg).map(|r| r.credit_spread)
}

/// Default-free zero-coupon bond `e^{-r(T-t)}`.
pub fn riskless_bond(params: &MarketParams, schedule: &DefaultSchedule, t: f64) -> Result<f64> {
    locate_interval(schedule, t)?;
    Ok(exp(-params.r * (schedule.maturity() - t)))
}
