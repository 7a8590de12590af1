//! Higher-order asset and bond binaries under Black–Scholes dynamics.
//!
//! An `m`-th order binary pays (cash 1 or the asset) at `T_m` provided that
//! `s_i x(T_i) > s_i K_i` held at every `T_i`. Its price is a discounted
//! `m`-variate normal probability.

use alloc::vec::Vec;

use crate::error::bail;
use crate::math::{exp, log, sqrt};
use crate::mvn::{self, MvnConfig, Sign, SignVector};
use crate::Result;

/// Largest supported order.
pub const MAX_ORDER: usize = 16;

/// Coefficients `(r, q, σ)` of the Black–Scholes operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsCoefficients {
    /// Risk-free rate.
    pub r: f64,
    /// Dividend rate.
    pub q: f64,
    /// Volatility.
    pub sigma: f64,
}

impl BsCoefficients {
    /// Validated constructor.
    pub fn new(r: f64, q: f64, sigma: f64) -> Result<Self> {
        if !r.is_finite() || !q.is_finite() {
            bail!(Domain, "rates must be finite (r={r}, q={q})");
        }
        if !(sigma > 0.0) || !sigma.is_finite() {
            bail!(Domain, "volatility must be positive and finite, got {sigma}");
        }
        Ok(BsCoefficients { r, q, sigma })
    }
}

/// What the binary pays when all conditions hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryKind {
    /// Asset-or-nothing.
    Asset,
    /// Cash-or-nothing paying 1.
    Bond,
}

/// A higher-order binary contract.
#[derive(Debug, Clone, PartialEq)]
pub struct BinarySpec {
    kind: BinaryKind,
    signs: SignVector,
    strikes: Vec<f64>,
    expiries: Vec<f64>,
    coeffs: BsCoefficients,
}

impl BinarySpec {
    /// Validates lengths, order, strikes and expiry ordering.
    ///
    /// A strike of `0` makes a `+` condition certain and a `-` condition
    /// impossible; `+∞` does the opposite.
    pub fn new(
        kind: BinaryKind,
        signs: SignVector,
        strikes: Vec<f64>,
        expiries: Vec<f64>,
        coeffs: BsCoefficients,
    ) -> Result<Self> {
        let m = signs.len();
        if m == 0 || strikes.len() != m || expiries.len() != m {
            bail!(
                Invalid,
                "binary needs matching non-empty signs/strikes/expiries ({} / {} / {})",
                m,
                strikes.len(),
                expiries.len()
            );
        }
        if m > MAX_ORDER {
            bail!(Invalid, "binary order {m} exceeds {MAX_ORDER}");
        }
        if let Some(k) = strikes.iter().find(|k| k.is_nan() || **k < 0.0) {
            bail!(Domain, "strikes must be non-negative, got {k}");
        }
        if expiries.iter().any(|e| !e.is_finite()) {
            bail!(Domain, "expiries must be finite");
        }
        for w in expiries.windows(2) {
            if w[1] <= w[0] {
                bail!(Schedule, "expiries must be strictly increasing ({} then {})", w[0], w[1]);
            }
        }
        Ok(BinarySpec { kind, signs, strikes, expiries, coeffs })
    }

    /// Convenience constructor with every sign `+`.
    pub fn all_plus(kind: BinaryKind, strikes: Vec<f64>, expiries: Vec<f64>, coeffs: BsCoefficients) -> Result<Self> {
        let m = strikes.len();
        Self::new(kind, SignVector::all_plus(m), strikes, expiries, coeffs)
    }

    /// Asset or bond.
    pub fn kind(&self) -> BinaryKind {
        self.kind
    }
    /// Sign vector.
    pub fn signs(&self) -> &SignVector {
        &self.signs
    }
    /// Strikes `K_1..K_m`.
    pub fn strikes(&self) -> &[f64] {
        &self.strikes
    }
    /// Expiries `T_1..T_m`.
    pub fn expiries(&self) -> &[f64] {
        &self.expiries
    }
    /// Operator coefficients.
    pub fn coeffs(&self) -> BsCoefficients {
        self.coeffs
    }
    /// Order `m`.
    pub fn order(&self) -> usize {
        self.signs.len()
    }
    /// `T_m`.
    pub fn last_expiry(&self) -> f64 {
        self.expiries[self.expiries.len() - 1]
    }

    /// Same contract with the last expiry moved to `tau`.
    pub fn with_last_expiry(&self, tau: f64) -> Result<Self> {
        let mut expiries = self.expiries.clone();
        let m = expiries.len();
        expiries[m - 1] = tau;
        Self::new(self.kind, self.signs.clone(), self.strikes.clone(), expiries, self.coeffs)
    }

    /// Same contract with the last sign replaced.
    pub fn with_last_sign(&self, sign: Sign) -> Self {
        let mut out = self.clone();
        let m = out.signs.0.len();
        out.signs.0[m - 1] = sign;
        out
    }

    /// Same contract with different operator coefficients.
    pub fn with_coeffs(&self, coeffs: BsCoefficients) -> Self {
        BinarySpec { coeffs, ..self.clone() }
    }

    /// Drop the last date (order must be at least 2).
    pub fn truncated(&self) -> Result<Self> {
        let m = self.order();
        if m < 2 {
            bail!(Invalid, "cannot drop the only date of a first-order binary");
        }
        Self::new(
            self.kind,
            SignVector(self.signs.0[..m - 1].to_vec()),
            self.strikes[..m - 1].to_vec(),
            self.expiries[..m - 1].to_vec(),
            self.coeffs,
        )
    }

    /// Discount factor multiplying the probability: `e^{-r(T_m-t)}` or `x e^{-q(T_m-t)}`.
    pub fn discount_bound(&self, x: f64, t: f64) -> f64 {
        let tau = self.last_expiry() - t;
        match self.kind {
            BinaryKind::Bond => exp(-self.coeffs.r * tau),
            BinaryKind::Asset => x * exp(-self.coeffs.q * tau),
        }
    }
}

/// Price with the error estimate inherited from the normal CDF.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinaryPrice {
    /// Price.
    pub price: f64,
    /// Absolute error estimate.
    pub error: f64,
}

/// `d_i^-` (bond) or `d_i^+` (asset) for every date.
pub fn d_values(spec: &BinarySpec, x: f64, t: f64) -> Vec<f64> {
    let BsCoefficients { r, q, sigma } = spec.coeffs;
    let half_var = match spec.kind {
        BinaryKind::Bond => -0.5 * sigma * sigma,
        BinaryKind::Asset => 0.5 * sigma * sigma,
    };
    spec.expiries
        .iter()
        .zip(&spec.strikes)
        .map(|(&expiry, &k)| {
            let tau = expiry - t;
            (log(x / k) + (r - q + half_var) * tau) / (sigma * sqrt(tau))
        })
        .collect()
}

/// Price of a higher-order binary at spot `x` and time `t < T_1`.
pub fn price_binary(spec: &BinarySpec, x: f64, t: f64) -> Result<f64> {
    price_binary_with(spec, x, t, &MvnConfig::default()).map(|p| p.price)
}

/// [`price_binary`] with an explicit CDF configuration and error estimate.
pub fn price_binary_with(spec: &BinarySpec, x: f64, t: f64, cfg: &MvnConfig) -> Result<BinaryPrice> {
    if !(x > 0.0) || !x.is_finite() {
        bail!(Domain, "spot must be positive and finite, got {x}");
    }
    if t.is_nan() || t >= spec.expiries[0] {
        bail!(Schedule, "evaluation time {t} must precede the first expiry {}", spec.expiries[0]);
    }
    let corr = mvn::build_correlation(t, &spec.expiries)?;
    let d = d_values(spec, x, t);
    let limits: Vec<f64> = d.iter().zip(spec.signs.iter()).map(|(&di, s)| s.value() * di).collect();
    let prob = mvn::mvn_cdf(&limits, &corr.covariance(), &spec.signs, cfg)?;
    let scale = spec.discount_bound(x, t);
    Ok(BinaryPrice { price: scale * prob.probability, error: scale * prob.error })
}

/// Move a binary to risk-free rate `new_r` keeping `q - r` and `σ` fixed.
///
/// Returns `(scale, shifted)` with `price(spec) = scale · price(shifted)`.
pub fn shift_coefficients(spec: &BinarySpec, new_r: f64, t: f64) -> Result<(f64, BinarySpec)> {
    let c = spec.coeffs;
    let shifted = BsCoefficients::new(new_r, new_r + (c.q - c.r), c.sigma)?;
    let scale = exp(-(c.r - new_r) * (spec.last_expiry() - t));
    Ok((scale, spec.with_coeffs(shifted)))
}
