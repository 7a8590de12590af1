//! Monte Carlo oracle for the default mechanism.
//!
//! Firm value follows exact GBM steps between announcing dates. The unexpected
//! default time is drawn by inverting the cumulative step hazard, and the
//! barrier is tested at each announcing date. Paths are keyed by index on
//! their own ChaCha stream, and results are reduced in fixed-size blocks in
//! index order, so the estimate does not depend on how blocks are scheduled.

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::bail;
use crate::math::{exp, log, sqrt};
use crate::pricer::{locate_interval, DefaultSchedule, MarketParams, RecoveryModel};
use crate::Result;

/// Sampling units (paths, or antithetic pairs) per block.
pub const BLOCK_SIZE: u64 = 4096;

/// Simulation settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    /// Number of paths (rounded up to an even count with antithetic pairing).
    pub n_paths: u64,
    /// RNG seed.
    pub seed: u64,
    /// Bins per interval of the default-time histogram.
    pub steps_per_interval: usize,
    /// Pair each path with its mirror `Z → -Z`, `U → 1 - U`.
    pub antithetic: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig { n_paths: 1_000_000, seed: 20240101, steps_per_interval: 1, antithetic: true }
    }
}

impl SimConfig {
    /// Independent sampling units: pairs when antithetic, paths otherwise.
    pub fn units(&self) -> u64 {
        if self.antithetic {
            self.n_paths.div_ceil(2)
        } else {
            self.n_paths
        }
    }

    /// Number of blocks covering all units.
    pub fn blocks(&self) -> u64 {
        self.units().div_ceil(BLOCK_SIZE)
    }
}

/// Running moments of per-unit payoff and survival averages.
#[derive(Debug, Clone, PartialEq)]
pub struct PathStats {
    /// Units accumulated.
    pub count: u64,
    /// Mean discounted payoff.
    pub mean: f64,
    /// Sum of squared deviations of the payoff.
    pub m2: f64,
    /// Mean survival indicator.
    pub survival_mean: f64,
    /// Sum of squared deviations of the survival indicator.
    pub survival_m2: f64,
    /// Default counts per time bin.
    pub histogram: Vec<u64>,
}

impl PathStats {
    fn empty(bins: usize) -> Self {
        PathStats { count: 0, mean: 0.0, m2: 0.0, survival_mean: 0.0, survival_m2: 0.0, histogram: vec![0; bins] }
    }

    fn push(&mut self, payoff: f64, survived: f64) {
        self.count += 1;
        let n = self.count as f64;
        let d = payoff - self.mean;
        self.mean += d / n;
        self.m2 += d * (payoff - self.mean);
        let d = survived - self.survival_mean;
        self.survival_mean += d / n;
        self.survival_m2 += d * (survived - self.survival_mean);
    }

    /// Combine two disjoint samples.
    pub fn merge(&self, other: &PathStats) -> PathStats {
        if self.count == 0 {
            return other.clone();
        }
        if other.count == 0 {
            return self.clone();
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        let combine = |ma: f64, m2a: f64, mb: f64, m2b: f64| {
            let d = mb - ma;
            (ma + d * (nb / n), m2a + m2b + d * d * (na * nb / n))
        };
        let (mean, m2) = combine(self.mean, self.m2, other.mean, other.m2);
        let (survival_mean, survival_m2) =
            combine(self.survival_mean, self.survival_m2, other.survival_mean, other.survival_m2);
        let histogram = self.histogram.iter().zip(&other.histogram).map(|(a, b)| a + b).collect();
        PathStats { count: self.count + other.count, mean, m2, survival_mean, survival_m2, histogram }
    }

    /// Pairwise merge in slice order.
    pub fn reduce(parts: &[PathStats]) -> Option<PathStats> {
        match parts.len() {
            0 => None,
            1 => Some(parts[0].clone()),
            n => {
                let (a, b) = parts.split_at(n / 2);
                Some(Self::reduce(a)?.merge(&Self::reduce(b)?))
            }
        }
    }
}

/// Monte Carlo estimate with standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    /// Mean discounted payoff (bond price `C`).
    pub price: f64,
    /// Standard error of `price`.
    pub std_error: f64,
    /// Fraction of paths without default.
    pub survival_freq: f64,
    /// Standard error of `survival_freq`.
    pub survival_std_error: f64,
    /// Paths simulated.
    pub n_paths: u64,
    /// Default counts per time bin, `steps_per_interval` bins per remaining interval.
    pub default_histogram: Vec<u64>,
}

/// Validated simulation problem shared by all blocks.
#[derive(Debug, Clone)]
pub struct Simulator {
    params: MarketParams,
    recovery: RecoveryModel,
    v0: f64,
    t: f64,
    maturity: f64,
    /// Remaining dates `t, t_{i+1}, …, t_N`.
    dates: Vec<f64>,
    barriers: Vec<f64>,
    /// Cumulative hazard from `t` at each remaining date.
    hazard: Vec<f64>,
    intensities: Vec<f64>,
    config: SimConfig,
}

impl Simulator {
    /// Prepare a simulation from firm value `v0` at time `t`.
    pub fn new(
        params: &MarketParams,
        schedule: &DefaultSchedule,
        recovery: &RecoveryModel,
        v0: f64,
        t: f64,
        config: SimConfig,
    ) -> Result<Self> {
        recovery.validate()?;
        if !(v0 > 0.0) || !v0.is_finite() {
            bail!(Domain, "firm value must be positive and finite, got {v0}");
        }
        if config.n_paths == 0 {
            bail!(Invalid, "n_paths must be at least 1");
        }
        let i = locate_interval(schedule, t)?;
        let mut dates = vec![t];
        dates.extend_from_slice(&schedule.dates()[i + 1..]);
        let intensities = schedule.intensities()[i..].to_vec();
        let mut hazard = vec![0.0];
        for (k, lam) in intensities.iter().enumerate() {
            hazard.push(hazard[k] + lam * (dates[k + 1] - dates[k]));
        }
        Ok(Simulator {
            params: *params,
            recovery: *recovery,
            v0,
            t,
            maturity: schedule.maturity(),
            dates,
            barriers: schedule.barriers()[i..].to_vec(),
            hazard,
            intensities,
            config,
        })
    }

    fn bins(&self) -> usize {
        self.intensities.len() * self.config.steps_per_interval.max(1)
    }

    /// Discounted payoff and survival indicator of one path.
    fn path(&self, normals: &[f64], uniform: f64, hist: &mut [u64]) -> (f64, f64) {
        let MarketParams { r, b, s_v } = self.params;
        let drift = r - b - 0.5 * s_v * s_v;
        let riskless = exp(-r * (self.maturity - self.t));
        let exposure = -log(uniform);
        let pay = |v: f64, when: f64| match self.recovery {
            RecoveryModel::Exogenous { rate } => rate * riskless,
            RecoveryModel::Endogenous { rate, bonds } => riskless.min(rate * v * exp(-r * (when - self.t)) / bonds),
        };
        let mut v = self.v0;
        for k in 0..self.intensities.len() {
            let (t0, t1) = (self.dates[k], self.dates[k + 1]);
            if exposure < self.hazard[k + 1] {
                let theta = t0 + (exposure - self.hazard[k]) / self.intensities[k];
                let theta = theta.clamp(t0, t1);
                let dt = theta - t0;
                let v_theta = v * exp(drift * dt + s_v * sqrt(dt) * normals[normals.len() - 1]);
                self.record(hist, k, theta);
                return (pay(v_theta, theta), 0.0);
            }
            let dt = t1 - t0;
            v *= exp(drift * dt + s_v * sqrt(dt) * normals[k]);
            if v <= self.barriers[k] * exp(-r * (self.maturity - t1)) {
                self.record(hist, k, t1);
                return (pay(v, t1), 0.0);
            }
        }
        (riskless, 1.0)
    }

    fn record(&self, hist: &mut [u64], k: usize, when: f64) {
        let steps = self.config.steps_per_interval.max(1);
        let (t0, t1) = (self.dates[k], self.dates[k + 1]);
        let bin = (((when - t0) / (t1 - t0)) * steps as f64) as usize;
        hist[k * steps + bin.min(steps - 1)] += 1;
    }

    /// Simulate units `[start, end)`.
    pub fn simulate_range(&self, start: u64, end: u64) -> PathStats {
        let m = self.intensities.len() + 1;
        let mut stats = PathStats::empty(self.bins());
        let mut normals = vec![0.0; m];
        let mut mirrored = vec![0.0; m];
        let mut hist = vec![0u64; self.bins()];
        for unit in start..end.min(self.config.units()) {
            let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
            rng.set_stream(unit);
            for z in normals.iter_mut() {
                *z = StandardNormal.sample(&mut rng);
            }
            let u = ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64);
            let (p, s) = self.path(&normals, u, &mut hist);
            if self.config.antithetic {
                for (a, z) in mirrored.iter_mut().zip(&normals) {
                    *a = -z;
                }
                let (pm, sm) = self.path(&mirrored, 1.0 - u, &mut hist);
                stats.push(0.5 * (p + pm), 0.5 * (s + sm));
            } else {
                stats.push(p, s);
            }
        }
        stats.histogram = hist;
        stats
    }

    /// Simulate block `index` of `BLOCK_SIZE` units.
    pub fn simulate_block(&self, index: u64) -> PathStats {
        self.simulate_range(index * BLOCK_SIZE, (index + 1) * BLOCK_SIZE)
    }

    /// Turn reduced statistics into an estimate.
    pub fn finish(&self, stats: &PathStats) -> McEstimate {
        let n = stats.count as f64;
        let se = |m2: f64| if stats.count > 1 { sqrt(m2 / (n - 1.0) / n) } else { 0.0 };
        McEstimate {
            price: stats.mean,
            std_error: se(stats.m2),
            survival_freq: stats.survival_mean,
            survival_std_error: se(stats.survival_m2),
            n_paths: if self.config.antithetic { 2 * stats.count } else { stats.count },
            default_histogram: stats.histogram.clone(),
        }
    }

    /// Configuration in use.
    pub fn config(&self) -> &SimConfig {
        &self.config
    }
}

/// Sequential simulation of all blocks from firm value `v0` at time `t`.
pub fn simulate_price(
    params: &MarketParams,
    schedule: &DefaultSchedule,
    recovery: &RecoveryModel,
    v0: f64,
    t: f64,
    config: &SimConfig,
) -> Result<McEstimate> {
    let sim = Simulator::new(params, schedule, recovery, v0, t, *config)?;
    let blocks: Vec<PathStats> = (0..config.blocks()).map(|k| sim.simulate_block(k)).collect();
    let stats = PathStats::reduce(&blocks).unwrap_or_else(|| PathStats::empty(sim.bins()));
    Ok(sim.finish(&stats))
}
