//! Univariate, bivariate and multivariate standard normal distribution functions.
//!
//! Dimension one uses `erfc`, dimension two the Drezner–Wesolowsky/Genz
//! Gauss–Legendre reduction, and higher dimensions a randomized Richtmyer
//! lattice rule applied to the separation-of-variables form of the integral
//! (Genz's method) with variable prioritisation. Infinite limits and perfectly
//! correlated pairs are removed before any integration happens.

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::bail;
use crate::math::{asin, exp, fabs, norm_cdf, norm_inv, sin, sqrt, CDF_SATURATION};
use crate::quadrature::{integrate, QuadConfig};
use crate::{Error, Result};

/// Smallest correlation eigenvalue below which two coordinates are merged.
pub const DEGENERACY_EIGENVALUE: f64 = 1e-10;

/// Direction of one inequality in a chained binary condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    /// `x > K` (upper tail in the price variable).
    Plus,
    /// `x < K`.
    Minus,
}

impl Sign {
    /// `+1.0` or `-1.0`.
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    /// Parse `+1` / `-1`.
    pub fn from_int(v: i32) -> Result<Self> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => bail!(Invalid, "sign must be +1 or -1, got {other}"),
        }
    }
}

/// A sequence of signs `s_1..s_m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignVector(pub Vec<Sign>);

impl SignVector {
    /// All signs `+`.
    pub fn all_plus(m: usize) -> Self {
        SignVector(vec![Sign::Plus; m])
    }

    /// Build from `±1` integers.
    pub fn from_ints(values: &[i32]) -> Result<Self> {
        values.iter().map(|&v| Sign::from_int(v)).collect::<Result<Vec<_>>>().map(SignVector)
    }

    /// Length `m`.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// True when there are no signs.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Iterate over the signs.
    pub fn iter(&self) -> impl Iterator<Item = Sign> + '_ {
        self.0.iter().copied()
    }
}

/// Dense symmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// `n × n` zero matrix.
    pub fn zeros(n: usize) -> Self {
        SymMatrix { n, data: vec![0.0; n * n] }
    }

    /// Identity matrix.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Build from rows. Fails when the rows are ragged or the matrix is not symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                bail!(Invalid, "covariance row {i} has length {} (expected {n})", row.len());
            }
            for (j, &v) in row.iter().enumerate() {
                m.data[i * n + j] = v;
            }
        }
        for i in 0..n {
            for j in 0..i {
                let (a, b) = (m.get(i, j), m.get(j, i));
                if fabs(a - b) > 1e-12 * (1.0 + fabs(a)) {
                    bail!(Invalid, "covariance is not symmetric at ({i}, {j})");
                }
            }
        }
        Ok(m)
    }

    /// Dimension.
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Entry `(i, j)`.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Set `(i, j)` and `(j, i)`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    /// Matrix product (the result is generally not symmetric, so it is returned as rows).
    pub fn mul(&self, other: &SymMatrix) -> Vec<Vec<f64>> {
        let n = self.n;
        (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| self.get(i, k) * other.get(k, j)).sum()).collect()).collect()
    }

    /// Principal submatrix on `keep` (in that order).
    pub fn submatrix(&self, keep: &[usize]) -> SymMatrix {
        let mut m = SymMatrix::zeros(keep.len());
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                m.data[a * keep.len() + b] = self.get(i, j);
            }
        }
        m
    }

    /// Eigenvalues by cyclic Jacobi rotations, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let n = self.n;
        let mut a = self.data.clone();
        for _sweep in 0..100 {
            let mut off = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    off += a[i * n + j] * a[i * n + j];
                }
            }
            if off < 1e-30 {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[p * n + q];
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                    let t = theta.signum() / (fabs(theta) + sqrt(theta * theta + 1.0));
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / sqrt(t * t + 1.0);
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[k * n + p];
                        let akq = a[k * n + q];
                        a[k * n + p] = c * akp - s * akq;
                        a[k * n + q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[p * n + k];
                        let aqk = a[q * n + k];
                        a[p * n + k] = c * apk - s * aqk;
                        a[q * n + k] = s * apk + c * aqk;
                    }
                }
            }
        }
        let mut ev: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

/// Correlation structure of the log-spot at a chain of expiries seen from time `t`.
///
/// Coordinate `i` is the standardized Brownian value at `T_i`, so the
/// covariance is `r_ij = sqrt((T_i - t)/(T_j - t))` for `i <= j` and its
/// inverse is tridiagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationStructure {
    t: f64,
    expiries: Vec<f64>,
}

impl CorrelationStructure {
    /// Evaluation time.
    pub fn eval_time(&self) -> f64 {
        self.t
    }

    /// Expiries `T_1 < … < T_m`.
    pub fn expiries(&self) -> &[f64] {
        &self.expiries
    }

    /// Dimension `m`.
    pub fn dim(&self) -> usize {
        self.expiries.len()
    }

    /// Covariance `(r_ij)`.
    pub fn covariance(&self) -> SymMatrix {
        let m = self.dim();
        let mut c = SymMatrix::zeros(m);
        for i in 0..m {
            c.set(i, i, 1.0);
            for j in (i + 1)..m {
                c.set(i, j, sqrt((self.expiries[i] - self.t) / (self.expiries[j] - self.t)));
            }
        }
        c
    }

    /// Tridiagonal precision matrix `(a_ij)`, the inverse of [`Self::covariance`].
    pub fn precision(&self) -> SymMatrix {
        let m = self.dim();
        let tau: Vec<f64> = self.expiries.iter().map(|&e| e - self.t).collect();
        let mut a = SymMatrix::zeros(m);
        if m == 1 {
            a.set(0, 0, 1.0);
            return a;
        }
        let gap = |i: usize| self.expiries[i + 1] - self.expiries[i];
        a.set(0, 0, tau[1] / gap(0));
        a.set(m - 1, m - 1, tau[m - 1] / gap(m - 2));
        for (i, &ti) in tau.iter().enumerate().take(m - 1).skip(1) {
            a.set(i, i, ti / gap(i - 1) + ti / gap(i));
        }
        for i in 0..m - 1 {
            a.set(i, i + 1, -sqrt(tau[i] * tau[i + 1]) / gap(i));
        }
        a
    }
}

/// Build the correlation structure for `t < T_1 < … < T_m`.
pub fn build_correlation(t: f64, expiries: &[f64]) -> Result<CorrelationStructure> {
    if expiries.is_empty() {
        bail!(Invalid, "at least one expiry is required");
    }
    if !t.is_finite() || expiries.iter().any(|e| !e.is_finite()) {
        bail!(Domain, "times must be finite");
    }
    if t >= expiries[0] {
        bail!(Schedule, "evaluation time {t} must precede the first expiry {}", expiries[0]);
    }
    for w in expiries.windows(2) {
        if w[1] <= w[0] {
            bail!(Schedule, "expiries must be strictly increasing ({} then {})", w[0], w[1]);
        }
    }
    Ok(CorrelationStructure { t, expiries: expiries.to_vec() })
}

/// Standard normal CDF with a domain check.
pub fn std_normal_cdf(x: f64) -> Result<f64> {
    if x.is_nan() {
        bail!(Domain, "normal CDF argument is NaN");
    }
    Ok(norm_cdf(x))
}

// Half sets of Gauss-Legendre nodes/weights on [-1, 1] (negative nodes).
const GL6: [(f64, f64); 3] = [
    (-0.932_469_514_203_152, 0.171_324_492_379_169_75),
    (-0.661_209_386_466_264_5, 0.360_761_573_048_138_94),
    (-0.238_619_186_083_196_93, 0.467_913_934_572_691_37),
];
const GL12: [(f64, f64); 6] = [
    (-0.981_560_634_246_719_2, 0.047_175_336_386_512_02),
    (-0.904_117_256_370_474_8, 0.106_939_325_995_318_88),
    (-0.769_902_674_194_304_7, 0.160_078_328_543_346_1),
    (-0.587_317_954_286_617_5, 0.203_167_426_723_065_65),
    (-0.367_831_498_998_180_2, 0.233_492_536_538_354_64),
    (-0.125_233_408_511_468_9, 0.249_147_045_813_402_7),
];
const GL20: [(f64, f64); 10] = [
    (-0.993_128_599_185_094_9, 0.017_614_007_139_153_273),
    (-0.963_971_927_277_913_8, 0.040_601_429_800_386_22),
    (-0.912_234_428_251_325_8, 0.062_672_048_334_109_44),
    (-0.839_116_971_822_218_8, 0.083_276_741_576_704_67),
    (-0.746_331_906_460_150_8, 0.101_930_119_817_240_26),
    (-0.636_053_680_726_515, 0.118_194_531_961_518_25),
    (-0.510_867_001_950_827_1, 0.131_688_638_449_176_53),
    (-0.373_706_088_715_419_55, 0.142_096_109_318_381_87),
    (-0.227_785_851_141_645_1, 0.149_172_986_472_603_66),
    (-0.076_526_521_133_497_34, 0.152_753_387_130_725_78),
];

const TWO_PI: f64 = core::f64::consts::TAU;

/// `P(X > h, Y > k)` for standard normals with correlation `r`, `|r| <= 1`.
fn bvn_upper(h: f64, k: f64, r: f64) -> f64 {
    if h == f64::INFINITY || k == f64::INFINITY {
        return 0.0;
    }
    if h == f64::NEG_INFINITY {
        return norm_cdf(-k);
    }
    if k == f64::NEG_INFINITY {
        return norm_cdf(-h);
    }
    let quad: &[(f64, f64)] = if fabs(r) < 0.3 {
        &GL6
    } else if fabs(r) < 0.75 {
        &GL12
    } else {
        &GL20
    };
    let mut hk = h * k;
    let mut bvn = 0.0;
    if fabs(r) < 0.925 {
        let hs = (h * h + k * k) / 2.0;
        let asr = asin(r);
        for &(x, w) in quad {
            let sn = sin(asr * (x + 1.0) / 2.0);
            bvn += w * exp((sn * hk - hs) / (1.0 - sn * sn));
            let sn = sin(asr * (1.0 - x) / 2.0);
            bvn += w * exp((sn * hk - hs) / (1.0 - sn * sn));
        }
        return bvn * asr / (2.0 * TWO_PI) + norm_cdf(-h) * norm_cdf(-k);
    }
    let mut k = k;
    if r < 0.0 {
        k = -k;
        hk = -hk;
    }
    if fabs(r) < 1.0 {
        let as_ = (1.0 - r) * (1.0 + r);
        let mut a = sqrt(as_);
        let bs = (h - k) * (h - k);
        let c = (4.0 - hk) / 8.0;
        let d = (12.0 - hk) / 16.0;
        bvn = a
            * exp(-(bs / as_ + hk) / 2.0)
            * (1.0 - c * (bs - as_) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as_ * as_ / 5.0);
        if hk > -160.0 {
            let b = sqrt(bs);
            bvn -= exp(-hk / 2.0) * sqrt(TWO_PI) * norm_cdf(-b / a) * b * (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
        }
        a /= 2.0;
        for &(x, w) in quad {
            for is in [-1.0, 1.0] {
                let xs = (a * (is * x + 1.0)) * (a * (is * x + 1.0));
                let rs = sqrt(1.0 - xs);
                let asr = -(bs / xs + hk) / 2.0;
                if asr > -100.0 {
                    bvn += a
                        * w
                        * exp(asr)
                        * (exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs - (1.0 + c * xs * (1.0 + d * xs)));
                }
            }
        }
        bvn = -bvn / TWO_PI;
    }
    if r > 0.0 {
        bvn + norm_cdf(-h.max(k))
    } else {
        bvn = -bvn;
        if k > h {
            if h < 0.0 {
                bvn += norm_cdf(k) - norm_cdf(h);
            } else {
                bvn += norm_cdf(-h) - norm_cdf(-k);
            }
        }
        bvn
    }
}

/// `P(X <= a, Y <= b)` for standard normals with correlation `rho`.
///
/// Accurate to about `1e-15` absolute; `±∞` limits are accepted.
pub fn bivariate_cdf(a: f64, b: f64, rho: f64) -> Result<f64> {
    if a.is_nan() || b.is_nan() || rho.is_nan() {
        bail!(Domain, "bivariate CDF argument is NaN");
    }
    if fabs(rho) > 1.0 + 1e-12 {
        bail!(Domain, "correlation {rho} outside [-1, 1]");
    }
    Ok(bvn_lower(a, b, rho.clamp(-1.0, 1.0)))
}

#[inline]
fn bvn_lower(a: f64, b: f64, rho: f64) -> f64 {
    bvn_upper(-a, -b, rho).clamp(0.0, 1.0)
}

/// Configuration of the lattice rule used for three or more dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MvnConfig {
    /// Seed of the random shifts.
    pub seed: u64,
    /// Lattice points per shift on the first pass.
    pub base_points: usize,
    /// Number of independent random shifts.
    pub shifts: usize,
    /// Target for the reported error estimate.
    pub abs_tol: f64,
    /// Largest lattice size per shift.
    pub max_points: usize,
}

impl Default for MvnConfig {
    fn default() -> Self {
        MvnConfig { seed: 0x5eed_b1a5, base_points: 1 << 13, shifts: 12, abs_tol: 1e-7, max_points: 1 << 20 }
    }
}

/// A probability together with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MvnValue {
    /// Estimated probability.
    pub probability: f64,
    /// Error estimate (3.5 standard errors for the lattice rule).
    pub error: f64,
}

const UNIVARIATE_ERROR: f64 = 1e-16;
const BIVARIATE_ERROR: f64 = 1e-15;
const ERROR_MULTIPLIER: f64 = 3.5;
const TRIVARIATE_TOL: f64 = 1e-14;

/// `N_m(a; (s_i s_j Σ_ij))`: the probability that `s_i Z_i <= a_i` for all `i`,
/// where `Z` is centred normal with covariance `cov`.
pub fn mvn_cdf(a: &[f64], cov: &SymMatrix, signs: &SignVector, cfg: &MvnConfig) -> Result<MvnValue> {
    let m = a.len();
    if cov.dim() != m || signs.len() != m {
        bail!(Invalid, "dimension mismatch: {m} limits, {}x{} covariance, {} signs", cov.dim(), cov.dim(), signs.len());
    }
    let mut lower = Vec::with_capacity(m);
    let mut upper = Vec::with_capacity(m);
    for (&ai, s) in a.iter().zip(signs.iter()) {
        match s {
            Sign::Plus => {
                lower.push(f64::NEG_INFINITY);
                upper.push(ai);
            }
            Sign::Minus => {
                lower.push(-ai);
                upper.push(f64::INFINITY);
            }
        }
    }
    box_probability(&lower, &upper, cov, cfg)
}

/// `P(lower_i < Z_i <= upper_i ∀i)` for `Z` centred normal with covariance `cov`.
pub fn box_probability(lower: &[f64], upper: &[f64], cov: &SymMatrix, cfg: &MvnConfig) -> Result<MvnValue> {
    let m = lower.len();
    if upper.len() != m || cov.dim() != m {
        bail!(Invalid, "dimension mismatch in box probability");
    }
    if lower.iter().chain(upper).any(|v| v.is_nan()) {
        bail!(Domain, "NaN integration limit");
    }
    let mut lo = Vec::with_capacity(m);
    let mut hi = Vec::with_capacity(m);
    for i in 0..m {
        let var = cov.get(i, i);
        if !(var > 0.0) || !var.is_finite() {
            bail!(Domain, "covariance diagonal entry {i} is {var}");
        }
        let sd = sqrt(var);
        lo.push(saturate(lower[i] / sd));
        hi.push(saturate(upper[i] / sd));
    }
    let mut corr = SymMatrix::zeros(m);
    for i in 0..m {
        corr.set(i, i, 1.0);
        for j in (i + 1)..m {
            let rho = cov.get(i, j) / sqrt(cov.get(i, i) * cov.get(j, j));
            if fabs(rho) > 1.0 + 1e-12 {
                bail!(Domain, "correlation {rho} between coordinates {i} and {j} exceeds 1");
            }
            corr.set(i, j, rho.clamp(-1.0, 1.0));
        }
    }
    standard_box(lo, hi, corr, cfg)
}

#[inline]
fn saturate(x: f64) -> f64 {
    if x >= CDF_SATURATION {
        f64::INFINITY
    } else if x <= -CDF_SATURATION {
        f64::NEG_INFINITY
    } else {
        x
    }
}

/// Box probability for a correlation matrix with saturated limits.
fn standard_box(mut lo: Vec<f64>, mut hi: Vec<f64>, mut corr: SymMatrix, cfg: &MvnConfig) -> Result<MvnValue> {
    loop {
        if lo.iter().zip(&hi).any(|(l, h)| l >= h) {
            return Ok(MvnValue { probability: 0.0, error: 0.0 });
        }
        // Unbounded coordinates integrate out.
        let keep: Vec<usize> =
            (0..lo.len()).filter(|&i| lo[i] != f64::NEG_INFINITY || hi[i] != f64::INFINITY).collect();
        if keep.len() < lo.len() {
            lo = keep.iter().map(|&i| lo[i]).collect();
            hi = keep.iter().map(|&i| hi[i]).collect();
            corr = corr.submatrix(&keep);
        }
        let m = lo.len();
        if m <= 2 {
            break;
        }
        let lambda_min = corr.eigenvalues()[0];
        if lambda_min >= DEGENERACY_EIGENVALUE {
            break;
        }
        let (mut bi, mut bj, mut best) = (0, 1, -1.0);
        for i in 0..m {
            for j in (i + 1)..m {
                if fabs(corr.get(i, j)) > best {
                    best = fabs(corr.get(i, j));
                    bi = i;
                    bj = j;
                }
            }
        }
        if 1.0 - best > 1e-8 {
            return Err(Error::NotPositiveDefinite { eigenvalue: lambda_min });
        }
        // Z_j = ±Z_i: intersect the two intervals on Z_i and drop j.
        if corr.get(bi, bj) > 0.0 {
            lo[bi] = lo[bi].max(lo[bj]);
            hi[bi] = hi[bi].min(hi[bj]);
        } else {
            lo[bi] = lo[bi].max(-hi[bj]);
            hi[bi] = hi[bi].min(-lo[bj]);
        }
        let keep: Vec<usize> = (0..m).filter(|&k| k != bj).collect();
        lo = keep.iter().map(|&i| lo[i]).collect();
        hi = keep.iter().map(|&i| hi[i]).collect();
        corr = corr.submatrix(&keep);
    }
    match lo.len() {
        0 => Ok(MvnValue { probability: 1.0, error: 0.0 }),
        1 => Ok(MvnValue { probability: interval_1d(lo[0], hi[0]), error: UNIVARIATE_ERROR }),
        2 => Ok(MvnValue { probability: box_2d(lo[0], hi[0], lo[1], hi[1], corr.get(0, 1)), error: BIVARIATE_ERROR }),
        3 => box_3d(&lo, &hi, &corr),
        _ => lattice_box(&lo, &hi, &corr, cfg),
    }
}

/// Three-dimensional box by adaptive quadrature of the conditional bivariate
/// box over the least correlated coordinate.
fn box_3d(lo: &[f64], hi: &[f64], corr: &SymMatrix) -> Result<MvnValue> {
    let max_corr = |k: usize| (0..3).filter(|&j| j != k).map(|j| fabs(corr.get(k, j))).fold(0.0, f64::max);
    let k = (0..3).min_by(|&a, &b| max_corr(a).total_cmp(&max_corr(b))).unwrap_or(0);
    let (i, j) = match k {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    let (rik, rjk) = (corr.get(i, k), corr.get(j, k));
    let (si, sj) = (sqrt(1.0 - rik * rik), sqrt(1.0 - rjk * rjk));
    let rho = ((corr.get(i, j) - rik * rjk) / (si * sj)).clamp(-1.0, 1.0);
    let (mut a, mut b) = (lo[k].max(-CDF_SATURATION), hi[k].min(CDF_SATURATION));
    if b < -8.0 {
        a = a.max(b - 12.0);
    } else if a > 8.0 {
        b = b.min(a + 12.0);
    } else {
        a = a.max(-12.0);
        b = b.min(12.0);
    }
    if a >= b {
        return Ok(MvnValue { probability: 0.0, error: 0.0 });
    }
    let scale = |v: f64, r: f64, s: f64, z: f64| if v.is_infinite() { v } else { (v - r * z) / s };
    let cfg = QuadConfig { abs_tol: TRIVARIATE_TOL, max_subdivisions: 4096 };
    let r = integrate(
        |z| {
            let (li, hi_) = (scale(lo[i], rik, si, z), scale(hi[i], rik, si, z));
            let (lj, hj) = (scale(lo[j], rjk, sj, z), scale(hi[j], rjk, sj, z));
            let inner = if li >= hi_ || lj >= hj { 0.0 } else { box_2d(li, hi_, lj, hj, rho) };
            Ok(crate::math::norm_pdf(z) * inner)
        },
        a,
        b,
        &cfg,
    )?;
    Ok(MvnValue { probability: r.value.clamp(0.0, 1.0), error: r.error + BIVARIATE_ERROR })
}

fn interval_1d(lo: f64, hi: f64) -> f64 {
    if lo == f64::NEG_INFINITY {
        norm_cdf(hi)
    } else if hi == f64::INFINITY {
        norm_cdf(-lo)
    } else if lo >= 0.0 {
        norm_cdf(-lo) - norm_cdf(-hi)
    } else {
        norm_cdf(hi) - norm_cdf(lo)
    }
}

fn box_2d(lo1: f64, hi1: f64, lo2: f64, hi2: f64, rho: f64) -> f64 {
    // Reflect one-sided lower limits into upper limits.
    let (mut l1, mut h1, mut l2, mut h2, mut r) = (lo1, hi1, lo2, hi2, rho);
    if h1 == f64::INFINITY {
        (l1, h1) = (f64::NEG_INFINITY, -l1);
        r = -r;
    }
    if h2 == f64::INFINITY {
        (l2, h2) = (f64::NEG_INFINITY, -l2);
        r = -r;
    }
    let f = |a: f64, b: f64| if a == f64::NEG_INFINITY || b == f64::NEG_INFINITY { 0.0 } else { bvn_lower(a, b, r) };
    (f(h1, h2) - f(l1, h2) - f(h1, l2) + f(l1, l2)).clamp(0.0, 1.0)
}

/// Rank-1 lattice generating vectors for prime point counts just below
/// `2^13 … 2^20`, from a component-by-component search with product weights
/// `γ_j = 1/j²` (see `scripts/lattice_cbc.py`).
const LATTICES: [(u32, [u32; 15]); 8] = [
    (8191, [1936, 4782, 7537, 5416, 7946, 4939, 4663, 8155, 5185, 5424, 3865, 3615, 5809, 7098, 4481]),
    (16381, [1, 12670, 6101, 1682, 4942, 1997, 10776, 2974, 11631, 14081, 2904, 10735, 14617, 12969, 9960]),
    (32749, [11881, 4467, 17349, 32448, 23986, 10704, 17166, 17714, 5399, 46, 27708, 14202, 3116, 11717, 16753]),
    (65521, [24151, 18227, 32187, 13399, 30409, 48935, 53604, 689, 52594, 31337, 18742, 14009, 63814, 18346, 31769]),
    (
        131071,
        [118912, 86490, 46818, 87172, 45410, 34104, 16540, 8190, 25440, 37795, 9371, 125883, 79067, 11091, 126822],
    ),
    (
        262139,
        [180313, 177286, 97803, 88767, 91930, 133292, 71870, 10779, 30488, 185805, 27016, 210400, 135264, 97532, 79773],
    ),
    (
        524287,
        [
            432859, 77693, 13328, 480197, 407278, 311248, 4549, 26069, 132989, 43285, 114186, 157177, 454045, 307493,
            400062,
        ],
    ),
    (
        1048573,
        [
            241414, 802465, 1040915, 823026, 814518, 942702, 317607, 569631, 963548, 964378, 419997, 213964, 906564,
            942014, 232378,
        ],
    ),
];

/// Cholesky factor with Genz–Bretz variable prioritisation.
struct Ordered {
    lo: Vec<f64>,
    hi: Vec<f64>,
    /// Lower-triangular factor, row-major `m × m`.
    chol: Vec<f64>,
}

fn prioritised_cholesky(lo: &[f64], hi: &[f64], corr: &SymMatrix) -> Result<Ordered> {
    let m = lo.len();
    let mut c = corr.data.clone();
    let mut lo = lo.to_vec();
    let mut hi = hi.to_vec();
    let mut y = vec![0.0; m];
    for i in 0..m {
        // Pick the remaining variable with the smallest conditional interval probability.
        let mut best = i;
        let mut best_p = f64::INFINITY;
        for j in i..m {
            let s: f64 = (0..i).map(|k| c[j * m + k] * y[k]).sum();
            let var = c[j * m + j] - (0..i).map(|k| c[j * m + k] * c[j * m + k]).sum::<f64>();
            let sd = sqrt(var.max(1e-300));
            let p = interval_1d(saturate((lo[j] - s) / sd), saturate((hi[j] - s) / sd));
            if p < best_p {
                best_p = p;
                best = j;
            }
        }
        if best != i {
            lo.swap(i, best);
            hi.swap(i, best);
            for k in 0..m {
                c.swap(i * m + k, best * m + k);
            }
            for k in 0..m {
                c.swap(k * m + i, k * m + best);
            }
        }
        let var = c[i * m + i] - (0..i).map(|k| c[i * m + k] * c[i * m + k]).sum::<f64>();
        if !(var > 0.0) {
            let lambda = corr.eigenvalues()[0];
            return Err(Error::NotPositiveDefinite { eigenvalue: lambda });
        }
        let d = sqrt(var);
        c[i * m + i] = d;
        for r in (i + 1)..m {
            let v = c[r * m + i] - (0..i).map(|k| c[r * m + k] * c[i * m + k]).sum::<f64>();
            c[r * m + i] = v / d;
        }
        // Zero the upper part of row i so the factor reads as lower-triangular.
        for k in (i + 1)..m {
            c[i * m + k] = 0.0;
        }
        let s: f64 = (0..i).map(|k| c[i * m + k] * y[k]).sum();
        let a = saturate((lo[i] - s) / d);
        let b = saturate((hi[i] - s) / d);
        let p = interval_1d(a, b);
        y[i] = if p > 1e-300 {
            (phi_or_zero(a) - phi_or_zero(b)) / p
        } else if a.is_finite() {
            a
        } else {
            b
        };
    }
    Ok(Ordered { lo, hi, chol: c })
}

fn phi_or_zero(x: f64) -> f64 {
    if x.is_finite() {
        crate::math::norm_pdf(x)
    } else {
        0.0
    }
}

fn sov_integrand(o: &Ordered, w: &[f64], y: &mut [f64]) -> f64 {
    let m = o.lo.len();
    let mut f = 1.0;
    for i in 0..m {
        let row = &o.chol[i * m..i * m + m];
        let s: f64 = (0..i).map(|k| row[k] * y[k]).sum();
        let d = row[i];
        let a = (o.lo[i] - s) / d;
        let b = (o.hi[i] - s) / d;
        let pa = if a <= -CDF_SATURATION { 0.0 } else { norm_cdf(a) };
        let pb = if b >= CDF_SATURATION { 1.0 } else { norm_cdf(b) };
        let width = pb - pa;
        if width <= 0.0 {
            return 0.0;
        }
        f *= width;
        if i + 1 < m {
            y[i] = norm_inv(pa + w[i] * width).clamp(-CDF_SATURATION, CDF_SATURATION);
        }
    }
    f
}

fn lattice_box(lo: &[f64], hi: &[f64], corr: &SymMatrix, cfg: &MvnConfig) -> Result<MvnValue> {
    let m = lo.len();
    if m - 1 > LATTICES[0].1.len() {
        bail!(Invalid, "dimension {m} exceeds the lattice rule capacity");
    }
    let ordered = prioritised_cholesky(lo, hi, corr)?;
    let shifts = cfg.shifts.max(2);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let deltas: Vec<Vec<f64>> =
        (0..shifts).map(|_| (0..m - 1).map(|_| unit_uniform(rng.next_u64())).collect()).collect();

    // Lattice sizes are the primes just below 2^13, 2^14, ... within the budget.
    let sizes: Vec<&(u32, [u32; 15])> = LATTICES
        .iter()
        .filter(|(n, _)| (*n as usize + 1).next_power_of_two() >= cfg.base_points.min(1 << 20))
        .collect();
    let mut w = vec![0.0; m - 1];
    let mut y = vec![0.0; m];
    let mut best = MvnValue { probability: 0.0, error: f64::INFINITY };
    for (step, (n, z)) in sizes.iter().enumerate() {
        let n = *n as usize;
        let inv_n = 1.0 / n as f64;
        let mut means = Vec::with_capacity(shifts);
        for delta in &deltas {
            let mut block = Vec::with_capacity(n / 256 + 1);
            let mut acc = 0.0;
            // idx[k] = j·z_k mod n, advanced incrementally.
            let mut idx = vec![0u32; m - 1];
            for j in 0..n {
                for k in 0..m - 1 {
                    let x = f64::from(idx[k]) * inv_n + delta[k];
                    idx[k] += z[k];
                    if idx[k] >= n as u32 {
                        idx[k] -= n as u32;
                    }
                    let x = if x >= 1.0 { x - 1.0 } else { x };
                    w[k] = fabs(2.0 * x - 1.0);
                }
                acc += sov_integrand(&ordered, &w, &mut y);
                if (j + 1) % 256 == 0 {
                    block.push(acc);
                    acc = 0.0;
                }
            }
            block.push(acc);
            means.push(crate::math::pairwise_sum(&block) * inv_n);
        }
        let k = shifts as f64;
        let mean = crate::math::pairwise_sum(&means) / k;
        let var = means.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (k * (k - 1.0));
        best = MvnValue { probability: mean.clamp(0.0, 1.0), error: ERROR_MULTIPLIER * sqrt(var) };
        let last = step + 1 == sizes.len() || (sizes[step + 1].0 as usize + 1).next_power_of_two() > cfg.max_points;
        if best.error <= cfg.abs_tol || last {
            break;
        }
    }
    Ok(best)
}

#[inline]
fn unit_uniform(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
