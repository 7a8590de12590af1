//! Globally adaptive 15-point Gauss–Kronrod quadrature.
//!
//! The rule never evaluates the integrand at a panel endpoint, which matters
//! for the integrals of binaries whose covariance degenerates at the ends.

use alloc::vec::Vec;

use crate::error::bail;
use crate::math::{fabs, pairwise_sum};
use crate::Result;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_64, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// Stopping rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    /// Absolute tolerance on the summed error estimate.
    pub abs_tol: f64,
    /// Maximum number of bisections.
    pub max_subdivisions: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { abs_tol: 1e-8, max_subdivisions: 1 << 12 }
    }
}

/// Integral with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    /// Estimated integral.
    pub value: f64,
    /// Sum of the per-panel `|K15 - G7|` estimates.
    pub error: f64,
    /// Number of bisections performed.
    pub subdivisions: usize,
    /// Whether the tolerance was met.
    pub converged: bool,
}

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk15<F: FnMut(f64) -> Result<f64>>(f: &mut F, a: f64, b: f64) -> Result<Panel> {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre)?;
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(centre - dx)? + f(centre + dx)?;
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Ok(Panel { a, b, value: kronrod * half, error: fabs((kronrod - gauss) * half) })
}

/// Integrate `f` over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> Result<f64>>(mut f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<QuadResult> {
    if !a.is_finite() || !b.is_finite() {
        bail!(Domain, "integration bounds must be finite ({a}, {b})");
    }
    if a == b {
        return Ok(QuadResult { value: 0.0, error: 0.0, subdivisions: 0, converged: true });
    }
    if b < a {
        let mut r = integrate(f, b, a, cfg)?;
        r.value = -r.value;
        return Ok(r);
    }
    let mut panels: Vec<Panel> = Vec::new();
    panels.push(gk15(&mut f, a, b)?);
    let mut subdivisions = 0;
    loop {
        let total_error: f64 = panels.iter().map(|p| p.error).sum();
        if total_error <= cfg.abs_tol {
            return Ok(finish(panels, subdivisions, true));
        }
        if subdivisions >= cfg.max_subdivisions {
            return Ok(finish(panels, subdivisions, false));
        }
        let (worst, _) =
            panels.iter().enumerate().fold((0, -1.0), |acc, (i, p)| if p.error > acc.1 { (i, p.error) } else { acc });
        let p = panels[worst];
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            return Ok(finish(panels, subdivisions, false));
        }
        panels[worst] = gk15(&mut f, p.a, mid)?;
        panels.push(gk15(&mut f, mid, p.b)?);
        subdivisions += 1;
    }
}

fn finish(mut panels: Vec<Panel>, subdivisions: usize, converged: bool) -> QuadResult {
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let values: Vec<f64> = panels.iter().map(|p| p.value).collect();
    let errors: Vec<f64> = panels.iter().map(|p| p.error).collect();
    QuadResult { value: pairwise_sum(&values), error: pairwise_sum(&errors), subdivisions, converged }
}
