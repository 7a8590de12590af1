//! Brute-force oracles shared by the integration tests.

#![allow(dead_code)]

use std::f64::consts::{PI, SQRT_2};

pub fn phi(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

pub fn cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let k = k as f64;
                    let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Composite Gauss–Legendre rule on `[a, b]`.
pub fn composite_rule(a: f64, b: f64, panels: usize, order: usize) -> Vec<(f64, f64)> {
    let gl = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for &(x, w) in &gl {
            out.push((mid + 0.5 * h * x, 0.5 * h * w));
        }
    }
    out
}

/// `P(Z_1 <= a, Z_2 <= b)` with correlation `rho`, by one-dimensional quadrature.
pub fn bivariate_oracle(a: f64, b: f64, rho: f64) -> f64 {
    let s = (1.0 - rho * rho).sqrt();
    let lo = -40.0f64;
    if a <= lo {
        return 0.0;
    }
    composite_rule(lo, a, 800, 20).iter().map(|&(z, w)| w * phi(z) * cdf((b - rho * z) / s)).sum()
}

/// `P(Z <= a)` for a trivariate standard normal with correlations `r`
/// (`r[0]=ρ12, r[1]=ρ13, r[2]=ρ23`), by tensor quadrature over the first two
/// coordinates.
pub fn trivariate_oracle(a: [f64; 3], r: [f64; 3]) -> f64 {
    let [r12, r13, r23] = r;
    let det = 1.0 - r12 * r12;
    let b1 = (r13 - r12 * r23) / det;
    let b2 = (r23 - r12 * r13) / det;
    let s = (1.0 - (b1 * r13 + b2 * r23)).max(0.0).sqrt();
    let lo = -9.0f64;
    let q1 = composite_rule(lo, a[0].max(lo), 60, 12);
    let q2 = composite_rule(lo, a[1].max(lo), 60, 12);
    let norm = 1.0 / (2.0 * PI * det.sqrt());
    let mut total = 0.0;
    for &(z1, w1) in &q1 {
        for &(z2, w2) in &q2 {
            let dens = norm * (-(z1 * z1 - 2.0 * r12 * z1 * z2 + z2 * z2) / (2.0 * det)).exp();
            total += w1 * w2 * dens * cdf((a[2] - b1 * z1 - b2 * z2) / s);
        }
    }
    total
}
