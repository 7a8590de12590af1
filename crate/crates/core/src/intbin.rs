//! "Integral of i-th binary or nothing": a higher-order binary price integrated
//! over its last expiry against the exponential weight
//! `g(τ) = λ e^{-λ(τ - anchor)}`.

use alloc::vec;
use alloc::vec::Vec;

use crate::binaries::{price_binary_with, BinarySpec};
use crate::error::bail;
use crate::math::exp;
use crate::mvn::MvnConfig;
use crate::quadrature::{integrate, QuadConfig, QuadResult};
use crate::Result;

/// A weighted time-integral of a linear combination of binaries sharing the
/// same fixed dates. The last expiry of every leg is the integration variable.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedIntegralSpec {
    legs: Vec<(f64, BinarySpec)>,
    weight_rate: f64,
    weight_anchor: f64,
    lower: f64,
    upper: f64,
}

impl WeightedIntegralSpec {
    /// Integral of `base` over `[lower, upper]` with weight `λ e^{-λ(τ - anchor)}`.
    pub fn new(base: BinarySpec, weight_rate: f64, weight_anchor: f64, lower: f64, upper: f64) -> Result<Self> {
        if !(weight_rate >= 0.0) || !weight_rate.is_finite() {
            bail!(Domain, "weight rate must be non-negative, got {weight_rate}");
        }
        if !weight_anchor.is_finite() || !lower.is_finite() || !upper.is_finite() {
            bail!(Domain, "integration bounds must be finite");
        }
        if lower > upper {
            bail!(Schedule, "integration bounds reversed ({lower} > {upper})");
        }
        let fixed = &base.expiries()[..base.order() - 1];
        if let Some(&last_fixed) = fixed.last() {
            if lower < last_fixed {
                bail!(Schedule, "lower bound {lower} precedes the fixed expiry {last_fixed}");
            }
            if upper <= last_fixed && lower < upper {
                bail!(Schedule, "upper bound {upper} does not exceed the fixed expiry {last_fixed}");
            }
        }
        Ok(WeightedIntegralSpec { legs: vec![(1.0, base)], weight_rate, weight_anchor, lower, upper })
    }

    /// Add `coefficient × leg` to the integrand. The leg must share the fixed dates of the base.
    pub fn with_leg(mut self, coefficient: f64, leg: BinarySpec) -> Result<Self> {
        let base = &self.legs[0].1;
        let m = base.order();
        if leg.order() != m || leg.expiries()[..m - 1] != base.expiries()[..m - 1] {
            bail!(Invalid, "all legs of a weighted integral must share the fixed expiries");
        }
        self.legs.push((coefficient, leg));
        Ok(self)
    }

    /// Scale the coefficient of the first leg.
    pub fn scaled_base(mut self, coefficient: f64) -> Self {
        self.legs[0].0 = coefficient;
        self
    }

    /// Legs as `(coefficient, binary)`.
    pub fn legs(&self) -> &[(f64, BinarySpec)] {
        &self.legs
    }

    /// `λ`.
    pub fn weight_rate(&self) -> f64 {
        self.weight_rate
    }

    /// `[C, D]`.
    pub fn bounds(&self) -> (f64, f64) {
        (self.lower, self.upper)
    }

    /// `g(τ)`.
    pub fn weight(&self, tau: f64) -> f64 {
        self.weight_rate * exp(-self.weight_rate * (tau - self.weight_anchor))
    }

    /// `∫_C^D g(τ) dτ`.
    pub fn weight_mass(&self) -> f64 {
        let l = self.weight_rate;
        exp(-l * (self.lower - self.weight_anchor)) - exp(-l * (self.upper - self.weight_anchor))
    }
}

/// Accuracy settings for [`integral_binary`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct IntegralConfig {
    /// Outer quadrature.
    pub quad: QuadConfig,
    /// Normal CDF evaluation.
    pub mvn: MvnConfig,
}

/// Value of the integral with its error budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralValue {
    /// Integral.
    pub value: f64,
    /// Quadrature error estimate.
    pub quad_error: f64,
    /// Bound on the contribution of CDF errors.
    pub cdf_error: f64,
    /// Whether the quadrature met its tolerance.
    pub converged: bool,
}

impl IntegralValue {
    const ZERO: IntegralValue = IntegralValue { value: 0.0, quad_error: 0.0, cdf_error: 0.0, converged: true };
}

/// `∫_C^D g(τ) Σ_k c_k F_k(x, t; …, τ) dτ`.
pub fn integral_binary(spec: &WeightedIntegralSpec, x: f64, t: f64, cfg: &IntegralConfig) -> Result<IntegralValue> {
    if !(x > 0.0) || !x.is_finite() {
        bail!(Domain, "spot must be positive and finite, got {x}");
    }
    let base = &spec.legs[0].1;
    let first_fixed = if base.order() > 1 { Some(base.expiries()[0]) } else { None };
    match first_fixed {
        Some(e) if t >= e => bail!(Schedule, "evaluation time {t} must precede the first fixed expiry {e}"),
        None if t > spec.lower => bail!(Schedule, "evaluation time {t} is after the lower bound {}", spec.lower),
        _ => {}
    }
    if spec.weight_rate == 0.0 || spec.lower == spec.upper {
        return Ok(IntegralValue::ZERO);
    }
    let mut worst_cdf_error = 0.0f64;
    let result = integrate_weighted(
        spec,
        |tau| {
            let mut sum = 0.0;
            let mut err = 0.0;
            for (coef, leg) in &spec.legs {
                let p = price_binary_with(&leg.with_last_expiry(tau)?, x, t, &cfg.mvn)?;
                sum += coef * p.price;
                err += coef.abs() * p.error;
            }
            worst_cdf_error = worst_cdf_error.max(err);
            Ok(sum)
        },
        &cfg.quad,
    )?;
    Ok(IntegralValue {
        value: result.value,
        quad_error: result.error,
        cdf_error: worst_cdf_error * spec.weight_mass(),
        converged: result.converged,
    })
}

/// `∫_C^D g(τ) f(τ) dτ` for an arbitrary integrand, using the same quadrature
/// as [`integral_binary`].
pub fn integrate_weighted<F: FnMut(f64) -> Result<f64>>(
    spec: &WeightedIntegralSpec,
    mut f: F,
    quad: &QuadConfig,
) -> Result<QuadResult> {
    integrate(|tau| Ok(spec.weight(tau) * f(tau)?), spec.lower, spec.upper, quad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binaries::{BinaryKind, BsCoefficients};

    fn base() -> BinarySpec {
        let c = BsCoefficients::new(0.0, 0.05, 1.0).unwrap();
        BinarySpec::all_plus(BinaryKind::Bond, vec![200.0], vec![6.0], c).unwrap()
    }

    #[test]
    fn zero_weight_or_empty_interval() {
        let cfg = IntegralConfig::default();
        let s = WeightedIntegralSpec::new(base(), 0.0, 3.0, 3.0, 6.0).unwrap();
        assert_eq!(integral_binary(&s, 200.0, 0.0, &cfg).unwrap().value, 0.0);
        let s = WeightedIntegralSpec::new(base(), 0.005, 3.0, 4.0, 4.0).unwrap();
        assert_eq!(integral_binary(&s, 200.0, 0.0, &cfg).unwrap().value, 0.0);
    }

    #[test]
    fn constant_integrand_closed_form() {
        let s = WeightedIntegralSpec::new(base(), 0.3, 3.0, 3.0, 6.0).unwrap();
        let r = integrate_weighted(&s, |_| Ok(1.0), &QuadConfig::default()).unwrap();
        assert!((r.value - (1.0 - exp(-0.9))).abs() < 1e-12);
        assert!((s.weight_mass() - (1.0 - exp(-0.9))).abs() < 1e-15);
    }

    #[test]
    fn bound_validation() {
        let c = BsCoefficients::new(0.0, 0.05, 1.0).unwrap();
        let b2 = BinarySpec::all_plus(BinaryKind::Bond, vec![100.0, 200.0], vec![3.0, 6.0], c).unwrap();
        assert!(WeightedIntegralSpec::new(b2.clone(), 0.1, 3.0, 2.0, 6.0).is_err());
        assert!(WeightedIntegralSpec::new(b2.clone(), 0.1, 3.0, 3.0, 6.0).is_ok());
        assert!(WeightedIntegralSpec::new(b2, 0.1, 3.0, 6.0, 5.0).is_err());
    }
}
