//! `price`: closed-form reports for every case and evaluation time.

use std::fmt::Write as _;

use binbond_core::pricer::{self, detect_regime, PricerConfig, RecoveryModel, Regime};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::scenario::{Case, Scenario};

/// One priced point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PriceRecord {
    /// Case label.
    pub case: String,
    /// Evaluation time.
    pub t: f64,
    /// Relative firm value.
    pub x: f64,
    /// Firm value.
    #[serde(rename = "V")]
    pub v: f64,
    /// Interval `i` with `t_i <= t < t_{i+1}`.
    pub interval: usize,
    /// Endogenous regime.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regime: Option<&'static str>,
    /// Bond price.
    #[serde(rename = "C")]
    pub price: f64,
    /// Relative price.
    pub u: f64,
    /// Survival probability (exogenous recovery).
    #[serde(rename = "W", skip_serializing_if = "Option::is_none")]
    pub survival: Option<f64>,
    /// Credit spread.
    #[serde(rename = "CS")]
    pub credit_spread: f64,
    /// Default-free bond.
    pub riskless: f64,
    /// Normal CDF error bound.
    pub cdf_error: f64,
    /// Quadrature error estimate.
    pub quad_error: f64,
    /// Whether every quadrature met its tolerance.
    pub quad_converged: bool,
}

/// Name of an endogenous regime.
pub fn regime_name(regime: Regime) -> &'static str {
    match regime {
        Regime::BarriersBelowThreshold => "barriers_below_threshold",
        Regime::BarriersAboveThreshold => "barriers_above_threshold",
        Regime::NoRecovery => "no_recovery",
    }
}

/// Price one case at `t`.
pub fn price_case(case: &Case, t: f64, cfg: &PricerConfig) -> Result<PriceRecord> {
    let report = pricer::price(&case.params, &case.schedule, &case.recovery, case.spot.spot(), t, cfg)?;
    let regime = match case.recovery {
        RecoveryModel::Endogenous { rate, bonds } => Some(regime_name(detect_regime(&case.schedule, rate, bonds)?)),
        RecoveryModel::Exogenous { .. } => None,
    };
    Ok(PriceRecord {
        case: case.label.clone(),
        t,
        x: report.relative_spot,
        v: report.relative_spot * report.riskless,
        interval: report.interval_index,
        regime,
        price: report.price,
        u: report.relative_price,
        survival: report.survival_prob,
        credit_spread: report.credit_spread,
        riskless: report.riskless,
        cdf_error: report.diagnostics.cdf_error,
        quad_error: report.diagnostics.quad_error,
        quad_converged: report.diagnostics.quad_converged,
    })
}

/// Records for every case and time, cases outermost, in input order.
pub fn price_scenario(scenario: &Scenario, cfg: &PricerConfig) -> Result<Vec<PriceRecord>> {
    let cases = scenario.cases()?;
    let jobs: Vec<(&Case, f64)> = cases.iter().flat_map(|c| scenario.times.iter().map(move |&t| (c, t))).collect();
    jobs.par_iter().map(|(c, t)| price_case(c, *t, cfg)).collect()
}

/// Human-readable rendering.
pub fn render_text(records: &[PriceRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let _ = writeln!(out, "[{}] t={} x={} V={} interval={}", r.case, r.t, r.x, r.v, r.interval);
        if let Some(regime) = r.regime {
            let _ = writeln!(out, "  regime    {regime}");
        }
        let _ = writeln!(out, "  C         {:.10}", r.price);
        let _ = writeln!(out, "  u         {:.10}", r.u);
        if let Some(w) = r.survival {
            let _ = writeln!(out, "  W         {w:.10}");
        }
        let _ = writeln!(out, "  CS        {:.10}", r.credit_spread);
        let _ = writeln!(out, "  riskless  {:.10}", r.riskless);
        let _ = writeln!(
            out,
            "  errors    cdf={:.1e} quad={:.1e}{}",
            r.cdf_error,
            r.quad_error,
            if r.quad_converged { "" } else { " (quadrature did not converge)" }
        );
    }
    out
}

/// One JSON object per line.
pub fn render_jsonl(records: &[PriceRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    out
}
