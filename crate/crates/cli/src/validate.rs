//! `validate`: closed form against the PDE cascade and Monte Carlo.

use std::fmt::Write as _;

use binbond_core::mc::{PathStats, SimConfig, Simulator};
use binbond_core::pde::{sample, solve_cascade_for, GridSpec};
use binbond_core::pricer::{self, PricerConfig};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::scenario::{Case, Scenario};

/// Oracle settings and pass thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidateOptions {
    /// Spatial nodes.
    pub n_space: usize,
    /// Time steps per interval.
    pub n_time: usize,
    /// Simulation settings.
    pub sim: SimConfig,
    /// Largest accepted `|closed - PDE|` on `C`.
    pub pde_tolerance: f64,
    /// Largest accepted `|closed - MC|` in standard errors.
    pub sigmas: f64,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions { n_space: 2048, n_time: 2048, sim: SimConfig::default(), pde_tolerance: 1e-3, sigmas: 3.0 }
    }
}

/// One comparison row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationRow {
    /// Case label.
    pub case: String,
    /// Evaluation time.
    pub t: f64,
    /// Relative firm value.
    pub x: f64,
    /// Closed-form `C`.
    pub closed: f64,
    /// PDE `C`.
    pub pde: f64,
    /// `|closed - PDE|`.
    pub pde_diff: f64,
    /// Monte Carlo `C`.
    pub mc: f64,
    /// Monte Carlo standard error.
    pub mc_std_error: f64,
    /// `(MC - closed) / std_error`.
    pub z: f64,
    /// Richardson error estimate of the PDE at the first evaluation spot.
    pub pde_error_estimate: Option<f64>,
    /// PDE accuracy warning.
    pub warning: Option<String>,
    /// Both checks passed.
    pub pass: bool,
}

/// Standard-error distance, treating an exact zero-variance match as 0.
fn z_score(estimate: f64, std_error: f64, target: f64) -> f64 {
    let diff = estimate - target;
    if std_error > 0.0 {
        diff / std_error
    } else if diff.abs() <= 1e-12 * target.abs().max(1.0) {
        0.0
    } else {
        f64::INFINITY.copysign(diff)
    }
}

/// Monte Carlo estimate with blocks run in parallel and reduced in index order.
pub fn simulate_parallel(case: &Case, t: f64, sim: SimConfig) -> Result<binbond_core::mc::McEstimate> {
    let riskless = pricer::riskless_bond(&case.params, &case.schedule, t)?;
    let v0 = case.spot.firm(riskless);
    let simulator = Simulator::new(&case.params, &case.schedule, &case.recovery, v0, t, sim)?;
    let blocks: Vec<PathStats> = (0..sim.blocks()).into_par_iter().map(|k| simulator.simulate_block(k)).collect();
    let stats = PathStats::reduce(&blocks).expect("at least one block");
    Ok(simulator.finish(&stats))
}

fn validate_case(case: &Case, times: &[f64], opts: &ValidateOptions, cfg: &PricerConfig) -> Result<Vec<ValidationRow>> {
    let closed: Vec<_> = times
        .iter()
        .map(|&t| pricer::price(&case.params, &case.schedule, &case.recovery, case.spot.spot(), t, cfg))
        .collect::<binbond_core::Result<_>>()?;
    let x_eval = closed[0].relative_spot;
    let grid = GridSpec::automatic(&case.params, &case.schedule, &case.recovery, x_eval, opts.n_space, opts.n_time)?
        .with_check(x_eval, opts.pde_tolerance);
    let solution = solve_cascade_for(&case.params, &case.schedule, &case.recovery, &grid)?;
    let warning =
        solution.warning.map(|w| format!("PDE Richardson estimate {:.2e} exceeds {:.2e}", w.estimate, w.tolerance));
    times
        .iter()
        .zip(&closed)
        .map(|(&t, report)| {
            let pde = report.riskless * sample(&solution, report.relative_spot, t)?;
            let mc = simulate_parallel(case, t, opts.sim)?;
            let pde_diff = (report.price - pde).abs();
            let z = z_score(mc.price, mc.std_error, report.price);
            Ok(ValidationRow {
                case: case.label.clone(),
                t,
                x: report.relative_spot,
                closed: report.price,
                pde,
                pde_diff,
                mc: mc.price,
                mc_std_error: mc.std_error,
                z,
                pde_error_estimate: solution.error_estimate,
                warning: warning.clone(),
                pass: pde_diff <= opts.pde_tolerance && z.abs() <= opts.sigmas,
            })
        })
        .collect()
}

/// Compare the three engines for every case and evaluation time.
pub fn validate_scenario(
    scenario: &Scenario,
    opts: &ValidateOptions,
    cfg: &PricerConfig,
) -> Result<Vec<ValidationRow>> {
    let mut rows = Vec::new();
    for case in scenario.cases()? {
        rows.extend(validate_case(&case, &scenario.times, opts, cfg)?);
    }
    Ok(rows)
}

/// Fixed-width table.
pub fn render_table(rows: &[ValidationRow], opts: &ValidateOptions) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<16} {:>6} {:>9} {:>14} {:>14} {:>10} {:>14} {:>10} {:>7}  status",
        "case", "t", "x", "closed C", "PDE C", "|diff|", "MC C", "MC s.e.", "z"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<16} {:>6} {:>9.3} {:>14.10} {:>14.10} {:>10.2e} {:>14.10} {:>10.2e} {:>7.2}  {}",
            r.case,
            r.t,
            r.x,
            r.closed,
            r.pde,
            r.pde_diff,
            r.mc,
            r.mc_std_error,
            r.z,
            if r.pass { "PASS" } else { "FAIL" }
        );
    }
    let mut seen = Vec::new();
    for r in rows {
        if let Some(w) = &r.warning {
            if !seen.contains(&(&r.case, w)) {
                seen.push((&r.case, w));
                let _ = writeln!(out, "warning [{}]: {w}", r.case);
            }
        }
    }
    let _ = writeln!(
        out,
        "tolerances: |closed - PDE| <= {:.1e}, |z| <= {}; grid {}x{} per interval; {} paths{}, seed {}",
        opts.pde_tolerance,
        opts.sigmas,
        opts.n_space,
        opts.n_time,
        opts.sim.n_paths,
        if opts.sim.antithetic { " (antithetic)" } else { "" },
        opts.sim.seed
    );
    out
}
