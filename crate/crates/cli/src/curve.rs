//! `curve`: one quantity over a time grid, one column per sweep case.

use binbond_core::pricer::{self, survival_probability, PricerConfig};
use rayon::prelude::*;

use crate::error::{CliError, Result};
use crate::scenario::{Case, Quantity, Scenario};

/// Curve values: `series[c][k]` is case `c` at `times[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    /// Column header for each series.
    pub labels: Vec<String>,
    /// Grid.
    pub times: Vec<f64>,
    /// Values by case, then time.
    pub series: Vec<Vec<f64>>,
    /// Grid points dropped at or after maturity.
    pub warnings: Vec<String>,
}

fn value(case: &Case, quantity: Quantity, t: f64, cfg: &PricerConfig) -> Result<f64> {
    if quantity == Quantity::W {
        let riskless = pricer::riskless_bond(&case.params, &case.schedule, t)?;
        return Ok(survival_probability(&case.params, &case.schedule, case.spot.relative(riskless), t)?);
    }
    let r = pricer::price(&case.params, &case.schedule, &case.recovery, case.spot.spot(), t, cfg)?;
    Ok(match quantity {
        Quantity::C => r.price,
        Quantity::U => r.relative_price,
        Quantity::CS => r.credit_spread,
        Quantity::W => unreachable!(),
    })
}

/// Evaluate the scenario's curve.
pub fn compute_curve(scenario: &Scenario, cfg: &PricerConfig) -> Result<Curve> {
    let cases = scenario.cases()?;
    let (times, warnings) = scenario.curve_times();
    let jobs: Vec<(usize, f64)> = (0..cases.len()).flat_map(|c| times.iter().map(move |&t| (c, t))).collect();
    let flat: Vec<f64> =
        jobs.par_iter().map(|&(c, t)| value(&cases[c], scenario.quantity, t, cfg)).collect::<Result<_>>()?;
    let series = flat.chunks(times.len().max(1)).map(<[f64]>::to_vec).collect();
    Ok(Curve { labels: cases.into_iter().map(|c| c.label).collect(), times, series, warnings })
}

impl Curve {
    /// CSV text with a header row and LF line endings.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let csv_err = |e: csv::Error| CliError::Scenario(format!("csv output: {e}"));
        let mut header = vec!["t".to_string()];
        header.extend(self.labels.iter().cloned());
        w.write_record(&header).map_err(csv_err)?;
        for (k, t) in self.times.iter().enumerate() {
            let mut row = vec![t.to_string()];
            row.extend(self.series.iter().map(|s| s[k].to_string()));
            w.write_record(&row).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Scenario(format!("csv output: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }
}
