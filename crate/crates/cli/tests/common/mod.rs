//! Expected orderings of the figure presets.

#![allow(dead_code)]

use binbond::curve::{compute_curve, Curve};
use binbond::presets::preset;
use binbond_core::pricer::PricerConfig;

/// Direction of the series as the sweep index grows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Increasing,
    Decreasing,
}

impl Order {
    fn holds(self, values: &[f64]) -> bool {
        values.windows(2).all(|w| match self {
            Order::Increasing => w[0] < w[1],
            Order::Decreasing => w[0] > w[1],
        })
    }
}

/// What a figure must show.
#[derive(Debug, Clone, Copy)]
pub enum Trend {
    /// Strict ordering at every grid point.
    Everywhere(Order),
    /// Both dates move in opposite directions: ordered by the second-interval
    /// parameter on `[3, T)`, while on `[0, 3)` the ordering implied by the
    /// first-interval parameter alone fails somewhere.
    Mixed { later: Order, first_alone: Order },
}

pub fn trend(figure: u32) -> Trend {
    use Order::*;
    match figure {
        1 | 3 => Trend::Everywhere(Increasing),
        2 | 4 | 6 | 7 | 9 => Trend::Everywhere(Decreasing),
        5 | 8 => Trend::Mixed { later: Increasing, first_alone: Decreasing },
        10 | 12 => Trend::Everywhere(Decreasing),
        11 | 13 | 15 | 16 | 18 => Trend::Everywhere(Increasing),
        14 | 17 => Trend::Mixed { later: Decreasing, first_alone: Increasing },
        _ => panic!("no figure {figure}"),
    }
}

pub fn figure_curve(figure: u32) -> Curve {
    compute_curve(&preset(figure).unwrap(), &PricerConfig::default()).unwrap()
}

/// `Ok(summary)` when the curve shows the expected trend.
pub fn check_trend(figure: u32, curve: &Curve) -> Result<String, String> {
    let column = |k: usize| -> Vec<f64> { curve.series.iter().map(|s| s[k]).collect() };
    let split = 3.0;
    match trend(figure) {
        Trend::Everywhere(order) => {
            for (k, &t) in curve.times.iter().enumerate() {
                if !order.holds(&column(k)) {
                    return Err(format!("figure {figure}: not {order:?} at t={t}: {:?}", column(k)));
                }
            }
            Ok(format!("{order:?} at all {} points", curve.times.len()))
        }
        Trend::Mixed { later, first_alone } => {
            let mut first_holds = true;
            for (k, &t) in curve.times.iter().enumerate() {
                if t >= split && !later.holds(&column(k)) {
                    return Err(format!("figure {figure}: not {later:?} at t={t}: {:?}", column(k)));
                }
                if t < split {
                    first_holds &= first_alone.holds(&column(k));
                }
            }
            if first_holds {
                return Err(format!("figure {figure}: no mixed effect on [0, 3), {first_alone:?} everywhere"));
            }
            Ok(format!("{later:?} on [3, T), mixed on [0, 3)"))
        }
    }
}
