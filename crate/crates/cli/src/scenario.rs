//! Scenario files: a TOML description of one bond, where to evaluate it and
//! an optional one-parameter sweep.

use std::fmt;
use std::path::Path;

use binbond_core::pricer::{DefaultSchedule, MarketParams, RecoveryModel, Spot};
use serde::Deserialize;

use crate::error::{CliError, Result};

/// Default number of points on the curve grid `[0, T)`.
pub const DEFAULT_CURVE_POINTS: usize = 121;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    title: Option<String>,
    market: MarketSection,
    schedule: ScheduleSection,
    recovery: RecoverySection,
    evaluation: EvaluationSection,
    #[serde(default)]
    curve: CurveSection,
    sweep: Option<SweepSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MarketSection {
    r: f64,
    b: f64,
    s_v: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleSection {
    dates: Vec<f64>,
    intensities: Vec<f64>,
    barriers: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
enum RecoveryMode {
    Endogenous,
    Exogenous,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecoverySection {
    mode: RecoveryMode,
    rate: f64,
    bonds: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Times {
    One(f64),
    Many(Vec<f64>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EvaluationSection {
    x: Option<f64>,
    v: Option<f64>,
    t: Option<Times>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveSection {
    quantity: Option<Quantity>,
    points: Option<usize>,
    t_grid: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSection {
    parameter: String,
    values: Vec<SweepValue>,
}

/// Curve output column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum Quantity {
    /// Bond price `C`.
    C,
    /// Relative price `u = C / e^{-r(T-t)}`.
    #[serde(rename = "u")]
    U,
    /// Survival probability.
    W,
    /// Credit spread.
    CS,
}

/// A sweep entry: one number, or one number per date.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum SweepValue {
    /// Scalar value.
    Scalar(f64),
    /// Per-date values.
    Vector(Vec<f64>),
}

impl fmt::Display for SweepValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepValue::Scalar(v) => write!(f, "{v}"),
            SweepValue::Vector(vs) => {
                let parts: Vec<String> = vs.iter().map(|v| v.to_string()).collect();
                write!(f, "({})", parts.join(";"))
            }
        }
    }
}

/// Parameters that may be swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    /// Recovery rate `R`.
    Recovery,
    /// Firm volatility `s_V`.
    Volatility,
    /// Relative firm value `x`.
    Spot,
    /// All barriers `K` (scalar broadcast or one per date).
    Barriers,
    /// Barrier `K_i`, `i = 1..N`.
    Barrier(usize),
    /// All intensities `lambda` (scalar broadcast or one per interval).
    Intensities,
    /// Intensity `lambda_i`, `i = 0..N-1`.
    Intensity(usize),
}

impl SweepParameter {
    /// Parse `R`, `s_V`, `x`, `K`, `K_i`, `lambda` or `lambda_i`.
    pub fn parse(name: &str) -> Result<Self> {
        let indexed = |prefix: &str| -> Option<usize> {
            let rest = name.strip_prefix(prefix)?;
            rest.strip_prefix('_').unwrap_or(rest).parse().ok()
        };
        Ok(match name {
            "R" => SweepParameter::Recovery,
            "s_V" | "s_v" => SweepParameter::Volatility,
            "x" => SweepParameter::Spot,
            "K" => SweepParameter::Barriers,
            "lambda" => SweepParameter::Intensities,
            _ => {
                if let Some(i) = indexed("lambda") {
                    SweepParameter::Intensity(i)
                } else if let Some(i) = indexed("K") {
                    SweepParameter::Barrier(i)
                } else {
                    return Err(CliError::Scenario(format!(
                        "unknown sweep parameter `{name}` (expected R, s_V, x, K, K_i, lambda or lambda_i)"
                    )));
                }
            }
        })
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepParameter::Recovery => f.write_str("R"),
            SweepParameter::Volatility => f.write_str("s_V"),
            SweepParameter::Spot => f.write_str("x"),
            SweepParameter::Barriers => f.write_str("K"),
            SweepParameter::Barrier(i) => write!(f, "K_{i}"),
            SweepParameter::Intensities => f.write_str("lambda"),
            SweepParameter::Intensity(i) => write!(f, "lambda_{i}"),
        }
    }
}

/// Where the firm value is fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpotSpec {
    /// Relative value `x`, held constant across `t`.
    Relative(f64),
    /// Firm value `V`.
    Firm(f64),
}

impl SpotSpec {
    /// As the pricer's spot type.
    pub fn spot(self) -> Spot {
        match self {
            SpotSpec::Relative(x) => Spot::Relative(x),
            SpotSpec::Firm(v) => Spot::Firm(v),
        }
    }

    /// Relative value at `t` given the riskless discount factor there.
    pub fn relative(self, riskless: f64) -> f64 {
        match self {
            SpotSpec::Relative(x) => x,
            SpotSpec::Firm(v) => v / riskless,
        }
    }

    /// Firm value at `t` given the riskless discount factor there.
    pub fn firm(self, riskless: f64) -> f64 {
        match self {
            SpotSpec::Relative(x) => x * riskless,
            SpotSpec::Firm(v) => v,
        }
    }
}

/// A fully specified bond with its evaluation spot.
#[derive(Debug, Clone, PartialEq)]
pub struct Case {
    /// Series label (`base` without a sweep).
    pub label: String,
    /// Market data.
    pub params: MarketParams,
    /// Announcing dates, intensities and barriers.
    pub schedule: DefaultSchedule,
    /// Recovery model.
    pub recovery: RecoveryModel,
    /// Evaluation spot.
    pub spot: SpotSpec,
}

/// A parsed and validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// Free-form title.
    pub title: Option<String>,
    /// Base case.
    pub base: Case,
    /// Evaluation times for `price` and `validate`.
    pub times: Vec<f64>,
    /// Curve column.
    pub quantity: Quantity,
    /// Curve grid size when no explicit grid is given.
    pub points: usize,
    /// Explicit curve grid.
    pub t_grid: Option<Vec<f64>>,
    /// Optional sweep.
    pub sweep: Option<(SweepParameter, Vec<SweepValue>)>,
}

impl Scenario {
    /// Parse TOML text.
    pub fn from_toml(text: &str) -> Result<Self> {
        let file: ScenarioFile = toml::from_str(text).map_err(|e| CliError::Parse(e.message().to_string()))?;
        Self::from_file(file)
    }

    /// Read and parse a scenario file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        Self::from_toml(&text)
    }

    fn from_file(file: ScenarioFile) -> Result<Self> {
        let params = MarketParams::new(file.market.r, file.market.b, file.market.s_v)?;
        let s = &file.schedule;
        let schedule = DefaultSchedule::new(&s.dates, &s.intensities, &s.barriers)?;
        let recovery = match (file.recovery.mode, file.recovery.bonds) {
            (RecoveryMode::Endogenous, Some(bonds)) => RecoveryModel::Endogenous { rate: file.recovery.rate, bonds },
            (RecoveryMode::Endogenous, None) => {
                return Err(CliError::Scenario("endogenous recovery needs `bonds`".into()));
            }
            (RecoveryMode::Exogenous, None) => RecoveryModel::Exogenous { rate: file.recovery.rate },
            (RecoveryMode::Exogenous, Some(_)) => {
                return Err(CliError::Scenario("`bonds` only applies to endogenous recovery".into()));
            }
        };
        recovery.validate()?;
        let spot = match (file.evaluation.x, file.evaluation.v) {
            (Some(x), None) => SpotSpec::Relative(x),
            (None, Some(v)) => SpotSpec::Firm(v),
            _ => return Err(CliError::Scenario("evaluation needs exactly one of `x` and `v`".into())),
        };
        let times = match file.evaluation.t {
            None => vec![0.0],
            Some(Times::One(t)) => vec![t],
            Some(Times::Many(ts)) if !ts.is_empty() => ts,
            Some(Times::Many(_)) => return Err(CliError::Scenario("evaluation `t` list is empty".into())),
        };
        let points = file.curve.points.unwrap_or(DEFAULT_CURVE_POINTS);
        if points == 0 {
            return Err(CliError::Scenario("curve `points` must be positive".into()));
        }
        let sweep = match file.sweep {
            None => None,
            Some(sw) => {
                if sw.values.is_empty() {
                    return Err(CliError::Scenario("sweep `values` is empty".into()));
                }
                Some((SweepParameter::parse(&sw.parameter)?, sw.values))
            }
        };
        let scenario = Scenario {
            title: file.title,
            base: Case { label: "base".into(), params, schedule, recovery, spot },
            times,
            quantity: file.curve.quantity.unwrap_or(Quantity::C),
            points,
            t_grid: file.curve.t_grid,
            sweep,
        };
        scenario.cases()?;
        Ok(scenario)
    }

    /// The base case, or one case per sweep value in input order.
    pub fn cases(&self) -> Result<Vec<Case>> {
        match &self.sweep {
            None => Ok(vec![self.base.clone()]),
            Some((param, values)) => values.iter().map(|v| apply(&self.base, *param, v)).collect(),
        }
    }

    /// Curve times on `[0, T)` and warnings for dropped points.
    pub fn curve_times(&self) -> (Vec<f64>, Vec<String>) {
        let maturity = self.base.schedule.maturity();
        match &self.t_grid {
            None => ((0..self.points).map(|k| k as f64 * maturity / self.points as f64).collect(), Vec::new()),
            Some(grid) => {
                let mut warnings = Vec::new();
                let kept = grid
                    .iter()
                    .copied()
                    .filter(|&t| {
                        let ok = t < maturity;
                        if !ok {
                            warnings.push(format!("t={t} is not before maturity {maturity}; clipped"));
                        }
                        ok
                    })
                    .collect();
                (kept, warnings)
            }
        }
    }
}

fn per_date(value: &SweepValue, n: usize, name: SweepParameter) -> Result<Vec<f64>> {
    match value {
        SweepValue::Scalar(v) => Ok(vec![*v; n]),
        SweepValue::Vector(vs) if vs.len() == n => Ok(vs.clone()),
        SweepValue::Vector(vs) => {
            Err(CliError::Scenario(format!("sweep `{name}` value has {} entries, schedule has {n}", vs.len())))
        }
    }
}

fn scalar(value: &SweepValue, name: SweepParameter) -> Result<f64> {
    match value {
        SweepValue::Scalar(v) => Ok(*v),
        SweepValue::Vector(_) => Err(CliError::Scenario(format!("sweep `{name}` takes scalar values"))),
    }
}

fn apply(base: &Case, param: SweepParameter, value: &SweepValue) -> Result<Case> {
    let mut case = base.clone();
    case.label = format!("{param}={value}");
    let n = base.schedule.len();
    match param {
        SweepParameter::Recovery => {
            let rate = scalar(value, param)?;
            case.recovery = match base.recovery {
                RecoveryModel::Endogenous { bonds, .. } => RecoveryModel::Endogenous { rate, bonds },
                RecoveryModel::Exogenous { .. } => RecoveryModel::Exogenous { rate },
            };
            case.recovery.validate()?;
        }
        SweepParameter::Volatility => {
            case.params = MarketParams::new(base.params.r, base.params.b, scalar(value, param)?)?;
        }
        SweepParameter::Spot => case.spot = SpotSpec::Relative(scalar(value, param)?),
        SweepParameter::Barriers => case.schedule = base.schedule.with_barriers(&per_date(value, n, param)?)?,
        SweepParameter::Barrier(i) => {
            if i == 0 || i > n {
                return Err(CliError::Scenario(format!("barrier index {i} outside 1..={n}")));
            }
            let mut ks = base.schedule.barriers().to_vec();
            ks[i - 1] = scalar(value, param)?;
            case.schedule = base.schedule.with_barriers(&ks)?;
        }
        SweepParameter::Intensities => {
            case.schedule = base.schedule.with_intensities(&per_date(value, n, param)?)?;
        }
        SweepParameter::Intensity(i) => {
            if i >= n {
                return Err(CliError::Scenario(format!("intensity index {i} outside 0..{n}")));
            }
            let mut ls = base.schedule.intensities().to_vec();
            ls[i] = scalar(value, param)?;
            case.schedule = base.schedule.with_intensities(&ls)?;
        }
    }
    Ok(case)
}
