//! Finite-difference oracle for the backward pricing cascade.
//!
//! Each interval is solved in `y = ln x` with Crank–Nicolson, preceded by two
//! implicit-Euler half steps after every terminal condition (Rannacher
//! start-up). Boundary values come from the analytic small- and large-`x`
//! asymptotes of the cascade.

use alloc::vec;
use alloc::vec::Vec;

use crate::binaries::BsCoefficients;
use crate::error::bail;
use crate::math::{exp, fabs, log, sqrt};
use crate::pricer::{DefaultSchedule, MarketParams, RecoveryModel};
use crate::Result;

/// Time-stepping scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// Crank–Nicolson with Rannacher start-up.
    #[default]
    CrankNicolsonRannacher,
}

/// Post-hoc grid check: re-solve at half resolution and compare at `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RichardsonCheck {
    /// Relative spot at which to compare.
    pub x: f64,
    /// Warn when the error estimate exceeds this.
    pub tolerance: f64,
}

/// Log-uniform space grid and per-interval time steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Lower relative spot.
    pub x_min: f64,
    /// Upper relative spot.
    pub x_max: f64,
    /// Number of space nodes.
    pub n_space: usize,
    /// Time steps between consecutive announcing dates.
    pub n_time_per_interval: usize,
    /// Time-stepping scheme.
    pub scheme: Scheme,
    /// Optional accuracy check.
    pub check: Option<RichardsonCheck>,
}

impl GridSpec {
    /// Validated constructor.
    pub fn new(x_min: f64, x_max: f64, n_space: usize, n_time_per_interval: usize) -> Result<Self> {
        let g = GridSpec { x_min, x_max, n_space, n_time_per_interval, scheme: Scheme::default(), check: None };
        g.validate()?;
        Ok(g)
    }

    /// Grid wide enough for `schedule` seen from relative spot `x_eval`.
    ///
    /// The bounds cover every barrier and `n/R` with a factor of 20 and at
    /// least six standard deviations of `ln x` over the life of the bond. The
    /// nodes are shifted so that `ln x_eval` falls on one of them.
    pub fn automatic(
        params: &MarketParams,
        schedule: &DefaultSchedule,
        recovery: &RecoveryModel,
        x_eval: f64,
        n_space: usize,
        n_time_per_interval: usize,
    ) -> Result<Self> {
        if !(x_eval > 0.0) || !x_eval.is_finite() {
            bail!(Domain, "evaluation spot must be positive, got {x_eval}");
        }
        if n_space < 64 {
            bail!(Invalid, "n_space must be at least 64, got {n_space}");
        }
        let mut levels: Vec<f64> = schedule.barriers().iter().copied().filter(|k| *k > 0.0).collect();
        if let RecoveryModel::Endogenous { rate, bonds } = *recovery {
            if rate > 0.0 {
                levels.push(bonds / rate);
            }
        }
        let lx = log(x_eval);
        let horizon = schedule.maturity();
        let mu = -params.b - 0.5 * params.s_v * params.s_v;
        let spread = 6.0 * params.s_v * sqrt(horizon);
        let mut lo = lx + (mu * horizon).min(0.0) - spread;
        let mut hi = lx + (mu * horizon).max(0.0) + spread;
        for &k in &levels {
            lo = lo.min(log(k / 20.0));
            hi = hi.max(log(20.0 * k));
        }
        lo = lo.min(lx - log(20.0));
        hi = hi.max(lx + log(20.0));
        let h = (hi - lo) / (n_space - 2) as f64;
        let below = libm::ceil((lx - lo) / h);
        let y0 = lx - below * h;
        let y1 = y0 + (n_space - 1) as f64 * h;
        let mut g = GridSpec::new(exp(y0), exp(y1), n_space, n_time_per_interval)?;
        g.check = None;
        Ok(g)
    }

    /// Attach a Richardson check.
    pub fn with_check(mut self, x: f64, tolerance: f64) -> Self {
        self.check = Some(RichardsonCheck { x, tolerance });
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.x_min > 0.0) || !(self.x_max > self.x_min) || !self.x_max.is_finite() {
            bail!(Domain, "grid needs 0 < x_min < x_max, got [{}, {}]", self.x_min, self.x_max);
        }
        if self.n_space < 64 {
            bail!(Invalid, "n_space must be at least 64, got {}", self.n_space);
        }
        if self.n_time_per_interval < 16 {
            bail!(Invalid, "n_time_per_interval must be at least 16, got {}", self.n_time_per_interval);
        }
        Ok(())
    }

    /// Node coordinates in `y = ln x`.
    pub fn nodes(&self) -> Vec<f64> {
        log_grid(self.x_min, self.x_max, self.n_space)
    }

    fn halved(&self) -> Self {
        GridSpec {
            n_space: (self.n_space / 2).max(64),
            n_time_per_interval: (self.n_time_per_interval / 2).max(16),
            check: None,
            ..*self
        }
    }
}

/// `n` uniform nodes in `ln x` from `ln x_min` to `ln x_max`.
pub fn log_grid(x_min: f64, x_max: f64, n: usize) -> Vec<f64> {
    let (a, b) = (log(x_min), log(x_max));
    let h = (b - a) / (n - 1) as f64;
    (0..n).map(|j| if j + 1 == n { b } else { a + j as f64 * h }).collect()
}

/// Cell-averaged `1(s·(y - ln k) > 0)` on a uniform grid.
///
/// A strike of `0` gives the constant `1` for `+` and `0` for `-`.
pub fn cell_indicator(y: &[f64], strike: f64, plus: bool) -> Vec<f64> {
    let h = if y.len() > 1 { y[1] - y[0] } else { 1.0 };
    y.iter()
        .map(|&yj| {
            let above = if strike <= 0.0 { 1.0 } else { ((yj + 0.5 * h - log(strike)) / h).clamp(0.0, 1.0) };
            if plus {
                above
            } else {
                1.0 - above
            }
        })
        .collect()
}

/// Boundary treatment at one end of the grid.
pub enum Boundary<'a> {
    /// Prescribed value as a function of calendar time.
    Dirichlet(&'a dyn Fn(f64) -> f64),
    /// `u_yy = 0`.
    Linear,
}

/// `u_t + σ²/2 u_yy + (r - q - σ²/2) u_y - r u + f(y) = 0` on a fixed grid.
pub struct Propagation<'a> {
    /// Operator coefficients.
    pub coeffs: BsCoefficients,
    /// Source term `f(y)`.
    pub source: Option<&'a dyn Fn(f64) -> f64>,
    /// Condition at the lowest node.
    pub lower: Boundary<'a>,
    /// Condition at the highest node.
    pub upper: Boundary<'a>,
}

/// Time slices of a propagation, ascending in time.
#[derive(Debug, Clone, PartialEq)]
pub struct Slices {
    /// Calendar times of the stored slices.
    pub times: Vec<f64>,
    /// Values on the space grid, one vector per time.
    pub values: Vec<Vec<f64>>,
}

/// Step `terminal` (given at `t_end`) back to `t_start` in `n_steps` steps,
/// storing every `stride`-th slice plus both ends.
pub fn propagate(
    y: &[f64],
    terminal: &[f64],
    t_start: f64,
    t_end: f64,
    n_steps: usize,
    stride: usize,
    problem: &Propagation<'_>,
) -> Result<Slices> {
    let n = y.len();
    if n < 3 || terminal.len() != n {
        bail!(Invalid, "grid needs at least 3 nodes and matching terminal data");
    }
    if !(t_end > t_start) || n_steps == 0 {
        bail!(Domain, "propagation needs t_start < t_end and at least one step");
    }
    let h = y[1] - y[0];
    let BsCoefficients { r, q, sigma } = problem.coeffs;
    let alpha = 0.5 * sigma * sigma / (h * h);
    let beta = (r - q - 0.5 * sigma * sigma) / (2.0 * h);
    let op = Operator { lo: alpha - beta, di: -2.0 * alpha - r, up: alpha + beta };
    let source: Vec<f64> = match problem.source {
        Some(f) => y.iter().map(|&v| f(v)).collect(),
        None => vec![0.0; n],
    };
    let dt = (t_end - t_start) / n_steps as f64;
    let stride = stride.max(1);

    let mut u = terminal.to_vec();
    let mut times = vec![t_end];
    let mut values = vec![u.clone()];
    let mut work = Workspace::new(n);
    for step in 0..n_steps {
        let t_old = t_end - step as f64 * dt;
        let t_new = if step + 1 == n_steps { t_start } else { t_end - (step + 1) as f64 * dt };
        if step == 0 {
            let t_mid = t_old - 0.5 * dt;
            work.step(&mut u, &op, &source, 1.0, 0.5 * dt, t_mid, problem);
            work.step(&mut u, &op, &source, 1.0, t_mid - t_new, t_new, problem);
        } else {
            work.step(&mut u, &op, &source, 0.5, t_old - t_new, t_new, problem);
        }
        if (step + 1) % stride == 0 || step + 1 == n_steps {
            times.push(t_new);
            values.push(u.clone());
        }
    }
    times.reverse();
    values.reverse();
    Ok(Slices { times, values })
}

struct Operator {
    lo: f64,
    di: f64,
    up: f64,
}

struct Workspace {
    rhs: Vec<f64>,
    sub: Vec<f64>,
    diag: Vec<f64>,
    sup: Vec<f64>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Workspace { rhs: vec![0.0; n], sub: vec![0.0; n], diag: vec![0.0; n], sup: vec![0.0; n] }
    }

    /// One θ-step of length `dt` ending at calendar time `t_new`.
    #[allow(clippy::too_many_arguments)]
    fn step(
        &mut self,
        u: &mut [f64],
        op: &Operator,
        source: &[f64],
        theta: f64,
        dt: f64,
        t_new: f64,
        p: &Propagation<'_>,
    ) {
        let n = u.len();
        let ex = (1.0 - theta) * dt;
        let im = theta * dt;
        for j in 1..n - 1 {
            let lu = op.lo * u[j - 1] + op.di * u[j] + op.up * u[j + 1];
            self.rhs[j] = u[j] + ex * lu + dt * source[j];
            self.sub[j] = -im * op.lo;
            self.diag[j] = 1.0 - im * op.di;
            self.sup[j] = -im * op.up;
        }
        let first = 1;
        let last = n - 2;
        let a = self.sub[first];
        match p.lower {
            Boundary::Dirichlet(g) => {
                u[0] = g(t_new);
                self.rhs[first] -= a * u[0];
            }
            Boundary::Linear => {
                self.diag[first] += 2.0 * a;
                self.sup[first] -= a;
            }
        }
        self.sub[first] = 0.0;
        let c = self.sup[last];
        match p.upper {
            Boundary::Dirichlet(g) => {
                u[n - 1] = g(t_new);
                self.rhs[last] -= c * u[n - 1];
            }
            Boundary::Linear => {
                self.diag[last] += 2.0 * c;
                self.sub[last] -= c;
            }
        }
        self.sup[last] = 0.0;
        // Thomas algorithm on nodes 1..=n-2.
        for j in first + 1..=last {
            let w = self.sub[j] / self.diag[j - 1];
            self.diag[j] -= w * self.sup[j - 1];
            self.rhs[j] -= w * self.rhs[j - 1];
        }
        u[last] = self.rhs[last] / self.diag[last];
        for j in (first..last).rev() {
            u[j] = (self.rhs[j] - self.sup[j] * u[j + 1]) / self.diag[j];
        }
        if let Boundary::Linear = p.lower {
            u[0] = 2.0 * u[1] - u[2];
        }
        if let Boundary::Linear = p.upper {
            u[n - 1] = 2.0 * u[n - 2] - u[n - 3];
        }
    }
}

/// Estimated grid error reported by a Richardson check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccuracyWarning {
    /// `max |u_h - u_{2h}| / 3` over the interval start times.
    pub estimate: f64,
    /// Requested tolerance.
    pub tolerance: f64,
}

/// Backward solution of the whole cascade.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeSolution {
    y: Vec<f64>,
    dates: Vec<f64>,
    intervals: Vec<Slices>,
    /// Richardson error estimate when a check was requested.
    pub error_estimate: Option<f64>,
    /// Set when the estimate exceeds the requested tolerance.
    pub warning: Option<AccuracyWarning>,
}

impl CascadeSolution {
    /// Space nodes in `ln x`.
    pub fn nodes(&self) -> &[f64] {
        &self.y
    }

    /// Stored slices of interval `i`.
    pub fn interval(&self, i: usize) -> &Slices {
        &self.intervals[i]
    }

    /// `scale · u + shift` applied to every stored value.
    pub fn affine(mut self, scale: f64, shift: f64) -> Self {
        for s in &mut self.intervals {
            for v in s.values.iter_mut().flatten() {
                *v = scale * *v + shift;
            }
        }
        self
    }

    /// Smallest and largest stored value.
    pub fn range(&self) -> (f64, f64) {
        self.intervals
            .iter()
            .flat_map(|s| s.values.iter().flatten())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    /// Whether every stored value is finite.
    pub fn is_finite(&self) -> bool {
        self.intervals.iter().flat_map(|s| s.values.iter().flatten()).all(|v| v.is_finite())
    }
}

/// Interpolation of the solution: linear in `ln x`, quadratic in `t`.
///
/// At an announcing date the value of the interval starting there is used;
/// `t = T` returns the terminal data of the last interval.
pub fn sample(solution: &CascadeSolution, x: f64, t: f64) -> Result<f64> {
    let y = &solution.y;
    let n = y.len();
    let maturity = solution.dates[solution.dates.len() - 1];
    if !(x > 0.0) || t.is_nan() || t < 0.0 || t > maturity {
        bail!(Domain, "point (x={x}, t={t}) outside the grid hull");
    }
    let ly = log(x);
    if ly < y[0] || ly > y[n - 1] {
        bail!(Domain, "spot {x} outside the grid hull [{}, {}]", exp(y[0]), exp(y[n - 1]));
    }
    let i = solution.dates[1..solution.dates.len() - 1].iter().take_while(|&&d| d <= t).count();
    let slices = &solution.intervals[i];
    let h = y[1] - y[0];
    let j = (((ly - y[0]) / h) as usize).min(n - 2);
    let wy = ((ly - y[j]) / h).clamp(0.0, 1.0);
    let at = |v: &Vec<f64>| v[j] + wy * (v[j + 1] - v[j]);
    let times = &slices.times;
    let m = times.len();
    let k = times.partition_point(|&s| s <= t).clamp(1, m - 1) - 1;
    if m < 3 {
        let wt = ((t - times[k]) / (times[k + 1] - times[k])).clamp(0.0, 1.0);
        let (lo, hi) = (at(&slices.values[k]), at(&slices.values[k + 1]));
        return Ok(lo + wt * (hi - lo));
    }
    // Quadratic in time through three neighbouring slices.
    let a = k.min(m - 3);
    let (t0, t1, t2) = (times[a], times[a + 1], times[a + 2]);
    let (v0, v1, v2) = (at(&slices.values[a]), at(&slices.values[a + 1]), at(&slices.values[a + 2]));
    let l0 = (t - t1) * (t - t2) / ((t0 - t1) * (t0 - t2));
    let l1 = (t - t0) * (t - t2) / ((t1 - t0) * (t1 - t2));
    let l2 = (t - t0) * (t - t1) / ((t2 - t0) * (t2 - t1));
    Ok(l0 * v0 + l1 * v1 + l2 * v2)
}

/// What is paid at default as a function of `x`.
#[derive(Debug, Clone, Copy)]
enum Payoff {
    /// `min{1, ratio · x}`.
    Capped(f64),
    /// A constant.
    Constant(f64),
}

impl Payoff {
    fn value(self, x: f64) -> f64 {
        match self {
            Payoff::Capped(ratio) => (ratio * x).min(1.0),
            Payoff::Constant(c) => c,
        }
    }

    /// `(c, d)` with payoff `≈ c x + d` as `x → 0`.
    fn small(self) -> (f64, f64) {
        match self {
            Payoff::Capped(ratio) => (ratio, 0.0),
            Payoff::Constant(c) => (0.0, c),
        }
    }

    /// Limit as `x → ∞`.
    fn large(self) -> f64 {
        match self {
            Payoff::Capped(ratio) if ratio > 0.0 => 1.0,
            Payoff::Capped(_) => 0.0,
            Payoff::Constant(c) => c,
        }
    }
}

/// `(1 - e^{-aΔ}) / a`, continuous at `a = 0`.
fn decay_integral(a: f64, delta: f64) -> f64 {
    if fabs(a * delta) < 1e-12 {
        delta
    } else {
        -libm::expm1(-a * delta) / a
    }
}

fn solve_cascade(
    params: &MarketParams,
    schedule: &DefaultSchedule,
    payoff: Payoff,
    grid: &GridSpec,
) -> Result<CascadeSolution> {
    grid.validate()?;
    let mut solution = solve_cascade_once(params, schedule, payoff, grid)?;
    if let Some(check) = grid.check {
        let coarse = solve_cascade_once(params, schedule, payoff, &grid.halved())?;
        let mut estimate = 0.0f64;
        for &t in &schedule.dates()[..schedule.len()] {
            let diff = sample(&solution, check.x, t)? - sample(&coarse, check.x, t)?;
            estimate = estimate.max(fabs(diff) / 3.0);
        }
        solution.error_estimate = Some(estimate);
        if estimate > check.tolerance {
            solution.warning = Some(AccuracyWarning { estimate, tolerance: check.tolerance });
        }
    }
    Ok(solution)
}

fn solve_cascade_once(
    params: &MarketParams,
    schedule: &DefaultSchedule,
    payoff: Payoff,
    grid: &GridSpec,
) -> Result<CascadeSolution> {
    let y = grid.nodes();
    let x: Vec<f64> = y.iter().map(|&v| exp(v)).collect();
    let dates = schedule.dates();
    let n_int = schedule.len();
    let coeffs = BsCoefficients::new(0.0, params.b, params.s_v)?;
    let stride = (grid.n_time_per_interval / 128).max(1);

    // Value just after t_{i+1}, and its asymptotes there.
    let mut next: Vec<f64> = vec![1.0; y.len()];
    let (mut low_c, mut low_d, mut high) = (0.0, 1.0, 1.0);
    let mut intervals = Vec::with_capacity(n_int);
    for i in (0..n_int).rev() {
        let k = schedule.barriers()[i];
        let above = cell_indicator(&y, k, true);
        let terminal: Vec<f64> =
            (0..y.len()).map(|j| above[j] * next[j] + (1.0 - above[j]) * payoff.value(x[j])).collect();
        if k > x[0] {
            (low_c, low_d) = payoff.small();
        }
        let lam = schedule.intensities()[i];
        let a = lam + params.b;
        let (t_lo, t_hi) = (dates[i], dates[i + 1]);
        let (sc, sd) = payoff.small();
        let s_inf = payoff.large();
        let (c_e, d_e, h_e) = (low_c, low_d, high);
        let x_lo = x[0];
        let lower = move |t: f64| {
            let delta = t_hi - t;
            let c = exp(-a * delta) * c_e + sc * lam * decay_integral(a, delta);
            let d = exp(-lam * delta) * d_e + sd * lam * decay_integral(lam, delta);
            c * x_lo + d
        };
        let upper = move |t: f64| {
            let delta = t_hi - t;
            exp(-lam * delta) * h_e + s_inf * lam * decay_integral(lam, delta)
        };
        let src = move |yv: f64| lam * payoff.value(exp(yv));
        let problem = Propagation {
            coeffs: BsCoefficients { r: lam, q: lam + params.b, ..coeffs },
            source: if lam > 0.0 { Some(&src) } else { None },
            lower: Boundary::Dirichlet(&lower),
            upper: Boundary::Dirichlet(&upper),
        };
        let slices = propagate(&y, &terminal, t_lo, t_hi, grid.n_time_per_interval, stride, &problem)?;
        let delta = t_hi - t_lo;
        low_c = exp(-a * delta) * c_e + sc * lam * decay_integral(a, delta);
        low_d = exp(-lam * delta) * d_e + sd * lam * decay_integral(lam, delta);
        high = exp(-lam * delta) * h_e + s_inf * lam * decay_integral(lam, delta);
        next = slices.values[0].clone();
        intervals.push(slices);
    }
    intervals.reverse();
    Ok(CascadeSolution { y, dates: dates.to_vec(), intervals, error_estimate: None, warning: None })
}

/// Relative price `u` with endogenous recovery `min{1, R x / n}`.
pub fn solve_endogenous_cascade(
    params: &MarketParams,
    schedule: &DefaultSchedule,
    recovery: &RecoveryModel,
    grid: &GridSpec,
) -> Result<CascadeSolution> {
    recovery.validate()?;
    let RecoveryModel::Endogenous { rate, bonds } = *recovery else {
        bail!(Invalid, "endogenous cascade requires an endogenous recovery model");
    };
    solve_cascade(params, schedule, Payoff::Capped(rate / bonds), grid)
}

/// Relative price `u` with exogenous recovery `R`.
pub fn solve_exogenous_cascade(
    params: &MarketParams,
    schedule: &DefaultSchedule,
    recovery: &RecoveryModel,
    grid: &GridSpec,
) -> Result<CascadeSolution> {
    recovery.validate()?;
    let RecoveryModel::Exogenous { rate } = *recovery else {
        bail!(Invalid, "exogenous cascade requires an exogenous recovery model");
    };
    solve_cascade(params, schedule, Payoff::Constant(rate), grid)
}

/// Survival probability `W` (homogeneous cascade, nothing paid at default).
pub fn solve_survival_cascade(
    params: &MarketParams,
    schedule: &DefaultSchedule,
    grid: &GridSpec,
) -> Result<CascadeSolution> {
    solve_cascade(params, schedule, Payoff::Constant(0.0), grid)
}

/// Solve for `u` under either recovery model.
pub fn solve_cascade_for(
    params: &MarketParams,
    schedule: &DefaultSchedule,
    recovery: &RecoveryModel,
    grid: &GridSpec,
) -> Result<CascadeSolution> {
    match recovery {
        RecoveryModel::Endogenous { .. } => solve_endogenous_cascade(params, schedule, recovery, grid),
        RecoveryModel::Exogenous { .. } => solve_exogenous_cascade(params, schedule, recovery, grid),
    }
}
