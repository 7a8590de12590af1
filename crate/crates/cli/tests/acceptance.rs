//! Acceptance suite: one PASS/FAIL line per criterion.

#[path = "../../core/tests/common/mod.rs"]
mod oracles;

#[path = "common/mod.rs"]
mod trends;

use std::time::Instant;

use binbond::presets::FIGURES;
use binbond::scenario::Scenario;
use binbond::validate::{simulate_parallel, validate_scenario, ValidateOptions};
use binbond_core::binaries::{
    price_binary, price_binary_with, shift_coefficients, BinaryKind, BinarySpec, BsCoefficients,
};
use binbond_core::intbin::{integral_binary, integrate_weighted, IntegralConfig, WeightedIntegralSpec};
use binbond_core::mc::SimConfig;
use binbond_core::mvn::{build_correlation, mvn_cdf, MvnConfig, Sign, SignVector, SymMatrix};
use binbond_core::pde::{cell_indicator, propagate, sample, solve_cascade_for, Boundary, GridSpec, Propagation};
use binbond_core::pricer::{
    price, riskless_bond, survival_probability, DefaultSchedule, MarketParams, PricerConfig, RecoveryModel, Spot,
};
use binbond_core::quadrature::QuadConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn market() -> MarketParams {
    MarketParams::new(0.1, 0.05, 1.0).unwrap()
}

fn base_schedule() -> DefaultSchedule {
    DefaultSchedule::new(&[3.0, 6.0], &[0.002, 0.005], &[100.0, 100.0]).unwrap()
}

fn base_scenario(recovery: &str) -> Scenario {
    let text = format!(
        "[market]\nr = 0.1\nb = 0.05\ns_v = 1.0\n\n[schedule]\ndates = [3.0, 6.0]\nintensities = [0.002, 0.005]\n\
         barriers = [100.0, 100.0]\n\n[recovery]\n{recovery}\n\n[evaluation]\nx = 200.0\nt = [0.0, 1.5, 3.0, 4.5]\n"
    );
    Scenario::from_toml(&text).unwrap()
}

fn three_way(label: &str, scenario: &Scenario, cfg: &PricerConfig) -> Outcome {
    let opts = ValidateOptions::default();
    let rows = validate_scenario(scenario, &opts, cfg).map_err(|e| format!("{label}: {e}"))?;
    let worst_pde = rows.iter().map(|r| r.pde_diff).fold(0.0, f64::max);
    let worst_z = rows.iter().map(|r| r.z.abs()).fold(0.0, f64::max);
    for r in &rows {
        ensure(r.pass, || format!("{label} t={}: closed {} PDE {} MC {} (z={:.2})", r.t, r.closed, r.pde, r.mc, r.z))?;
    }
    Ok(format!("{label}: max |closed-PDE| {worst_pde:.1e}, max |z| {worst_z:.2}"))
}

fn criterion_1() -> Outcome {
    three_way("exogenous", &base_scenario("mode = \"exogenous\"\nrate = 0.5"), &PricerConfig::default())
}

fn criterion_2() -> Outcome {
    let cfg = PricerConfig { quad: QuadConfig { abs_tol: 1e-8, ..QuadConfig::default() }, ..PricerConfig::default() };
    let case_i =
        three_way("case i (n/R=200)", &base_scenario("mode = \"endogenous\"\nrate = 0.5\nbonds = 100.0"), &cfg)?;
    let case_ii = three_way("case ii (n/R=2)", &base_scenario("mode = \"endogenous\"\nrate = 0.5\nbonds = 1.0"), &cfg)?;
    Ok(format!("{case_i}; {case_ii}"))
}

fn random_spec(rng: &mut ChaCha8Rng, max_order: usize) -> (BinarySpec, f64, f64) {
    let m = rng.random_range(1..=max_order);
    let kind = if rng.random_bool(0.5) { BinaryKind::Bond } else { BinaryKind::Asset };
    let t = rng.random_range(0.0..1.0);
    let mut expiries = Vec::with_capacity(m);
    let mut last = t;
    for _ in 0..m {
        last += rng.random_range(0.05..3.0);
        expiries.push(last);
    }
    let strikes: Vec<f64> = (0..m).map(|_| rng.random_range(20.0..300.0)).collect();
    let signs = SignVector((0..m).map(|_| if rng.random_bool(0.5) { Sign::Plus } else { Sign::Minus }).collect());
    let coeffs =
        BsCoefficients::new(rng.random_range(-0.05..0.15), rng.random_range(0.0..0.1), rng.random_range(0.1..1.5))
            .unwrap();
    let x = rng.random_range(20.0..300.0);
    (BinarySpec::new(kind, signs, strikes, expiries, coeffs).unwrap(), x, t)
}

fn nested_by_pde(spec: &BinarySpec, x: f64, t: f64) -> f64 {
    let c = spec.coeffs();
    let t1 = spec.expiries()[0];
    let width = 8.0 * c.sigma * (spec.last_expiry() - t).sqrt() + 2.0;
    let n = 4001;
    let (y0, y1) = (x.ln() - width, x.ln() + width);
    let y: Vec<f64> = (0..n).map(|j| y0 + (y1 - y0) * j as f64 / (n - 1) as f64).collect();
    let ind = cell_indicator(&y, spec.strikes()[0], spec.signs().0[0] == Sign::Plus);
    let terminal: Vec<f64> = if spec.order() == 1 {
        let pay = |s: f64| if spec.kind() == BinaryKind::Asset { s.exp() } else { 1.0 };
        y.iter().zip(&ind).map(|(&v, &i)| i * pay(v)).collect()
    } else {
        let tail = BinarySpec::new(
            spec.kind(),
            SignVector(spec.signs().0[1..].to_vec()),
            spec.strikes()[1..].to_vec(),
            spec.expiries()[1..].to_vec(),
            c,
        )
        .unwrap();
        y.iter()
            .zip(&ind)
            .map(|(&v, &i)| if i == 0.0 { 0.0 } else { i * price_binary(&tail, v.exp(), t1).unwrap() })
            .collect()
    };
    let problem = Propagation { coeffs: c, source: None, lower: Boundary::Linear, upper: Boundary::Linear };
    propagate(&y, &terminal, t, t1, 1000, 1000, &problem).unwrap().values[0][(n - 1) / 2]
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_parity = 0.0f64;
    for _ in 0..10_000 {
        let (spec, x, t) = random_spec(&mut rng, 3);
        let plus = price_binary(&spec.with_last_sign(Sign::Plus), x, t).unwrap();
        let minus = price_binary(&spec.with_last_sign(Sign::Minus), x, t).unwrap();
        let m = spec.order();
        let want = if m == 1 {
            spec.discount_bound(x, t)
        } else {
            let rate = if spec.kind() == BinaryKind::Bond { spec.coeffs().r } else { spec.coeffs().q };
            let gap = spec.expiries()[m - 1] - spec.expiries()[m - 2];
            (-rate * gap).exp() * price_binary(&spec.truncated().unwrap(), x, t).unwrap()
        };
        let unit = if spec.kind() == BinaryKind::Asset { x } else { 1.0 };
        worst_parity = worst_parity.max(((plus + minus - want) / unit).abs());
    }
    ensure(worst_parity <= 1e-12, || format!("last-sign parity error {worst_parity:e}"))?;

    let cfg = MvnConfig { base_points: 1 << 13, max_points: 1 << 13, ..MvnConfig::default() };
    let mut worst_shift = 0.0f64;
    for _ in 0..200 {
        let (spec, x, t) = random_spec(&mut rng, 4);
        let new_r = rng.random_range(-0.2..0.2);
        let (scale, shifted) = shift_coefficients(&spec, new_r, t).unwrap();
        let lhs = price_binary_with(&spec, x, t, &cfg).unwrap().price;
        let rhs = scale * price_binary_with(&shifted, x, t, &cfg).unwrap().price;
        if lhs > 1e-300 {
            worst_shift = worst_shift.max(((lhs - rhs) / lhs).abs());
        }
    }
    ensure(worst_shift <= 1e-10, || format!("coefficient shift relative error {worst_shift:e}"))?;

    let c = BsCoefficients::new(0.0, 0.05, 1.0).unwrap();
    let base = BinarySpec::all_plus(BinaryKind::Bond, vec![100.0, 100.0], vec![3.0, 6.0], c).unwrap();
    let asset = BinarySpec::new(
        BinaryKind::Asset,
        SignVector::from_ints(&[1, -1]).unwrap(),
        vec![80.0, 120.0],
        vec![1.0, 2.5],
        BsCoefficients::new(0.05, 0.02, 0.3).unwrap(),
    )
    .unwrap();
    let third = BinarySpec::new(
        BinaryKind::Bond,
        SignVector::from_ints(&[-1, 1, 1]).unwrap(),
        vec![120.0, 90.0, 100.0],
        vec![0.5, 1.5, 2.0],
        BsCoefficients::new(0.03, 0.01, 0.4).unwrap(),
    )
    .unwrap();
    let mut worst_nest = 0.0f64;
    for (spec, x, t) in [
        (base.clone(), 200.0, 0.0),
        (base.with_last_sign(Sign::Minus), 150.0, 0.5),
        (asset, 100.0, 0.0),
        (third, 100.0, 0.0),
    ] {
        let unit = if spec.kind() == BinaryKind::Asset { x } else { 1.0 };
        worst_nest = worst_nest.max(((price_binary(&spec, x, t).unwrap() - nested_by_pde(&spec, x, t)) / unit).abs());
    }
    ensure(worst_nest <= 5e-4, || format!("nesting error {worst_nest:e}"))?;
    Ok(format!(
        "parity {worst_parity:.1e} on 10^4 specs (order <= 3), shift {worst_shift:.1e} (order <= 4), nesting {worst_nest:.1e}"
    ))
}

fn random_correlation(rng: &mut ChaCha8Rng, m: usize) -> SymMatrix {
    loop {
        let f: Vec<Vec<f64>> = (0..m).map(|_| (0..m).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let norm: Vec<f64> = f.iter().map(|r| r.iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
        let mut c = SymMatrix::identity(m);
        for i in 0..m {
            for j in 0..i {
                let dot: f64 = (0..m).map(|k| f[i][k] * f[j][k]).sum();
                c.set(i, j, dot / (norm[i] * norm[j]));
                c.set(j, i, dot / (norm[i] * norm[j]));
            }
        }
        if c.eigenvalues()[0] > 0.02 {
            return c;
        }
    }
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let cfg = MvnConfig::default();
    let mut worst_marginal = 0.0f64;
    let mut worst_monotone = 0.0f64;
    for m in 2..=6 {
        for _ in 0..4 {
            let c = random_correlation(&mut rng, m);
            let a: Vec<f64> = (0..m).map(|_| rng.random_range(-2.0..2.0)).collect();
            let drop = rng.random_range(0..m);
            let keep: Vec<usize> = (0..m).filter(|&i| i != drop).collect();
            let reduced: Vec<f64> = keep.iter().map(|&i| a[i]).collect();
            let p_red = mvn_cdf(&reduced, &c.submatrix(&keep), &SignVector::all_plus(m - 1), &cfg).unwrap().probability;
            let mut full = a.clone();
            full[drop] = f64::INFINITY;
            let p_full = mvn_cdf(&full, &c, &SignVector::all_plus(m), &cfg).unwrap().probability;
            full[drop] = 60.0;
            let p_big = mvn_cdf(&full, &c, &SignVector::all_plus(m), &cfg).unwrap().probability;
            worst_marginal = worst_marginal.max((p_full - p_red).abs()).max((p_big - p_red).abs());

            let lo = mvn_cdf(&a, &c, &SignVector::all_plus(m), &cfg).unwrap().probability;
            let mut up = a.clone();
            up[rng.random_range(0..m)] += rng.random_range(0.05..1.0);
            let hi = mvn_cdf(&up, &c, &SignVector::all_plus(m), &cfg).unwrap().probability;
            worst_monotone = worst_monotone.max(lo - hi);
        }
    }
    ensure(worst_marginal <= 1e-9, || format!("marginalisation error {worst_marginal:e}"))?;
    ensure(worst_monotone <= 1e-9, || format!("monotonicity violated by {worst_monotone:e}"))?;

    let corr = build_correlation(0.0, &[1.0, 2.0, 3.0]).unwrap();
    let cov = corr.covariance();
    let a = [0.5, 0.2, -0.1];
    let got = mvn_cdf(&a, &cov, &SignVector::all_plus(3), &cfg).unwrap().probability;
    let want = oracles::trivariate_oracle(a, [cov.get(0, 1), cov.get(0, 2), cov.get(1, 2)]);
    let mut worst_tri = (got - want).abs();
    for _ in 0..6 {
        let c = random_correlation(&mut rng, 3);
        let a = [rng.random_range(-2.5..2.5), rng.random_range(-2.5..2.5), rng.random_range(-2.5..2.5)];
        let got = mvn_cdf(&a, &c, &SignVector::all_plus(3), &cfg).unwrap().probability;
        let want = oracles::trivariate_oracle(a, [c.get(0, 1), c.get(0, 2), c.get(1, 2)]);
        worst_tri = worst_tri.max((got - want).abs());
    }
    ensure(worst_tri <= 1e-6, || format!("trivariate quadrature disagreement {worst_tri:e}"))?;

    let mut worst_identity = 0.0f64;
    for _ in 0..500 {
        let m = rng.random_range(1..=8);
        let t = rng.random_range(0.0..1.0);
        let mut last = t;
        let expiries: Vec<f64> = (0..m)
            .map(|_| {
                last += rng.random_range(0.01..3.0);
                last
            })
            .collect();
        let c = build_correlation(t, &expiries).unwrap();
        for (i, row) in c.covariance().mul(&c.precision()).iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                worst_identity = worst_identity.max((v - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
    }
    ensure(worst_identity <= 1e-12, || format!("precision x covariance off identity by {worst_identity:e}"))?;
    Ok(format!(
        "marginal {worst_marginal:.1e}, monotone slack {:.1e}, trivariate {worst_tri:.1e}, identity {worst_identity:.1e}",
        worst_monotone.max(0.0)
    ))
}

fn criterion_5() -> Outcome {
    let c = BsCoefficients::new(0.0, 0.05, 1.0).unwrap();
    let bond = |k: f64, t: f64| BinarySpec::all_plus(BinaryKind::Bond, vec![k], vec![t], c).unwrap();
    let tight = QuadConfig { abs_tol: 1e-14, ..QuadConfig::default() };
    let mut worst_const = 0.0f64;
    for &(lam, lo, hi) in &[(0.005, 3.0, 6.0), (2.0, 0.0, 1.0), (0.3, 1.0, 1.5)] {
        let spec = WeightedIntegralSpec::new(bond(100.0, hi), lam, lo, lo, hi).unwrap();
        let r = integrate_weighted(&spec, |_| Ok(1.0), &tight).unwrap();
        worst_const = worst_const.max((r.value - (1.0 - (-lam * (hi - lo)).exp())).abs());
    }
    ensure(worst_const <= 1e-12, || format!("constant integrand error {worst_const:e}"))?;

    let cfg = IntegralConfig { quad: tight, ..IntegralConfig::default() };
    let second = BinarySpec::all_plus(BinaryKind::Bond, vec![100.0, 150.0], vec![3.0, 6.0], c).unwrap();
    let mut worst_add = 0.0f64;
    for base in [bond(150.0, 6.0), second] {
        for &split in &[3.7, 4.5, 5.2] {
            let part = |lo: f64, hi: f64| {
                let spec = WeightedIntegralSpec::new(base.clone(), 0.2, 3.0, lo, hi).unwrap();
                integral_binary(&spec, 200.0, 0.0, &cfg).unwrap().value
            };
            worst_add = worst_add.max((part(3.0, 6.0) - part(3.0, split) - part(split, 6.0)).abs());
        }
    }
    ensure(worst_add <= 1e-12, || format!("additivity error {worst_add:e}"))?;

    let spec = WeightedIntegralSpec::new(bond(200.0, 6.0), 0.005, 3.0, 3.0, 6.0).unwrap();
    let got = integral_binary(&spec, 200.0, 0.0, &IntegralConfig::default()).unwrap().value;
    let integrand = |tau: f64| {
        let d = (-(0.05 + 0.5) * tau) / tau.sqrt();
        0.005 * (-0.005 * (tau - 3.0)).exp() * oracles::cdf(d)
    };
    let n = 1 << 14;
    let h = 3.0 / n as f64;
    let interior: f64 = (1..n).map(|k| integrand(3.0 + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 }).sum();
    let simpson = (integrand(3.0) + integrand(6.0) + interior) * h / 3.0;
    let simpson_err = (got - simpson).abs();
    ensure(simpson_err <= 1e-6, || format!("Simpson disagreement {simpson_err:e}"))?;
    Ok(format!("constant {worst_const:.1e}, additivity {worst_add:.1e}, Simpson {simpson_err:.1e}"))
}

fn criterion_6() -> Outcome {
    let p = market();
    let cfg = PricerConfig::default();
    let full = RecoveryModel::Exogenous { rate: 1.0 };
    let mut worst_full = 0.0f64;
    for &t in &[0.0, 1.5, 3.0, 4.5, 5.99] {
        for &v in &[1.0, 50.0, 100.0, 1e4] {
            let r = price(&p, &base_schedule(), &full, Spot::Firm(v), t, &cfg).unwrap();
            worst_full = worst_full.max((r.price - (-0.1f64 * (6.0 - t)).exp()).abs());
        }
    }
    ensure(worst_full <= 1e-12, || format!("R = 1 deviates from the riskless bond by {worst_full:e}"))?;

    let none = DefaultSchedule::new(&[3.0, 6.0], &[0.0, 0.0], &[0.0, 0.0]).unwrap();
    let mut worst_none = 0.0f64;
    for rec in [RecoveryModel::Exogenous { rate: 0.4 }, RecoveryModel::Endogenous { rate: 0.5, bonds: 100.0 }] {
        let grid = GridSpec::automatic(&p, &none, &rec, 200.0, 512, 64).unwrap();
        let pde = solve_cascade_for(&p, &none, &rec, &grid).unwrap();
        for &t in &[0.0, 3.0, 4.5] {
            let riskless = riskless_bond(&p, &none, t).unwrap();
            let closed = price(&p, &none, &rec, Spot::Relative(200.0), t, &cfg).unwrap().price;
            let case = binbond::scenario::Case {
                label: "riskless".into(),
                params: p,
                schedule: none.clone(),
                recovery: rec,
                spot: binbond::scenario::SpotSpec::Relative(200.0),
            };
            let sim = SimConfig { n_paths: 50_000, ..SimConfig::default() };
            let mc = simulate_parallel(&case, t, sim).unwrap();
            ensure(mc.price == riskless && mc.std_error == 0.0, || format!("MC riskless limit {} at t={t}", mc.price))?;
            let pde_c = riskless * sample(&pde, 200.0, t).unwrap();
            worst_none = worst_none.max((closed - riskless).abs()).max((pde_c - riskless).abs());
        }
    }
    ensure(worst_none <= 1e-10, || format!("no-default limit off by {worst_none:e}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut checked = 0;
    for _ in 0..200 {
        let lams = [rng.random_range(0.0..0.5), rng.random_range(0.0..0.5)];
        let ks = [rng.random_range(0.0..300.0), rng.random_range(0.0..300.0)];
        let s = DefaultSchedule::new(&[3.0, 6.0], &lams, &ks).unwrap();
        let params = MarketParams::new(0.1, rng.random_range(0.0..0.1), rng.random_range(0.1..1.5)).unwrap();
        let x = (rng.random_range(-3.0f64..8.0)).exp();
        let t = rng.random_range(0.0..6.0);
        let w = survival_probability(&params, &s, x, t).unwrap();
        ensure((0.0..=1.0).contains(&w), || format!("W = {w} outside [0, 1]"))?;
        checked += 1;
    }
    Ok(format!("R=1 {worst_full:.1e}, no-default (closed/PDE/MC) {worst_none:.1e}, W in [0,1] at {checked} points"))
}

fn criterion_7() -> Outcome {
    let mut summary = Vec::new();
    for figure in 1..=FIGURES {
        let curve = trends::figure_curve(figure);
        trends::check_trend(figure, &curve)?;
        summary.push(figure.to_string());
    }
    Ok(format!("figures {} ordered as expected on 121-point grids", summary.join(",")))
}

fn criterion_8() -> Outcome {
    let p = market();
    let cfg = PricerConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let schedule = base_schedule();
    let recoveries = [
        RecoveryModel::Exogenous { rate: 0.5 },
        RecoveryModel::Endogenous { rate: 0.5, bonds: 100.0 },
        RecoveryModel::Endogenous { rate: 0.5, bonds: 1.0 },
    ];
    let t_next = schedule.dates()[1];
    let riskless = (-p.r * (schedule.maturity() - t_next)).exp();
    let barrier = schedule.barriers()[0] * riskless;
    let mut worst = 0.0f64;
    for rec in recoveries {
        let mut checked = 0;
        while checked < 100 {
            let v = barrier * rng.random_range(-2.0f64..2.0).exp();
            if (v / barrier).ln().abs() < 1e-3 {
                continue;
            }
            let before = price(&p, &schedule, &rec, Spot::Firm(v), t_next - 1e-12, &cfg).unwrap().price;
            let after = if v > barrier {
                price(&p, &schedule, &rec, Spot::Firm(v), t_next, &cfg).unwrap().price
            } else {
                match rec {
                    RecoveryModel::Exogenous { rate } => rate * riskless,
                    RecoveryModel::Endogenous { rate, bonds } => riskless.min(rate * v / bonds),
                }
            };
            worst = worst.max((before - after).abs());
            checked += 1;
        }
    }
    ensure(worst <= 1e-6, || format!("gluing mismatch {worst:e}"))?;
    Ok(format!("max mismatch {worst:.1e} over 300 spots"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("three-way agreement, exogenous recovery", criterion_1),
        ("three-way agreement, endogenous cases i and ii", criterion_2),
        ("binary identities: parity, coefficient shift, nesting", criterion_3),
        ("normal CDF engine", criterion_4),
        ("integral of binary", criterion_5),
        ("limit checks", criterion_6),
        ("figure trends", criterion_7),
        ("gluing at announcing dates", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail} ({secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
