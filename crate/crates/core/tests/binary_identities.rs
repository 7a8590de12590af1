use binbond_core::binaries::{
    price_binary, price_binary_with, shift_coefficients, BinaryKind, BinarySpec, BsCoefficients,
};
use binbond_core::mvn::{MvnConfig, Sign, SignVector};
use binbond_core::pde::{cell_indicator, propagate, Boundary, Propagation};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

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

#[test]
fn last_sign_parity_on_random_specs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10_000 {
        let (spec, x, t) = random_spec(&mut rng, 3);
        let plus = price_binary(&spec.with_last_sign(Sign::Plus), x, t).unwrap();
        let minus = price_binary(&spec.with_last_sign(Sign::Minus), x, t).unwrap();
        let c = spec.coeffs();
        let m = spec.order();
        let last_rate = match spec.kind() {
            BinaryKind::Bond => c.r,
            BinaryKind::Asset => c.q,
        };
        let want = if m == 1 {
            spec.discount_bound(x, t)
        } else {
            let gap = spec.expiries()[m - 1] - spec.expiries()[m - 2];
            (-last_rate * gap).exp() * price_binary(&spec.truncated().unwrap(), x, t).unwrap()
        };
        // Asset prices are measured in units of the spot.
        let unit = match spec.kind() {
            BinaryKind::Bond => 1.0,
            BinaryKind::Asset => x,
        };
        assert!(((plus + minus - want) / unit).abs() < 1e-12, "{spec:?} x={x} t={t}: {} vs {want}", plus + minus);
        assert!(plus >= 0.0 && minus >= 0.0);
        assert!(plus <= spec.discount_bound(x, t) * (1.0 + 1e-12));
    }
}

#[test]
fn identity_shift_is_trivial() {
    let c = BsCoefficients::new(0.03, 0.05, 0.4).unwrap();
    let spec = BinarySpec::all_plus(BinaryKind::Bond, vec![90.0], vec![2.0], c).unwrap();
    let (scale, shifted) = shift_coefficients(&spec, 0.03, 0.0).unwrap();
    assert_eq!(scale, 1.0);
    assert_eq!(shifted, spec);
}

#[test]
fn shift_example_first_order() {
    let c = BsCoefficients::new(0.002, 0.052, 1.0).unwrap();
    let spec = BinarySpec::all_plus(BinaryKind::Bond, vec![100.0], vec![6.0], c).unwrap();
    let (scale, shifted) = shift_coefficients(&spec, 0.0, 0.0).unwrap();
    assert!((scale - (-0.012f64).exp()).abs() < 1e-15);
    let lhs = price_binary(&spec, 200.0, 0.0).unwrap();
    let rhs = scale * price_binary(&shifted, 200.0, 0.0).unwrap();
    assert!(((lhs - rhs) / lhs).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coefficient_shift_up_to_order_four(seed in any::<u64>(), new_r in -0.2f64..0.2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (spec, x, t) = random_spec(&mut rng, 4);
        // A single lattice pass keeps order-4 cases quick; the identity is exact for any budget.
        let cfg = MvnConfig { base_points: 1 << 13, max_points: 1 << 13, ..MvnConfig::default() };
        let (scale, shifted) = shift_coefficients(&spec, new_r, t).unwrap();
        let lhs = price_binary_with(&spec, x, t, &cfg).unwrap().price;
        let rhs = scale * price_binary_with(&shifted, x, t, &cfg).unwrap().price;
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1e-300), "{lhs} vs {rhs}");
    }

    #[test]
    fn satisfies_black_scholes_operator(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (spec, x, t) = random_spec(&mut rng, 3);
        prop_assume!(spec.expiries()[0] - t > 0.2);
        let BsCoefficients { r, q, sigma } = spec.coeffs();
        let f = |x: f64, t: f64| price_binary(&spec, x, t).unwrap();
        let (hx, ht) = (1e-3 * x, 1e-4);
        let f0 = f(x, t);
        let f_t = (f(x, t + ht) - f(x, t - ht)) / (2.0 * ht);
        let f_x = (f(x + hx, t) - f(x - hx, t)) / (2.0 * hx);
        let f_xx = (f(x + hx, t) - 2.0 * f0 + f(x - hx, t)) / (hx * hx);
        let residual = f_t + 0.5 * sigma * sigma * x * x * f_xx + (r - q) * x * f_x - r * f0;
        let unit = spec.discount_bound(x, t) / (spec.expiries()[0] - t);
        prop_assert!(residual.abs() < 1e-4 * unit.max(1.0), "residual {residual}");
    }
}

/// Order-m price by propagating `1(s_1 x > s_1 K_1) · F_{m-1}(x, T_1)` back to `t`.
fn nested_by_pde(spec: &BinarySpec, x: f64, t: f64) -> f64 {
    let c = spec.coeffs();
    let t1 = spec.expiries()[0];
    let width = 8.0 * c.sigma * (spec.last_expiry() - t).sqrt() + 2.0;
    let n = 4001;
    let (y0, y1) = (x.ln() - width, x.ln() + width);
    let y: Vec<f64> = (0..n).map(|j| y0 + (y1 - y0) * j as f64 / (n - 1) as f64).collect();
    let plus = spec.signs().0[0] == Sign::Plus;
    let ind = cell_indicator(&y, spec.strikes()[0], plus);
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
    let slices = propagate(&y, &terminal, t, t1, 1000, 1000, &problem).unwrap();
    let j = (n - 1) / 2;
    slices.values[0][j]
}

#[test]
fn nesting_matches_pde_propagation() {
    let c = BsCoefficients::new(0.0, 0.05, 1.0).unwrap();
    let base = BinarySpec::all_plus(BinaryKind::Bond, vec![100.0, 100.0], vec![3.0, 6.0], c).unwrap();
    let cases = vec![
        (base.clone(), 200.0, 0.0),
        (base.with_last_sign(Sign::Minus), 150.0, 0.5),
        (
            BinarySpec::new(
                BinaryKind::Asset,
                SignVector::from_ints(&[1, -1]).unwrap(),
                vec![80.0, 120.0],
                vec![1.0, 2.5],
                BsCoefficients::new(0.05, 0.02, 0.3).unwrap(),
            )
            .unwrap(),
            100.0,
            0.0,
        ),
        (
            BinarySpec::new(
                BinaryKind::Bond,
                SignVector::from_ints(&[-1, 1, 1]).unwrap(),
                vec![120.0, 90.0, 100.0],
                vec![0.5, 1.5, 2.0],
                BsCoefficients::new(0.03, 0.01, 0.4).unwrap(),
            )
            .unwrap(),
            100.0,
            0.0,
        ),
    ];
    for (spec, x, t) in cases {
        let closed = price_binary(&spec, x, t).unwrap();
        let pde = nested_by_pde(&spec, x, t);
        let unit = if spec.kind() == BinaryKind::Asset { x } else { 1.0 };
        assert!(((closed - pde) / unit).abs() < 5e-4, "{spec:?}: closed {closed} vs pde {pde}");
    }
}
