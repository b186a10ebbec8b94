use std::f64::consts::LN_2;

use fermi_renyi::entropy::{g_consistency, renyi_density, Order};
use fermi_renyi::symbol::{cosine_thermal, make_thermal_symbol, raised_cosine};
use fermi_renyi::{QuadratureSpec, Symbol};
use proptest::prelude::*;

fn thermal() -> impl Strategy<Value = (f64, f64)> {
    (0.3f64..5.0, -0.9f64..0.9)
}

fn order() -> impl Strategy<Value = Order> {
    prop_oneof![
        Just(Order::One),
        Just(Order::Infinity),
        (0.1f64..12.0).prop_map(|a| Order::new(a).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn order_monotonicity((beta, mu) in thermal(), a in 0.1f64..8.0, b in 0.1f64..8.0) {
        let q = cosine_thermal(1, beta, mu, 1.0).unwrap();
        let spec = QuadratureSpec::default();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let mut orders = vec![Order::new(lo).unwrap(), Order::new(hi).unwrap(), Order::Infinity];
        if lo < 1.0 && hi > 1.0 {
            orders.insert(1, Order::One);
        }
        let values: Vec<_> = orders.iter().map(|&o| renyi_density(&q, o, &spec).unwrap()).collect();
        for w in values.windows(2) {
            prop_assert!(w[0].value >= w[1].value - (w[0].quad_error + w[1].quad_error));
        }
    }

    #[test]
    fn scale_bounds((beta, mu) in thermal(), o in order()) {
        let q = cosine_thermal(1, beta, mu, 1.0).unwrap();
        let s = renyi_density(&q, o, &QuadratureSpec::default()).unwrap();
        prop_assert!(s.value >= 0.0 && s.value <= LN_2 + s.quad_error);
    }

    #[test]
    fn particle_hole_symmetry((beta, mu) in thermal(), o in order()) {
        let q = cosine_thermal(1, beta, mu, 1.0).unwrap();
        let inner = q.clone();
        let flipped = Symbol::from_fn(1, "1 - q", move |x| 1.0 - inner.eval(x).unwrap()).unwrap();
        let spec = QuadratureSpec::default();
        let a = renyi_density(&q, o, &spec).unwrap();
        let b = renyi_density(&flipped, o, &spec).unwrap();
        prop_assert!((a.value - b.value).abs() <= a.quad_error + b.quad_error + 1e-13);
    }

    #[test]
    fn dimension_consistency((beta, mu) in thermal(), o in order()) {
        let spec = QuadratureSpec::with_tol(1e-9);
        let d1 = cosine_thermal(1, beta, mu, 1.0).unwrap();
        let inner = d1.clone();
        let d2 = Symbol::from_fn(2, "constant in x2", move |x| inner.eval(&x[..1]).unwrap()).unwrap();
        let a = renyi_density(&d1, o, &spec).unwrap();
        let b = renyi_density(&d2, o, &spec).unwrap();
        prop_assert!((a.value - b.value).abs() <= a.quad_error + b.quad_error + 1e-12);
    }
}

#[test]
fn two_form_consistency_grid() {
    let spec = QuadratureSpec::default();
    let symbols = [
        cosine_thermal(1, 2.0, 0.0, 1.0).unwrap(),
        raised_cosine(),
        cosine_thermal(1, 1.0, 0.3, 1.0).unwrap(),
        Symbol::constant(1, 0.2).unwrap(),
    ];
    for q in &symbols {
        for alpha in [0.25, 0.5, 1.0, 2.0, 3.0, 5.0, 10.0] {
            let c = g_consistency(q, alpha, &spec).unwrap();
            assert!(c.consistent, "{} at {alpha}: {c:?}", q.label());
        }
    }
}

#[test]
fn thermal_quadrature_coefficient_is_half() {
    let q = make_thermal_symbol(1, |x| (std::f64::consts::TAU * x[0]).cos(), 2.0, 0.0).unwrap();
    let t = fermi_renyi::symbol::fourier_coefficients(&q, 1, &QuadratureSpec::default()).unwrap();
    assert!((t.get(&[0]).re - 0.5).abs() <= 1e-12);
    let q1 = cosine_thermal(1, 1.0, 0.0, 1.0).unwrap();
    let t1 = fermi_renyi::symbol::fourier_coefficients(&q1, 1, &QuadratureSpec::default()).unwrap();
    assert!(t1.get(&[1]).re < 0.0 && t1.get(&[1]).im.abs() < 1e-12);
}
