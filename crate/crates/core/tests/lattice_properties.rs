use fermi_renyi::entropy::Order;
use fermi_renyi::lattice::{density_convergence, local_renyi, local_spectrum, wick_oracle, CONVERGENCE_THRESHOLD};
use fermi_renyi::report::bundled_symbols;
use fermi_renyi::symbol::{cosine_thermal, Boundary};
use fermi_renyi::QuadratureSpec;
use proptest::prelude::*;

fn order() -> impl Strategy<Value = Order> {
    prop_oneof![
        Just(Order::One),
        Just(Order::Infinity),
        (0.1f64..10.0).prop_map(|a| Order::new(a).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn oracle_is_a_density_matrix(beta in 0.1f64..6.0, mu in -2.5f64..2.5, sites in 1usize..=4) {
        let q = cosine_thermal(1, beta, mu, 1.0).unwrap();
        let rho = wick_oracle(&q, sites, &QuadratureSpec::default()).unwrap();
        prop_assert!((rho.trace() - 1.0).abs() <= 1e-10);
        let spectrum = rho.spectrum().unwrap();
        prop_assert!(spectrum.iter().all(|&e| e >= -1e-10));
        prop_assert!(rho.hermiticity_error <= 1e-10);
    }

    #[test]
    fn per_site_order_monotone(beta in 0.1f64..6.0, mu in -2.0f64..2.0, side in 1usize..40, a in order(), b in order()) {
        let (lo, hi) = if a.value() <= b.value() { (a, b) } else { (b, a) };
        let q = cosine_thermal(1, beta, mu, 1.0).unwrap();
        let spectrum = local_spectrum(&q, side, Boundary::Open, &QuadratureSpec::default()).unwrap();
        let sites = spectrum.sites() as f64;
        prop_assert!(local_renyi(&spectrum, lo) / sites >= local_renyi(&spectrum, hi) / sites - 1e-12);
    }
}

#[test]
fn richardson_extrapolation_matches_density() {
    let spec = QuadratureSpec::default();
    for q in bundled_symbols().unwrap() {
        for order in [Order::One, Order::Finite(2.0), Order::Infinity] {
            let r = density_convergence(&q, order, &[64, 128], Boundary::Open, CONVERGENCE_THRESHOLD, &spec).unwrap();
            let miss = (r.extrapolated - r.density).abs();
            assert!(
                miss <= 3.0 * r.extrapolation_error + r.density_error,
                "{} {order}: {miss:e} vs {:e}",
                q.label(),
                r.extrapolation_error
            );
        }
    }
}

#[test]
fn periodic_boxes_reproduce_riemann_sums() {
    let q = cosine_thermal(1, 2.0, 0.0, 1.0).unwrap();
    let side = 16;
    let spectrum = local_spectrum(&q, side, Boundary::Periodic, &QuadratureSpec::default()).unwrap();
    let mut grid: Vec<f64> = (0..side).map(|k| q.eval(&[k as f64 / side as f64]).unwrap()).collect();
    grid.sort_by(f64::total_cmp);
    for (a, b) in spectrum.eigenvalues.iter().zip(&grid) {
        assert!((a - b).abs() <= 1e-12);
    }
}
