use std::f64::consts::LN_2;
use std::sync::OnceLock;

use fermi_renyi::approx::{apply_scheme, eval_basis, solve_controlled, solve_plain, ApproxScheme};
use fermi_renyi::entropy::{renyi_density, Order};
use fermi_renyi::quadrature::integrate_1d;
use fermi_renyi::report::bundled_symbols;
use fermi_renyi::QuadratureSpec;
use proptest::prelude::*;

fn plain() -> &'static [ApproxScheme] {
    static CACHE: OnceLock<Vec<ApproxScheme>> = OnceLock::new();
    CACHE.get_or_init(|| (1..=5).map(|n| solve_plain(n, 40.0).unwrap()).collect())
}

fn controlled() -> &'static [ApproxScheme] {
    static CACHE: OnceLock<Vec<ApproxScheme>> = OnceLock::new();
    CACHE.get_or_init(|| (1..=5).map(|n| solve_controlled(n).unwrap()).collect())
}

/// Alternating extrema of `r` on a dense uniform grid of `[0, cap]`, found
/// without any help from the solver: local maxima of `|r|` on each sign run.
fn dense_extrema(r: impl Fn(f64) -> f64, cap: f64, points: usize) -> Vec<f64> {
    let values: Vec<f64> = (0..=points).map(|i| r(cap * i as f64 / points as f64)).collect();
    let mut out: Vec<f64> = Vec::new();
    let mut run_best = 0.0f64;
    for v in values {
        if v == 0.0 {
            continue;
        }
        if run_best != 0.0 && v.signum() != run_best.signum() {
            out.push(run_best);
            run_best = 0.0;
        }
        if v.abs() > run_best.abs() {
            run_best = v;
        }
    }
    if run_best != 0.0 {
        out.push(run_best);
    }
    out
}

#[test]
fn unit_mass() {
    let spec = QuadratureSpec::with_tol(1e-13);
    for alpha in [0.3, 0.5, 1.0, 2.0, 5.0, 11.0] {
        // the tail beyond 400 is below e^{-120}
        let mass = integrate_1d(|t| Ok(eval_basis(alpha, t)), 0.0, 400.0, &spec).unwrap();
        assert!((mass.value - 1.0).abs() <= 1e-10, "alpha = {alpha}: {}", mass.value);
    }
}

#[test]
fn plain_equioscillation_on_dense_grid() {
    for s in plain() {
        let peaks = dense_extrema(|t| s.residual_at(t), 40.0, 400_000);
        let top = peaks.iter().map(|p| p.abs()).fold(0.0, f64::max);
        // extrema that reach the level, counted as an alternating chain
        let level: Vec<f64> = peaks.iter().copied().filter(|p| p.abs() >= top * (1.0 - 1e-3)).collect();
        assert!(level.len() > s.n, "n = {}: {} extrema at the level", s.n, level.len());
        assert!(level.windows(2).all(|w| w[0].signum() != w[1].signum()));
        let low = level.iter().map(|p| p.abs()).fold(f64::INFINITY, f64::min);
        // grid spacing 1e-4 costs at most ~|r''| h² / 8 per peak
        assert!((top - low) / top <= 1e-5, "n = {}: spread {:e}", s.n, (top - low) / top);
        assert!((top - s.residual).abs() / s.residual <= 1e-5);
    }
}

#[test]
fn monotone_improvement() {
    for w in plain()[..4].windows(2) {
        assert!(w[1].residual < w[0].residual);
    }
    for w in controlled()[..4].windows(2) {
        assert!(w[1].certified_bound.unwrap() < w[0].certified_bound.unwrap());
    }
}

#[test]
fn sign_pattern() {
    for s in plain()[..4].iter().chain(&controlled()[..4]) {
        for (i, g) in s.gamma.iter().enumerate() {
            let positive = i % 2 == 0;
            assert_eq!(*g > 0.0, positive, "{} n = {}: {:?}", s.kind, s.n, s.gamma);
        }
    }
}

#[test]
fn controlled_bound_is_residual_times_log2() {
    for s in controlled() {
        assert_eq!(s.certified_bound.unwrap(), s.residual * LN_2);
        assert!(s.extrema.iter().any(|e| e.t <= 1e-10), "n = {}: {:?}", s.n, s.extrema);
        assert!(s.tail_bound < s.residual);
    }
    for s in plain() {
        assert!(s.tail_bound < s.residual);
    }
}

#[test]
fn single_term_estimate_is_below_von_neumann() {
    let s = &plain()[0];
    assert!(s.gamma[0] <= 1.0);
    let spec = QuadratureSpec::default();
    for q in bundled_symbols().unwrap() {
        let s1 = renyi_density(&q, Order::One, &spec).unwrap();
        let s2 = renyi_density(&q, Order::Finite(2.0), &spec).unwrap();
        assert!(s.combine(&[s2.value]) <= s1.value + s1.quad_error, "{}", q.label());
    }
}

#[test]
fn bounds_hold_on_bundled_symbols() {
    let spec = QuadratureSpec::default();
    for q in bundled_symbols().unwrap() {
        for s in &controlled()[..4] {
            let app = apply_scheme(s, &q, &spec).unwrap();
            assert!(app.true_error <= s.certified_bound.unwrap() + 10.0 * app.quad_error);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn basis_is_positive_and_vanishes_at_zero(alpha in 0.05f64..12.0, t in 1e-6f64..60.0) {
        prop_assert_eq!(eval_basis(alpha, 0.0), 0.0);
        prop_assert!(eval_basis(alpha, t) > 0.0);
    }

    #[test]
    fn basis_is_continuous_in_alpha(t in 0.0f64..30.0) {
        let near = eval_basis(1.0 + 1e-7, t);
        let at = eval_basis(1.0, t);
        // ∂f/∂α is at most of order (1 + t²) f near α = 1
        prop_assert!((near - at).abs() <= 1e-7 * (1.0 + t * t) * at);
    }

    #[test]
    fn controlled_bound_holds_on_thermal_symbols(beta in 0.2f64..5.0, mu in -1.5f64..1.5, n in 1usize..=4) {
        let q = fermi_renyi::symbol::cosine_thermal(1, beta, mu, 1.0).unwrap();
        let s = &controlled()[n - 1];
        let app = apply_scheme(s, &q, &QuadratureSpec::default()).unwrap();
        prop_assert!(app.true_error <= s.certified_bound.unwrap() + 10.0 * app.quad_error);
    }
}
