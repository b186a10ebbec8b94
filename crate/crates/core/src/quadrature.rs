//! Adaptive Gauss–Legendre quadrature on the unit cube.
//!
//! One-dimensional integrals use global adaptive bisection: every panel is
//! integrated with the 16-point rule on the whole panel and on its two halves.
//! The panel's error estimate is the larger of that difference and the
//! difference between the Gauss and Gauss–Lobatto rules on the halves. The
//! Lobatto rule samples the panel endpoints, so a kink lying between an
//! endpoint and the first Gauss node still shows up. The panel with the
//! largest estimate is split until the total falls below the tolerance.
//! Higher-dimensional integrals over `[0,1]^d` are iterated one-dimensional
//! integrals; inner error estimates are folded into the outer one.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};

/// Number of nodes in the per-panel rule.
pub const RULE_ORDER: usize = 16;
const LOBATTO_ORDER: usize = 16;

/// Settings of the quadrature engine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureSpec {
    /// Panels per dimension before any refinement.
    pub initial_panels: usize,
    /// Absolute tolerance on the total error estimate.
    pub abs_tol: f64,
    /// Maximum bisection depth of a single panel.
    pub max_depth: u32,
    /// Cap on integrand evaluations per one-dimensional integral.
    pub max_evals: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            initial_panels: 8,
            abs_tol: 1e-10,
            max_depth: 48,
            max_evals: 4_000_000,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tol(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "quadrature tolerance must be positive, got {}",
                self.abs_tol
            )));
        }
        if self.initial_panels == 0 {
            return Err(Error::InvalidArgument("initial_panels must be >= 1".into()));
        }
        Ok(())
    }
}

/// An integral value with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, computed once by Newton
/// iteration on the Legendre polynomial.
fn rule() -> &'static ([f64; RULE_ORDER], [f64; RULE_ORDER]) {
    static RULE: OnceLock<([f64; RULE_ORDER], [f64; RULE_ORDER])> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(RULE_ORDER))
}

fn lobatto_rule() -> &'static ([f64; LOBATTO_ORDER], [f64; LOBATTO_ORDER]) {
    static RULE: OnceLock<([f64; LOBATTO_ORDER], [f64; LOBATTO_ORDER])> = OnceLock::new();
    RULE.get_or_init(|| gauss_lobatto(LOBATTO_ORDER))
}

fn legendre(m: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=m {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    (p1, p0)
}

/// Gauss–Lobatto nodes: `±1` and the roots of `P'_{n-1}`.
fn gauss_lobatto<const N: usize>(n: usize) -> ([f64; N], [f64; N]) {
    let m = n - 1;
    let mf = m as f64;
    let mut nodes = [0.0; N];
    let mut weights = [0.0; N];
    let end_weight = 2.0 / (n as f64 * mf);
    nodes[0] = -1.0;
    nodes[m] = 1.0;
    weights[0] = end_weight;
    weights[m] = end_weight;
    for i in 1..m {
        let mut x = -(std::f64::consts::PI * i as f64 / mf).cos();
        for _ in 0..100 {
            let (p, prev) = legendre(m, x);
            let dp = mf * (prev - x * p) / (1.0 - x * x);
            let d2p = (2.0 * x * dp - mf * (mf + 1.0) * p) / (1.0 - x * x);
            let dx = dp / d2p;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (p, _) = legendre(m, x);
        nodes[i] = x;
        weights[i] = end_weight / (p * p);
    }
    (nodes, weights)
}

fn gauss_legendre<const N: usize>(n: usize) -> ([f64; N], [f64; N]) {
    let mut nodes = [0.0; N];
    let mut weights = [0.0; N];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn panel_rule<F>(f: &mut F, a: f64, b: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    apply_rule(rule(), f, a, b)
}

fn apply_rule<F, const N: usize>(rule: &([f64; N], [f64; N]), f: &mut F, a: f64, b: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (nodes, weights) = rule;
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut sum = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        sum += w * f(mid + half * x)?;
    }
    Ok(sum * half)
}

struct Panel {
    a: f64,
    b: f64,
    depth: u32,
    left: f64,
    right: f64,
    error: f64,
}

impl Panel {
    fn new<F>(f: &mut F, a: f64, b: f64, depth: u32, whole: f64) -> Result<Self>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let mid = 0.5 * (a + b);
        let left = panel_rule(f, a, mid)?;
        let right = panel_rule(f, mid, b)?;
        let closed = apply_rule(lobatto_rule(), f, a, mid)? + apply_rule(lobatto_rule(), f, mid, b)?;
        let error = (whole - left - right).abs().max((closed - left - right).abs());
        Ok(Self {
            a,
            b,
            depth,
            left,
            right,
            error,
        })
    }

    fn value(&self) -> f64 {
        self.left + self.right
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integrates `f` over `[a, b]`.
pub fn integrate_1d<F>(mut f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    spec.validate()?;
    if a == b {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let panels = spec.initial_panels;
    let width = (b - a) / panels as f64;
    let mut heap = BinaryHeap::with_capacity(4 * panels);
    let mut evals = 0usize;
    for i in 0..panels {
        let lo = a + width * i as f64;
        let hi = if i + 1 == panels { b } else { lo + width };
        let whole = panel_rule(&mut f, lo, hi)?;
        heap.push(Panel::new(&mut f, lo, hi, 0, whole)?);
        evals += 3 * RULE_ORDER + 2 * LOBATTO_ORDER;
    }

    loop {
        // Re-summing keeps the totals free of cancellation drift.
        let error: f64 = heap.iter().map(|p| p.error).sum();
        if error <= spec.abs_tol {
            let value = sum_values(&heap);
            return Ok(Estimate { value, error });
        }
        let worst = heap.pop().expect("heap is never empty");
        if worst.depth >= spec.max_depth || evals >= spec.max_evals {
            heap.push(worst);
            let value = sum_values(&heap);
            return Err(Error::Quadrature {
                value,
                error,
                tol: spec.abs_tol,
            });
        }
        let mid = 0.5 * (worst.a + worst.b);
        heap.push(Panel::new(&mut f, worst.a, mid, worst.depth + 1, worst.left)?);
        heap.push(Panel::new(&mut f, mid, worst.b, worst.depth + 1, worst.right)?);
        evals += 4 * RULE_ORDER + 4 * LOBATTO_ORDER;
    }
}

fn sum_values(heap: &BinaryHeap<Panel>) -> f64 {
    let mut panels: Vec<&Panel> = heap.iter().collect();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    // Neumaier summation
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for p in panels {
        let v = p.value();
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Integrates `f` over `[0,1]^dim` by iterated adaptive quadrature.
pub fn integrate_unit_cube<F>(f: F, dim: usize, spec: &QuadratureSpec) -> Result<Estimate>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be >= 1".into()));
    }
    let mut prefix = Vec::with_capacity(dim);
    nested(&f, &mut prefix, dim, spec)
}

fn nested<F>(f: &F, prefix: &mut Vec<f64>, dim: usize, spec: &QuadratureSpec) -> Result<Estimate>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let remaining = dim - prefix.len();
    if remaining == 1 {
        let mut point = prefix.clone();
        point.push(0.0);
        let last = point.len() - 1;
        return integrate_1d(
            |x| {
                point[last] = x;
                f(&point)
            },
            0.0,
            1.0,
            spec,
        );
    }
    let mut inner_error = 0.0f64;
    let outer = {
        let inner_error = &mut inner_error;
        let prefix_snapshot = prefix.clone();
        integrate_1d(
            |x| {
                let mut p = prefix_snapshot.clone();
                p.push(x);
                let est = nested(f, &mut p, dim, spec)?;
                *inner_error = inner_error.max(est.error);
                Ok(est.value)
            },
            0.0,
            1.0,
            spec,
        )?
    };
    Ok(Estimate {
        value: outer.value,
        error: outer.error + inner_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn lobatto_rule_is_exact_to_degree_29() {
        let (nodes, weights) = lobatto_rule();
        assert!((weights.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let s: f64 = nodes.iter().zip(weights).map(|(x, w)| w * x.powi(28)).sum();
        assert!((s - 2.0 / 29.0).abs() < 1e-14);
    }

    #[test]
    fn kink_next_to_a_panel_edge_is_resolved() {
        // kink between the panel edge 0.25 and the first Gauss node
        let k = 0.25 + 5e-5;
        let est = integrate_1d(|x| Ok((x - k).abs()), 0.0, 1.0, &QuadratureSpec::default()).unwrap();
        let exact = 0.5 * (k * k + (1.0 - k) * (1.0 - k));
        assert!((est.value - exact).abs() <= 1e-10, "{:e}", est.value - exact);
    }

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let (nodes, weights) = rule();
        assert!((weights.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // degree 30 is the highest exact degree for 16 points
        let s: f64 = nodes.iter().zip(weights).map(|(x, w)| w * x.powi(30)).sum();
        assert!((s - 2.0 / 31.0).abs() < 1e-14);
    }

    #[test]
    fn smooth_integrand() {
        let est = integrate_1d(|x| Ok(x.exp()), 0.0, 1.0, &QuadratureSpec::default()).unwrap();
        assert!((est.value - (1f64.exp() - 1.0)).abs() < 1e-14);
        assert!(est.error <= 1e-10);
    }

    #[test]
    fn step_integrand_converges_with_error_estimate() {
        let spec = QuadratureSpec::with_tol(1e-9);
        let est = integrate_1d(|x| Ok(if x < 1.0 / 3.0 { 1.0 } else { 0.0 }), 0.0, 1.0, &spec)
            .unwrap();
        assert!((est.value - 1.0 / 3.0).abs() <= 1e-9);
    }

    #[test]
    fn non_convergence_is_reported() {
        let spec = QuadratureSpec {
            max_depth: 3,
            ..QuadratureSpec::with_tol(1e-14)
        };
        let err = integrate_1d(|x| Ok(if x < 0.3 { 1.0 } else { 0.0 }), 0.0, 1.0, &spec)
            .unwrap_err();
        match err {
            Error::Quadrature { value, error, .. } => {
                assert!((value - 0.3).abs() < 0.05);
                assert!(error > 1e-14);
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn two_dimensional_product() {
        let est = integrate_unit_cube(
            |x| Ok((2.0 * PI * x[0]).cos().powi(2) * (1.0 + x[1])),
            2,
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert!((est.value - 0.75).abs() < 1e-10, "{}", est.value);
    }

    #[test]
    fn integrand_errors_propagate() {
        let err = integrate_1d(
            |x| {
                if x > 0.5 {
                    Err(Error::NonFinite { point: vec![x] })
                } else {
                    Ok(1.0)
                }
            },
            0.0,
            1.0,
            &QuadratureSpec::default(),
        );
        assert!(matches!(err, Err(Error::NonFinite { .. })));
    }
}
