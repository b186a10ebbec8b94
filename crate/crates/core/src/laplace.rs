//! The step function `k`, its Laplace transform, the inverse Laplace
//! transform `G` of `g_q`, and a finite-difference complete-monotonicity test.

use std::f64::consts::LN_2;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::entropy::gap;
use crate::error::Result;
use crate::quadrature::{integrate_unit_cube, Estimate, QuadratureSpec};
use crate::symbol::Symbol;

/// Beyond this many terms `step_k` switches from direct summation to the
/// asymptotic remainder of the alternating harmonic series.
pub const EXACT_TERMS: u64 = 1 << 22;

const TABLE_TERMS: usize = 4096;

/// Neumaier-compensated partial sum `Σ_{j=1}^m (-1)^{j+1}/j`, ascending in j.
fn partial_sum(m: u64) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for j in 1..=m {
        let term = if j % 2 == 1 { 1.0 } else { -1.0 } / j as f64;
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `Σ_{i≥0} (-1)^i / (m + 1 + i)` by Boole summation; accurate to machine
/// precision once `m` is in the thousands.
fn alternating_tail(m: u64) -> f64 {
    let a = m as f64 + 1.0;
    let a2 = a * a;
    let inv = 1.0 / a;
    let inv2 = 1.0 / a2;
    inv / 2.0 + inv2 / 4.0 - inv2 * inv2 / 8.0 + inv2 * inv2 * inv2 / 4.0
}

fn k_from_tail(m: u64) -> f64 {
    let tail = alternating_tail(m);
    if m % 2 == 0 {
        LN_2 - tail
    } else {
        LN_2 + tail
    }
}

/// Largest `m` for which `k(m)` is formed as an exact fraction; the common
/// denominator `lcm(1..=m)` still fits in an `i128` here.
const RATIONAL_TERMS: u64 = 60;

fn gcd(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

/// `k(m)` as a reduced fraction, rounded once.
fn rational_sum(m: u64) -> f64 {
    let (mut num, mut den) = (0i128, 1i128);
    for j in 1..=m as i128 {
        let sign = if j % 2 == 1 { 1 } else { -1 };
        let g = gcd(den, j);
        num = num * (j / g) + sign * (den / g);
        den *= j / g;
        let r = gcd(num, den);
        num /= r;
        den /= r;
    }
    num as f64 / den as f64
}

/// `k(t) = Σ_{1≤j≤⌊t⌋} (-1)^{j+1}/j`.
///
/// Zero for `t < 1`, `log 2` at `t = ∞`. Small `⌊t⌋` give the correctly
/// rounded fraction, larger ones a compensated sum, and past
/// [`EXACT_TERMS`] the remainder of the series is used instead of the sum.
pub fn step_k(t: f64) -> f64 {
    if t.is_nan() || t < 1.0 {
        return 0.0;
    }
    if t.is_infinite() {
        return LN_2;
    }
    let m = t.floor() as u64;
    if m <= RATIONAL_TERMS {
        rational_sum(m)
    } else if m <= EXACT_TERMS {
        partial_sum(m)
    } else {
        k_from_tail(m)
    }
}

/// Fast evaluator of `k` for integrands: a table of compensated partial sums
/// for small `⌊t⌋`, the asymptotic remainder beyond.
#[derive(Debug, Clone, Copy, Default)]
pub struct StepFunction;

impl StepFunction {
    fn table() -> &'static [f64] {
        static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
        TABLE.get_or_init(|| {
            let (mut sum, mut comp) = (0.0f64, 0.0f64);
            let mut out = Vec::with_capacity(TABLE_TERMS + 1);
            out.push(0.0);
            for j in 1..=TABLE_TERMS as u64 {
                if j <= RATIONAL_TERMS {
                    out.push(rational_sum(j));
                    (sum, comp) = (out[j as usize], 0.0);
                    continue;
                }
                let term = if j % 2 == 1 { 1.0 } else { -1.0 } / j as f64;
                let t = sum + term;
                if sum.abs() >= term.abs() {
                    comp += (sum - t) + term;
                } else {
                    comp += (term - t) + sum;
                }
                sum = t;
                out.push(sum + comp);
            }
            out
        })
    }

    /// `k(m)` for the integer part `m`.
    pub fn at_integer(m: u64) -> f64 {
        if (m as usize) <= TABLE_TERMS {
            Self::table()[m as usize]
        } else {
            k_from_tail(m)
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t.is_nan() || t < 1.0 {
            0.0
        } else if t.is_infinite() || t >= 1e18 {
            LN_2
        } else {
            Self::at_integer(t.floor() as u64)
        }
    }

    pub fn asymptote(&self) -> f64 {
        LN_2
    }
}

/// `log(1 + e^{-s}) / s`, the Laplace transform of `k` in closed form.
pub fn laplace_of_k_closed(s: f64) -> f64 {
    (-s).exp().ln_1p() / s
}

/// `∫_0^∞ k(t) e^{-st} dt` by exact integration over each unit interval,
/// summed until the remaining tail `log 2 · e^{-sT} / s` is below `1e-12`
/// and `T >= max(50/s, 50)`.
pub fn laplace_of_k(s: f64) -> f64 {
    assert!(s > 0.0, "laplace_of_k needs s > 0, got {s}");
    let min_t = (50.0 / s).max(50.0);
    // ∫_m^{m+1} e^{-st} dt = e^{-ms} (1 - e^{-s}) / s
    let width = -(-s).exp_m1() / s;
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    let mut m = 1u64;
    loop {
        let term = StepFunction::at_integer(m) * (-(m as f64) * s).exp() * width;
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        m += 1;
        let tail = LN_2 * (-(m as f64) * s).exp() / s;
        if m as f64 >= min_t && tail < 1e-12 {
            break;
        }
    }
    sum + comp
}

/// `G(t) = ∫ k(t / h(x)) dx`, the inverse Laplace transform of `g_q`.
///
/// At `h = ∞` (`q ∈ {0,1}`) the integrand is `k(0) = 0`; at `h = 0`
/// (`q = 1/2`) and `t > 0` it is the limit `log 2`.
pub fn g_kernel(q: &Symbol, t: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    if t <= 0.0 {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let k = StepFunction;
    integrate_unit_cube(|x| Ok(kernel_point(&k, gap(q.eval(x)?), t)), q.dim(), spec)
}

fn kernel_point(k: &StepFunction, h: f64, t: f64) -> f64 {
    if h == f64::INFINITY {
        0.0
    } else if h == 0.0 {
        LN_2
    } else {
        k.eval(t / h)
    }
}

/// The kernel `G` bound to a symbol.
#[derive(Debug, Clone)]
pub struct GKernel<'a> {
    pub symbol: &'a Symbol,
    pub spec: QuadratureSpec,
}

impl GKernel<'_> {
    pub fn eval(&self, t: f64) -> Result<Estimate> {
        g_kernel(self.symbol, t, &self.spec)
    }

    /// `log 2` times the measure of `{x : 0 < q(x) < 1}`.
    pub fn asymptote(&self) -> Result<Estimate> {
        let est = integrate_unit_cube(
            |x| Ok(if gap(self.symbol.eval(x)?).is_finite() { 1.0 } else { 0.0 }),
            self.symbol.dim(),
            &self.spec,
        )?;
        Ok(Estimate {
            value: LN_2 * est.value,
            error: LN_2 * est.error,
        })
    }
}

/// Truncation point `T` of `∫_0^∞ G(t) e^{-αt} dt` at which the tail bound
/// `log 2 · e^{-αT} / α` equals `tail`.
pub fn truncation_point(alpha: f64, tail: f64) -> f64 {
    ((LN_2 / (alpha * tail)).ln() / alpha).max(0.0)
}

/// `∫_0^T e^{-αt} k(t/h) dt` for one mode with gap `h`, integrated exactly
/// over the steps of `k`.
fn truncated_mode_transform(h: f64, alpha: f64, cutoff: f64) -> f64 {
    if h == f64::INFINITY {
        return 0.0;
    }
    if h == 0.0 {
        return LN_2 * -(-alpha * cutoff).exp_m1() / alpha;
    }
    const MAX_STEPS: u64 = 20_000;
    // k(t/h) = k(m) on t ∈ [m h, (m+1) h)
    let last = (cutoff / h).floor() as u64;
    let steps = last.min(MAX_STEPS);
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for m in 1..=steps {
        let start = m as f64 * h;
        let end = ((m + 1) as f64 * h).min(cutoff);
        if end <= start {
            break;
        }
        // e^{-α a} - e^{-α b} = e^{-α a} (1 - e^{-α (b - a)})
        let piece = (-alpha * start).exp() * -(-alpha * (end - start)).exp_m1() / alpha;
        let term = StepFunction::at_integer(m) * piece;
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    if last > steps {
        // k(m) = log 2 ± O(1/m) past the cap; the log 2 part telescopes, the
        // alternating remainder is bounded by h / (2 MAX_STEPS)
        let start = (steps + 1) as f64 * h;
        sum += LN_2 * ((-alpha * start).exp() - (-alpha * cutoff).exp()) / alpha;
    }
    sum + comp
}

/// The truncated Laplace transform `∫_0^T G(t) e^{-αt} dt` together with the
/// tail bound.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct KernelTransform {
    pub alpha: f64,
    pub cutoff: f64,
    pub value: f64,
    pub quad_error: f64,
    pub tail_bound: f64,
}

/// Computes `∫_0^T G(t) e^{-αt} dt` with `T` chosen so the neglected tail is
/// below `tail`. Since `k` is piecewise constant the `t` integral is done
/// exactly per step for each `x`, and the `x` integral by quadrature.
pub fn kernel_laplace_transform(q: &Symbol, alpha: f64, tail: f64, spec: &QuadratureSpec) -> Result<KernelTransform> {
    crate::entropy::Order::new(alpha)?;
    let cutoff = truncation_point(alpha, tail);
    let est = integrate_unit_cube(
        |x| Ok(truncated_mode_transform(gap(q.eval(x)?), alpha, cutoff)),
        q.dim(),
        spec,
    )?;
    Ok(KernelTransform {
        alpha,
        cutoff,
        value: est.value,
        quad_error: est.error,
        tail_bound: LN_2 * (-alpha * cutoff).exp() / alpha,
    })
}

/// `∫_0^T G(t) e^{-αt} dt` by adaptive quadrature in `t` over values of
/// [`g_kernel`]. Much slower than [`kernel_laplace_transform`]; meant as an
/// independent cross-check at modest tolerances.
pub fn kernel_laplace_transform_direct(
    q: &Symbol,
    alpha: f64,
    tail: f64,
    t_spec: &QuadratureSpec,
    x_spec: &QuadratureSpec,
) -> Result<KernelTransform> {
    let cutoff = truncation_point(alpha, tail);
    let mut inner = 0.0f64;
    let est = crate::quadrature::integrate_1d(
        |t| {
            let g = g_kernel(q, t, x_spec)?;
            inner = inner.max(g.error);
            Ok(g.value * (-alpha * t).exp())
        },
        0.0,
        cutoff,
        t_spec,
    )?;
    Ok(KernelTransform {
        alpha,
        cutoff,
        value: est.value,
        quad_error: est.error + inner / alpha,
        tail_bound: LN_2 * (-alpha * cutoff).exp() / alpha,
    })
}

/// Per-order result of [`check_complete_monotonicity`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OrderMargin {
    pub order: usize,
    /// Minimum of `(-1)^n Δ^n f / step^n` over the grid.
    pub min_value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityReport {
    pub start: f64,
    pub end: f64,
    pub step: f64,
    pub orders: Vec<OrderMargin>,
    pub pass: bool,
}

/// Largest order accepted by [`check_complete_monotonicity`].
pub const MAX_DIFFERENCE_ORDER: usize = 12;

/// Checks `(-1)^n Δ^n f >= 0` for `n = 0..=max_order` with forward
/// differences of step `step` on `[start, end]`. `noise` is the absolute
/// error of each `f` value; order `n` tolerates `noise · 2^n / step^n`.
pub fn check_complete_monotonicity<F>(
    f: F,
    start: f64,
    end: f64,
    step: f64,
    max_order: usize,
    noise: f64,
) -> Result<MonotonicityReport>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    if max_order > MAX_DIFFERENCE_ORDER {
        return Err(crate::error::Error::InvalidArgument(format!(
            "difference order {max_order} exceeds {MAX_DIFFERENCE_ORDER}"
        )));
    }
    if !(step > 0.0 && end > start) {
        return Err(crate::error::Error::InvalidArgument("need step > 0 and end > start".into()));
    }
    let count = ((end - start) / step).floor() as usize + 1;
    let values: Vec<f64> = (0..count)
        .into_par_iter()
        .map(|i| f(start + step * i as f64))
        .collect::<Result<_>>()?;
    let mut diffs = values;
    let mut orders = Vec::with_capacity(max_order + 1);
    for n in 0..=max_order {
        if n > 0 {
            diffs = diffs.windows(2).map(|w| w[1] - w[0]).collect();
        }
        if diffs.is_empty() {
            break;
        }
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let scale = step.powi(n as i32);
        let min_value = diffs.iter().map(|d| sign * d / scale).fold(f64::INFINITY, f64::min);
        let tolerance = noise * 2f64.powi(n as i32) / scale;
        orders.push(OrderMargin {
            order: n,
            min_value,
            tolerance,
            pass: min_value >= -tolerance,
        });
    }
    let pass = orders.iter().all(|o| o.pass);
    Ok(MonotonicityReport {
        start,
        end,
        step,
        orders,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::cosine_thermal;
    use approx::assert_abs_diff_eq;

    #[test]
    fn step_values() {
        assert_eq!(step_k(0.0), 0.0);
        assert_eq!(step_k(0.5), 0.0);
        assert_eq!(step_k(1.0), 1.0);
        assert_eq!(step_k(1.7), 1.0);
        assert_eq!(step_k(2.3), 0.5);
        assert_eq!(step_k(3.9), 5.0 / 6.0);
        assert_eq!(StepFunction.eval(3.0), 5.0 / 6.0);
        assert_eq!(step_k(4.0), 7.0 / 12.0);
        assert!((step_k(1e6) - LN_2).abs() <= 1e-6);
    }

    #[test]
    fn step_bounds_and_right_continuity() {
        for m in 1..200u64 {
            let v = step_k(m as f64);
            assert!((0.5..=1.0).contains(&v));
            assert!((v - LN_2).abs() <= 1.0 / m as f64);
            assert_eq!(v, step_k(m as f64 + 0.999));
            assert_ne!(v, step_k(m as f64 - 1e-9));
        }
    }

    #[test]
    fn table_and_tail_agree_with_direct_sum() {
        for m in [1u64, 2, 17, 4096, 4097, 5000, 123_457, 1_000_000] {
            assert_abs_diff_eq!(StepFunction::at_integer(m), partial_sum(m), epsilon = 2e-15);
        }
        assert_abs_diff_eq!(k_from_tail(10_000_001), partial_sum(10_000_001), epsilon = 1e-14);
    }

    #[test]
    fn laplace_identity() {
        for s in [0.01, 0.1, 1.0, 10.0, 50.0] {
            let got = laplace_of_k(s);
            let want = laplace_of_k_closed(s);
            assert!((got - want).abs() <= 1e-8, "s={s}: {got} vs {want}");
        }
        assert_abs_diff_eq!(laplace_of_k(1.0), 0.31326168751822286, epsilon = 1e-12);
        assert_abs_diff_eq!(laplace_of_k(0.01), (1.0 + (-0.01f64).exp()).ln() / 0.01, epsilon = 1e-9);
        let s50 = laplace_of_k(50.0);
        assert!((s50 / ((-50f64).exp() / 50.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kernel_of_constant_symbols() {
        let spec = QuadratureSpec::default();
        let unit_gap = Symbol::constant(1, 1.0 / (1.0 + 1f64.exp())).unwrap();
        assert_abs_diff_eq!(g_kernel(&unit_gap, 2.5, &spec).unwrap().value, 0.5, epsilon = 1e-12);
        let half = Symbol::constant(1, 0.5).unwrap();
        assert_eq!(g_kernel(&half, 0.0, &spec).unwrap().value, 0.0);
        assert_abs_diff_eq!(g_kernel(&half, 0.3, &spec).unwrap().value, LN_2, epsilon = 1e-15);
        let pure = Symbol::constant(1, 1.0).unwrap();
        assert_eq!(g_kernel(&pure, 5.0, &spec).unwrap().value, 0.0);
        let kernel = GKernel { symbol: &pure, spec };
        assert_eq!(kernel.asymptote().unwrap().value, 0.0);
    }

    #[test]
    fn mode_transform_matches_closed_form() {
        // ∫_0^∞ k(t/h) e^{-αt} dt = (1/α) log(1 + e^{-αh})
        for h in [1e-7, 0.01, 0.3, 1.0, 4.0] {
            for alpha in [0.5, 1.0, 5.0] {
                let cutoff = truncation_point(alpha, 1e-14);
                let got = truncated_mode_transform(h, alpha, cutoff);
                let want = (-alpha * h).exp().ln_1p() / alpha;
                assert!((got - want).abs() < 1e-9, "h={h} α={alpha}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn monotonicity_of_exponential_and_sine() {
        let e = check_complete_monotonicity(|a| Ok((-a).exp()), 0.0, 10.0, 0.1, 8, 1e-16).unwrap();
        assert!(e.pass);
        assert!(e.orders.iter().all(|o| o.min_value > 0.0));
        let s = check_complete_monotonicity(|a| Ok(a.sin()), 0.0, 10.0, 0.1, 4, 1e-16).unwrap();
        assert!(!s.pass);
        assert!(!s.orders[0].pass || !s.orders[1].pass || !s.orders[2].pass);
        assert!(check_complete_monotonicity(|a| Ok(a), 0.0, 1.0, 0.1, 13, 0.0).is_err());
    }

    #[test]
    fn kernel_approaches_log2() {
        let q = cosine_thermal(1, 2.0, 0.0, 1.0).unwrap();
        let spec = QuadratureSpec::with_tol(1e-5);
        let k = GKernel { symbol: &q, spec };
        let far = k.eval(1e3).unwrap();
        assert!(far.value >= 0.0 && far.value <= 1.0);
        assert!((far.value - LN_2).abs() < 1e-2, "{far:?}");
        assert_abs_diff_eq!(k.asymptote().unwrap().value, LN_2, epsilon = 1e-12);
    }
}
