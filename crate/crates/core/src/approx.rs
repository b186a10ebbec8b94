//! Minimax schemes expressing the von Neumann density through integer-order
//! Rényi densities.
//!
//! With `G` the inverse Laplace transform of `g_q`, every density is an
//! integral against the basis
//! `f_α(t) = α/(α-1) (e^{-t} - e^{-αt})`, `f_1(t) = t e^{-t}`:
//! `s_q(α) = ∫ G(t) f_α(t) dt`. Approximating `f_1` uniformly by
//! `Σ γ_i f_{i+1}` therefore turns into `s_q ≈ Σ γ_i s_q(i+1)`.
//!
//! Three schemes are solved here:
//! - *plain*: minimise `‖f_1 - Σ γ_i f_{i+1}‖_∞` on `[0, ∞)`;
//! - *shifted*: the plain coefficients plus the constant `1 - Σ γ_i`
//!   multiplying `log 2`, obtained by subtracting the asymptote of `G`;
//! - *controlled*: minimise `‖(f_1 - Σ γ_i f_{i+1}) / f_α‖_∞` over `γ` and
//!   `α ∈ (0,1)`. Since `0 <= s_q(α) <= log 2` this sup-norm times `log 2`
//!   bounds the error for every admissible symbol.
//!
//! The uniform fits use an exchange iteration: force the residual to
//! alternate with a common level at `n + 1` reference points (a dense solve
//! in double-double), move the references to the extrema of the new residual,
//! and repeat until the extrema are level.

use std::f64::consts::LN_2;

use rayon::prelude::*;
use serde::Serialize;

use crate::dd;
use crate::entropy::{renyi_density, Order};
use crate::error::{Error, Result};
use crate::quadrature::QuadratureSpec;
use crate::symbol::Symbol;

/// `-expm1(-εt)/ε`, continuous at `ε = 0` where it equals `t`.
fn damped_ramp(eps: f64, t: f64) -> f64 {
    if eps == 0.0 {
        t
    } else {
        -(-eps * t).exp_m1() / eps
    }
}

/// `f_α(t)`. Written as `α e^{-min(1,α) t} (1 - e^{-|α-1| t}) / |α-1|` so that
/// no cancellation occurs near `α = 1` or `t = 0`.
pub fn eval_basis(alpha: f64, t: f64) -> f64 {
    debug_assert!(alpha > 0.0 && t >= 0.0);
    if alpha == 1.0 {
        return t * (-t).exp();
    }
    alpha * (-alpha.min(1.0) * t).exp() * damped_ramp((alpha - 1.0).abs(), t)
}

/// `f_num(t) / f_den(t)`, with the value `num/den` at `t = 0`.
pub fn basis_ratio(num: f64, den: f64, t: f64) -> f64 {
    if t == 0.0 {
        return num / den;
    }
    (num / den)
        * ((den.min(1.0) - num.min(1.0)) * t).exp()
        * (damped_ramp((num - 1.0).abs(), t) / damped_ramp((den - 1.0).abs(), t))
}

/// A member of the basis family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BasisFunction {
    pub order: f64,
}

impl BasisFunction {
    pub fn new(order: f64) -> Result<Self> {
        if !(order > 0.0 && order.is_finite()) {
            return Err(Error::InvalidArgument(format!("basis order must be > 0, got {order}")));
        }
        Ok(Self { order })
    }

    pub fn eval(&self, t: f64) -> f64 {
        eval_basis(self.order, t)
    }
}

/// The family of approximation problems.
#[derive(Debug, Clone, Copy, PartialEq)]
enum System {
    Plain,
    /// Everything divided by `f_α`.
    Weighted(f64),
}

impl System {
    fn target(self, t: f64) -> f64 {
        match self {
            Self::Plain => eval_basis(1.0, t),
            Self::Weighted(a) => basis_ratio(1.0, a, t),
        }
    }

    /// The `i`-th basis function, `i = 0` being `f_2`.
    fn basis(self, i: usize, t: f64) -> f64 {
        let k = (i + 2) as f64;
        match self {
            Self::Plain => eval_basis(k, t),
            Self::Weighted(a) => basis_ratio(k, a, t),
        }
    }

    fn residual(self, gamma: &[f64], t: f64) -> f64 {
        let phi: Vec<f64> = (0..gamma.len()).map(|i| self.basis(i, t)).collect();
        self.target(t) - dd::dot(gamma, &phi)
    }

    /// Bound on `|r(t)|` for `t >= cap`.
    fn tail_bound(self, gamma: &[f64], cap: f64) -> f64 {
        let coeff: f64 = gamma
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let k = (i + 2) as f64;
                g.abs() * k / (k - 1.0)
            })
            .sum();
        match self {
            Self::Plain => (cap + coeff) * (-cap).exp(),
            Self::Weighted(a) => {
                let c = (1.0 - a) / (a * -(-(1.0 - a) * cap).exp_m1());
                c * (cap + coeff) * (-(1.0 - a) * cap).exp()
            }
        }
    }
}

/// Settings of the exchange iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinimaxConfig {
    /// Sup-norms on `[0, ∞)` are taken over `[0, domain_cap]`.
    pub domain_cap: f64,
    /// Scan points; the grid is quadratic in the index so it is dense near 0.
    pub grid_points: usize,
    /// Relative spread of the extremal magnitudes at which the exchange stops.
    pub level_tol: f64,
    /// Spread still accepted when the iteration cap is reached.
    pub accept_tol: f64,
    pub max_iterations: usize,
    /// Golden-section tolerance on `α` for the controlled scheme.
    pub alpha_tol: f64,
    pub alpha_bracket: (f64, f64),
}

impl Default for MinimaxConfig {
    fn default() -> Self {
        Self {
            domain_cap: 40.0,
            grid_points: 20_000,
            level_tol: 1e-8,
            accept_tol: 1e-6,
            max_iterations: 200,
            alpha_tol: 1e-4,
            alpha_bracket: (0.05, 0.95),
        }
    }
}

/// Largest number of Rényi terms supported by the solvers.
pub const MAX_TERMS: usize = 10;

/// A point where the residual attains a local extremum of alternating sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extremum {
    pub t: f64,
    pub value: f64,
}

/// Converged uniform fit.
#[derive(Debug, Clone, Serialize)]
pub struct MinimaxSolution {
    pub gamma: Vec<f64>,
    /// Sup-norm of the residual on `[0, cap]`, including the refined extrema.
    pub residual: f64,
    /// The `n + 1` alternating extrema.
    pub extrema: Vec<Extremum>,
    /// Relative spread `(max - min) / max` of the extremal magnitudes.
    pub spread: f64,
    pub iterations: usize,
    /// Largest 1-norm condition estimate of the reference systems.
    pub condition: f64,
    /// Bound on the residual beyond the domain cap.
    pub tail_bound: f64,
    /// True when the exchange stalled and coordinate search took over.
    pub used_fallback: bool,
}

struct Solver {
    system: System,
    n: usize,
    config: MinimaxConfig,
    grid: Vec<f64>,
    target: Vec<f64>,
    /// Row-major `grid.len() x n`.
    basis: Vec<f64>,
}

impl Solver {
    fn new(system: System, n: usize, config: MinimaxConfig) -> Self {
        let m = config.grid_points;
        let grid: Vec<f64> = (0..=m)
            .map(|i| {
                let u = i as f64 / m as f64;
                config.domain_cap * u * u
            })
            .collect();
        let target: Vec<f64> = grid.iter().map(|&t| system.target(t)).collect();
        let basis: Vec<f64> = grid
            .par_iter()
            .flat_map_iter(|&t| (0..n).map(move |i| system.basis(i, t)))
            .collect();
        Self {
            system,
            n,
            config,
            grid,
            target,
            basis,
        }
    }

    fn scan(&self, gamma: &[f64]) -> Vec<f64> {
        (0..self.grid.len())
            .into_par_iter()
            .map(|i| self.target[i] - dd::dot(gamma, &self.basis[i * self.n..(i + 1) * self.n]))
            .collect()
    }

    fn solve_reference(&self, refs: &[f64]) -> Option<(Vec<f64>, f64, f64)> {
        let n = self.n;
        let a: Vec<Vec<f64>> = refs
            .iter()
            .enumerate()
            .map(|(k, &t)| {
                let mut row: Vec<f64> = (0..n).map(|i| self.system.basis(i, t)).collect();
                row.push(if k % 2 == 0 { 1.0 } else { -1.0 });
                row
            })
            .collect();
        let b: Vec<f64> = refs.iter().map(|&t| self.system.target(t)).collect();
        let sol = dd::solve(&a, &b)?;
        let level = sol.x[n];
        Some((sol.x[..n].to_vec(), level, sol.condition))
    }

    /// Maximises `|r|` on `[lo, hi]` by golden section.
    fn refine(&self, gamma: &[f64], lo: f64, hi: f64) -> Extremum {
        let f = |t: f64| self.system.residual(gamma, t).abs();
        let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
        let (mut a, mut b) = (lo, hi);
        let mut c = b - inv_phi * (b - a);
        let mut d = a + inv_phi * (b - a);
        let (mut fc, mut fd) = (f(c), f(d));
        for _ in 0..80 {
            if (b - a) <= 1e-14 * (1.0 + b.abs()) {
                break;
            }
            if fc > fd {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = f(d);
            }
        }
        let t = 0.5 * (a + b);
        Extremum {
            t,
            value: self.system.residual(gamma, t),
        }
    }

    /// One extremum per sign run of the scanned residual, refined, trimmed
    /// to `n + 1` while keeping the global maximum.
    fn alternating_extrema(&self, gamma: &[f64], r: &[f64]) -> Vec<Extremum> {
        let mut runs: Vec<(usize, usize)> = Vec::new();
        let mut start = 0;
        for i in 1..r.len() {
            if (r[i] >= 0.0) != (r[start] >= 0.0) {
                runs.push((start, i));
                start = i;
            }
        }
        runs.push((start, r.len()));
        let last = self.grid.len() - 1;
        let mut ext: Vec<Extremum> = runs
            .into_iter()
            .filter_map(|(a, b)| {
                let i = (a..b).max_by(|&i, &j| r[i].abs().total_cmp(&r[j].abs()))?;
                if r[i] == 0.0 {
                    return None;
                }
                if i == 0 {
                    // the endpoint t = 0 may itself be extremal
                    let inner = self.refine(gamma, self.grid[0], self.grid[1]);
                    return Some(if inner.value.abs() > r[0].abs() {
                        inner
                    } else {
                        Extremum { t: 0.0, value: r[0] }
                    });
                }
                let hi = self.grid[(i + 1).min(last)];
                let e = self.refine(gamma, self.grid[i - 1], hi);
                Some(if e.value.abs() >= r[i].abs() {
                    e
                } else {
                    Extremum { t: self.grid[i], value: r[i] }
                })
            })
            .collect();
        while ext.len() > self.n + 1 {
            if ext[0].value.abs() < ext[ext.len() - 1].value.abs() {
                ext.remove(0);
            } else {
                ext.pop();
            }
        }
        ext
    }

    fn initial_refs(&self) -> Vec<f64> {
        let n = self.n;
        let hi = 3.0 + 0.5 * n as f64;
        match self.system {
            System::Plain => geometric(0.3 / n as f64, hi, n + 1),
            System::Weighted(_) => {
                let mut r = vec![0.0];
                r.extend(geometric(0.6 / (n * n) as f64, hi, n));
                r
            }
        }
    }

    fn exchange(&self, mut refs: Vec<f64>) -> Result<MinimaxSolution> {
        let mut condition = 0.0f64;
        let mut last_level = f64::NAN;
        let mut spread = f64::INFINITY;
        for iteration in 1..=self.config.max_iterations {
            let (gamma, level, cond) = self.solve_reference(&refs).ok_or_else(|| Error::Solver {
                message: "singular reference system".into(),
                iterations: iteration,
                level: last_level,
                spread,
            })?;
            condition = condition.max(cond);
            last_level = level.abs();
            let r = self.scan(&gamma);
            let ext = self.alternating_extrema(&gamma, &r);
            if ext.len() < self.n + 1 {
                return Err(Error::Solver {
                    message: format!("only {} alternating extrema, need {}", ext.len(), self.n + 1),
                    iterations: iteration,
                    level: last_level,
                    spread,
                });
            }
            let max = ext.iter().map(|e| e.value.abs()).fold(0.0, f64::max);
            let min = ext.iter().map(|e| e.value.abs()).fold(f64::INFINITY, f64::min);
            spread = (max - min) / max;
            let grid_max = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if spread < self.config.level_tol {
                return Ok(self.finish(gamma, ext, spread, iteration, condition, grid_max));
            }
            refs = ext.iter().map(|e| e.t).collect();
            if iteration == self.config.max_iterations && spread < self.config.accept_tol {
                return Ok(self.finish(gamma, ext, spread, iteration, condition, grid_max));
            }
        }
        Err(Error::Solver {
            message: "exchange did not level the extrema".into(),
            iterations: self.config.max_iterations,
            level: last_level,
            spread,
        })
    }

    fn finish(
        &self,
        gamma: Vec<f64>,
        extrema: Vec<Extremum>,
        spread: f64,
        iterations: usize,
        condition: f64,
        grid_max: f64,
    ) -> MinimaxSolution {
        let residual = extrema.iter().map(|e| e.value.abs()).fold(grid_max, f64::max);
        let tail_bound = self.system.tail_bound(&gamma, self.config.domain_cap);
        MinimaxSolution {
            gamma,
            residual,
            extrema,
            spread,
            iterations,
            condition,
            tail_bound,
            used_fallback: false,
        }
    }

    fn sup_norm(&self, gamma: &[f64]) -> f64 {
        self.scan(gamma).iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Coordinate-wise golden search on the scanned sup-norm, then a fresh
    /// exchange from the extrema of the result.
    fn fallback(&self, start: Vec<f64>) -> Result<MinimaxSolution> {
        let mut gamma = start;
        let mut best = self.sup_norm(&gamma);
        for _sweep in 0..60 {
            let before = best;
            for i in 0..self.n {
                let width = 0.5 * gamma[i].abs().max(1.0);
                let eval = |g: f64, gamma: &mut Vec<f64>| {
                    let old = gamma[i];
                    gamma[i] = g;
                    let v = self.sup_norm(gamma);
                    gamma[i] = old;
                    v
                };
                let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
                let (mut a, mut b) = (gamma[i] - width, gamma[i] + width);
                let mut c = b - inv_phi * (b - a);
                let mut d = a + inv_phi * (b - a);
                let (mut fc, mut fd) = (eval(c, &mut gamma), eval(d, &mut gamma));
                for _ in 0..40 {
                    if fc < fd {
                        b = d;
                        d = c;
                        fd = fc;
                        c = b - inv_phi * (b - a);
                        fc = eval(c, &mut gamma);
                    } else {
                        a = c;
                        c = d;
                        fc = fd;
                        d = a + inv_phi * (b - a);
                        fd = eval(d, &mut gamma);
                    }
                }
                let g = 0.5 * (a + b);
                let v = eval(g, &mut gamma);
                if v < best {
                    best = v;
                    gamma[i] = g;
                }
            }
            if before - best <= 1e-12 * before {
                break;
            }
        }
        let r = self.scan(&gamma);
        let ext = self.alternating_extrema(&gamma, &r);
        if ext.len() == self.n + 1 {
            if let Ok(mut sol) = self.exchange(ext.iter().map(|e| e.t).collect()) {
                sol.used_fallback = true;
                return Ok(sol);
            }
        }
        Err(Error::Solver {
            message: "coordinate search could not produce a levelled reference".into(),
            iterations: 0,
            level: best,
            spread: f64::NAN,
        })
    }

    fn run(&self, warm: Option<Vec<f64>>) -> Result<MinimaxSolution> {
        let refs = warm.unwrap_or_else(|| self.initial_refs());
        match self.exchange(refs.clone()) {
            Ok(sol) => Ok(sol),
            Err(first) => {
                let cold = self.initial_refs();
                if cold != refs {
                    if let Ok(sol) = self.exchange(cold) {
                        return Ok(sol);
                    }
                }
                let start = self
                    .solve_reference(&refs)
                    .map(|(g, _, _)| g)
                    .unwrap_or_else(|| vec![0.0; self.n]);
                self.fallback(start).map_err(|_| first)
            }
        }
    }
}

fn geometric(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![(lo * hi).sqrt()];
    }
    let ratio = (hi / lo).ln() / (count - 1) as f64;
    (0..count).map(|i| lo * (ratio * i as f64).exp()).collect()
}

fn check_terms(n: usize) -> Result<()> {
    if !(1..=MAX_TERMS).contains(&n) {
        return Err(Error::InvalidArgument(format!("number of terms must be in 1..={MAX_TERMS}, got {n}")));
    }
    Ok(())
}

/// Uniform fit of `f_1` by `f_2..f_{n+1}` on `[0, cap]`.
pub fn minimax_plain(n: usize, config: &MinimaxConfig) -> Result<MinimaxSolution> {
    check_terms(n)?;
    Solver::new(System::Plain, n, *config).run(None)
}

/// Uniform fit of `f_1/f_α` by `f_2/f_α..f_{n+1}/f_α` for fixed `α`.
pub fn minimax_weighted(n: usize, alpha: f64, config: &MinimaxConfig) -> Result<MinimaxSolution> {
    minimax_weighted_warm(n, alpha, config, None)
}

fn minimax_weighted_warm(
    n: usize,
    alpha: f64,
    config: &MinimaxConfig,
    warm: Option<Vec<f64>>,
) -> Result<MinimaxSolution> {
    check_terms(n)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("weight order must lie in (0, 1), got {alpha}")));
    }
    Solver::new(System::Weighted(alpha), n, *config).run(warm)
}

/// Runs the coordinate-search fallback directly from `start`.
#[doc(hidden)]
pub fn minimax_plain_fallback(n: usize, start: Vec<f64>, config: &MinimaxConfig) -> Result<MinimaxSolution> {
    check_terms(n)?;
    Solver::new(System::Plain, n, *config).fallback(start)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    Plain,
    Shifted,
    Controlled,
}

impl std::str::FromStr for SchemeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(Self::Plain),
            "shifted" => Ok(Self::Shifted),
            "controlled" => Ok(Self::Controlled),
            other => Err(Error::Config(format!("unknown scheme kind {other:?}"))),
        }
    }
}

impl std::fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Plain => "plain",
            Self::Shifted => "shifted",
            Self::Controlled => "controlled",
        })
    }
}

/// A solved scheme `s_q ≈ c₀ log 2 + Σ γ_i s_q(i+1)`.
#[derive(Debug, Clone, Serialize)]
pub struct ApproxScheme {
    pub kind: SchemeKind,
    pub n: usize,
    /// `gamma[i]` multiplies `s_q(i + 2)`.
    pub gamma: Vec<f64>,
    /// Coefficient of `log 2` (shifted kind).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c0: Option<f64>,
    /// Weight order (controlled kind).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Achieved sup-norm of the (weighted, for controlled) residual.
    pub residual: f64,
    /// `residual · log 2` (controlled kind).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certified_bound: Option<f64>,
    pub extrema: Vec<Extremum>,
    pub spread: f64,
    pub iterations: usize,
    pub condition_estimate: f64,
    pub tail_bound: f64,
}

impl ApproxScheme {
    fn from_solution(kind: SchemeKind, n: usize, sol: MinimaxSolution, alpha: Option<f64>) -> Self {
        let c0 = (kind == SchemeKind::Shifted).then(|| 1.0 - sol.gamma.iter().sum::<f64>());
        let certified_bound = (kind == SchemeKind::Controlled).then(|| sol.residual * LN_2);
        Self {
            kind,
            n,
            gamma: sol.gamma,
            c0,
            alpha,
            residual: sol.residual,
            certified_bound,
            extrema: sol.extrema,
            spread: sol.spread,
            iterations: sol.iterations,
            condition_estimate: sol.condition,
            tail_bound: sol.tail_bound,
        }
    }

    /// Residual function: `f_1 - Σ γ_i f_{i+1}`, divided by `f_α` for the
    /// controlled kind.
    pub fn residual_at(&self, t: f64) -> f64 {
        self.system().residual(&self.gamma, t)
    }

    fn system(&self) -> System {
        match (self.kind, self.alpha) {
            (SchemeKind::Controlled, Some(a)) => System::Weighted(a),
            _ => System::Plain,
        }
    }

    /// `c₀ log 2 + Σ γ_i s(i+2)` from `renyi[i] = s_q(i + 2)`.
    pub fn combine(&self, renyi: &[f64]) -> f64 {
        assert_eq!(renyi.len(), self.n);
        self.c0.unwrap_or(0.0) * LN_2 + dd::dot(&self.gamma, renyi)
    }
}

pub fn solve_plain(n: usize, domain_cap: f64) -> Result<ApproxScheme> {
    let config = MinimaxConfig {
        domain_cap,
        ..MinimaxConfig::default()
    };
    let sol = minimax_plain(n, &config)?;
    Ok(ApproxScheme::from_solution(SchemeKind::Plain, n, sol, None))
}

/// Same coefficients as [`solve_plain`], plus `c₀ = 1 - Σ γ_i`.
pub fn solve_shifted(n: usize) -> Result<ApproxScheme> {
    let sol = minimax_plain(n, &MinimaxConfig::default())?;
    Ok(ApproxScheme::from_solution(SchemeKind::Shifted, n, sol, None))
}

pub fn solve_controlled(n: usize) -> Result<ApproxScheme> {
    solve_controlled_with(n, &MinimaxConfig::default())
}

/// Golden-section search over `α` of the weighted minimax level.
pub fn solve_controlled_with(n: usize, config: &MinimaxConfig) -> Result<ApproxScheme> {
    check_terms(n)?;
    let (mut a, mut b) = config.alpha_bracket;
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut warm: Option<Vec<f64>> = None;
    let eval = |alpha: f64, warm: &mut Option<Vec<f64>>| -> Result<MinimaxSolution> {
        let sol = minimax_weighted_warm(n, alpha, config, warm.clone()).map_err(|e| match e {
            Error::Solver { message, iterations, level, spread } => Error::Solver {
                message: format!("inner problem at α = {alpha}: {message}"),
                iterations,
                level,
                spread,
            },
            other => other,
        })?;
        *warm = Some(sol.extrema.iter().map(|e| e.t).collect());
        Ok(sol)
    };
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut sc = eval(c, &mut warm)?;
    let mut sd = eval(d, &mut warm)?;
    while b - a > config.alpha_tol {
        if sc.residual < sd.residual {
            b = d;
            d = c;
            sd = sc;
            c = b - inv_phi * (b - a);
            sc = eval(c, &mut warm)?;
        } else {
            a = c;
            c = d;
            sc = sd;
            d = a + inv_phi * (b - a);
            sd = eval(d, &mut warm)?;
        }
    }
    let (alpha, sol) = if sc.residual < sd.residual { (c, sc) } else { (d, sd) };
    let edge = 2.0 * config.alpha_tol;
    if alpha - config.alpha_bracket.0 < edge || config.alpha_bracket.1 - alpha < edge {
        return Err(Error::Solver {
            message: format!("optimal α = {alpha} sits on the bracket edge"),
            iterations: sol.iterations,
            level: sol.residual,
            spread: sol.spread,
        });
    }
    Ok(ApproxScheme::from_solution(SchemeKind::Controlled, n, sol, Some(alpha)))
}

pub fn solve(kind: SchemeKind, n: usize) -> Result<ApproxScheme> {
    match kind {
        SchemeKind::Plain => solve_plain(n, MinimaxConfig::default().domain_cap),
        SchemeKind::Shifted => solve_shifted(n),
        SchemeKind::Controlled => solve_controlled(n),
    }
}

/// Outcome of applying a scheme to a symbol.
#[derive(Debug, Clone, Serialize)]
pub struct SchemeApplication {
    pub estimate: f64,
    /// `s_q(1)`.
    pub true_value: f64,
    pub true_error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    /// Quadrature error propagated through the combination.
    pub quad_error: f64,
    /// `s_q(2), …, s_q(n+1)`.
    pub renyi: Vec<f64>,
}

/// Slack factor on the propagated quadrature error when checking a bound.
pub const BOUND_SLACK: f64 = 10.0;

/// Evaluates the scheme on a symbol. For controlled schemes a violated bound
/// (beyond `BOUND_SLACK` times the quadrature error) is an error.
pub fn apply_scheme(scheme: &ApproxScheme, q: &Symbol, spec: &QuadratureSpec) -> Result<SchemeApplication> {
    let orders: Vec<Order> = std::iter::once(Order::One)
        .chain((2..=scheme.n + 1).map(|k| Order::Finite(k as f64)))
        .collect();
    let values = orders
        .par_iter()
        .map(|&o| renyi_density(q, o, spec))
        .collect::<Result<Vec<_>>>()?;
    let true_value = values[0].value;
    let renyi: Vec<f64> = values[1..].iter().map(|v| v.value).collect();
    let estimate = scheme.combine(&renyi);
    let quad_error = values[0].quad_error
        + scheme
            .gamma
            .iter()
            .zip(&values[1..])
            .map(|(g, v)| g.abs() * v.quad_error)
            .sum::<f64>();
    let true_error = (estimate - true_value).abs();
    if let Some(bound) = scheme.certified_bound {
        let slack = BOUND_SLACK * quad_error;
        if true_error > bound + slack {
            return Err(Error::BoundViolation {
                error: true_error,
                bound,
                slack,
            });
        }
    }
    Ok(SchemeApplication {
        estimate,
        true_value,
        true_error,
        bound: scheme.certified_bound,
        quad_error,
        renyi,
    })
}

/// One row of [`residual_profile`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProfileRow {
    pub t: f64,
    /// `r(t)`: the plain residual, or the weighted residual for controlled.
    pub residual: f64,
    /// Plotted value: `r(t)` for plain/shifted, `r(t) · log 2` for
    /// controlled (the scale on which its extrema equal the bound).
    pub scaled: f64,
    /// `r(t) · f_α(t)` for controlled schemes, `r(t)` otherwise.
    pub weighted: f64,
}

pub fn residual_profile(scheme: &ApproxScheme, t_grid: &[f64]) -> Vec<ProfileRow> {
    t_grid
        .iter()
        .map(|&t| {
            let r = scheme.residual_at(t);
            match (scheme.kind, scheme.alpha) {
                (SchemeKind::Controlled, Some(a)) => ProfileRow {
                    t,
                    residual: r,
                    scaled: r * LN_2,
                    weighted: r * eval_basis(a, t),
                },
                _ => ProfileRow {
                    t,
                    residual: r,
                    scaled: r,
                    weighted: r,
                },
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn basis_values() {
        assert_abs_diff_eq!(eval_basis(2.0, LN_2), 0.5, epsilon = 1e-15);
        assert_eq!(eval_basis(3.0, 0.0), 0.0);
        assert_abs_diff_eq!(eval_basis(1.0, 1.0), (-1f64).exp(), epsilon = 1e-16);
        let near = eval_basis(1.0001, 1.0);
        assert!((near / eval_basis(1.0, 1.0) - 1.0).abs() < 1e-4);
        // direct formula away from α = 1
        for &(a, t) in &[(0.3f64, 2.0f64), (5.0, 0.1), (11.0, 3.0)] {
            let direct = a / (a - 1.0) * ((-t).exp() - (-a * t).exp());
            assert_abs_diff_eq!(eval_basis(a, t), direct, epsilon = 1e-14);
        }
    }

    #[test]
    fn ratio_limits() {
        assert_eq!(basis_ratio(3.0, 0.5, 0.0), 6.0);
        let small = basis_ratio(3.0, 0.5, 1e-9);
        assert!((small - 6.0).abs() < 1e-7);
        let t = 2.5;
        assert_abs_diff_eq!(basis_ratio(4.0, 0.4, t), eval_basis(4.0, t) / eval_basis(0.4, t), epsilon = 1e-13);
        assert!(basis_ratio(1.0, 0.4, 200.0) < 1e-40);
    }

    #[test]
    fn plain_single_term() {
        let s = solve_plain(1, 40.0).unwrap();
        assert_abs_diff_eq!(s.gamma[0], 0.800, epsilon = 0.005);
        assert_abs_diff_eq!(s.residual, 0.086, epsilon = 0.002);
        assert_eq!(s.extrema.len(), 2);
        assert!(s.spread < 1e-8);
        assert!(s.tail_bound < 1e-14);
    }

    #[test]
    fn shifted_constant() {
        let s = solve_shifted(1).unwrap();
        assert_abs_diff_eq!(s.c0.unwrap(), 0.200, epsilon = 0.005);
        assert_abs_diff_eq!(s.c0.unwrap() + s.gamma[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn fallback_recovers_single_term() {
        let config = MinimaxConfig::default();
        let sol = minimax_plain_fallback(1, vec![0.3], &config).unwrap();
        assert!(sol.used_fallback);
        assert_abs_diff_eq!(sol.gamma[0], 0.7999, epsilon = 1e-3);
    }

    #[test]
    fn rejects_bad_term_counts() {
        assert!(solve_plain(0, 40.0).is_err());
        assert!(solve_plain(11, 40.0).is_err());
        assert!(minimax_weighted(2, 1.5, &MinimaxConfig::default()).is_err());
    }

    #[test]
    fn controlled_single_term() {
        let s = solve_controlled(1).unwrap();
        assert_abs_diff_eq!(s.gamma[0], 0.666, epsilon = 0.005);
        assert_abs_diff_eq!(s.alpha.unwrap(), 0.661, epsilon = 0.01);
        assert_abs_diff_eq!(s.certified_bound.unwrap(), 0.35, epsilon = 0.01);
        // the origin is one of the extrema
        assert_eq!(s.extrema[0].t, 0.0);
    }

    #[test]
    fn half_filled_application() {
        let q = Symbol::constant(1, 0.5).unwrap();
        let spec = QuadratureSpec::default();
        let shifted = solve_shifted(1).unwrap();
        let app = apply_scheme(&shifted, &q, &spec).unwrap();
        assert!(app.true_error < 1e-12);
        let controlled = solve_controlled(1).unwrap();
        let app = apply_scheme(&controlled, &q, &spec).unwrap();
        assert_abs_diff_eq!(app.true_error, (1.0 - controlled.gamma[0]) * LN_2, epsilon = 1e-12);
        assert!(app.true_error <= 0.35);
    }

    #[test]
    fn profile_scaling() {
        let s = solve_controlled(1).unwrap();
        let rows = residual_profile(&s, &[0.0, 1.0]);
        assert_abs_diff_eq!(rows[0].scaled.abs(), s.certified_bound.unwrap(), epsilon = 1e-9);
        assert_eq!(rows[0].weighted, 0.0);
    }
}
