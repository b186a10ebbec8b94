//! Published constants, side-by-side comparison rows, figure data, and the
//! bundled test symbols.

use std::collections::BTreeSet;
use std::f64::consts::LN_2;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::Serialize;

use crate::approx::{
    self, apply_scheme, eval_basis, minimax_weighted, residual_profile, ApproxScheme, MinimaxConfig, MinimaxSolution,
    SchemeKind,
};
use crate::entropy::{g_consistency, g_function, h_function, renyi_density, GForm, Order};
use crate::error::Result;
use crate::laplace::{
    check_complete_monotonicity, g_kernel, kernel_laplace_transform, laplace_of_k, laplace_of_k_closed, step_k,
    MonotonicityReport,
};
use crate::quadrature::QuadratureSpec;
use crate::symbol::{cosine_thermal, raised_cosine, Symbol};

/// Printed coefficients of the plain fits, as `s ≈ Σ γ_i s(i+1)`.
pub const PLAIN_GAMMA: [&[f64]; 4] = [
    &[0.800],
    &[2.219, -1.314],
    &[4.233, -6.133, 2.850],
    &[6.833, -17.498, 18.780, -7.148],
];
/// Printed sup-norms of the plain fits.
pub const PLAIN_RESIDUAL: [f64; 4] = [0.09, 0.04, 0.02, 0.01];
/// Extremum magnitudes labelled on the plain residual figure.
pub const PLAIN_EXTREMA: [f64; 4] = [0.086, 0.037, 0.021, 0.013];
/// Printed constants of the `log 2`-shifted variant.
pub const SHIFTED_C0: [f64; 4] = [0.200, 0.095, 0.050, 0.033];
/// Coefficients as printed on the shifted lines. Two entries differ from the
/// plain lines although the fit is the same.
pub const SHIFTED_GAMMA: [&[f64]; 4] = [
    &[0.800],
    &[2.192, -1.314],
    &[4.233, -6.133, 2.850],
    &[6.833, -17.498, 18.785, -7.148],
];
pub const CONTROLLED_GAMMA: [&[f64]; 4] = [
    &[0.666],
    &[1.938, -1.005],
    &[3.892, -4.967, 2.048],
    &[6.556, -15.064, 14.413, -4.923],
];
pub const CONTROLLED_BOUND: [f64; 4] = [0.35, 0.19, 0.12, 0.08];
pub const CONTROLLED_ALPHA: [f64; 4] = [0.661, 0.515, 0.435, 0.384];
/// Extremum magnitudes labelled on the controlled residual figure.
pub const CONTROLLED_EXTREMA: [f64; 4] = [0.349, 0.186, 0.117, 0.081];
pub const CONTROLLED10_GAMMA: [f64; 10] = [
    37.181, -529.415, 3846.261, -16301.725, 43168.833, -73647.855, 80999.681, -55517.489, 21580.373, -3634.848,
];
pub const CONTROLLED10_BOUND: f64 = 0.03;
pub const CONTROLLED10_ALPHA: f64 = 0.261;
pub const F1_PEAK: f64 = 0.368;

pub const COEFFICIENT_TOL: f64 = 0.005;
pub const BOUND_TOL: f64 = 0.01;
pub const LABEL_TOL: f64 = 0.002;
pub const BOUND10_TOL: f64 = 0.005;
pub const ALPHA10_TOL: f64 = 0.02;
pub const SUM_RULE_TOL: f64 = 1e-6;

/// The symbols used throughout the validation suite.
pub fn bundled_symbols() -> Result<Vec<Symbol>> {
    Ok(vec![
        cosine_thermal(1, 2.0, 0.0, 1.0)?.with_label("thermal beta=2 mu=0"),
        raised_cosine().with_label("raised cosine"),
        cosine_thermal(1, 1.0, 0.3, 1.0)?.with_label("thermal beta=1 mu=0.3"),
    ])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub table: String,
    pub n: usize,
    pub quantity: String,
    /// Absent for rows with no published counterpart.
    pub published: Option<f64>,
    pub computed: Option<f64>,
    pub tolerance: Option<f64>,
    /// `None` when there is nothing to compare against.
    pub agree: Option<bool>,
    pub note: String,
}

impl ComparisonRow {
    fn new(table: &str, n: usize, quantity: impl Into<String>, published: Option<f64>, computed: Option<f64>, tol: Option<f64>) -> Self {
        let agree = match (published, computed, tol) {
            (Some(p), Some(c), Some(t)) => Some((p - c).abs() <= t),
            (Some(_), None, _) => Some(false),
            _ => None,
        };
        Self {
            table: table.into(),
            n,
            quantity: quantity.into(),
            published,
            computed,
            tolerance: tol,
            agree,
            note: String::new(),
        }
    }

    fn note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn status(&self) -> &'static str {
        match (self.computed, self.agree) {
            (None, _) => "FAILED",
            (_, Some(true)) => "agree",
            (_, Some(false)) => "DISAGREE",
            (_, None) => "computed",
        }
    }
}

/// Peak of `f_1` on a fine grid, refined by golden section.
pub fn f1_peak() -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0f64, 5.0f64);
    for _ in 0..200 {
        let c = b - inv_phi * (b - a);
        let d = a + inv_phi * (b - a);
        if eval_basis(1.0, c) > eval_basis(1.0, d) {
            b = d;
        } else {
            a = c;
        }
    }
    let t = 0.5 * (a + b);
    (t, eval_basis(1.0, t))
}

fn extremum_magnitude(s: &ApproxScheme) -> f64 {
    s.extrema.iter().map(|e| e.value.abs()).fold(0.0, f64::max)
}

fn gamma_rows(table: &str, n: usize, published: &[f64], computed: Option<&[f64]>, tol: f64) -> Vec<ComparisonRow> {
    published
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            ComparisonRow::new(
                table,
                n,
                format!("gamma_{} [s({})]", i + 1, i + 2),
                Some(p),
                computed.map(|g| g[i]),
                Some(tol),
            )
        })
        .collect()
}

/// Solved schemes behind the tables; failures are kept as messages.
#[derive(Debug, Clone)]
pub struct SolvedSchemes {
    pub plain: Vec<std::result::Result<ApproxScheme, String>>,
    pub shifted: Vec<std::result::Result<ApproxScheme, String>>,
    /// `n = 1..=10`.
    pub controlled: Vec<std::result::Result<ApproxScheme, String>>,
    /// Weighted fits at the published `α` for `n = 1..=4` and `n = 10`.
    pub at_printed_alpha: Vec<std::result::Result<MinimaxSolution, String>>,
}

pub fn solve_all() -> SolvedSchemes {
    let jobs: Vec<(SchemeKind, usize)> = (1..=4)
        .map(|n| (SchemeKind::Plain, n))
        .chain((1..=4).map(|n| (SchemeKind::Shifted, n)))
        .chain((1..=10).map(|n| (SchemeKind::Controlled, n)))
        .collect();
    let mut results = jobs
        .par_iter()
        .map(|&(kind, n)| approx::solve(kind, n).map_err(|e| e.to_string()))
        .collect::<Vec<_>>()
        .into_iter();
    let printed: Vec<(usize, f64)> = (1..=4)
        .map(|n| (n, CONTROLLED_ALPHA[n - 1]))
        .chain(std::iter::once((10, CONTROLLED10_ALPHA)))
        .collect();
    let config = MinimaxConfig::default();
    let at_printed_alpha = printed
        .par_iter()
        .map(|&(n, a)| minimax_weighted(n, a, &config).map_err(|e| e.to_string()))
        .collect();
    SolvedSchemes {
        plain: results.by_ref().take(4).collect(),
        shifted: results.by_ref().take(4).collect(),
        controlled: results.collect(),
        at_printed_alpha,
    }
}

/// Rows for the three coefficient tables, the `α` list and the `f_1` peak.
pub fn comparison_rows(schemes: &SolvedSchemes) -> Vec<ComparisonRow> {
    let mut rows = Vec::new();
    let (_, peak) = f1_peak();
    rows.push(ComparisonRow::new("basis", 1, "sup f_1", Some(F1_PEAK), Some(peak), Some(0.0005)));

    for n in 1..=4 {
        let s = schemes.plain[n - 1].as_ref();
        let fail = s.as_ref().err().map(|e| e.to_string()).unwrap_or_default();
        let ok = s.ok();
        let mut block = gamma_rows("plain", n, PLAIN_GAMMA[n - 1], ok.map(|s| s.gamma.as_slice()), COEFFICIENT_TOL);
        block.push(ComparisonRow::new("plain", n, "residual", Some(PLAIN_RESIDUAL[n - 1]), ok.map(|s| s.residual), Some(BOUND_TOL)));
        block.push(ComparisonRow::new(
            "plain",
            n,
            "extremum magnitude",
            Some(PLAIN_EXTREMA[n - 1]),
            ok.map(extremum_magnitude),
            Some(LABEL_TOL),
        ));
        rows.extend(block.into_iter().map(|r| if fail.is_empty() { r } else { r.note(fail.clone()) }));
    }

    for n in 1..=4 {
        let s = schemes.shifted[n - 1].as_ref();
        let ok = s.ok();
        rows.push(ComparisonRow::new("shifted", n, "c0 [log 2]", Some(SHIFTED_C0[n - 1]), ok.and_then(|s| s.c0), Some(COEFFICIENT_TOL)));
        for (i, row) in gamma_rows("shifted", n, SHIFTED_GAMMA[n - 1], ok.map(|s| s.gamma.as_slice()), COEFFICIENT_TOL)
            .into_iter()
            .enumerate()
        {
            let printed = SHIFTED_GAMMA[n - 1][i];
            let plain = PLAIN_GAMMA[n - 1][i];
            rows.push(if printed != plain {
                row.note(format!("printed {printed} on this line but {plain} for the same fit in the plain table"))
            } else {
                row
            });
        }
        let sum = ok.map(|s| s.c0.unwrap_or(0.0) + s.gamma.iter().sum::<f64>());
        rows.push(ComparisonRow::new("shifted", n, "c0 + sum gamma", Some(1.0), sum, Some(SUM_RULE_TOL)));
    }

    for n in 1..=4 {
        let ok = schemes.controlled[n - 1].as_ref().ok();
        rows.extend(
            gamma_rows("controlled", n, CONTROLLED_GAMMA[n - 1], ok.map(|s| s.gamma.as_slice()), COEFFICIENT_TOL)
                .into_iter()
                .map(|r| {
                    if r.agree == Some(false) {
                        r.note("coefficients at the optimal alpha; compare the row at printed alpha")
                    } else {
                        r
                    }
                }),
        );
        let fixed = schemes.at_printed_alpha[n - 1].as_ref().ok();
        rows.extend(
            gamma_rows("controlled", n, CONTROLLED_GAMMA[n - 1], fixed.map(|s| s.gamma.as_slice()), COEFFICIENT_TOL)
                .into_iter()
                .map(|mut r| {
                    r.quantity = format!("{} at printed alpha", r.quantity);
                    r.note(format!("fit re-solved with alpha fixed at {}", CONTROLLED_ALPHA[n - 1]))
                }),
        );
        rows.push(ComparisonRow::new("controlled", n, "bound", Some(CONTROLLED_BOUND[n - 1]), ok.and_then(|s| s.certified_bound), Some(BOUND_TOL)));
        rows.push(ComparisonRow::new("controlled", n, "alpha", Some(CONTROLLED_ALPHA[n - 1]), ok.and_then(|s| s.alpha), Some(BOUND_TOL)));
        rows.push(ComparisonRow::new(
            "controlled",
            n,
            "rescaled extremum",
            Some(CONTROLLED_EXTREMA[n - 1]),
            ok.map(|s| extremum_magnitude(s) * LN_2),
            Some(LABEL_TOL),
        ));
    }
    for n in 5..=9 {
        let ok = schemes.controlled[n - 1].as_ref().ok();
        rows.push(ComparisonRow::new("controlled", n, "bound", None, ok.and_then(|s| s.certified_bound), None).note("no published value"));
        rows.push(ComparisonRow::new("controlled", n, "alpha", None, ok.and_then(|s| s.alpha), None).note("no published value"));
    }
    let ten = schemes.controlled[9].as_ref().ok();
    rows.push(ComparisonRow::new("controlled", 10, "bound", Some(CONTROLLED10_BOUND), ten.and_then(|s| s.certified_bound), Some(BOUND10_TOL)));
    rows.push(ComparisonRow::new("controlled", 10, "alpha", Some(CONTROLLED10_ALPHA), ten.and_then(|s| s.alpha), Some(ALPHA10_TOL)));
    rows.push(ComparisonRow::new("controlled", 10, "condition estimate", None, ten.map(|s| s.condition_estimate), None));
    rows.push(
        ComparisonRow::new("controlled", 10, "unscaled residual", Some(CONTROLLED10_BOUND), ten.map(|s| s.residual), None)
            .note("sup-norm before the log 2 factor"),
    );
    let ten_fixed = schemes.at_printed_alpha[4].as_ref().ok();
    for (i, &p) in CONTROLLED10_GAMMA.iter().enumerate() {
        rows.push(
            ComparisonRow::new("controlled", 10, format!("gamma_{} [s({})]", i + 1, i + 2), Some(p), ten.map(|s| s.gamma[i]), None)
                .note("listed for reference; no tolerance is set for n = 10 coefficients"),
        );
        rows.push(
            ComparisonRow::new(
                "controlled",
                10,
                format!("gamma_{} [s({})] at printed alpha", i + 1, i + 2),
                Some(p),
                ten_fixed.map(|s| s.gamma[i]),
                None,
            )
            .note(format!("fit re-solved with alpha fixed at {CONTROLLED10_ALPHA}")),
        );
    }
    for (table, list) in [("plain", &schemes.plain), ("shifted", &schemes.shifted), ("controlled", &schemes.controlled)] {
        for (i, r) in list.iter().enumerate() {
            if let Err(e) = r {
                rows.push(ComparisonRow::new(table, i + 1, "solver", None, None, None).note(e.clone()));
            }
        }
    }
    rows
}

/// Two-column data `(t, k(t))` tracing the steps of `k` on `[0, tmax]`:
/// each step contributes its left and right end.
pub fn step_plot(tmax: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut m = 0u64;
    while (m as f64) < tmax {
        let v = step_k(m as f64);
        out.push((m as f64, v));
        out.push((((m + 1) as f64).min(tmax), v));
        m += 1;
    }
    out
}

/// Columns `t, r_1(t), …, r_n(t)` on `[0, tmax]` with `points` samples.
pub fn profile_table(schemes: &[&ApproxScheme], tmax: f64, points: usize, weighted: bool) -> Vec<Vec<f64>> {
    let grid: Vec<f64> = (0..points).map(|i| tmax * i as f64 / (points - 1) as f64).collect();
    let columns: Vec<Vec<f64>> = schemes
        .iter()
        .map(|s| {
            residual_profile(s, &grid)
                .into_iter()
                .map(|r| if weighted { r.weighted } else { r.scaled })
                .collect()
        })
        .collect();
    grid.iter()
        .enumerate()
        .map(|(i, &t)| std::iter::once(t).chain(columns.iter().map(|c| c[i])).collect())
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityRow {
    pub s: f64,
    pub piecewise: f64,
    pub closed: f64,
    pub difference: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RepresentationRow {
    pub alpha: f64,
    pub defining: f64,
    pub integral: f64,
    pub laplace: f64,
    pub max_difference: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AsymptoteRow {
    pub t: f64,
    pub kernel: f64,
    pub distance_to_log2: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LaplaceReport {
    pub symbol: String,
    pub identity: Vec<IdentityRow>,
    pub representation: Vec<RepresentationRow>,
    pub asymptote: Vec<AsymptoteRow>,
    pub monotonicity: MonotonicityReport,
    pub pass: bool,
}

pub const IDENTITY_POINTS: [f64; 5] = [0.01, 0.1, 1.0, 10.0, 50.0];
pub const IDENTITY_TOL: f64 = 1e-8;
pub const REPRESENTATION_ALPHAS: [f64; 4] = [0.5, 1.0, 2.0, 5.0];
pub const REPRESENTATION_TOL: f64 = 1e-6;
pub const MONOTONICITY_ORDER: usize = 6;
pub const MONOTONICITY_RANGE: (f64, f64) = (0.5, 10.0);
pub const MONOTONICITY_STEP: f64 = 0.25;

pub fn identity_rows() -> Vec<IdentityRow> {
    IDENTITY_POINTS
        .iter()
        .map(|&s| {
            let piecewise = laplace_of_k(s);
            let closed = laplace_of_k_closed(s);
            let difference = (piecewise - closed).abs();
            IdentityRow {
                s,
                piecewise,
                closed,
                difference,
                pass: difference <= IDENTITY_TOL,
            }
        })
        .collect()
}

/// `g_q` three ways: defining formula, integral formula, and the truncated
/// Laplace transform of `G`.
pub fn representation_rows(q: &Symbol, spec: &QuadratureSpec) -> Result<Vec<RepresentationRow>> {
    REPRESENTATION_ALPHAS
        .par_iter()
        .map(|&alpha| {
            let c = g_consistency(q, alpha, spec)?;
            let l = kernel_laplace_transform(q, alpha, REPRESENTATION_TOL / 10.0, spec)?;
            let vals = [c.defining, c.integral, l.value];
            let max_difference = vals
                .iter()
                .flat_map(|a| vals.iter().map(move |b| (a - b).abs()))
                .fold(0.0, f64::max);
            Ok(RepresentationRow {
                alpha,
                defining: c.defining,
                integral: c.integral,
                laplace: l.value,
                max_difference,
                pass: max_difference <= REPRESENTATION_TOL,
            })
        })
        .collect()
}

/// Finite-difference complete-monotonicity check of `α ↦ g_q(α)`.
pub fn g_monotonicity(q: &Symbol, spec: &QuadratureSpec) -> Result<MonotonicityReport> {
    let (start, end) = MONOTONICITY_RANGE;
    check_complete_monotonicity(
        |a| Ok(g_function(q, a, spec, GForm::Integral)?.value),
        start,
        end,
        MONOTONICITY_STEP,
        MONOTONICITY_ORDER,
        spec.abs_tol.max(f64::EPSILON),
    )
}

pub fn laplace_report(q: &Symbol, spec: &QuadratureSpec) -> Result<LaplaceReport> {
    let identity = identity_rows();
    let representation = representation_rows(q, spec)?;
    let kernel_spec = QuadratureSpec::with_tol(1e-5);
    let asymptote = [1e3, 1e4]
        .iter()
        .map(|&t| {
            let g = g_kernel(q, t, &kernel_spec)?;
            Ok(AsymptoteRow {
                t,
                kernel: g.value,
                distance_to_log2: (g.value - LN_2).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let monotonicity = g_monotonicity(q, spec)?;
    let pass = identity.iter().all(|r| r.pass) && representation.iter().all(|r| r.pass) && monotonicity.pass;
    Ok(LaplaceReport {
        symbol: q.label().to_string(),
        identity,
        representation,
        asymptote,
        monotonicity,
        pass,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ApplicationRow {
    pub symbol: String,
    pub kind: SchemeKind,
    pub n: usize,
    pub estimate: Option<f64>,
    pub true_value: Option<f64>,
    pub true_error: Option<f64>,
    pub bound: Option<f64>,
    pub quad_error: Option<f64>,
    pub error: Option<String>,
}

/// Full reproduction: tables, figure data, and validation on the bundled
/// symbols.
#[derive(Debug, Clone, Serialize)]
pub struct Reproduction {
    pub rows: Vec<ComparisonRow>,
    pub alpha_list: Vec<Option<f64>>,
    pub applications: Vec<ApplicationRow>,
    pub laplace: Vec<LaplaceReport>,
    #[serde(skip)]
    pub fig1: Vec<(f64, f64)>,
    #[serde(skip)]
    pub fig2: Vec<Vec<f64>>,
    #[serde(skip)]
    pub fig3: Vec<Vec<f64>>,
    #[serde(skip)]
    pub fig3_weighted: Vec<Vec<f64>>,
    /// Library operations called while building the report.
    pub operations_exercised: BTreeSet<String>,
}

/// Operations the reproduction must call at least once.
pub const REQUIRED_OPERATIONS: &[&str] = &[
    "entropy::renyi_density",
    "entropy::h_function",
    "entropy::g_function",
    "laplace::step_k",
    "laplace::laplace_of_k",
    "laplace::g_kernel",
    "laplace::check_complete_monotonicity",
    "approx::eval_basis",
    "approx::solve_plain",
    "approx::solve_shifted",
    "approx::solve_controlled",
    "approx::apply_scheme",
    "approx::residual_profile",
];

pub const FIGURE_TMAX: f64 = 10.0;
pub const FIGURE_POINTS: usize = 1001;

pub fn reproduce(spec: &QuadratureSpec) -> Result<Reproduction> {
    let ops = Mutex::new(BTreeSet::new());
    let mark = |name: &str| {
        ops.lock().expect("operation log poisoned").insert(name.to_string());
    };
    let schemes = solve_all();
    for op in ["approx::solve_plain", "approx::solve_shifted", "approx::solve_controlled", "approx::eval_basis"] {
        mark(op);
    }
    let rows = comparison_rows(&schemes);
    let alpha_list: Vec<Option<f64>> = [1, 2, 3, 4, 10]
        .iter()
        .map(|&n| schemes.controlled[n - 1].as_ref().ok().and_then(|s| s.alpha))
        .collect();

    let symbols = bundled_symbols()?;
    let mut applications = Vec::new();
    for q in &symbols {
        for (kind, list) in [
            (SchemeKind::Plain, &schemes.plain),
            (SchemeKind::Shifted, &schemes.shifted),
            (SchemeKind::Controlled, &schemes.controlled[..4].to_vec()),
        ] {
            for (i, s) in list.iter().enumerate() {
                let mut row = ApplicationRow {
                    symbol: q.label().to_string(),
                    kind,
                    n: i + 1,
                    estimate: None,
                    true_value: None,
                    true_error: None,
                    bound: None,
                    quad_error: None,
                    error: None,
                };
                match s.as_ref().map(|s| apply_scheme(s, q, spec)) {
                    Ok(Ok(a)) => {
                        row.estimate = Some(a.estimate);
                        row.true_value = Some(a.true_value);
                        row.true_error = Some(a.true_error);
                        row.bound = a.bound;
                        row.quad_error = Some(a.quad_error);
                    }
                    Ok(Err(e)) => row.error = Some(e.to_string()),
                    Err(e) => row.error = Some(e.clone()),
                }
                applications.push(row);
            }
        }
    }
    mark("approx::apply_scheme");
    mark("entropy::renyi_density");

    // the gap function at a few points of each symbol, as a sanity channel
    for q in &symbols {
        for x in [0.0, 0.25, 0.5] {
            let h = h_function(q, &vec![x; q.dim()])?;
            debug_assert!(h >= 0.0);
        }
    }
    mark("entropy::h_function");

    let laplace = symbols
        .iter()
        .map(|q| laplace_report(q, spec))
        .collect::<Result<Vec<_>>>()?;
    for op in [
        "entropy::g_function",
        "laplace::laplace_of_k",
        "laplace::g_kernel",
        "laplace::check_complete_monotonicity",
    ] {
        mark(op);
    }

    let fig1 = step_plot(FIGURE_TMAX);
    mark("laplace::step_k");
    let plain: Vec<&ApproxScheme> = schemes.plain.iter().filter_map(|s| s.as_ref().ok()).collect();
    let controlled: Vec<&ApproxScheme> = schemes.controlled[..4].iter().filter_map(|s| s.as_ref().ok()).collect();
    let fig2 = profile_table(&plain, FIGURE_TMAX, FIGURE_POINTS, false);
    let fig3 = profile_table(&controlled, FIGURE_TMAX, FIGURE_POINTS, false);
    let fig3_weighted = profile_table(&controlled, FIGURE_TMAX, FIGURE_POINTS, true);
    mark("approx::residual_profile");

    Ok(Reproduction {
        rows,
        alpha_list,
        applications,
        laplace,
        fig1,
        fig2,
        fig3,
        fig3_weighted,
        operations_exercised: ops.into_inner().expect("operation log poisoned"),
    })
}

/// Quick per-symbol density listing used by reports.
pub fn densities(q: &Symbol, orders: &[Order], spec: &QuadratureSpec) -> Result<Vec<crate::entropy::EntropyValue>> {
    orders.par_iter().map(|&o| renyi_density(q, o, spec)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn peak_of_f1() {
        let (t, v) = f1_peak();
        assert!((t - 1.0).abs() < 1e-7);
        assert!((v - (-1f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn step_plot_shape() {
        let p = step_plot(4.0);
        assert_eq!(p.len(), 8);
        assert_eq!(p[6], (3.0, 5.0 / 6.0));
        assert_eq!(p[7], (4.0, 5.0 / 6.0));
    }

    #[test]
    fn identity_holds() {
        assert!(identity_rows().iter().all(|r| r.pass));
    }

    #[test]
    fn row_status() {
        let r = ComparisonRow::new("t", 1, "x", Some(1.0), Some(1.004), Some(0.005));
        assert_eq!(r.status(), "agree");
        let r = ComparisonRow::new("t", 1, "x", Some(1.0), None, Some(0.005));
        assert_eq!(r.status(), "FAILED");
    }
}
