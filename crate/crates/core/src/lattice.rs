//! Finite-volume checks: entropies of box restrictions, their convergence to
//! the densities, and a brute-force density matrix built from Wick's rule.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::entropy::{mode_entropy, renyi_density, Order};
use crate::error::{Error, Result};
use crate::quadrature::QuadratureSpec;
use crate::symbol::{restrict_to_box, Boundary, Symbol};

/// Spectrum of a box restriction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalSpectrum {
    pub side: usize,
    pub dim: usize,
    /// Ascending, in `[0,1]`.
    pub eigenvalues: Vec<f64>,
}

impl LocalSpectrum {
    pub fn new(side: usize, dim: usize, mut eigenvalues: Vec<f64>) -> Result<Self> {
        if let Some(bad) = eigenvalues.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidArgument(format!("eigenvalue {bad} outside [0,1]")));
        }
        eigenvalues.sort_by(f64::total_cmp);
        Ok(Self { side, dim, eigenvalues })
    }

    pub fn sites(&self) -> usize {
        self.eigenvalues.len()
    }
}

pub fn local_spectrum(q: &Symbol, side: usize, boundary: Boundary, spec: &QuadratureSpec) -> Result<LocalSpectrum> {
    let r = restrict_to_box(q, side, boundary, spec)?;
    Ok(LocalSpectrum {
        side,
        dim: r.dim,
        eigenvalues: r.eigenvalues,
    })
}

/// `S(α) = Σ_j s(λ_j)` with the per-mode entropy of order `α`.
pub fn local_renyi(spectrum: &LocalSpectrum, order: Order) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for &l in &spectrum.eigenvalues {
        let v = mode_entropy(l, order);
        let t = sum + v;
        c += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
        sum = t;
    }
    sum + c
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub side: usize,
    pub per_site: f64,
    pub density: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub order: Order,
    pub rows: Vec<ConvergenceRow>,
    pub density: f64,
    pub density_error: f64,
    /// Richardson estimate from the two largest boxes, assuming `O(1/L)`.
    pub extrapolated: f64,
    /// `|extrapolated - per_site(largest L)|`.
    pub extrapolation_error: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Default bound on the final gap.
pub const CONVERGENCE_THRESHOLD: f64 = 5e-3;

/// Per-site entropies of growing boxes against the density.
pub fn density_convergence(
    q: &Symbol,
    order: Order,
    sides: &[usize],
    boundary: Boundary,
    threshold: f64,
    spec: &QuadratureSpec,
) -> Result<ConvergenceReport> {
    if sides.is_empty() || sides.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("box sides must be non-empty and strictly ascending".into()));
    }
    let density = renyi_density(q, order, spec)?;
    let per_site: Vec<f64> = sides
        .par_iter()
        .map(|&side| {
            let s = local_spectrum(q, side, boundary, spec)?;
            Ok(local_renyi(&s, order) / s.sites() as f64)
        })
        .collect::<Result<_>>()?;
    let rows: Vec<ConvergenceRow> = sides
        .iter()
        .zip(&per_site)
        .map(|(&side, &p)| ConvergenceRow {
            side,
            per_site: p,
            density: density.value,
            gap: p - density.value,
        })
        .collect();
    let last = rows[rows.len() - 1];
    let (extrapolated, extrapolation_error) = if rows.len() >= 2 {
        let prev = rows[rows.len() - 2];
        let (l1, l2) = (prev.side as f64, last.side as f64);
        let e = (l2 * last.per_site - l1 * prev.per_site) / (l2 - l1);
        (e, (e - last.per_site).abs())
    } else {
        (last.per_site, f64::NAN)
    };
    let first_gap = rows[0].gap.abs();
    let final_gap = last.gap.abs();
    let pass = final_gap < threshold && (rows.len() == 1 || final_gap <= first_gap);
    Ok(ConvergenceReport {
        order,
        rows,
        density: density.value,
        density_error: density.quad_error,
        extrapolated,
        extrapolation_error,
        threshold,
        pass,
    })
}

/// Largest site count accepted by the oracle.
pub const ORACLE_MAX_SITES: usize = 4;

/// Density matrix on the `2^n` occupation states, bit `j` of the state index
/// being the occupation of site `j`. Creation operators act in Jordan–Wigner
/// order with site 0 first.
#[derive(Debug, Clone)]
pub struct OracleDensityMatrix {
    pub sites: usize,
    pub rho: DMatrix<Complex64>,
    /// Largest entry of `ρ - ρ†` before symmetrisation.
    pub hermiticity_error: f64,
    /// Correlation eigenvalues of the box restriction.
    pub modes: Vec<f64>,
}

fn annihilator(sites: usize, j: usize) -> DMatrix<f64> {
    let dim = 1usize << sites;
    let mut m = DMatrix::zeros(dim, dim);
    for state in 0..dim {
        if state >> j & 1 == 1 {
            let sign = if (state & ((1 << j) - 1)).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            m[(state ^ (1 << j), state)] = sign;
        }
    }
    m
}

fn subsets(n: usize) -> Vec<Vec<usize>> {
    (0..1usize << n)
        .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).collect())
        .collect()
}

fn determinant(m: Vec<Vec<Complex64>>) -> Complex64 {
    if m.is_empty() {
        return Complex64::new(1.0, 0.0);
    }
    let n = m.len();
    DMatrix::from_fn(n, n, |i, j| m[i][j]).determinant()
}

/// Reconstructs the density matrix of the state restricted to `n` consecutive
/// sites from its two-point function alone.
///
/// The normal-ordered monomials `c†_{i_1}…c†_{i_k} c_{j_l}…c_{j_1}` form a
/// basis of the operators on the `n`-site Fock space. Their expectations are
/// `0` unless `k = l`, and otherwise `det[ω(c†_{i_p} c_{j_r})]`, with
/// `ω(c†_x c_y) = M_{yx}` for the restriction `M`. Matching `tr(ρ B) = ω(B)`
/// over the basis is a square linear system for the entries of `ρ`.
pub fn wick_oracle(q: &Symbol, sites: usize, spec: &QuadratureSpec) -> Result<OracleDensityMatrix> {
    if q.dim() != 1 {
        return Err(Error::InvalidArgument("the oracle supports one-dimensional symbols only".into()));
    }
    if !(1..=ORACLE_MAX_SITES).contains(&sites) {
        return Err(Error::InvalidArgument(format!(
            "oracle site count must be in 1..={ORACLE_MAX_SITES}, got {sites}"
        )));
    }
    let restriction = restrict_to_box(q, sites, Boundary::Open, spec)?;
    let m = &restriction.matrix;
    let two_point = |x: usize, y: usize| m[(y, x)];

    let dim = 1usize << sites;
    let c: Vec<DMatrix<f64>> = (0..sites).map(|j| annihilator(sites, j)).collect();
    let cdag: Vec<DMatrix<f64>> = c.iter().map(|a| a.transpose()).collect();
    let identity = DMatrix::<f64>::identity(dim, dim);

    let sets = subsets(sites);
    let mut rows: Vec<DMatrix<f64>> = Vec::with_capacity(dim * dim);
    let mut rhs: Vec<Complex64> = Vec::with_capacity(dim * dim);
    for i_set in &sets {
        for j_set in &sets {
            let mut op = identity.clone();
            for &i in i_set {
                op = &op * &cdag[i];
            }
            for &j in j_set.iter().rev() {
                op = &op * &c[j];
            }
            let value = if i_set.len() != j_set.len() {
                Complex64::new(0.0, 0.0)
            } else {
                determinant(
                    i_set
                        .iter()
                        .map(|&i| j_set.iter().map(|&j| two_point(i, j)).collect())
                        .collect(),
                )
            };
            rows.push(op);
            rhs.push(value);
        }
    }
    // tr(ρ B) = Σ_{k,l} ρ_{kl} B_{lk}; unknown index k·dim + l
    let size = dim * dim;
    let a = DMatrix::from_fn(size, size, |row, col| {
        let (k, l) = (col / dim, col % dim);
        Complex64::new(rows[row][(l, k)], 0.0)
    });
    let b = nalgebra::DVector::from_vec(rhs);
    let x = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Eigen("monomial basis system is singular".into()))?;
    let rho = DMatrix::from_fn(dim, dim, |k, l| x[k * dim + l]);
    let adjoint = rho.adjoint();
    let hermiticity_error = (&rho - &adjoint).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let rho = (&rho + &adjoint).map(|z| z * 0.5);
    Ok(OracleDensityMatrix {
        sites,
        rho,
        hermiticity_error,
        modes: restriction.eigenvalues,
    })
}

impl OracleDensityMatrix {
    /// Unclamped ascending spectrum of `ρ`.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        let n = self.rho.nrows();
        let eig = nalgebra::SymmetricEigen::try_new(self.rho.clone(), 1e-15, 10_000 * n)
            .ok_or_else(|| Error::Eigen("oracle density matrix did not diagonalise".into()))?;
        let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        Ok(v)
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    /// `tr ρ^k` by repeated multiplication.
    pub fn trace_power(&self, k: u32) -> f64 {
        let mut p = self.rho.clone();
        for _ in 1..k {
            p = &p * &self.rho;
        }
        p.trace().re
    }

    /// `{Π_j λ_j^{ε_j} (1 - λ_j)^{1-ε_j}}`, ascending.
    pub fn product_spectrum(&self) -> Vec<f64> {
        let mut v: Vec<f64> = (0..1usize << self.sites)
            .map(|mask| {
                self.modes
                    .iter()
                    .enumerate()
                    .map(|(j, &l)| if mask >> j & 1 == 1 { l } else { 1.0 - l })
                    .product()
            })
            .collect();
        v.sort_by(f64::total_cmp);
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleEntropy {
    pub order: Order,
    /// From `ρ`: `-log tr ρ^α / (α - 1)`, or `-tr ρ log ρ`.
    pub from_rho: f64,
    /// From the correlation eigenvalues.
    pub from_modes: f64,
    pub difference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub symbol: String,
    pub sites: usize,
    pub modes: Vec<f64>,
    pub rho_spectrum: Vec<f64>,
    pub product_spectrum: Vec<f64>,
    pub spectrum_error: f64,
    pub trace: f64,
    pub min_eigenvalue: f64,
    pub hermiticity_error: f64,
    pub entropies: Vec<OracleEntropy>,
    pub tolerance: f64,
    pub pass: bool,
}

/// Agreement required between the two constructions.
pub const ORACLE_TOL: f64 = 1e-8;

pub fn oracle_report(q: &Symbol, sites: usize, spec: &QuadratureSpec) -> Result<OracleReport> {
    let oracle = wick_oracle(q, sites, spec)?;
    let rho_spectrum = oracle.spectrum()?;
    let product_spectrum = oracle.product_spectrum();
    let spectrum_error = rho_spectrum
        .iter()
        .zip(&product_spectrum)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let local = LocalSpectrum {
        side: sites,
        dim: 1,
        eigenvalues: oracle.modes.clone(),
    };
    let mut entropies = Vec::new();
    for k in [2u32, 3] {
        let order = Order::Finite(k as f64);
        let from_rho = -oracle.trace_power(k).ln() / (k as f64 - 1.0);
        let from_modes = local_renyi(&local, order);
        entropies.push(OracleEntropy {
            order,
            from_rho,
            from_modes,
            difference: (from_rho - from_modes).abs(),
        });
    }
    let von_neumann: f64 = rho_spectrum
        .iter()
        .filter(|&&m| m > 0.0)
        .map(|&m| -m * m.ln())
        .sum();
    let from_modes = local_renyi(&local, Order::One);
    entropies.push(OracleEntropy {
        order: Order::One,
        from_rho: von_neumann,
        from_modes,
        difference: (von_neumann - from_modes).abs(),
    });
    let trace = oracle.trace();
    let min_eigenvalue = rho_spectrum[0];
    let pass = spectrum_error <= ORACLE_TOL
        && (trace - 1.0).abs() <= 1e-10
        && min_eigenvalue >= -1e-10
        && entropies.iter().all(|e| e.difference <= ORACLE_TOL);
    Ok(OracleReport {
        symbol: q.label().to_string(),
        sites,
        modes: oracle.modes,
        rho_spectrum,
        product_spectrum,
        spectrum_error,
        trace,
        min_eigenvalue,
        hermiticity_error: oracle.hermiticity_error,
        entropies,
        tolerance: ORACLE_TOL,
        pass,
    })
}
