//! Fourier symbols of shift-invariant quasi-free states.
//!
//! A symbol is a function `q: [0,1]^d -> [0,1]`. It is the Fourier transform of
//! the two-point operator `Q`, whose matrix elements are
//! `<e_j, Q e_k> = Q̂_{k-j}` with `Q̂_m = ∫ q(x) e^{-2πi m·x} dx`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_unit_cube, QuadratureSpec};

/// Largest supported lattice dimension.
pub const MAX_DIM: usize = 3;

/// Values within this distance of `[0, 1]` are clamped; anything further out
/// is rejected.
pub const RANGE_GUARD: f64 = 1e-9;

pub type Callback = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A multi-index on `Z^d`.
pub type Index = Vec<i64>;

/// Finite table of Fourier coefficients `Q̂_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierTable {
    dim: usize,
    coefficients: BTreeMap<Index, Complex64>,
}

impl FourierTable {
    /// Builds a table, checking `Q̂_{-j} = conj(Q̂_j)` to `tol`.
    pub fn new(dim: usize, entries: impl IntoIterator<Item = (Index, Complex64)>, tol: f64) -> Result<Self> {
        check_dim(dim)?;
        let mut coefficients = BTreeMap::new();
        for (j, c) in entries {
            if j.len() != dim {
                return Err(Error::InvalidArgument(format!(
                    "index {j:?} has {} components, expected {dim}",
                    j.len()
                )));
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::InvalidArgument(format!("coefficient {j:?} is not finite")));
            }
            if coefficients.insert(j.clone(), c).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate coefficient index {j:?}")));
            }
        }
        for (j, c) in &coefficients {
            let minus: Index = j.iter().map(|v| -v).collect();
            let partner = coefficients.get(&minus).copied().unwrap_or_default();
            if (partner - c.conj()).norm() > tol {
                return Err(Error::InvalidArgument(format!(
                    "coefficient table is not Hermitian at {j:?}: {c} vs conj partner {partner}"
                )));
            }
        }
        Ok(Self { dim, coefficients })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `Q̂_j`, zero when absent.
    pub fn get(&self, j: &[i64]) -> Complex64 {
        self.coefficients.get(j).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Index, &Complex64)> {
        self.coefficients.iter()
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Largest `|j|_∞` present.
    pub fn cutoff(&self) -> i64 {
        self.coefficients
            .keys()
            .flat_map(|j| j.iter().map(|v| v.abs()))
            .max()
            .unwrap_or(0)
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.coefficients
            .iter()
            .map(|(j, c)| {
                let phase = 2.0 * PI * j.iter().zip(x).map(|(&ji, &xi)| ji as f64 * xi).sum::<f64>();
                c.re * phase.cos() - c.im * phase.sin()
            })
            .sum()
    }

    /// Writes the table as CSV with columns `j,re,im`. Multi-indices are
    /// joined with `;`.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["j", "re", "im"])?;
        for (j, c) in &self.coefficients {
            let idx = j.iter().map(i64::to_string).collect::<Vec<_>>().join(";");
            out.write_record([idx, format!("{:.17e}", c.re), format!("{:.17e}", c.im)])?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads a table written by [`FourierTable::write_csv`].
    pub fn read_csv<R: std::io::Read>(r: R, dim: usize) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["j", "re", "im"] {
            return Err(Error::Config(format!(
                "coefficient CSV must have columns j,re,im; found {:?}",
                headers.iter().collect::<Vec<_>>()
            )));
        }
        let mut entries = Vec::new();
        for record in rdr.records() {
            let record = record?;
            let j = parse_index(&record[0])?;
            let re = parse_f64(&record[1])?;
            let im = parse_f64(&record[2])?;
            entries.push((j, Complex64::new(re, im)));
        }
        Self::new(dim, entries, 1e-12)
    }
}

pub(crate) fn parse_index(s: &str) -> Result<Index> {
    s.split(';')
        .map(|p| {
            p.trim()
                .parse::<i64>()
                .map_err(|_| Error::Config(format!("bad coefficient index {s:?}")))
        })
        .collect()
}

pub(crate) fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("bad number {s:?}")))
}

/// Samples of `q` on the uniform periodic grid `k / n` in each direction,
/// row-major, with multilinear interpolation in between.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSamples {
    dim: usize,
    per_dim: usize,
    values: Vec<f64>,
}

impl GridSamples {
    pub fn new(dim: usize, values: Vec<f64>) -> Result<Self> {
        check_dim(dim)?;
        let per_dim = (values.len() as f64).powf(1.0 / dim as f64).round() as usize;
        if per_dim == 0 || per_dim.pow(dim as u32) != values.len() {
            return Err(Error::InvalidArgument(format!(
                "{} samples do not form a {dim}-dimensional cubic grid",
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("grid sample {bad} is not finite")));
        }
        Ok(Self { dim, per_dim, values })
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let n = self.per_dim;
        let mut base = [0usize; MAX_DIM];
        let mut frac = [0.0f64; MAX_DIM];
        for (i, &xi) in x.iter().enumerate() {
            let s = xi.rem_euclid(1.0) * n as f64;
            let k = (s.floor() as usize).min(n - 1);
            base[i] = k;
            frac[i] = s - k as f64;
        }
        let mut total = 0.0;
        for corner in 0..(1usize << self.dim) {
            let mut weight = 1.0;
            let mut flat = 0usize;
            for i in 0..self.dim {
                let up = (corner >> i) & 1 == 1;
                let k = if up { (base[i] + 1) % n } else { base[i] };
                weight *= if up { frac[i] } else { 1.0 - frac[i] };
                flat = flat * n + k;
            }
            if weight != 0.0 {
                total += weight * self.values[flat];
            }
        }
        total
    }
}

/// Built-in Lebesgue-measure-preserving maps of the torus `[0,1]^d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Rearrangement {
    /// `x ↦ x + c mod 1`.
    Translation(Vec<f64>),
    /// `x ↦ 1 - x` in every coordinate.
    Reflection,
    /// `x ↦ (x_{p(0)}, …, x_{p(d-1)})`.
    Permutation(Vec<usize>),
}

impl Rearrangement {
    /// Parses `translation:c1,c2`, `reflection` or `permutation:1,0`.
    pub fn parse(s: &str) -> Result<Self> {
        let (kind, args) = s.split_once(':').unwrap_or((s, ""));
        let list = || -> Vec<&str> { args.split(',').map(str::trim).filter(|a| !a.is_empty()).collect() };
        match kind.trim() {
            "translation" => Ok(Self::Translation(list().into_iter().map(parse_f64).collect::<Result<_>>()?)),
            "reflection" => Ok(Self::Reflection),
            "permutation" => Ok(Self::Permutation(
                list()
                    .into_iter()
                    .map(|a| a.parse::<usize>().map_err(|_| Error::Config(format!("bad permutation entry {a:?}"))))
                    .collect::<Result<_>>()?,
            )),
            other => Err(Error::InvalidArgument(format!(
                "unsupported rearrangement {other:?}; expected translation, reflection or permutation"
            ))),
        }
    }

    fn check(&self, dim: usize) -> Result<()> {
        match self {
            Self::Translation(c) if c.len() != dim => Err(Error::InvalidArgument(format!(
                "translation has {} components, symbol has dimension {dim}",
                c.len()
            ))),
            Self::Translation(c) if c.iter().any(|v| !v.is_finite()) => {
                Err(Error::InvalidArgument("translation must be finite".into()))
            }
            Self::Permutation(p) => {
                let mut seen = vec![false; dim];
                if p.len() != dim || !p.iter().all(|&i| i < dim && !std::mem::replace(&mut seen[i], true)) {
                    return Err(Error::InvalidArgument(format!("{p:?} is not a permutation of 0..{dim}")));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        match self {
            Self::Translation(c) => {
                for ((o, xi), ci) in out.iter_mut().zip(x).zip(c) {
                    *o = (xi + ci).rem_euclid(1.0);
                }
            }
            Self::Reflection => {
                for (o, xi) in out.iter_mut().zip(x) {
                    *o = 1.0 - xi;
                }
            }
            Self::Permutation(p) => {
                for (o, &pi) in out.iter_mut().zip(p) {
                    *o = x[pi];
                }
            }
        }
    }
}

#[derive(Clone)]
enum Repr {
    Constant(f64),
    Closure(Callback),
    Fourier(FourierTable),
    Grid(GridSamples),
    Rearranged(Box<Symbol>, Rearrangement),
}

/// A symbol on `[0,1]^d`. Immutable and cheap to clone.
#[derive(Clone)]
pub struct Symbol {
    dim: usize,
    repr: Arc<Repr>,
    label: String,
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &*self.repr {
            Repr::Constant(v) => format!("constant({v})"),
            Repr::Closure(_) => "closure".to_string(),
            Repr::Fourier(t) => format!("fourier({} terms)", t.len()),
            Repr::Grid(g) => format!("grid({} samples)", g.values.len()),
            Repr::Rearranged(inner, map) => format!("{map:?} of {inner:?}"),
        };
        f.debug_struct("Symbol")
            .field("dim", &self.dim)
            .field("kind", &kind)
            .field("label", &self.label)
            .finish()
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::InvalidArgument(format!(
            "dimension must be in 1..={MAX_DIM}, got {dim}"
        )));
    }
    Ok(())
}

impl Symbol {
    fn build(dim: usize, repr: Repr, label: impl Into<String>) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            repr: Arc::new(repr),
            label: label.into(),
        })
    }

    pub fn constant(dim: usize, value: f64) -> Result<Self> {
        if !(-RANGE_GUARD..=1.0 + RANGE_GUARD).contains(&value) {
            return Err(Error::Range { value, point: vec![] });
        }
        Self::build(dim, Repr::Constant(value.clamp(0.0, 1.0)), format!("constant {value}"))
    }

    pub fn from_fn<F>(dim: usize, label: impl Into<String>, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self::build(dim, Repr::Closure(Arc::new(f)), label)
    }

    pub fn from_fourier(table: FourierTable, label: impl Into<String>) -> Result<Self> {
        Self::build(table.dim(), Repr::Fourier(table), label)
    }

    pub fn from_grid(grid: GridSamples, label: impl Into<String>) -> Result<Self> {
        Self::build(grid.dim, Repr::Grid(grid), label)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// The coefficient table, when the symbol is given by one.
    pub fn fourier_table(&self) -> Option<&FourierTable> {
        match &*self.repr {
            Repr::Fourier(t) => Some(t),
            _ => None,
        }
    }

    /// The constant value, when the symbol is constant.
    pub fn as_constant(&self) -> Option<f64> {
        match &*self.repr {
            Repr::Constant(v) => Some(*v),
            _ => None,
        }
    }

    fn raw(&self, x: &[f64]) -> f64 {
        match &*self.repr {
            Repr::Constant(v) => *v,
            Repr::Closure(f) => f(x),
            Repr::Fourier(t) => t.eval(x),
            Repr::Grid(g) => g.eval(x),
            Repr::Rearranged(inner, map) => {
                let mut y = [0.0; MAX_DIM];
                map.apply(x, &mut y[..self.dim]);
                inner.raw(&y[..self.dim])
            }
        }
    }

    /// Evaluates `q(x)`, clamped to `[0,1]`. Values further than
    /// [`RANGE_GUARD`] outside the unit interval are an error.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        debug_assert_eq!(x.len(), self.dim);
        let v = self.raw(x);
        if !v.is_finite() {
            return Err(Error::NonFinite { point: x.to_vec() });
        }
        if !(-RANGE_GUARD..=1.0 + RANGE_GUARD).contains(&v) {
            return Err(Error::Range {
                value: v,
                point: x.to_vec(),
            });
        }
        Ok(v.clamp(0.0, 1.0))
    }
}

/// Fermi–Dirac symbol `q(x) = 1 / (1 + exp(beta (dispersion(x) - mu)))`.
pub fn make_thermal_symbol<F>(dim: usize, dispersion: F, beta: f64, mu: f64) -> Result<Symbol>
where
    F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
{
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidArgument(format!("beta must be positive, got {beta}")));
    }
    if !mu.is_finite() {
        return Err(Error::InvalidArgument(format!("mu must be finite, got {mu}")));
    }
    Symbol::from_fn(dim, format!("thermal beta={beta} mu={mu}"), move |x| {
        let e = dispersion(x);
        if !e.is_finite() {
            return f64::NAN;
        }
        fermi(beta * (e - mu))
    })
}

/// `1 / (1 + e^z)` without overflow.
pub fn fermi(z: f64) -> f64 {
    if z > 0.0 {
        let e = (-z).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + z.exp())
    }
}

/// Nearest-neighbour hopping dispersion `hopping · Σ_i cos 2πx_i`.
pub fn cosine_dispersion(hopping: f64) -> impl Fn(&[f64]) -> f64 + Send + Sync + Clone {
    move |x: &[f64]| hopping * x.iter().map(|xi| (2.0 * PI * xi).cos()).sum::<f64>()
}

/// Cosine-band thermal symbol.
pub fn cosine_thermal(dim: usize, beta: f64, mu: f64, hopping: f64) -> Result<Symbol> {
    Ok(make_thermal_symbol(dim, cosine_dispersion(hopping), beta, mu)?
        .with_label(format!("cosine-thermal d={dim} beta={beta} mu={mu} hopping={hopping}")))
}

/// `q(x) = (1 + cos 2πx) / 2` as a three-term coefficient table.
pub fn raised_cosine() -> Symbol {
    let table = FourierTable::new(
        1,
        [
            (vec![0], Complex64::new(0.5, 0.0)),
            (vec![1], Complex64::new(0.25, 0.0)),
            (vec![-1], Complex64::new(0.25, 0.0)),
        ],
        0.0,
    )
    .expect("valid table");
    Symbol::from_fourier(table, "raised cosine").expect("valid dimension")
}

/// Computes `Q̂_j = ∫ q(x) e^{-2πi j·x} dx` for all `|j|_∞ <= cutoff` with the
/// shared quadrature engine. Coefficients are computed on one half of the
/// index set and mirrored, so the result is exactly Hermitian.
pub fn fourier_coefficients(q: &Symbol, cutoff: usize, spec: &QuadratureSpec) -> Result<FourierTable> {
    let dim = q.dim();
    let c = cutoff as i64;
    let spec = QuadratureSpec {
        initial_panels: spec.initial_panels.max(2 * cutoff + 2),
        ..*spec
    };
    let mut entries = Vec::new();
    for j in box_indices(dim, c) {
        // canonical half: first non-zero component positive, or j = 0
        match j.iter().find(|&&v| v != 0) {
            Some(&v) if v < 0 => continue,
            _ => {}
        }
        let c_j = if let Some(v) = q.as_constant() {
            if j.iter().all(|&v| v == 0) {
                Complex64::new(v, 0.0)
            } else {
                Complex64::default()
            }
        } else {
            let phase = |x: &[f64]| 2.0 * PI * j.iter().zip(x).map(|(&a, &b)| a as f64 * b).sum::<f64>();
            let re = integrate_unit_cube(|x| Ok(q.eval(x)? * phase(x).cos()), dim, &spec)?;
            let im = if j.iter().all(|&v| v == 0) {
                0.0
            } else {
                -integrate_unit_cube(|x| Ok(q.eval(x)? * phase(x).sin()), dim, &spec)?.value
            };
            Complex64::new(re.value, im)
        };
        let minus: Index = j.iter().map(|v| -v).collect();
        if minus != j {
            entries.push((minus, c_j.conj()));
        }
        entries.push((j, c_j));
    }
    FourierTable::new(dim, entries, 0.0)
}

/// All multi-indices with `|j|_∞ <= cutoff`, row-major.
pub(crate) fn box_indices(dim: usize, cutoff: i64) -> Vec<Index> {
    let side = (2 * cutoff + 1) as usize;
    (0..side.pow(dim as u32))
        .map(|mut flat| {
            let mut j = vec![0i64; dim];
            for slot in j.iter_mut().rev() {
                *slot = (flat % side) as i64 - cutoff;
                flat /= side;
            }
            j
        })
        .collect()
}

/// Boundary condition of a finite restriction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum Boundary {
    /// Plain truncation of `Q` to the box (multilevel Toeplitz).
    #[default]
    Open,
    /// Circulant restriction whose spectrum is `q` on the grid `k / L`.
    Periodic,
}

/// Restriction of `Q` to the box `{0..L-1}^d`.
///
/// Sites are enumerated row-major: site `(n_0, …, n_{d-1})` has index
/// `Σ n_i L^{d-1-i}`. For `d > 1` the matrix is block Toeplitz with Toeplitz
/// blocks.
#[derive(Debug, Clone)]
pub struct ToeplitzRestriction {
    pub side: usize,
    pub dim: usize,
    pub boundary: Boundary,
    pub matrix: DMatrix<Complex64>,
    /// Ascending, clamped to `[0,1]`.
    pub eigenvalues: Vec<f64>,
    /// Largest distance any eigenvalue was moved by clamping.
    pub max_clamp: f64,
}

fn site_coords(site: usize, side: usize, dim: usize) -> Vec<i64> {
    let mut c = vec![0i64; dim];
    let mut s = site;
    for slot in c.iter_mut().rev() {
        *slot = (s % side) as i64;
        s /= side;
    }
    c
}

/// Builds the finite restriction of the symbol's operator and diagonalises it.
pub fn restrict_to_box(
    q: &Symbol,
    side: usize,
    boundary: Boundary,
    spec: &QuadratureSpec,
) -> Result<ToeplitzRestriction> {
    if side == 0 {
        return Err(Error::InvalidArgument("box side must be >= 1".into()));
    }
    let dim = q.dim();
    let sites = side
        .checked_pow(dim as u32)
        .filter(|&s| s <= 4096)
        .ok_or_else(|| Error::InvalidArgument(format!("box {side}^{dim} is too large")))?;
    let coords: Vec<Vec<i64>> = (0..sites).map(|s| site_coords(s, side, dim)).collect();

    let matrix = match boundary {
        Boundary::Open => {
            let table = match q.fourier_table() {
                Some(t) => t.clone(),
                None => fourier_coefficients(q, side - 1, spec)?,
            };
            DMatrix::from_fn(sites, sites, |a, b| {
                let diff: Index = coords[b].iter().zip(&coords[a]).map(|(x, y)| x - y).collect();
                table.get(&diff)
            })
        }
        Boundary::Periodic => {
            // C_ab = L^-d Σ_k q(k/L) e^{2πi k·(n_b - n_a)/L}
            let samples: Vec<(Vec<i64>, f64)> = coords
                .iter()
                .map(|k| {
                    let x: Vec<f64> = k.iter().map(|&v| v as f64 / side as f64).collect();
                    q.eval(&x).map(|v| (k.clone(), v))
                })
                .collect::<Result<_>>()?;
            let norm = sites as f64;
            DMatrix::from_fn(sites, sites, |a, b| {
                samples
                    .iter()
                    .map(|(k, v)| {
                        let dot: i64 = k.iter().zip(&coords[b]).zip(&coords[a]).map(|((k, nb), na)| k * (nb - na)).sum();
                        let phase = 2.0 * PI * (dot.rem_euclid(side as i64)) as f64 / side as f64;
                        Complex64::from_polar(*v, phase)
                    })
                    .sum::<Complex64>()
                    / norm
            })
        }
    };

    let (eigenvalues, max_clamp) = hermitian_spectrum(&matrix)?;
    Ok(ToeplitzRestriction {
        side,
        dim,
        boundary,
        matrix,
        eigenvalues,
        max_clamp,
    })
}

/// Ascending eigenvalues of a Hermitian matrix with spectrum in `[0,1]`,
/// clamped, plus the largest clamp distance.
pub(crate) fn hermitian_spectrum(matrix: &DMatrix<Complex64>) -> Result<(Vec<f64>, f64)> {
    let n = matrix.nrows();
    let eig = nalgebra::SymmetricEigen::try_new(matrix.clone(), 1e-15, 10_000 * n.max(1))
        .ok_or_else(|| Error::Eigen(format!("no convergence for {n}x{n} Hermitian matrix")))?;
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    let mut max_clamp = 0.0f64;
    for v in values.iter_mut() {
        if !(-RANGE_GUARD..=1.0 + RANGE_GUARD).contains(v) {
            return Err(Error::Range {
                value: *v,
                point: vec![],
            });
        }
        let c = v.clamp(0.0, 1.0);
        max_clamp = max_clamp.max((c - *v).abs());
        *v = c;
    }
    Ok((values, max_clamp))
}

/// Empirical distribution function `γ_q(y) = |{x : q(x) <= y}|` from a
/// deterministic midpoint grid with `samples` points per dimension.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionFunction {
    sorted: Vec<f64>,
}

impl DistributionFunction {
    /// `γ_q(y)`; right-continuous, non-decreasing, equal to 1 at `y = 1`.
    pub fn eval(&self, y: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= y) as f64 / self.sorted.len() as f64
    }

    pub fn sample_count(&self) -> usize {
        self.sorted.len()
    }

    /// `(y, γ_q(y))` on `levels + 1` equally spaced levels in `[0, 1]`.
    pub fn table(&self, levels: usize) -> Vec<(f64, f64)> {
        (0..=levels)
            .map(|i| {
                let y = i as f64 / levels as f64;
                (y, self.eval(y))
            })
            .collect()
    }

    /// Largest pointwise difference on the union of both jump sets.
    pub fn sup_distance(&self, other: &Self) -> f64 {
        self.sorted
            .iter()
            .chain(&other.sorted)
            .map(|&y| (self.eval(y) - other.eval(y)).abs())
            .fold(0.0, f64::max)
    }
}

pub fn distribution_function(q: &Symbol, samples: usize) -> Result<DistributionFunction> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be >= 1".into()));
    }
    let dim = q.dim();
    let total = samples
        .checked_pow(dim as u32)
        .filter(|&t| t <= 50_000_000)
        .ok_or_else(|| Error::InvalidArgument(format!("{samples}^{dim} grid points is too many")))?;
    let mut sorted = Vec::with_capacity(total);
    let mut x = vec![0.0; dim];
    for flat in 0..total {
        let mut f = flat;
        for slot in x.iter_mut().rev() {
            *slot = ((f % samples) as f64 + 0.5) / samples as f64;
            f /= samples;
        }
        sorted.push(q.eval(&x)?);
    }
    sorted.sort_by(f64::total_cmp);
    Ok(DistributionFunction { sorted })
}

/// Composes the symbol with a built-in measure-preserving map.
pub fn rearrange(q: &Symbol, map: Rearrangement) -> Result<Symbol> {
    map.check(q.dim())?;
    let label = format!("{} ∘ {map:?}", q.label());
    Symbol::build(q.dim(), Repr::Rearranged(Box::new(q.clone()), map), label)
}
