//! Entropy densities `s_q(α)` and the auxiliary functions `h` and `g_q`.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_unit_cube, Estimate, QuadratureSpec};
use crate::symbol::Symbol;

/// Rényi order. `1` (von Neumann) and `∞` are distinct variants so they never
/// go through a numerical limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Order {
    Finite(f64),
    One,
    Infinity,
}

impl Order {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha == f64::INFINITY {
            Ok(Self::Infinity)
        } else if alpha == 1.0 {
            Ok(Self::One)
        } else if alpha > 0.0 && alpha.is_finite() {
            Ok(Self::Finite(alpha))
        } else {
            Err(Error::InvalidArgument(format!("Rényi order must be > 0, got {alpha}")))
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Self::Finite(a) => a,
            Self::One => 1.0,
            Self::Infinity => f64::INFINITY,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(a) => write!(f, "{a}"),
            Self::One => write!(f, "1"),
            Self::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for Order {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Self::Infinity),
            t => {
                let a: f64 = t
                    .parse()
                    .map_err(|_| Error::Config(format!("bad Rényi order {s:?}")))?;
                Self::new(a)
            }
        }
    }
}

impl Serialize for Order {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// An entropy density in nats per site.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyValue {
    pub order: Order,
    pub value: f64,
    pub quad_error: f64,
}

/// Rényi entropy of a single fermionic mode with occupation `p`:
/// `-1/(α-1) log(p^α + (1-p)^α)`, with the von Neumann and min-entropy
/// limits as separate branches and `0 log 0 = 0`.
pub fn mode_entropy(p: f64, order: Order) -> f64 {
    let p = p.clamp(0.0, 1.0);
    let big = p.max(1.0 - p);
    let small = p.min(1.0 - p);
    match order {
        Order::One => xlogx(p) + xlogx(1.0 - p),
        Order::Infinity => -big.ln(),
        Order::Finite(a) => {
            let log_big = big.ln();
            let r = small / big;
            let eps = a - 1.0;
            if eps.abs() < 1e-4 && r > 0.0 {
                // φ(α) = α log M + log1p(r^α) vanishes at α = 1; expand φ/(α-1)
                let lr = r.ln();
                let ra = r.powf(a);
                let d1 = log_big + ra * lr / (1.0 + ra);
                let d2 = lr * lr * ra / (1.0 + ra).powi(2);
                let d3 = lr.powi(3) * ra * (1.0 - ra) / (1.0 + ra).powi(3);
                // derivatives taken at α, so shift back to the expansion point
                -(d1 - 0.5 * d2 * eps + d3 * eps * eps / 6.0)
            } else {
                let phi = a * log_big + r.powf(a).ln_1p();
                -phi / eps
            }
        }
    }
}

fn xlogx(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * p.ln()
    }
}

/// `s_q(α) = -1/(α-1) ∫ log(q^α + (1-q)^α) dx`, with the dedicated
/// integrands at `α = 1` and `α = ∞`.
pub fn renyi_density(q: &Symbol, order: Order, spec: &QuadratureSpec) -> Result<EntropyValue> {
    if let Order::Finite(a) = order {
        Order::new(a)?;
    }
    let est = integrate_unit_cube(|x| Ok(mode_entropy(q.eval(x)?, order)), q.dim(), spec)?;
    Ok(EntropyValue {
        order,
        value: est.value.max(0.0),
        quad_error: est.error,
    })
}

/// `h = -log min{p/(1-p), (1-p)/p}`, infinite at `p ∈ {0, 1}`.
pub fn gap(p: f64) -> f64 {
    let big = p.max(1.0 - p);
    let small = p.min(1.0 - p);
    if small <= 0.0 {
        return f64::INFINITY;
    }
    // small/big = 1 - (big - small)/big, which keeps precision near p = 1/2
    -(-(big - small) / big).ln_1p()
}

/// `h(x)` for the symbol; `f64::INFINITY` where `q(x) ∈ {0, 1}`.
pub fn h_function(q: &Symbol, x: &[f64]) -> Result<f64> {
    Ok(gap(q.eval(x)?))
}

/// `e^{-α h}` evaluated as `(min/max)^α`.
pub fn boltzmann_weight(p: f64, alpha: f64) -> f64 {
    let big = p.max(1.0 - p);
    let small = p.min(1.0 - p);
    (small / big).powf(alpha)
}

/// Which formula computes `g_q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GForm {
    /// `s_q(∞) - (α-1)/α · s_q(α)`.
    Defining,
    /// `(1/α) ∫ log(1 + e^{-α h}) dx`.
    Integral,
}

/// The completely monotone function `g_q(α)`. The returned order tag is `α`.
pub fn g_function(q: &Symbol, alpha: f64, spec: &QuadratureSpec, form: GForm) -> Result<EntropyValue> {
    let order = Order::new(alpha)?;
    if matches!(order, Order::Infinity) {
        return Err(Error::InvalidArgument("g is defined for finite α only".into()));
    }
    match form {
        GForm::Defining => {
            let s_inf = renyi_density(q, Order::Infinity, spec)?;
            let weight = (alpha - 1.0) / alpha;
            let (s_a, err_a) = if weight == 0.0 {
                (0.0, 0.0)
            } else {
                let s = renyi_density(q, order, spec)?;
                (s.value, s.quad_error)
            };
            Ok(EntropyValue {
                order,
                value: s_inf.value - weight * s_a,
                quad_error: s_inf.quad_error + weight.abs() * err_a,
            })
        }
        GForm::Integral => {
            let est: Estimate = integrate_unit_cube(
                |x| Ok(boltzmann_weight(q.eval(x)?, alpha).ln_1p() / alpha),
                q.dim(),
                spec,
            )?;
            Ok(EntropyValue {
                order,
                value: est.value,
                quad_error: est.error,
            })
        }
    }
}

/// Side-by-side evaluation of both forms of `g_q(α)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GConsistency {
    pub alpha: f64,
    pub defining: f64,
    pub integral: f64,
    pub difference: f64,
    /// Sum of both quadrature error estimates.
    pub tolerance: f64,
    pub consistent: bool,
}

pub fn g_consistency(q: &Symbol, alpha: f64, spec: &QuadratureSpec) -> Result<GConsistency> {
    let d = g_function(q, alpha, spec, GForm::Defining)?;
    let i = g_function(q, alpha, spec, GForm::Integral)?;
    let difference = (d.value - i.value).abs();
    // floor at a few ulps of log 2 so exact cases do not fail on rounding
    let tolerance = d.quad_error + i.quad_error + 8.0 * f64::EPSILON * LN_2;
    Ok(GConsistency {
        alpha,
        defining: d.value,
        integral: i.value,
        difference,
        tolerance,
        consistent: difference <= tolerance,
    })
}
