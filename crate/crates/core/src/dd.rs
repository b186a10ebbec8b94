//! Double-double linear algebra for the small dense solves in the minimax
//! engine.

use twofloat::TwoFloat;

/// Dot product `Σ a_i b_i` accumulated in double-double.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(TwoFloat::from(0.0), |acc, (&x, &y)| acc + TwoFloat::new_mul(x, y))
        .hi()
}

/// Result of [`solve`].
#[derive(Debug, Clone)]
pub struct Solution {
    pub x: Vec<f64>,
    /// 1-norm condition estimate `|A|_1 |A^-1|_1`.
    pub condition: f64,
}

/// Solves the dense system `a x = b` by Gauss–Jordan elimination with partial
/// pivoting carried out in double-double. `a` is row-major `n x n`.
pub fn solve(a: &[Vec<f64>], b: &[f64]) -> Option<Solution> {
    let n = b.len();
    assert!(a.len() == n && a.iter().all(|row| row.len() == n));
    let zero = TwoFloat::from(0.0);
    let one = TwoFloat::from(1.0);
    // augmented with the identity so the inverse comes out of the same sweep
    let mut m: Vec<Vec<TwoFloat>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<TwoFloat> = row.iter().map(|&v| TwoFloat::from(v)).collect();
            r.push(TwoFloat::from(b[i]));
            r.extend((0..n).map(|j| if i == j { one } else { zero }));
            r
        })
        .collect();
    let width = 2 * n + 1;

    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| m[i][col].hi().abs().total_cmp(&m[j][col].hi().abs()))?;
        let p = m[pivot][col];
        if p.hi() == 0.0 || !p.hi().is_finite() {
            return None;
        }
        m.swap(col, pivot);
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = m[row][col] / p;
            if factor.hi() == 0.0 {
                continue;
            }
            for k in col..width {
                let v = m[col][k];
                m[row][k] -= factor * v;
            }
        }
    }

    let x: Vec<f64> = (0..n).map(|i| (m[i][n] / m[i][i]).hi()).collect();
    if x.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let norm_a = (0..n)
        .map(|j| a.iter().map(|row| row[j].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let norm_inv = (0..n)
        .map(|j| (0..n).map(|i| (m[i][n + 1 + j] / m[i][i]).hi().abs()).sum::<f64>())
        .fold(0.0, f64::max);
    Some(Solution {
        x,
        condition: norm_a * norm_inv,
    })
}
