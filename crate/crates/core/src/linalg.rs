//! Small dense linear algebra: LU inversion with partial pivoting for plain
//! matrices and for jet-valued matrices (pivoting on the value part).

use thiserror::Error;

use crate::jets::{Jet, JetError};

/// Conditioning bound beyond which a metric is treated as singular.
pub const COND_LIMIT: f64 = 1e12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is singular or conditioning exceeds {COND_LIMIT:e}")]
    Singular,
    #[error("jet arithmetic failed during elimination: {0}")]
    Jet(#[from] JetError),
}

/// Inverse of a square matrix by LU with partial pivoting.
///
/// Fails when a pivot vanishes or the infinity-norm condition estimate
/// exceeds [`COND_LIMIT`].
pub fn invert(a: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, LinalgError> {
    let n = a.len();
    let mut lu: Vec<Vec<f64>> = a.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();

    for col in 0..n {
        let (piv, piv_abs) = (col..n)
            .map(|r| (r, lu[r][col].abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty range");
        if piv_abs == 0.0 {
            return Err(LinalgError::Singular);
        }
        lu.swap(col, piv);
        perm.swap(col, piv);
        for r in col + 1..n {
            let f = lu[r][col] / lu[col][col];
            lu[r][col] = f;
            for c in col + 1..n {
                let v = lu[col][c];
                lu[r][c] -= f * v;
            }
        }
    }

    // Solve for each unit vector.
    let mut inv = vec![vec![0.0; n]; n];
    for rhs_col in 0..n {
        let mut x = vec![0.0; n];
        for r in 0..n {
            x[r] = if perm[r] == rhs_col { 1.0 } else { 0.0 };
        }
        for r in 1..n {
            for c in 0..r {
                x[r] -= lu[r][c] * x[c];
            }
        }
        for r in (0..n).rev() {
            for c in r + 1..n {
                x[r] -= lu[r][c] * x[c];
            }
            x[r] /= lu[r][r];
        }
        for r in 0..n {
            inv[r][rhs_col] = x[r];
        }
    }

    let cond = inf_norm(a) * inf_norm(&inv);
    if !cond.is_finite() || cond > COND_LIMIT {
        return Err(LinalgError::Singular);
    }
    Ok(inv)
}

fn inf_norm(a: &[Vec<f64>]) -> f64 {
    a.iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Inverse of a jet-valued matrix; pivoting and the conditioning guard act on
/// the value parts, derivative blocks ride along through the elimination.
pub fn invert_jets(a: &[Vec<Jet>]) -> Result<Vec<Vec<Jet>>, LinalgError> {
    let n = a.len();
    let mut lu: Vec<Vec<Jet>> = a.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();

    for col in 0..n {
        let (piv, piv_abs) = (col..n)
            .map(|r| (r, lu[r][col].value().abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty range");
        if piv_abs == 0.0 {
            return Err(LinalgError::Singular);
        }
        lu.swap(col, piv);
        perm.swap(col, piv);
        for r in col + 1..n {
            let f = lu[r][col].try_div(&lu[col][col])?;
            for c in col + 1..n {
                lu[r][c] = &lu[r][c] - &(&f * &lu[col][c]);
            }
            lu[r][col] = f;
        }
    }

    let space_like = &a[0][0];
    let mut inv: Vec<Vec<Jet>> = vec![vec![space_like.scale(0.0); n]; n];
    for rhs_col in 0..n {
        let mut x: Vec<Jet> = (0..n)
            .map(|r| {
                space_like
                    .scale(0.0)
                    .add_scalar(if perm[r] == rhs_col { 1.0 } else { 0.0 })
            })
            .collect();
        for r in 1..n {
            for c in 0..r {
                x[r] = &x[r] - &(&lu[r][c] * &x[c]);
            }
        }
        for r in (0..n).rev() {
            for c in r + 1..n {
                x[r] = &x[r] - &(&lu[r][c] * &x[c]);
            }
            x[r] = x[r].try_div(&lu[r][r])?;
        }
        for r in 0..n {
            inv[r][rhs_col] = x[r].clone();
        }
    }

    let a_vals: Vec<Vec<f64>> = a
        .iter()
        .map(|row| row.iter().map(|j| j.value()).collect())
        .collect();
    let inv_vals: Vec<Vec<f64>> = inv
        .iter()
        .map(|row| row.iter().map(|j| j.value()).collect())
        .collect();
    let cond = inf_norm(&a_vals) * inf_norm(&inv_vals);
    if !cond.is_finite() || cond > COND_LIMIT {
        return Err(LinalgError::Singular);
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::JetSpace;

    #[test]
    fn inverts_small_matrix() {
        let a = vec![vec![4.0, 1.0], vec![2.0, 3.0]];
        let inv = invert(&a).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let mut s = 0.0;
                for k in 0..2 {
                    s += a[i][k] * inv[k][j];
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((s - expect).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn rejects_singular() {
        let a = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(invert(&a).is_err());
    }

    #[test]
    fn jet_inverse_derivative_matches_identity() {
        // d/dx (A^{-1}) = -A^{-1} (dA/dx) A^{-1} for A = [[1+x, x],[0, 2]].
        let s = JetSpace::new(&[0.3], 2).unwrap();
        let x = s.coordinate(0).unwrap();
        let one = s.constant(1.0);
        let a = vec![
            vec![&one + &x, x.clone()],
            vec![s.constant(0.0), s.constant(2.0)],
        ];
        let inv = invert_jets(&a).unwrap();
        let v = 1.0 + 0.3;
        // A^{-1} = [[1/v, -x/(2v)], [0, 1/2]]
        assert!((inv[0][0].value() - 1.0 / v).abs() < 1e-14);
        assert!((inv[0][1].value() + 0.3 / (2.0 * v)).abs() < 1e-14);
        // d/dx of 1/(1+x) = -1/v^2
        assert!((inv[0][0].gradient(0) + 1.0 / (v * v)).abs() < 1e-13);
        // d/dx of -x/(2(1+x)) = -1/(2 v^2)
        assert!((inv[0][1].gradient(0) + 1.0 / (2.0 * v * v)).abs() < 1e-13);
    }
}
