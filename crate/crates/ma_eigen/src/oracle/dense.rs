//! Small dense reference solvers: LU with partial pivoting and a cyclic Jacobi
//! eigensolver for symmetric matrices. These are the independent checks for the
//! sparse conjugate-gradient path and the inverse-power splitting iteration.

use crate::error::{Error, Result};

/// Solves `A x = b` for a dense row-major `n x n` matrix by LU with partial
/// pivoting. `A` is copied; the input is left untouched.
pub fn lu_solve(n: usize, a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);
    let mut lu = a.to_vec();
    let mut x = b.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r, &s| {
                lu[r * n + col]
                    .abs()
                    .partial_cmp(&lu[s * n + col].abs())
                    .unwrap()
            })
            .unwrap();
        if lu[pivot_row * n + col].abs() < 1e-300 {
            return Err(Error::Invalid("singular matrix in LU solve".into()));
        }
        if pivot_row != col {
            for k in 0..n {
                lu.swap(col * n + k, pivot_row * n + k);
            }
            perm.swap(col, pivot_row);
            x.swap(col, pivot_row);
        }
        let pivot = lu[col * n + col];
        for row in col + 1..n {
            let factor = lu[row * n + col] / pivot;
            lu[row * n + col] = factor;
            for k in col + 1..n {
                lu[row * n + k] -= factor * lu[col * n + k];
            }
            x[row] -= factor * x[col];
        }
    }
    for row in (0..n).rev() {
        for k in row + 1..n {
            x[row] -= lu[row * n + k] * x[k];
        }
        x[row] /= lu[row * n + row];
    }
    Ok(x)
}

/// Eigenvalues of a dense symmetric matrix in ascending order, by cyclic Jacobi
/// rotations. Row-major input, copied.
pub fn sym_eigenvalues(n: usize, a: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    let norm: f64 = m.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += 2.0 * m[p * n + q] * m[p * n + q];
            }
        }
        if off.sqrt() <= 1e-15 * norm {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = 0.5 * (aqq - app) / apq;
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
    eig
}
