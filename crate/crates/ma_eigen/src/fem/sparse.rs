//! Compressed-row symmetric matrices and a Jacobi-preconditioned conjugate
//! gradient solver with a deterministic iteration.

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from (row, col, value) triplets, summing duplicates. The sort is
    /// stable, so entries accumulate in insertion order and transposed entry
    /// pairs pushed with identical values sum to bitwise-identical results.
    pub fn from_triplets(n: usize, mut triplets: Vec<(u32, u32, f64)>) -> CsrMatrix {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_counts = vec![0usize; n];
        let mut col_idx: Vec<usize> = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        let mut last: Option<(u32, u32)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c as usize);
                values.push(v);
                row_counts[r as usize] += 1;
                last = Some((r, c));
            }
        }
        let mut row_ptr = vec![0usize; n + 1];
        for r in 0..n {
            row_ptr[r + 1] = row_ptr[r] + row_counts[r];
        }
        CsrMatrix { n, row_ptr, col_idx, values }
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for r in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            y[r] = acc;
        }
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let lo = self.row_ptr[r];
        let hi = self.row_ptr[r + 1];
        match self.col_idx[lo..hi].binary_search(&c) {
            Ok(k) => self.values[lo + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|r| self.get(r, r)).collect()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut a = vec![0.0; self.n * self.n];
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                a[r * self.n + self.col_idx[k]] = self.values[k];
            }
        }
        a
    }
}

/// Symmetric positive definite system over the interior degrees of freedom.
#[derive(Clone, Debug)]
pub struct SparseSpdSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
}

impl SparseSpdSystem {
    pub fn n(&self) -> usize {
        self.matrix.n
    }

    /// Checks pairwise symmetry to 1e-13 relative and a strictly positive diagonal.
    pub fn validate(&self) -> Result<()> {
        let m = &self.matrix;
        for r in 0..m.n {
            let d = m.get(r, r);
            if !(d > 0.0) {
                return Err(Error::Invalid(format!(
                    "system diagonal entry {r} is {d}; not positive definite"
                )));
            }
            for k in m.row_ptr[r]..m.row_ptr[r + 1] {
                let c = m.col_idx[k];
                let v = m.values[k];
                let w = m.get(c, r);
                if (v - w).abs() > 1e-13 * v.abs().max(w.abs()).max(f64::MIN_POSITIVE) {
                    return Err(Error::Invalid(format!(
                        "system entry ({r},{c}) = {v:e} but ({c},{r}) = {w:e}; not symmetric"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Relative residual target for the conjugate-gradient solves.
pub const CG_TOLERANCE: f64 = 1e-12;

/// Jacobi-preconditioned conjugate gradients to `|b - Ax| / |b| <= 1e-12`, with
/// an iteration cap of `10 n`. `b = 0` returns exactly zero.
pub fn solve_spd(system: &SparseSpdSystem) -> Result<Vec<f64>> {
    let a = &system.matrix;
    let b = &system.rhs;
    let n = a.n;
    debug_assert_eq!(b.len(), n);
    let norm_b = norm2(b);
    if norm_b == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let inv_diag: Vec<f64> = a.diagonal().iter().map(|&d| 1.0 / d).collect();

    let mut x = vec![0.0; n];
    let mut r = b.clone();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(&ri, &di)| ri * di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut q = vec![0.0; n];
    let cap = 10 * n.max(1);
    let tol = CG_TOLERANCE * norm_b;

    let mut residual = norm_b;
    for _ in 0..cap {
        a.matvec(&p, &mut q);
        let pq = dot(&p, &q);
        if pq <= 0.0 {
            return Err(Error::Invalid(format!(
                "conjugate gradients met a non-positive curvature {pq:e}; matrix is not SPD"
            )));
        }
        let alpha = rz / pq;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        residual = norm2(&r);
        if residual <= tol {
            // recompute the true residual; the recursion can drift
            a.matvec(&x, &mut q);
            let mut true_r = 0.0;
            for i in 0..n {
                let d = b[i] - q[i];
                true_r += d * d;
                r[i] = d;
            }
            residual = true_r.sqrt();
            if residual <= tol {
                return Ok(x);
            }
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::LinearSolve { iterations: cap, residual: residual / norm_b })
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
