//! Projections onto the three constraint manifolds. The quadratic constraint is
//! a plain renormalization; the power-law and exponential constraints are
//! projected by sequential quadratic programming: the constraint is linearized
//! at the current iterate and the linearized projection is solved in closed
//! form, every integral replaced by the vertex-lumped rule.

use crate::error::{Error, Result};
use crate::fem::NodalField;

/// Largest admissible argument of `exp` inside the Bratu projection; beyond it
/// the iteration has diverged.
const EXP_GUARD: f64 = 700.0;

/// Normalization onto the unit lumped sphere. Returns the projected field and
/// the per-step multiplier estimate `(1 - |u|) / (d tau)`, which is reported
/// but deliberately not used as the eigenvalue (it is a ratio of two small
/// numbers; the converged Rayleigh quotient is the trusted readout).
pub fn project_linear(u_half: &NodalField, tau: f64, d: u32) -> Result<(NodalField, f64)> {
    let norm = u_half.norm_0h();
    if norm == 0.0 {
        return Err(Error::ZeroField("field entering the normalization step"));
    }
    let mut u = u_half.clone();
    u.scale(1.0 / norm);
    let lambda_step = (1.0 - norm) / (d as f64 * tau);
    Ok((u, lambda_step))
}

/// Lumped power-law constraint functional `sum_k (|omega_k|/3) |u_k|^(d+1)`.
pub fn power_constraint(u: &NodalField, d: u32) -> f64 {
    let mesh = u.mesh();
    let e = d as i32 + 1;
    let mut acc = 0.0;
    for (k, &v) in u.values.iter().enumerate() {
        acc += mesh.patch_area[k] / 3.0 * v.abs().powi(e);
    }
    acc
}

/// Lumped exponential constraint functional `sum_k (|omega_k|/3) (e^(-u_k) - 1)`.
/// Boundary vertices contribute exactly zero for conforming fields.
pub fn bratu_constraint(u: &NodalField) -> f64 {
    let mesh = u.mesh();
    let mut acc = 0.0;
    for (k, &v) in u.values.iter().enumerate() {
        acc += mesh.patch_area[k] / 3.0 * ((-v).exp() - 1.0);
    }
    acc
}

/// SQP projection onto `sum (|omega|/3) |u|^(d+1) = 1`, warm-started from the
/// previous projected iterate. Only interior values vary (the boundary stays
/// pinned to `u_third`'s boundary), so the linearization sums run over the
/// interior vertices; the update is
///
/// ```text
/// u_(k+1) = u_third + [1 - N_(d+1)(u_k) + (d+1) S_k] / [(d+1) N_(2d)(u_k)] u_k |u_k|^(d-1)
/// ```
///
/// with `N_p(v) = sum w |v|^p`, `S_k = sum w (u_k - u_third) u_k |u_k|^(d-1)`,
/// optionally damped by `u_(k+1) <- (1-beta) u_k + beta u_(k+1)`. Returns the
/// projected field and the number of iterations. At a fixed point the
/// constraint holds exactly, and the exit requires it to 10x the tolerance.
pub fn project_power_sqp(
    u_third: &NodalField,
    warm_start: &NodalField,
    d: u32,
    sqp_tol: f64,
    sqp_max_iters: usize,
    damping: f64,
) -> Result<(NodalField, usize)> {
    if !u_third.same_mesh(warm_start) {
        return Err(Error::MeshMismatch);
    }
    let mesh = u_third.mesh().clone();
    let df = d as f64;
    let mut u_k = warm_start.clone();
    let mut constraint_residual = f64::INFINITY;
    for iter in 1..=sqp_max_iters {
        let mut n1 = 0.0; // sum w |u|^(d+1)
        let mut n2 = 0.0; // sum w |u|^(2d)
        let mut s = 0.0;
        for &k in &mesh.interior_vertices {
            let v = u_k.values[k];
            let w = mesh.patch_area[k] / 3.0;
            let core = v * v.abs().powf(df - 1.0); // u |u|^(d-1)
            n1 += w * v.abs().powf(df + 1.0);
            n2 += w * v.abs().powf(2.0 * df);
            s += w * (v - u_third.values[k]) * core;
        }
        if n2 == 0.0 {
            return Err(Error::ZeroField("SQP iterate"));
        }
        let theta = (1.0 - n1 + (df + 1.0) * s) / ((df + 1.0) * n2);
        let mut u_next = u_third.clone();
        for &v in &mesh.interior_vertices {
            let core = u_k.values[v] * u_k.values[v].abs().powf(df - 1.0);
            u_next.values[v] = u_third.values[v] + theta * core;
        }
        if damping < 1.0 {
            for k in 0..u_next.values.len() {
                u_next.values[k] =
                    (1.0 - damping) * u_k.values[k] + damping * u_next.values[k];
            }
        }
        let incr = u_next.increment_norm(&u_k)?;
        u_k = u_next;
        constraint_residual = (interior_power_constraint(&u_k, d) - 1.0).abs();
        if incr <= sqp_tol && constraint_residual <= 10.0 * sqp_tol {
            return Ok((u_k, iter));
        }
    }
    Err(Error::SqpNoConvergence { iterations: sqp_max_iters, constraint_residual })
}

/// Interior-vertex restriction of the power constraint; coincides with
/// [`power_constraint`] on conforming fields.
fn interior_power_constraint(u: &NodalField, d: u32) -> f64 {
    let mesh = u.mesh();
    let e = d as i32 + 1;
    let mut acc = 0.0;
    for &k in &mesh.interior_vertices {
        acc += mesh.patch_area[k] / 3.0 * u.values[k].abs().powi(e);
    }
    acc
}

/// SQP projection onto `sum (|omega|/3) (e^(-u) - 1) = C`:
///
/// ```text
/// u_(q+1)(Q_k) = u_third(Q_k)
///   + [sum_l |omega_l| e^(-u_q)(1 - u_third + u_q)(Q_l) - (3 C + sum_l |omega_l|)]
///     / [sum_l |omega_l| e^(-2 u_q(Q_l))] * e^(-u_q(Q_k))
/// ```
///
/// with every sum over the interior vertices `l = 1..N_0h` and the interior
/// patch measure standing in for the domain area. Only interior values are
/// updated (the boundary stays pinned to `u_third`'s boundary), and with the
/// interior measure that clamping is built into the linearization, so a fixed
/// point satisfies the constraint functional exactly.
pub fn project_bratu_sqp(
    u_third: &NodalField,
    warm_start: &NodalField,
    c_target: f64,
    sqp_tol: f64,
    sqp_max_iters: usize,
) -> Result<(NodalField, usize)> {
    if !u_third.same_mesh(warm_start) {
        return Err(Error::MeshMismatch);
    }
    let mesh = u_third.mesh().clone();
    let interior_measure: f64 = mesh
        .interior_vertices
        .iter()
        .map(|&k| mesh.patch_area[k])
        .sum();
    let mut u_q = warm_start.clone();
    let mut constraint_residual = f64::INFINITY;
    for iter in 1..=sqp_max_iters {
        let mut num = -(3.0 * c_target + interior_measure);
        let mut den = 0.0;
        for &k in &mesh.interior_vertices {
            let v = u_q.values[k];
            if -v > EXP_GUARD / 2.0 {
                return Err(Error::SqpOverflow { value: -v });
            }
            let w = mesh.patch_area[k];
            let e = (-v).exp();
            num += w * e * (1.0 - u_third.values[k] + v);
            den += w * e * e;
        }
        let theta = num / den;
        let mut u_next = u_third.clone();
        for &v in &mesh.interior_vertices {
            u_next.values[v] = u_third.values[v] + theta * (-u_q.values[v]).exp();
        }
        let incr = u_next.increment_norm(&u_q)?;
        u_q = u_next;
        constraint_residual = (interior_bratu_constraint(&u_q) - c_target).abs();
        if incr <= sqp_tol && constraint_residual <= 10.0 * sqp_tol {
            return Ok((u_q, iter));
        }
    }
    Err(Error::SqpNoConvergence { iterations: sqp_max_iters, constraint_residual })
}

/// Interior-vertex restriction of the exponential constraint; coincides with
/// [`bratu_constraint`] on conforming fields (the boundary integrand vanishes).
fn interior_bratu_constraint(u: &NodalField) -> f64 {
    let mesh = u.mesh();
    let mut acc = 0.0;
    for &k in &mesh.interior_vertices {
        acc += mesh.patch_area[k] / 3.0 * ((-u.values[k]).exp() - 1.0);
    }
    acc
}
