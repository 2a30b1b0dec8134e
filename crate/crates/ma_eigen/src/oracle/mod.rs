//! Independent reference solvers used to verify the finite-element pipeline:
//! high-accuracy radial shooting on the unit disk for the three eigenvalue
//! problems, and the solve-then-normalize splitting iteration for plain
//! symmetric matrix eigenproblems (a disguised inverse power method).
//!
//! The radial ground states satisfy `u' u'' = r * F(u)` on (0,1) with
//! `u'(0) = 0` and `u(1) = 0`. Substituting `w = (u')^2 / 2` turns this into
//! the first-order system `u' = sqrt(2w)`, `w' = r F(u)`, integrated by RK4
//! with a series start over the first grid cell to avoid the square-root
//! degeneracy at the origin. A secant iteration on `lambda` enforces
//! `u(1) = 0`.

pub mod dense;

use crate::error::{Error, Result};
use crate::fem::{dot, norm2};

/// Default number of grid intervals for the radial integrations.
pub const DEFAULT_GRID: usize = 10_000;
/// Default secant tolerance on `|u(1)|`.
pub const DEFAULT_TOL: f64 = 1e-12;

/// A radial profile on the uniform grid over [0, 1] with its eigenvalue and the
/// value of the problem's normalization integral.
#[derive(Clone, Debug)]
pub struct RadialSolution {
    pub r_grid: Vec<f64>,
    pub u: Vec<f64>,
    pub lambda: f64,
    pub u0: f64,
    /// `2 pi int |u|^(d+1) r dr` or `2 pi int (e^(-u) - 1) r dr`, per problem.
    pub constraint_value: f64,
}

impl RadialSolution {
    /// Piecewise-linear evaluation at radius `r` (clamped to [0, 1]).
    pub fn eval(&self, r: f64) -> f64 {
        let n = self.r_grid.len() - 1;
        let s = r.clamp(0.0, 1.0) * n as f64;
        let i = (s.floor() as usize).min(n - 1);
        let t = s - i as f64;
        self.u[i] * (1.0 - t) + self.u[i + 1] * t
    }
}

/// Right-hand sides `w' = r f(u)`; `f_at_origin` is the limit `w'/r` at `r = 0`
/// used by the series start.
#[derive(Clone, Copy)]
enum RadialKind {
    Linear,
    Power,
    Bratu,
}

impl RadialKind {
    fn f(self, u: f64, lambda: f64) -> f64 {
        match self {
            RadialKind::Linear => -lambda * u,
            RadialKind::Power => -lambda * u * u.abs(),
            RadialKind::Bratu => lambda * (-u).exp(),
        }
    }
}

/// Integrates the profile for a fixed `(u0, lambda)`; returns the grid values.
fn integrate(kind: RadialKind, u0: f64, lambda: f64, n: usize) -> Vec<f64> {
    let dr = 1.0 / n as f64;
    let mut u = Vec::with_capacity(n + 1);
    u.push(u0);
    // series start over the first cell: u' ~ sqrt(g0) r, w ~ g0 r^2 / 2
    let g0 = kind.f(u0, lambda).max(0.0);
    let mut state_u = u0 + 0.5 * g0.sqrt() * dr * dr;
    let mut state_w = 0.5 * g0 * dr * dr;
    u.push(state_u);
    let deriv = |r: f64, su: f64, sw: f64| -> (f64, f64) {
        ((2.0 * sw.max(0.0)).sqrt(), r * kind.f(su, lambda))
    };
    for i in 1..n {
        let r = i as f64 * dr;
        let (k1u, k1w) = deriv(r, state_u, state_w);
        let (k2u, k2w) = deriv(r + 0.5 * dr, state_u + 0.5 * dr * k1u, state_w + 0.5 * dr * k1w);
        let (k3u, k3w) = deriv(r + 0.5 * dr, state_u + 0.5 * dr * k2u, state_w + 0.5 * dr * k2w);
        let (k4u, k4w) = deriv(r + dr, state_u + dr * k3u, state_w + dr * k3w);
        state_u += dr / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        state_w += dr / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
        u.push(state_u);
    }
    u
}

/// Secant iteration on `lambda` for `u(1) = 0`, with a bracketed bisection
/// fallback. The initial bracket [0.1, 100] is widened if it does not straddle
/// the root (shallow Bratu profiles need very small eigenvalues).
fn shoot_lambda(kind: RadialKind, u0: f64, n: usize, tol: f64) -> Result<(Vec<f64>, f64)> {
    let end = |lambda: f64| -> f64 { *integrate(kind, u0, lambda, n).last().unwrap() };
    let mut lo = 0.1;
    let mut hi = 100.0;
    let mut f_lo = end(lo);
    let mut f_hi = end(hi);
    // u(1) is increasing in lambda
    let mut widen = 0;
    while f_lo > 0.0 && lo > 1e-12 {
        lo *= 0.1;
        f_lo = end(lo);
        widen += 1;
    }
    while f_hi < 0.0 && hi < 1e6 {
        hi *= 10.0;
        f_hi = end(hi);
        widen += 1;
    }
    if f_lo > 0.0 || f_hi < 0.0 {
        return Err(Error::NoConvergence {
            what: "shooting bracket",
            iterations: widen,
            residual: f_lo.abs().min(f_hi.abs()),
        });
    }
    let (mut a, mut fa) = (lo, f_lo);
    let (mut b, mut fb) = (hi, f_hi);
    for _ in 0..200 {
        let mut x = if fb != fa { b - fb * (b - a) / (fb - fa) } else { 0.5 * (lo + hi) };
        if !(x > lo && x < hi) || !x.is_finite() {
            x = 0.5 * (lo + hi);
        }
        let fx = end(x);
        if fx.abs() <= tol {
            return Ok((integrate(kind, u0, x, n), x));
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        a = b;
        fa = fb;
        b = x;
        fb = fx;
        if hi - lo <= 1e-15 * hi {
            return Ok((integrate(kind, u0, b, n), b));
        }
    }
    Err(Error::NoConvergence { what: "secant on lambda", iterations: 200, residual: fb.abs() })
}

fn grid(n: usize) -> Vec<f64> {
    (0..=n).map(|i| i as f64 / n as f64).collect()
}

/// `2 pi int g(u(r)) r dr` by the trapezoid rule on the uniform grid.
fn radial_integral(u: &[f64], g: impl Fn(f64) -> f64) -> f64 {
    let n = u.len() - 1;
    let dr = 1.0 / n as f64;
    let mut acc = 0.0;
    for i in 0..=n {
        let r = i as f64 * dr;
        let weight = if i == 0 || i == n { 0.5 } else { 1.0 };
        acc += weight * g(u[i]) * r;
    }
    std::f64::consts::TAU * acc * dr
}

/// Ground state of `det D^2 u = lambda |u|` on the unit disk with
/// `2 pi int |u|^2 r dr = 1`. The profile is shot with `u(0) = -1` and then
/// rescaled by `theta` onto the constraint, which maps `lambda` to
/// `theta^(d-1) lambda` with `d = 2`.
pub fn shoot_maev(n: usize, tol: f64) -> Result<RadialSolution> {
    let (mut u, lambda) = shoot_lambda(RadialKind::Linear, -1.0, n, tol)?;
    let i2 = radial_integral(&u, |v| v * v);
    let theta = i2.sqrt().recip();
    for v in &mut u {
        *v *= theta;
    }
    let constraint = radial_integral(&u, |v| v * v);
    Ok(RadialSolution { r_grid: grid(n), u0: u[0], u, lambda: theta * lambda, constraint_value: constraint })
}

/// Ground state of `det D^2 u = lambda |u|^2` on the unit disk with
/// `2 pi int |u|^3 r dr = 1`. The equation is scale invariant, so the rescaling
/// onto the constraint leaves `lambda` unchanged.
pub fn shoot_maevd(n: usize, tol: f64) -> Result<RadialSolution> {
    let (mut u, lambda) = shoot_lambda(RadialKind::Power, -1.0, n, tol)?;
    let i3 = radial_integral(&u, |v| v.abs().powi(3));
    let theta = i3.powf(-1.0 / 3.0);
    for v in &mut u {
        *v *= theta;
    }
    let constraint = radial_integral(&u, |v| v.abs().powi(3));
    Ok(RadialSolution { r_grid: grid(n), u0: u[0], u, lambda, constraint_value: constraint })
}

/// Radial solution of `det D^2 u = lambda e^(-u)` with prescribed center value
/// `u(0) = u0_target`; reports `C = 2 pi int (e^(-u) - 1) r dr`.
pub fn shoot_bratu(u0_target: f64, n: usize, tol: f64) -> Result<RadialSolution> {
    if !(u0_target < 0.0) {
        return Err(Error::Invalid(format!(
            "bratu shooting requires u(0) < 0, got {u0_target}"
        )));
    }
    let (u, lambda) = shoot_lambda(RadialKind::Bratu, u0_target, n, tol)?;
    let constraint = radial_integral(&u, |v| (-v).exp() - 1.0);
    Ok(RadialSolution { r_grid: grid(n), u0: u[0], u, lambda, constraint_value: constraint })
}

/// Sweeps `u(0)` and reports one radial solution per point; the resulting
/// `(u0, lambda, C)` rows trace the fold of the Bratu branch.
pub fn bratu_sweep(u0_min: f64, u0_max: f64, points: usize, n: usize, tol: f64) -> Result<Vec<RadialSolution>> {
    if points < 2 || !(u0_min < u0_max) || !(u0_max < 0.0) {
        return Err(Error::Invalid(
            "sweep needs u0_min < u0_max < 0 and at least two points".into(),
        ));
    }
    let mut out = Vec::with_capacity(points);
    for k in 0..points {
        let u0 = u0_min + (u0_max - u0_min) * k as f64 / (points - 1) as f64;
        out.push(shoot_bratu(u0, n, tol)?);
    }
    Ok(out)
}

/// Locates the turning point of the Bratu branch: the maximum of `lambda(u0)`
/// over `u0 in [-6, -0.05]`, by a coarse scan plus golden-section refinement.
pub fn bratu_turning_point(n: usize, tol: f64) -> Result<RadialSolution> {
    let coarse = 60;
    let (mut best_k, mut best_lambda) = (0, f64::MIN);
    let lo = -6.0;
    let hi = -0.05;
    let at = |k: usize| lo + (hi - lo) * k as f64 / (coarse - 1) as f64;
    for k in 0..coarse {
        let sol = shoot_bratu(at(k), n, tol)?;
        if sol.lambda > best_lambda {
            best_lambda = sol.lambda;
            best_k = k;
        }
    }
    let mut a = at(best_k.saturating_sub(1));
    let mut b = at((best_k + 1).min(coarse - 1));
    // golden-section search for the maximum of lambda(u0)
    let phi = 0.5 * (3.0 - 5f64.sqrt());
    let mut x1 = a + phi * (b - a);
    let mut x2 = b - phi * (b - a);
    let mut f1 = shoot_bratu(x1, n, tol)?.lambda;
    let mut f2 = shoot_bratu(x2, n, tol)?.lambda;
    while b - a > 1e-5 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = b - phi * (b - a);
            f2 = shoot_bratu(x2, n, tol)?.lambda;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = a + phi * (b - a);
            f1 = shoot_bratu(x1, n, tol)?.lambda;
        }
    }
    shoot_bratu(0.5 * (a + b), n, tol)
}

/// Splitting iteration for the smallest eigenvalue of a dense symmetric matrix:
/// `x <- (I + tau A)^(-1) x` followed by renormalization, iterated to a fixed
/// point; returns the limit vector and its Rayleigh quotient `x^T A x`.
pub fn linear_eigen_split(
    n: usize,
    a: &[f64],
    x0: &[f64],
    tau: f64,
    max_iters: usize,
    tol: f64,
) -> Result<(Vec<f64>, f64)> {
    debug_assert_eq!(a.len(), n * n);
    let norm0 = norm2(x0);
    if norm0 == 0.0 {
        return Err(Error::ZeroField("initial vector"));
    }
    let mut shifted = a.to_vec();
    for (v, s) in shifted.iter_mut().zip(0..n * n) {
        *v *= tau;
        if s % (n + 1) == 0 {
            *v += 1.0;
        }
    }
    let mut x: Vec<f64> = x0.iter().map(|&v| v / norm0).collect();
    for _ in 0..max_iters {
        let y = dense::lu_solve(n, &shifted, &x)?;
        let ny = norm2(&y);
        if ny == 0.0 {
            return Err(Error::ZeroField("iterate"));
        }
        let next: Vec<f64> = y.iter().map(|&v| v / ny).collect();
        let incr: f64 = next
            .iter()
            .zip(&x)
            .map(|(&p, &q)| (p - q) * (p - q))
            .sum::<f64>()
            .sqrt();
        x = next;
        if incr <= tol {
            let mut ax = vec![0.0; n];
            for r in 0..n {
                ax[r] = dot(&a[r * n..(r + 1) * n], &x);
            }
            return Ok((x.clone(), dot(&x, &ax)));
        }
    }
    Err(Error::NoConvergence { what: "eigen splitting iteration", iterations: max_iters, residual: f64::NAN })
}
