//! Ground state of `det D^2 u = lambda |u|` with `int u^2 = 1` on the unit
//! disk, compared against the radial shooting reference.

use std::sync::Arc;

use ma_eigen::fem::NodalField;
use ma_eigen::mesh::{generate_mesh, DomainSpec};
use ma_eigen::oracle;
use ma_eigen::solver::{solve_from_scratch, ProblemKind, ProblemSpec};

fn main() -> ma_eigen::Result<()> {
    let reference = oracle::shoot_maev(oracle::DEFAULT_GRID, oracle::DEFAULT_TOL)?;
    println!(
        "radial reference: lambda = {:.5}, u(0) = {:.5}",
        reference.lambda, reference.u0
    );

    let mesh = Arc::new(generate_mesh(&DomainSpec::unit_disk(), 0.1)?);
    let spec = ProblemSpec::defaults(ProblemKind::Linear, &mesh)?;
    println!(
        "mesh: {} vertices, h = {:.4}; eps = {:.4e}, tau = {:.4e}, gamma = {:.3}",
        mesh.n_vertices(),
        mesh.h,
        spec.eps,
        spec.tau,
        spec.gamma
    );

    let result = solve_from_scratch(&mesh, &spec)?;
    let exact = NodalField::interpolate(&mesh, |p| reference.eval(p.x.hypot(p.y)));
    let l2 = result.u.increment_norm(&exact)?;
    println!(
        "converged in {} steps (increment {:.2e}): lambda_h = {:.4}, min u_h = {:.5}",
        result.steps, result.final_increment, result.lambda_rayleigh, result.min_u
    );
    println!(
        "against the reference: |u_h - u|_0h = {:.3e}; lambda deficit = {:.3}",
        l2,
        reference.lambda - result.lambda_rayleigh
    );
    Ok(())
}
