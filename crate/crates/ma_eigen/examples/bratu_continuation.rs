//! Incremental continuation in the constraint constant `C` for
//! `det D^2 u = lambda e^(-u)` with `int (e^(-u) - 1) = C` on the unit disk,
//! producing the finite-element bifurcation data.

use std::sync::Arc;

use ma_eigen::continuation::{continue_in_c, emit_bifurcation};
use ma_eigen::mesh::{generate_mesh, DomainSpec};
use ma_eigen::solver::{ProblemKind, ProblemSpec};

fn main() -> ma_eigen::Result<()> {
    let out_dir = std::env::current_dir()?.join("examples_out");
    std::fs::create_dir_all(&out_dir)?;

    let mesh = Arc::new(generate_mesh(&DomainSpec::unit_disk(), 0.1)?);
    let base = ProblemSpec::defaults(ProblemKind::Bratu, &mesh)?;
    println!(
        "mesh h = {:.4}; eps = {:.4e}, tau = {:.4e}, stopping at {:.0e}",
        mesh.h, base.eps, base.tau, base.stop_tol
    );

    let points = continue_in_c(&mesh, &base, 0.5, 12.0)?;
    println!("    C    lambda_h     min u_h   steps");
    for p in &points {
        println!(
            "{:7.2} {:10.4} {:11.5} {:7}{}",
            p.c,
            p.result.lambda_rayleigh,
            p.result.min_u,
            p.result.steps,
            if p.result.converged { "" } else { "   (not converged)" }
        );
    }
    let peak = points
        .iter()
        .max_by(|a, b| a.result.lambda_rayleigh.partial_cmp(&b.result.lambda_rayleigh).unwrap())
        .unwrap();
    println!(
        "discrete turning point: lambda peaks at {:.4} near C = {}",
        peak.result.lambda_rayleigh, peak.c
    );

    let csv = out_dir.join("fem_bifurcation.csv");
    emit_bifurcation(&points, &csv)?;
    println!("bifurcation rows: {}", csv.display());
    Ok(())
}
