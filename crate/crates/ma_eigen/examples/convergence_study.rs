//! Mesh-refinement study for the quadratic-constraint problem on the disk:
//! lumped-L2 errors against the radial reference, observed rates, and the
//! h-extrapolated eigenvalue.

use std::sync::Arc;
use std::time::Instant;

use ma_eigen::fem::NodalField;
use ma_eigen::mesh::{generate_mesh, DomainSpec};
use ma_eigen::oracle;
use ma_eigen::solver::{solve_from_scratch, ProblemKind, ProblemSpec};

fn main() -> ma_eigen::Result<()> {
    let reference = oracle::shoot_maev(oracle::DEFAULT_GRID, oracle::DEFAULT_TOL)?;
    println!("reference: lambda = {:.5}, u(0) = {:.5}\n", reference.lambda, reference.u0);
    println!(" nominal     h     lambda_h   min u_h      L2 error   rate   steps");

    let mut rows: Vec<(f64, f64, f64)> = Vec::new(); // (nominal, lambda, l2)
    for nominal in [0.1, 0.05, 0.025] {
        let t0 = Instant::now();
        let mesh = Arc::new(generate_mesh(&DomainSpec::unit_disk(), nominal)?);
        let spec = ProblemSpec::defaults(ProblemKind::Linear, &mesh)?;
        let result = solve_from_scratch(&mesh, &spec)?;
        let exact = NodalField::interpolate(&mesh, |p| reference.eval(p.x.hypot(p.y)));
        let l2 = result.u.increment_norm(&exact)?;
        let rate = rows
            .last()
            .map(|(_, _, prev)| format!("{:.2}", (prev / l2).log2()))
            .unwrap_or_else(|| "  - ".into());
        println!(
            "{:8} {:7.4} {:9.4} {:10.5} {:12.3e}  {}  {:6}   [{:.1?}]",
            format!("1/{}", (1.0 / nominal).round() as i64),
            mesh.h,
            result.lambda_rayleigh,
            result.min_u,
            l2,
            rate,
            result.steps,
            t0.elapsed()
        );
        rows.push((nominal, result.lambda_rayleigh, l2));
    }

    // least-squares fit lambda_h = lambda0 - c h
    let n = rows.len() as f64;
    let mh: f64 = rows.iter().map(|r| r.0).sum::<f64>() / n;
    let ml: f64 = rows.iter().map(|r| r.1).sum::<f64>() / n;
    let num: f64 = rows.iter().map(|r| (r.0 - mh) * (r.1 - ml)).sum();
    let den: f64 = rows.iter().map(|r| (r.0 - mh) * (r.0 - mh)).sum();
    let slope = num / den;
    println!(
        "\nlambda_h ~ {:.4} {} {:.2} h  (extrapolated vs reference {:.4})",
        ml - slope * mh,
        if slope < 0.0 { "-" } else { "+" },
        slope.abs(),
        reference.lambda
    );
    Ok(())
}
