//! Incremental continuation in the constraint constant `C` of the exponential
//! problem. The branch is walked in steps of `dC`: the first solve starts from
//! the constant field `-dC / |Omega|` with a zero tensor field, every later
//! solve from the converged pair at the previous `C`. Losing convergence is the
//! expected terminal behaviour near the fold of the branch, so it ends the
//! sweep with a flagged tail entry instead of an error.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fem::NodalField;
use crate::hessian::SymTensorField;
use crate::io::fmt_f64;
use crate::mesh::TriMesh;
use crate::solver::{solve, ProblemKind, ProblemSpec, SolveResult};

/// One sweep point: the constraint constant and the solve at that constant.
#[derive(Clone, Debug)]
pub struct SweepPoint {
    pub c: f64,
    pub result: SolveResult,
}

/// Walks `C = dC, 2 dC, ...` up to `c_max`, warm-starting each solve from the
/// previous one. Stops at the first non-converged solve (recorded as a flagged
/// tail entry) or after `c_max`.
pub fn continue_in_c(
    mesh: &Arc<TriMesh>,
    base: &ProblemSpec,
    d_c: f64,
    c_max: f64,
) -> Result<Vec<SweepPoint>> {
    if !(d_c > 0.0) {
        return Err(Error::Invalid(format!("dC must be positive, got {d_c}")));
    }
    if !(c_max > d_c) {
        return Err(Error::Invalid(format!(
            "Cmax = {c_max} must exceed the first increment dC = {d_c}"
        )));
    }
    let mut warm_u = NodalField::constant(mesh, -d_c / mesh.area);
    let mut warm_p = SymTensorField::zero(mesh);
    let mut points = Vec::new();
    let mut q = 1usize;
    loop {
        let c = q as f64 * d_c;
        if c > c_max * (1.0 + 1e-12) {
            break;
        }
        let mut spec = base.clone();
        spec.kind = ProblemKind::Bratu;
        spec.c_target = c;
        let result = solve(&spec, warm_u.clone(), warm_p.clone())?;
        let converged = result.converged;
        points.push(SweepPoint { c, result });
        if !converged {
            break;
        }
        let last = &points.last().unwrap().result;
        warm_u = last.u.clone();
        warm_p = last.p.clone();
        q += 1;
    }
    Ok(points)
}

/// Writes the sweep as CSV `C,lambda,min_u,converged` with full-precision doubles.
pub fn emit_bifurcation(points: &[SweepPoint], path: &Path) -> Result<()> {
    let mut out = String::from("C,lambda,min_u,converged\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_f64(p.c),
            fmt_f64(p.result.lambda_rayleigh),
            fmt_f64(p.result.min_u),
            p.result.converged
        ));
    }
    fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_mesh, DomainSpec};
    use crate::solver::bratu_constraint;

    fn disk(h: f64) -> Arc<TriMesh> {
        Arc::new(generate_mesh(&DomainSpec::unit_disk(), h).unwrap())
    }

    #[test]
    fn first_step_initialization_field() {
        // on the disk the q = 1 start is the constant -dC / pi
        let mesh = disk(0.2);
        let field = NodalField::constant(&mesh, -0.5 / mesh.area);
        assert!((field.values[0] - (-0.159)).abs() < 2e-3);
    }

    #[test]
    fn short_sweep_on_a_coarse_disk() {
        let mesh = disk(0.2);
        let mut base = ProblemSpec::defaults(ProblemKind::Bratu, &mesh).unwrap();
        base.stop_tol = 1e-7;
        base.max_steps = 20_000;
        let points = continue_in_c(&mesh, &base, 0.5, 1.5).unwrap();
        assert_eq!(points.len(), 3);
        for p in &points {
            assert!(p.result.converged);
            assert!(p.result.constraint_residual <= 10.0 * base.sqp_tol);
            assert!(
                (bratu_constraint(&p.result.u) - p.c).abs() <= 10.0 * base.sqp_tol,
                "constraint off at C = {}",
                p.c
            );
            assert!(p.result.min_u < 0.0);
            assert!(p.result.lambda_rayleigh > 0.0);
        }
        // min_u deepens with C along the branch
        assert!(points.windows(2).all(|w| w[1].result.min_u < w[0].result.min_u));
    }

    #[test]
    fn warm_start_beats_cold_start() {
        let mesh = disk(0.2);
        let mut base = ProblemSpec::defaults(ProblemKind::Bratu, &mesh).unwrap();
        base.stop_tol = 1e-7;
        let points = continue_in_c(&mesh, &base, 0.5, 1.0).unwrap();
        let warm_steps = points[1].result.steps;

        let mut cold_spec = base.clone();
        cold_spec.c_target = 1.0;
        let cold = solve(
            &cold_spec,
            NodalField::constant(&mesh, -1.0 / mesh.area),
            SymTensorField::zero(&mesh),
        )
        .unwrap();
        assert!(cold.converged);
        assert!(
            warm_steps < cold.steps,
            "warm {warm_steps} vs cold {}",
            cold.steps
        );
    }

    #[test]
    fn bifurcation_csv_round_trip() {
        let dir = std::env::temp_dir().join("ma_eigen_continuation_test");
        fs::create_dir_all(&dir).unwrap();

        let empty = dir.join("empty.csv");
        emit_bifurcation(&[], &empty).unwrap();
        assert_eq!(fs::read_to_string(&empty).unwrap(), "C,lambda,min_u,converged\n");

        let mesh = disk(0.25);
        let mut base = ProblemSpec::defaults(ProblemKind::Bratu, &mesh).unwrap();
        base.stop_tol = 1e-6;
        let points = continue_in_c(&mesh, &base, 0.5, 0.6).unwrap();
        assert_eq!(points.len(), 1);
        let one = dir.join("one.csv");
        emit_bifurcation(&points, &one).unwrap();
        let text = fs::read_to_string(&one).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("C,lambda,min_u,converged"));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row.len(), 4);
        // full-precision doubles survive the round trip bit-exactly
        assert_eq!(row[0].parse::<f64>().unwrap().to_bits(), points[0].c.to_bits());
        assert_eq!(
            row[1].parse::<f64>().unwrap().to_bits(),
            points[0].result.lambda_rayleigh.to_bits()
        );
        assert_eq!(
            row[2].parse::<f64>().unwrap().to_bits(),
            points[0].result.min_u.to_bits()
        );
        assert_eq!(row[3], "true");
        assert!(lines.next().is_none());
    }
}
