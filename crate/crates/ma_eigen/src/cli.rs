//! Command-line front end: mesh generation, single solves with result emission,
//! the radial oracles, and continuation sweeps. All numeric output is printed
//! with 17 significant digits so every double round-trips exactly; identical
//! invocations produce byte-identical files.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::continuation::{continue_in_c, emit_bifurcation};
use crate::error::Error;
use crate::fem::centerline_profile;
use crate::io::{fmt_f64, result_json};
use crate::mesh::{generate_mesh, load_mesh, save_mesh, DomainSpec, Point2, TriMesh};
use crate::oracle;
use crate::solver::{init_ma_dirichlet, solve, ProblemKind, ProblemSpec};

const USAGE: &str = "\
ma-eigen: ground states of nonlinear Monge-Ampere eigenvalue problems

USAGE:
  ma-eigen mesh --domain disk|superellipse [--exponent P] [--radius R]
                [--center X Y] --h H --out PATH
  ma-eigen solve --problem linear|power|bratu --mesh PATH [--C VALUE]
                [--eps E] [--tau T] [--stop-tol S] [--max-steps N]
                [--sqp-tol S] [--sqp-max-iters N] [--damping B] [--no-sign-fix]
                [--pretty] --out PATH [--profile PATH] [--profile-line Y]
  ma-eigen oracle --problem linear|power|bratu [--u0 V] [--sweep MIN MAX N]
                [--grid N] [--tol T] [--out PATH]
  ma-eigen continue --mesh PATH [--dC D] --Cmax C [--eps E] [--tau T]
                [--stop-tol S] [--max-steps N] [--pretty] --out PATH

EXIT CODES:
  0 success, 2 usage or validation error, 3 non-convergence, 1 internal error.
";

struct Fail {
    code: i32,
    msg: String,
}

fn usage_err(msg: impl Into<String>) -> Fail {
    Fail { code: 2, msg: msg.into() }
}

fn internal(e: Error) -> Fail {
    Fail { code: 1, msg: e.to_string() }
}

/// Input-loading and validation failures are the caller's problem.
fn validation(e: Error) -> Fail {
    Fail { code: 2, msg: e.to_string() }
}

type CliResult = Result<i32, Fail>;

/// Runs the command line; returns the process exit code.
pub fn run(args: &[String]) -> i32 {
    let code = match dispatch(args) {
        Ok(code) => code,
        Err(fail) => {
            eprintln!("error: {}", fail.msg);
            if fail.code == 2 {
                eprint!("{USAGE}");
            }
            fail.code
        }
    };
    code
}

fn dispatch(args: &[String]) -> CliResult {
    let Some(command) = args.first() else {
        return Err(usage_err("missing command"));
    };
    match command.as_str() {
        "mesh" => cmd_mesh(&args[1..]),
        "solve" => cmd_solve(&args[1..]),
        "oracle" => cmd_oracle(&args[1..]),
        "continue" => cmd_continue(&args[1..]),
        "-h" | "--help" | "help" => {
            print!("{USAGE}");
            Ok(0)
        }
        other => Err(usage_err(format!("unknown command `{other}`"))),
    }
}

fn take<'a>(args: &'a [String], i: &mut usize, flag: &str) -> Result<&'a str, Fail> {
    *i += 1;
    args.get(*i)
        .map(|s| s.as_str())
        .ok_or_else(|| usage_err(format!("flag {flag} expects a value")))
}

fn parse_f64(s: &str, flag: &str) -> Result<f64, Fail> {
    s.parse()
        .map_err(|_| usage_err(format!("flag {flag}: cannot parse `{s}` as a number")))
}

fn parse_usize(s: &str, flag: &str) -> Result<usize, Fail> {
    s.parse()
        .map_err(|_| usage_err(format!("flag {flag}: cannot parse `{s}` as a count")))
}

fn required<T>(v: Option<T>, flag: &str) -> Result<T, Fail> {
    v.ok_or_else(|| usage_err(format!("missing required flag {flag}")))
}

fn cmd_mesh(args: &[String]) -> CliResult {
    let mut domain_kind: Option<String> = None;
    let mut exponent: Option<f64> = None;
    let mut radius = 1.0;
    let mut center = Point2::new(0.0, 0.0);
    let mut h: Option<f64> = None;
    let mut out: Option<PathBuf> = None;
    let mut i = 0;
    while i < args.len() {
        match args[i].as_str() {
            "--domain" => domain_kind = Some(take(args, &mut i, "--domain")?.to_string()),
            "--exponent" => exponent = Some(parse_f64(take(args, &mut i, "--exponent")?, "--exponent")?),
            "--radius" => radius = parse_f64(take(args, &mut i, "--radius")?, "--radius")?,
            "--center" => {
                center.x = parse_f64(take(args, &mut i, "--center")?, "--center")?;
                center.y = parse_f64(take(args, &mut i, "--center")?, "--center")?;
            }
            "--h" => h = Some(parse_f64(take(args, &mut i, "--h")?, "--h")?),
            "--out" => out = Some(PathBuf::from(take(args, &mut i, "--out")?)),
            other => return Err(usage_err(format!("unknown flag `{other}` for mesh"))),
        }
        i += 1;
    }
    let kind = required(domain_kind, "--domain")?;
    let h = required(h, "--h")?;
    let out = required(out, "--out")?;
    let domain = match kind.as_str() {
        "disk" => DomainSpec { radius_param: radius, center, ..DomainSpec::unit_disk() },
        "superellipse" => {
            DomainSpec::superellipse(exponent.unwrap_or(2.5), radius, center)
        }
        other => return Err(usage_err(format!("unknown domain `{other}`"))),
    };
    if let Some(p) = exponent {
        if !(p > 1.0) {
            return Err(usage_err(format!(
                "exponent must exceed 1 for a convex domain, got {p}"
            )));
        }
    }
    let mesh = generate_mesh(&domain, h).map_err(validation)?;
    save_mesh(&mesh, &out).map_err(internal)?;
    println!(
        "mesh: {} vertices, {} triangles, h = {}",
        mesh.n_vertices(),
        mesh.triangles.len(),
        fmt_f64(mesh.h)
    );
    Ok(0)
}

fn load_mesh_arg(path: &Path) -> Result<Arc<TriMesh>, Fail> {
    Ok(Arc::new(load_mesh(path).map_err(validation)?))
}

fn cmd_solve(args: &[String]) -> CliResult {
    let mut problem: Option<String> = None;
    let mut mesh_path: Option<PathBuf> = None;
    let mut c_value: Option<f64> = None;
    let mut eps: Option<f64> = None;
    let mut tau: Option<f64> = None;
    let mut stop_tol: Option<f64> = None;
    let mut max_steps: Option<usize> = None;
    let mut sqp_tol: Option<f64> = None;
    let mut sqp_max_iters: Option<usize> = None;
    let mut damping: Option<f64> = None;
    let mut sign_fix = true;
    let mut pretty = false;
    let mut out: Option<PathBuf> = None;
    let mut profile: Option<PathBuf> = None;
    let mut profile_line = 0.0;
    let mut i = 0;
    while i < args.len() {
        match args[i].as_str() {
            "--problem" => problem = Some(take(args, &mut i, "--problem")?.to_string()),
            "--mesh" => mesh_path = Some(PathBuf::from(take(args, &mut i, "--mesh")?)),
            "--C" => c_value = Some(parse_f64(take(args, &mut i, "--C")?, "--C")?),
            "--eps" => eps = Some(parse_f64(take(args, &mut i, "--eps")?, "--eps")?),
            "--tau" => tau = Some(parse_f64(take(args, &mut i, "--tau")?, "--tau")?),
            "--stop-tol" => stop_tol = Some(parse_f64(take(args, &mut i, "--stop-tol")?, "--stop-tol")?),
            "--max-steps" => max_steps = Some(parse_usize(take(args, &mut i, "--max-steps")?, "--max-steps")?),
            "--sqp-tol" => sqp_tol = Some(parse_f64(take(args, &mut i, "--sqp-tol")?, "--sqp-tol")?),
            "--sqp-max-iters" => {
                sqp_max_iters = Some(parse_usize(take(args, &mut i, "--sqp-max-iters")?, "--sqp-max-iters")?)
            }
            "--damping" => damping = Some(parse_f64(take(args, &mut i, "--damping")?, "--damping")?),
            "--no-sign-fix" => sign_fix = false,
            "--pretty" => pretty = true,
            "--out" => out = Some(PathBuf::from(take(args, &mut i, "--out")?)),
            "--profile" => profile = Some(PathBuf::from(take(args, &mut i, "--profile")?)),
            "--profile-line" => {
                profile_line = parse_f64(take(args, &mut i, "--profile-line")?, "--profile-line")?
            }
            other => return Err(usage_err(format!("unknown flag `{other}` for solve"))),
        }
        i += 1;
    }
    let kind = ProblemKind::parse(&required(problem, "--problem")?).map_err(|e| usage_err(e.to_string()))?;
    let mesh_path = required(mesh_path, "--mesh")?;
    let out = required(out, "--out")?;
    if kind == ProblemKind::Bratu && c_value.is_none() {
        return Err(usage_err("--problem bratu requires --C"));
    }

    let mesh = load_mesh_arg(&mesh_path)?;
    let mut spec = ProblemSpec::defaults(kind, &mesh).map_err(internal)?;
    if let Some(c) = c_value {
        spec.c_target = c;
    }
    if let Some(v) = eps {
        spec.eps = v;
    }
    if let Some(v) = tau {
        spec.tau = v;
    }
    if let Some(v) = stop_tol {
        spec.stop_tol = v;
    }
    if let Some(v) = max_steps {
        spec.max_steps = v;
    }
    if let Some(v) = sqp_tol {
        spec.sqp_tol = v;
    }
    if let Some(v) = sqp_max_iters {
        spec.sqp_max_iters = v;
    }
    if let Some(v) = damping {
        spec.sqp_damping = v;
    }
    spec.sign_fix_enabled = sign_fix;
    spec.validate().map_err(validation)?;

    // --max-steps caps the solve loop; the initialization keeps its own budget
    let mut init_spec = spec.clone();
    init_spec.max_steps = init_spec.max_steps.max(50_000);
    let (u0, p0) = init_ma_dirichlet(&mesh, 1.0, &init_spec).map_err(internal)?;
    let result = solve(&spec, u0, p0).map_err(internal)?;

    std::fs::write(&out, result_json(&spec, mesh.h, &result)).map_err(|e| internal(e.into()))?;
    if let Some(profile_path) = profile {
        let samples = centerline_profile(&result.u, profile_line);
        let mut text = String::from("x,u\n");
        for (x, v) in samples {
            text.push_str(&format!("{},{}\n", fmt_f64(x), fmt_f64(v)));
        }
        std::fs::write(profile_path, text).map_err(|e| internal(e.into()))?;
    }
    if pretty {
        println!(
            "{} on h = {:.5}: lambda_h = {:.6}, min u_h = {:.6}, {} steps, increment {:.3e}, converged = {}",
            spec.kind.as_str(),
            mesh.h,
            result.lambda_rayleigh,
            result.min_u,
            result.steps,
            result.final_increment,
            result.converged
        );
    } else {
        println!("lambda = {}", fmt_f64(result.lambda_rayleigh));
        println!("min_u = {}", fmt_f64(result.min_u));
    }
    Ok(if result.converged { 0 } else { 3 })
}

fn cmd_oracle(args: &[String]) -> CliResult {
    let mut problem: Option<String> = None;
    let mut u0: Option<f64> = None;
    let mut sweep: Option<(f64, f64, usize)> = None;
    let mut grid = oracle::DEFAULT_GRID;
    let mut tol = oracle::DEFAULT_TOL;
    let mut out: Option<PathBuf> = None;
    let mut i = 0;
    while i < args.len() {
        match args[i].as_str() {
            "--problem" => problem = Some(take(args, &mut i, "--problem")?.to_string()),
            "--u0" => u0 = Some(parse_f64(take(args, &mut i, "--u0")?, "--u0")?),
            "--sweep" => {
                let a = parse_f64(take(args, &mut i, "--sweep")?, "--sweep")?;
                let b = parse_f64(take(args, &mut i, "--sweep")?, "--sweep")?;
                let n = parse_usize(take(args, &mut i, "--sweep")?, "--sweep")?;
                sweep = Some((a, b, n));
            }
            "--grid" => grid = parse_usize(take(args, &mut i, "--grid")?, "--grid")?,
            "--tol" => tol = parse_f64(take(args, &mut i, "--tol")?, "--tol")?,
            "--out" => out = Some(PathBuf::from(take(args, &mut i, "--out")?)),
            other => return Err(usage_err(format!("unknown flag `{other}` for oracle"))),
        }
        i += 1;
    }
    let kind = ProblemKind::parse(&required(problem, "--problem")?).map_err(|e| usage_err(e.to_string()))?;
    match kind {
        ProblemKind::Linear | ProblemKind::Power => {
            if u0.is_some() || sweep.is_some() {
                return Err(usage_err("--u0/--sweep apply to the bratu oracle only"));
            }
            let sol = match kind {
                ProblemKind::Linear => oracle::shoot_maev(grid, tol),
                _ => oracle::shoot_maevd(grid, tol),
            }
            .map_err(internal)?;
            println!("lambda = {}", fmt_f64(sol.lambda));
            println!("u0 = {}", fmt_f64(sol.u0));
            println!("constraint = {}", fmt_f64(sol.constraint_value));
            if let Some(path) = out {
                write_radial_profile(&sol, &path)?;
            }
        }
        ProblemKind::Bratu => match (u0, sweep) {
            (Some(u0), None) => {
                let sol = oracle::shoot_bratu(u0, grid, tol).map_err(internal)?;
                println!("lambda = {}", fmt_f64(sol.lambda));
                println!("u0 = {}", fmt_f64(sol.u0));
                println!("C = {}", fmt_f64(sol.constraint_value));
                if let Some(path) = out {
                    write_radial_profile(&sol, &path)?;
                }
            }
            (None, Some((a, b, n))) => {
                let sols = oracle::bratu_sweep(a, b, n, grid, tol).map_err(validation)?;
                let mut text = String::from("u0,lambda,C\n");
                for s in &sols {
                    text.push_str(&format!(
                        "{},{},{}\n",
                        fmt_f64(s.u0),
                        fmt_f64(s.lambda),
                        fmt_f64(s.constraint_value)
                    ));
                }
                let best = sols
                    .iter()
                    .max_by(|p, q| p.lambda.partial_cmp(&q.lambda).unwrap())
                    .unwrap();
                println!("max lambda = {} at u0 = {}", fmt_f64(best.lambda), fmt_f64(best.u0));
                match out {
                    Some(path) => std::fs::write(path, text).map_err(|e| internal(e.into()))?,
                    None => print!("{text}"),
                }
            }
            _ => return Err(usage_err("bratu oracle needs exactly one of --u0 or --sweep")),
        },
    }
    Ok(0)
}

fn write_radial_profile(sol: &oracle::RadialSolution, path: &Path) -> Result<(), Fail> {
    let mut text = String::from("r,u\n");
    for (r, u) in sol.r_grid.iter().zip(&sol.u) {
        text.push_str(&format!("{},{}\n", fmt_f64(*r), fmt_f64(*u)));
    }
    std::fs::write(path, text).map_err(|e| internal(e.into()))
}

fn cmd_continue(args: &[String]) -> CliResult {
    let mut mesh_path: Option<PathBuf> = None;
    let mut d_c = 0.5;
    let mut c_max: Option<f64> = None;
    let mut eps: Option<f64> = None;
    let mut tau: Option<f64> = None;
    let mut stop_tol: Option<f64> = None;
    let mut max_steps: Option<usize> = None;
    let mut pretty = false;
    let mut out: Option<PathBuf> = None;
    let mut i = 0;
    while i < args.len() {
        match args[i].as_str() {
            "--mesh" => mesh_path = Some(PathBuf::from(take(args, &mut i, "--mesh")?)),
            "--dC" => d_c = parse_f64(take(args, &mut i, "--dC")?, "--dC")?,
            "--Cmax" => c_max = Some(parse_f64(take(args, &mut i, "--Cmax")?, "--Cmax")?),
            "--eps" => eps = Some(parse_f64(take(args, &mut i, "--eps")?, "--eps")?),
            "--tau" => tau = Some(parse_f64(take(args, &mut i, "--tau")?, "--tau")?),
            "--stop-tol" => stop_tol = Some(parse_f64(take(args, &mut i, "--stop-tol")?, "--stop-tol")?),
            "--max-steps" => max_steps = Some(parse_usize(take(args, &mut i, "--max-steps")?, "--max-steps")?),
            "--pretty" => pretty = true,
            "--out" => out = Some(PathBuf::from(take(args, &mut i, "--out")?)),
            other => return Err(usage_err(format!("unknown flag `{other}` for continue"))),
        }
        i += 1;
    }
    let mesh_path = required(mesh_path, "--mesh")?;
    let c_max = required(c_max, "--Cmax")?;
    let out = required(out, "--out")?;

    let mesh = load_mesh_arg(&mesh_path)?;
    let mut base = ProblemSpec::defaults(ProblemKind::Bratu, &mesh).map_err(internal)?;
    if let Some(v) = eps {
        base.eps = v;
    }
    if let Some(v) = tau {
        base.tau = v;
    }
    if let Some(v) = stop_tol {
        base.stop_tol = v;
    }
    if let Some(v) = max_steps {
        base.max_steps = v;
    }
    base.c_target = d_c.max(f64::MIN_POSITIVE);
    base.validate().map_err(validation)?;
    if !(d_c > 0.0) || !(c_max > d_c) {
        return Err(usage_err("continuation needs 0 < dC < Cmax"));
    }

    let points = continue_in_c(&mesh, &base, d_c, c_max).map_err(internal)?;
    emit_bifurcation(&points, &out).map_err(internal)?;
    if pretty {
        for p in &points {
            println!(
                "C = {:7.3}: lambda_h = {:9.5}, min u_h = {:9.5}, {} steps{}",
                p.c,
                p.result.lambda_rayleigh,
                p.result.min_u,
                p.result.steps,
                if p.result.converged { "" } else { "  (not converged)" }
            );
        }
    }
    let complete = points.last().map(|p| p.result.converged).unwrap_or(false);
    if let Some(last_converged) = points.iter().rev().find(|p| p.result.converged) {
        println!(
            "last converged: C = {}, lambda = {}, min_u = {}",
            fmt_f64(last_converged.c),
            fmt_f64(last_converged.result.lambda_rayleigh),
            fmt_f64(last_converged.result.min_u)
        );
    }
    Ok(if complete { 0 } else { 3 })
}
