//! High-accuracy radial reference solutions on the unit disk: the two
//! power-type ground states, the turning point of the exponential branch, and
//! the bifurcation diagram as CSV.

use ma_eigen::io::fmt_f64;
use ma_eigen::oracle;

fn main() -> ma_eigen::Result<()> {
    let out_dir = std::env::current_dir()?.join("examples_out");
    std::fs::create_dir_all(&out_dir)?;

    let maev = oracle::shoot_maev(oracle::DEFAULT_GRID, oracle::DEFAULT_TOL)?;
    println!(
        "det D^2 u = lambda |u|,   int u^2 = 1:  lambda = {:.6}, u(0) = {:.6}",
        maev.lambda, maev.u0
    );
    let maevd = oracle::shoot_maevd(oracle::DEFAULT_GRID, oracle::DEFAULT_TOL)?;
    println!(
        "det D^2 u = lambda |u|^2, int|u|^3 = 1:  lambda = {:.6}, u(0) = {:.6}",
        maevd.lambda, maevd.u0
    );

    let fold = oracle::bratu_turning_point(oracle::DEFAULT_GRID, oracle::DEFAULT_TOL)?;
    println!(
        "exponential branch turning point: lambda = {:.6} at u(0) = {:.6}, C = {:.5}",
        fold.lambda, fold.u0, fold.constraint_value
    );

    let sweep = oracle::bratu_sweep(-6.0, -0.05, 120, oracle::DEFAULT_GRID, oracle::DEFAULT_TOL)?;
    let csv = out_dir.join("radial_bifurcation.csv");
    let mut text = String::from("u0,lambda,C\n");
    for s in &sweep {
        text.push_str(&format!(
            "{},{},{}\n",
            fmt_f64(s.u0),
            fmt_f64(s.lambda),
            fmt_f64(s.constraint_value)
        ));
    }
    std::fs::write(&csv, text)?;
    println!("bifurcation diagram ({} points): {}", sweep.len(), csv.display());
    Ok(())
}
