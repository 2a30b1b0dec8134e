//! Acceptance suite: one test per criterion, each printing a PASS line with the
//! measured values (visible with `--nocapture`). Reference values come from the
//! radial shooting oracles and from tabulated reference runs of this method on
//! the same domains; tolerances are pinned in the asserts.
//!
//! Full finest-grid runs (h = 1/160) are out of desk scale by design; the
//! h <= 1/40 family plus the rate extrapolation in criterion 3 stands in.

use std::sync::{Arc, OnceLock};

use ma_eigen::fem::{elliptic_step, lumped_inner, centerline_profile, NodalField};
use ma_eigen::hessian::{discrete_hessian, SymTensorField};
use ma_eigen::mesh::{generate_mesh, DomainSpec};
use ma_eigen::oracle;
use ma_eigen::solver::{
    bratu_constraint, power_constraint, project_bratu_sqp, project_linear, project_power_sqp,
    solve_from_scratch, ProblemKind, ProblemSpec, SolveResult,
};
use ma_eigen::tensor::SymTensor2;
use ma_eigen::Point2;

fn within(value: f64, reference: f64, rel_tol: f64) -> bool {
    (value - reference).abs() <= rel_tol * reference.abs()
}

struct LinearRun {
    nominal: f64,
    result: SolveResult,
    l2_error: f64,
}

/// The quadratic-constraint disk family at nominal resolutions 1/10, 1/20, 1/40,
/// solved once and shared between criteria 2 and 3.
fn linear_family() -> &'static Vec<LinearRun> {
    static RUNS: OnceLock<Vec<LinearRun>> = OnceLock::new();
    RUNS.get_or_init(|| {
        let radial = oracle::shoot_maev(oracle::DEFAULT_GRID, oracle::DEFAULT_TOL).unwrap();
        [0.1, 0.05, 0.025]
            .iter()
            .map(|&nominal| {
                let mesh = Arc::new(generate_mesh(&DomainSpec::unit_disk(), nominal).unwrap());
                let spec = ProblemSpec::defaults(ProblemKind::Linear, &mesh).unwrap();
                let result = solve_from_scratch(&mesh, &spec).unwrap();
                let exact = NodalField::interpolate(&mesh, |p| radial.eval(p.x.hypot(p.y)));
                let l2_error = result.u.increment_norm(&exact).unwrap();
                LinearRun { nominal, result, l2_error }
            })
            .collect()
    })
}

struct Rng(u64);
impl Rng {
    fn next_f64(&mut self) -> f64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        (self.0.wrapping_mul(0x2545F4914F6CDD1D) >> 11) as f64 / (1u64 << 53) as f64
    }
    fn sym(&mut self, s: f64) -> f64 {
        s * (2.0 * self.next_f64() - 1.0)
    }
}

#[test]
fn criterion_1_radial_oracles() {
    let maev = oracle::shoot_maev(oracle::DEFAULT_GRID, oracle::DEFAULT_TOL).unwrap();
    assert!((maev.lambda - 5.7183).abs() <= 1e-3, "maev lambda {}", maev.lambda);
    assert!((maev.u0 - (-1.0238)).abs() <= 1e-3, "maev u0 {}", maev.u0);

    let maevd = oracle::shoot_maevd(oracle::DEFAULT_GRID, oracle::DEFAULT_TOL).unwrap();
    assert!((maevd.lambda - 7.4897).abs() <= 1e-3, "maevd lambda {}", maevd.lambda);
    assert!((maevd.u0 - (-1.1585)).abs() <= 1e-3, "maevd u0 {}", maevd.u0);

    let fold = oracle::bratu_turning_point(oracle::DEFAULT_GRID, oracle::DEFAULT_TOL).unwrap();
    assert!((fold.lambda - 3.7617).abs() <= 2e-3, "fold lambda {}", fold.lambda);
    assert!((fold.u0 - (-2.5950)).abs() <= 5e-3, "fold u0 {}", fold.u0);
    assert!(
        (fold.constraint_value - 10.228).abs() <= 0.05,
        "fold C {}",
        fold.constraint_value
    );
    println!(
        "criterion 1 (radial oracles): PASS — maev ({:.4}, {:.4}), maevd ({:.4}, {:.4}), fold ({:.4}, {:.4}, C {:.3})",
        maev.lambda, maev.u0, maevd.lambda, maevd.u0, fold.lambda, fold.u0, fold.constraint_value
    );
}

#[test]
fn criterion_2_table1_reproduction() {
    let runs = linear_family();
    let references = [(3.64, -0.9639, 6.18e-2), (4.52, -0.9857, 4.74e-2)];
    for (run, (lambda_ref, min_ref, l2_ref)) in runs.iter().take(2).zip(references) {
        assert!(run.result.converged, "not converged at {}", run.nominal);
        assert!(
            within(run.result.lambda_rayleigh, lambda_ref, 0.05),
            "lambda {} vs {lambda_ref} at nominal {}",
            run.result.lambda_rayleigh,
            run.nominal
        );
        assert!(
            within(run.result.min_u, min_ref, 0.02),
            "min_u {} vs {min_ref} at nominal {}",
            run.result.min_u,
            run.nominal
        );
        assert!(
            within(run.l2_error, l2_ref, 0.25),
            "L2 error {} vs {l2_ref} at nominal {}",
            run.l2_error,
            run.nominal
        );
        // scheme invariants on the converged pair
        assert!(run.result.constraint_residual <= 1e-12);
        assert!(run.result.p.min_eigenvalue() >= -1e-13);
        assert!(run.result.sign_fix_max_change <= 1e-12);
        // the increment history decays monotonically over the final stretch
        // (up to 100 steps; short runs only have their second half as tail)
        let hist = &run.result.residual_history;
        let tail_len = 100.min(hist.len() / 2);
        let tail = &hist[hist.len() - tail_len..];
        assert!(tail.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9)));
    }

    // centerline profile of the 1/20 run is symmetric: compare each sample
    // against the piecewise-linear profile evaluated at the mirrored abscissa
    let run20 = &runs[1];
    let profile = centerline_profile(&run20.result.u, 0.0);
    let interp = |x: f64| -> f64 {
        let i = profile.partition_point(|&(px, _)| px < x).clamp(1, profile.len() - 1);
        let (x0, v0) = profile[i - 1];
        let (x1, v1) = profile[i];
        v0 + (x - x0) / (x1 - x0) * (v1 - v0)
    };
    for &(x, v) in &profile {
        if x >= 0.0 {
            assert!((interp(-x) - v).abs() <= 1e-3, "asymmetry at x = {x}");
        }
    }
    println!(
        "criterion 2 (disk table, quadratic constraint): PASS — lambda ({:.4}, {:.4}), min_u ({:.5}, {:.5}), L2 ({:.3e}, {:.3e})",
        runs[0].result.lambda_rayleigh,
        runs[1].result.lambda_rayleigh,
        runs[0].result.min_u,
        runs[1].result.min_u,
        runs[0].l2_error,
        runs[1].l2_error
    );
}

#[test]
fn criterion_3_convergence_rates() {
    let runs = linear_family();
    let rate_coarse = (runs[0].l2_error / runs[1].l2_error).log2();
    let rate_fine = (runs[1].l2_error / runs[2].l2_error).log2();
    assert!(
        rate_fine > rate_coarse,
        "L2 rate does not increase: {rate_coarse} -> {rate_fine}"
    );
    assert!(
        (0.45..=1.3).contains(&rate_fine),
        "finest observed L2 rate {rate_fine} outside the expected window"
    );

    // least-squares fit lambda_h ~ lambda - c h over the three levels
    let n = runs.len() as f64;
    let mean_h: f64 = runs.iter().map(|r| r.nominal).sum::<f64>() / n;
    let mean_l: f64 = runs.iter().map(|r| r.result.lambda_rayleigh).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for r in runs {
        num += (r.nominal - mean_h) * (r.result.lambda_rayleigh - mean_l);
        den += (r.nominal - mean_h) * (r.nominal - mean_h);
    }
    let slope = num / den;
    let extrapolated = mean_l - slope * mean_h;
    assert!(slope < 0.0, "lambda_h should increase as h decreases");
    assert!(
        (extrapolated - 5.7183).abs() <= 0.3,
        "extrapolated lambda {extrapolated}"
    );

    // iteration counts follow the reference scaling: roughly x3 per halving
    let s1 = runs[1].result.steps as f64 / runs[0].result.steps as f64;
    let s2 = runs[2].result.steps as f64 / runs[1].result.steps as f64;
    for s in [s1, s2] {
        assert!((2.0..=4.5).contains(&s), "step-count growth per halving {s}");
    }
    println!(
        "criterion 3 (rates): PASS — L2 rates {rate_coarse:.2} -> {rate_fine:.2}, extrapolated lambda {extrapolated:.3}, step growth ({s1:.2}, {s2:.2})"
    );
}

#[test]
fn criterion_4_table3_power() {
    let mesh = Arc::new(generate_mesh(&DomainSpec::unit_disk(), 0.05).unwrap());
    let mut spec = ProblemSpec::defaults(ProblemKind::Power, &mesh).unwrap();
    spec.stop_tol = 1e-6;
    let result = solve_from_scratch(&mesh, &spec).unwrap();
    assert!(result.converged);
    assert!(
        within(result.lambda_rayleigh, 6.13, 0.05),
        "lambda {}",
        result.lambda_rayleigh
    );
    assert!(within(result.min_u, -1.1405, 0.02), "min_u {}", result.min_u);
    let sqp_average = result.sqp_iterations as f64 / result.steps as f64;
    assert!(sqp_average <= 20.0, "average SQP iterations {sqp_average}");
    assert!(result.constraint_residual <= 10.0 * spec.sqp_tol);
    assert!(result.sign_fix_max_change <= 1e-12);
    println!(
        "criterion 4 (disk table, power constraint): PASS — lambda {:.4}, min_u {:.5}, SQP {:.1}/step",
        result.lambda_rayleigh, result.min_u, sqp_average
    );
}

/// The exponential-constraint sweep at the published protocol for the 1/20 row
/// (`eps = tau = (1/20)^2`, increment 0.5, stopping 1e-7), shared between the
/// two criterion-5 tests.
fn bratu_sweep_to_12() -> &'static Vec<ma_eigen::continuation::SweepPoint> {
    static SWEEP: OnceLock<Vec<ma_eigen::continuation::SweepPoint>> = OnceLock::new();
    SWEEP.get_or_init(|| {
        let mesh = Arc::new(generate_mesh(&DomainSpec::unit_disk(), 0.05).unwrap());
        let mut base = ProblemSpec::defaults(ProblemKind::Bratu, &mesh).unwrap();
        base.eps = 0.0025;
        base.tau = 0.0025;
        base.max_steps = 40_000;
        ma_eigen::continuation::continue_in_c(&mesh, &base, 0.5, 12.0).unwrap()
    })
}

#[test]
fn criterion_5_table5_bratu() {
    let sweep = bratu_sweep_to_12();
    let at105 = sweep
        .iter()
        .find(|p| (p.c - 10.5).abs() < 1e-9)
        .expect("sweep lost convergence before C = 10.5");
    assert!(at105.result.converged);
    assert!(
        within(at105.result.lambda_rayleigh, 2.92, 0.07),
        "lambda {}",
        at105.result.lambda_rayleigh
    );
    assert!(
        within(at105.result.min_u, -2.6043, 0.02),
        "min_u {}",
        at105.result.min_u
    );
    assert!(at105.result.constraint_residual <= 10.0 * 1e-10);
    assert!(at105.result.sign_fix_max_change <= 1e-12);
    // the discrete fold: lambda(C) peaks before the end of the sweep, at a
    // value consistent with the turning point scaled by the h-deficit
    let peak = sweep
        .iter()
        .max_by(|a, b| {
            a.result
                .lambda_rayleigh
                .partial_cmp(&b.result.lambda_rayleigh)
                .unwrap()
        })
        .unwrap();
    assert!(peak.c < 12.0 && peak.c > 8.0, "lambda peak at C = {}", peak.c);
    println!(
        "criterion 5 (disk table, exponential constraint): PASS — lambda {:.4}, min_u {:.5} at C = 10.5; lambda peak {:.4} at C = {}",
        at105.result.lambda_rayleigh, at105.result.min_u, peak.result.lambda_rayleigh, peak.c
    );
}

#[test]
fn criterion_5_sweep_loses_convergence_by_c12() {
    // As stated, the sweep is expected to lose convergence at some C <= 12,
    // "consistent with the fold at C ~ 10.228". Measurements disagree: the
    // constraint parameterizes the branch monotonically through the fold (the
    // reference tables themselves report converged solutions at C = 10.5 >
    // 10.228 for every h), the constrained flow shows no critical slowing near
    // the fold, and on this mesh convergence persists to C ~ 24.5. The
    // criterion is asserted literally and is expected to fail; see the
    // decisions ledger for the full analysis.
    let sweep = bratu_sweep_to_12();
    let lost = sweep.iter().any(|p| !p.result.converged && p.c <= 12.0);
    if !lost {
        println!(
            "criterion 5 (sweep termination): FAIL — all {} sweep points up to C = 12 converged",
            sweep.len()
        );
    }
    assert!(
        lost,
        "expected the continuation sweep to lose convergence at some C <= 12; \
         all points converged (see decisions ledger: the branch has no fold in C)"
    );
}

#[test]
fn criterion_6_superellipse_regression() {
    let domain = DomainSpec::superellipse(2.5, 1.0, Point2::new(0.0, 0.0));
    let mesh = Arc::new(generate_mesh(&domain, 0.1).unwrap());
    let spec = ProblemSpec::defaults(ProblemKind::Linear, &mesh).unwrap();
    let result = solve_from_scratch(&mesh, &spec).unwrap();
    assert!(result.converged);
    assert!(
        within(result.lambda_rayleigh, 3.07, 0.07),
        "lambda {}",
        result.lambda_rayleigh
    );
    assert!(within(result.min_u, -0.9286, 0.03), "min_u {}", result.min_u);
    println!(
        "criterion 6 (superellipse regression): PASS — lambda {:.4}, min_u {:.5}",
        result.lambda_rayleigh, result.min_u
    );
}

#[test]
fn criterion_7_property_suites() {
    // PSD projection: idempotence, PSD output, fixed points, on 10^4 tensors
    let mut rng = Rng(0x5eed);
    for _ in 0..10_000 {
        let t = SymTensor2::new(rng.sym(4.0), rng.sym(4.0), rng.sym(4.0));
        let p = t.project_psd();
        let scale = p.frobenius_norm().max(1.0);
        assert!(p.min_eigenvalue() >= -1e-14 * scale);
        assert!(p.project_psd().sub(p).frobenius_norm() <= 1e-13 * scale);
        if t.min_eigenvalue() >= 0.0 {
            assert_eq!(p, t);
        }
        // cofactor identity cof(t) t = det(t) I
        let c = t.cofactor();
        let d = t.det();
        let off = c.a11 * t.a12 + c.a12 * t.a22;
        assert!((c.a11 * t.a11 + c.a12 * t.a12 - d).abs() <= 1e-13 * d.abs().max(1.0));
        assert!(off.abs() <= 1e-13 * t.frobenius_norm().powi(2).max(1.0));
    }

    let mesh = Arc::new(generate_mesh(&DomainSpec::unit_disk(), 0.125).unwrap());

    // lumped-norm normalization to 1e-12
    let mut rng = Rng(0xa5a5);
    for _ in 0..100 {
        let mut u = NodalField::zero(&mesh);
        for &v in &mesh.interior_vertices {
            u.values[v] = rng.sym(2.0) - 0.5;
        }
        let (projected, _) = project_linear(&u, 0.01, 2).unwrap();
        assert!((projected.norm_0h() - 1.0).abs() <= 1e-12);
    }

    // SQP fixed points: fields already on the manifold stay put
    let mut on_manifold = NodalField::zero(&mesh);
    for &v in &mesh.interior_vertices {
        let p = mesh.vertices[v];
        on_manifold.values[v] = p.x * p.x + p.y * p.y - 1.0;
    }
    let mut power_field = on_manifold.clone();
    power_field.scale(power_constraint(&power_field, 2).powf(-1.0 / 3.0));
    let (projected, iters) = project_power_sqp(&power_field, &power_field, 2, 1e-10, 50, 1.0).unwrap();
    assert_eq!(iters, 1);
    assert!((power_constraint(&projected, 2) - 1.0).abs() <= 1e-9);
    let c = bratu_constraint(&on_manifold);
    let (projected, iters) = project_bratu_sqp(&on_manifold, &on_manifold, c, 1e-10, 50).unwrap();
    assert_eq!(iters, 1);
    assert!((bratu_constraint(&projected) - c).abs() <= 1e-9);

    // elliptic-step contraction of the lumped norm on 100 random fields
    let eps = mesh.h * mesh.h;
    let mut rng = Rng(17);
    for _ in 0..100 {
        let mut u = NodalField::zero(&mesh);
        for &v in &mesh.interior_vertices {
            u.values[v] = rng.sym(1.0);
        }
        let p = SymTensorField::from_fn(&mesh, |_| {
            SymTensor2::new(rng.sym(2.0), rng.sym(2.0), rng.sym(2.0)).project_psd()
        });
        let out = elliptic_step(&p, &u, eps, eps).unwrap();
        assert!(out.norm_0h() <= u.norm_0h() * (1.0 + 1e-11));
    }

    // splitting iteration vs dense Jacobi eigensolver, 100 matrices up to n = 8
    let mut rng = Rng(2024);
    let mut done = 0;
    while done < 100 {
        let n = 2 + done % 7;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = rng.sym(1.0);
                a[i * n + j] = v;
                a[j * n + i] = v;
            }
        }
        let eig = oracle::dense::sym_eigenvalues(n, &a);
        if eig[1] - eig[0] < 0.05 {
            continue; // near-degenerate ground states converge arbitrarily slowly
        }
        done += 1;
        let tau = 0.5 / eig[0].abs().max(1.0);
        let x0: Vec<f64> = (0..n).map(|_| rng.sym(1.0) + 0.1).collect();
        let (_, lambda) = oracle::linear_eigen_split(n, &a, &x0, tau, 200_000, 1e-14).unwrap();
        assert!(
            (lambda - eig[0]).abs() <= 1e-10 * eig[0].abs().max(1.0),
            "{lambda} vs {}",
            eig[0]
        );
    }

    // discrete Hessian of the interpolated paraboloid approaches the identity;
    // measured on a fixed annulus clear of the boundary layer and of the
    // mesh-center hub (whose local pattern bias rides along with the hub as
    // the mesh refines instead of shrinking in place)
    let deviation = |target: f64| {
        let mesh = Arc::new(generate_mesh(&DomainSpec::unit_disk(), target).unwrap());
        let u = NodalField::interpolate(&mesh, |p| {
            0.5 * (p.x * p.x + p.y * p.y - 1.0).min(0.0)
        });
        let hess = discrete_hessian(&mesh, &u, 1.0).unwrap();
        let mut worst: f64 = 0.0;
        for (k, p) in mesh.vertices.iter().enumerate() {
            let r = p.x.hypot(p.y);
            if !(0.15..=0.7).contains(&r) {
                continue;
            }
            let d = hess.values[k].sub(SymTensor2::identity());
            worst = worst.max(d.a11.abs()).max(d.a12.abs()).max(d.a22.abs());
        }
        worst
    };
    let coarse = deviation(0.05);
    let fine = deviation(0.025);
    assert!(coarse <= 0.2, "paraboloid Hessian deviation {coarse} at h = 1/20");
    assert!(fine < coarse, "no refinement decrease: {coarse} -> {fine}");

    // lumped inner product on constants recovers the mesh area
    let one = NodalField::constant(&mesh, 1.0);
    assert!((lumped_inner(&one, &one).unwrap() - mesh.area).abs() <= 1e-13 * mesh.area);

    println!(
        "criterion 7 (property suites): PASS — PSD/cofactor on 10^4 tensors, projections, contraction, eigen split, Hessian refinement {coarse:.3} -> {fine:.3}"
    );
}
