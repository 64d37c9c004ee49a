//! End-to-end acceptance suite. Runs without the libtest harness so that each
//! criterion prints exactly one PASS/FAIL line.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use hypdel::feasibility::DEFAULT_EPS_MIN;
use hypdel::functionals::{
    check_target, edge_and_vertex_functionals, feasibility_bruteforce, formula_sett,
    DEFAULT_BRUTE_FORCE_MAX_FACES,
};
use hypdel::hyperbolic::to_poincare;
use hypdel::lobachevsky::lobachevsky;
use hypdel::realization::{
    circumcircle_angles, expected_top_dihedral, holonomy_report, prism_from_disk,
};
use hypdel::volume::{
    along_basis, centred_triangle, gradient, objective_and_gradient, objective_value,
    truncated_length, truncated_length_decoupled, AngleData, HessianMode,
};
use hypdel::{
    certify, develop, instances, margin_lp, uniformize, uniformize_from, AngleSystem,
    ConformalVector, EdgeTarget, LpVerdict, SolveOptions, SurfaceComplex,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn symmetric_exact_solve() -> Outcome {
    let c = instances::one_vertex_genus(2);
    let p = instances::symmetric_target(&c);
    let start = Instant::now();
    let u = uniformize(&p, &c, &SolveOptions::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let angle_err = u
        .angles
        .values()
        .iter()
        .fold(0.0f64, |m, a| m.max((a - PI / 9.0).abs()));
    let (cs, sn) = ((PI / 9.0).cos(), (PI / 9.0).sin());
    let expected = ((cs + cs * cs) / (sn * sn)).acosh();
    let len_err = u
        .lengths
        .iter()
        .fold(0.0f64, |m, l| m.max((l - expected).abs()));
    ensure!(
        c.edge_count() == 9 && u.angles.len() == 18,
        "wrong instance size"
    );
    ensure!(angle_err <= 1e-9, "corner error {angle_err:e}");
    ensure!(
        len_err <= 1e-8,
        "length error {len_err:e} (expected {expected})"
    );
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!(
        "corner err {angle_err:.1e}, length {expected:.5} err {len_err:.1e}, {elapsed:?}"
    ))
}

/// 100 seeded round-trip instances with 6 to 40 faces.
fn round_trip_instances() -> Vec<(SurfaceComplex, EdgeTarget, AngleSystem)> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    (0..100)
        .map(|_| {
            let c = instances::random_surface(&mut rng, 6..=40);
            let (p, x) = instances::round_trip_target(&c, &mut rng);
            (c, p, x)
        })
        .collect()
}

fn circumcircle_angles_match() -> Outcome {
    let mut worst = 0.0f64;
    for (n, (c, p, _)) in round_trip_instances().iter().enumerate() {
        let u = uniformize(p, c, &SolveOptions::default()).map_err(|e| format!("#{n}: {e}"))?;
        let layout = develop(&u, c, &c.dual_spanning_tree(0)).map_err(|e| format!("#{n}: {e}"))?;
        let angles = circumcircle_angles(&layout, c).map_err(|e| format!("#{n}: {e}"))?;
        let expected: Vec<f64> = p.psi().iter().map(|psi| PI - psi).collect();
        let err = max_abs_diff(&angles, &expected);
        ensure!(err <= 1e-8, "instance {n}: angle error {err:e}");
        let h = holonomy_report(&layout, &u, c);
        ensure!(
            h.max_edge_mismatch() <= 1e-9,
            "instance {n}: non-tree edges disagree by {:e}",
            h.max_edge_mismatch()
        );
        worst = worst.max(err);
    }
    Ok(format!("100 instances, worst angle error {worst:.1e}"))
}

fn uniqueness() -> Outcome {
    let opts = SolveOptions::default();
    let mut worst = 0.0f64;
    for (n, (c, p, x)) in round_trip_instances().iter().enumerate() {
        let from_lp = uniformize(p, c, &opts).map_err(|e| format!("#{n}: {e}"))?;
        let from_sample = uniformize_from(x, p, c, &opts).map_err(|e| format!("#{n}: {e}"))?;
        ensure!(
            x.values() != from_lp.angles.values(),
            "instance {n}: starts coincide"
        );
        let err = max_abs_diff(from_lp.angles.values(), from_sample.angles.values());
        ensure!(err <= 1e-7, "instance {n}: solutions differ by {err:e}");
        ensure!(
            certify(&from_lp, c, opts.tol).passed(),
            "instance {n}: not certified"
        );
        worst = worst.max(err);
    }
    Ok(format!(
        "100 instances, worst corner difference {worst:.1e}"
    ))
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut total, mut infeasible) = (0, 0);
    while total < 240 {
        let c = instances::random_surface(&mut rng, 6..=12);
        let p = instances::random_delaunay_target(&c, &mut rng);
        let lp = margin_lp(&p, &c, DEFAULT_EPS_MIN).map_err(|e| e.to_string())?;
        let bf = feasibility_bruteforce(&p, &c, DEFAULT_BRUTE_FORCE_MAX_FACES)
            .map_err(|e| e.to_string())?;
        ensure!(
            lp.status != LpVerdict::Degenerate,
            "target {total}: degenerate margin"
        );
        ensure!(
            bf.feasible == (lp.status == LpVerdict::Feasible),
            "target {total}: brute force {} vs LP {:?} (eps* {:e})",
            bf.feasible,
            lp.status,
            lp.epsilon_star
        );
        if !bf.feasible {
            let witness = bf.witness.as_ref().ok_or("infeasible without witness")?;
            let mut incident = vec![false; c.edge_count()];
            for &f in witness {
                for e in c.face_edges(f) {
                    incident[e] = true;
                }
            }
            let theta = p.theta();
            let sum: f64 = (0..c.edge_count())
                .filter(|&e| incident[e])
                .map(|e| theta[e])
                .sum();
            ensure!(
                !witness.is_empty() && sum <= PI * witness.len() as f64,
                "target {total}: witness {witness:?} does not violate the subset bound"
            );
            infeasible += 1;
        }
        total += 1;
    }
    ensure!(infeasible >= 10, "only {infeasible} infeasible targets");
    Ok(format!(
        "{total} targets agree, {infeasible} infeasible with verified witnesses"
    ))
}

fn gradient_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let h = 1e-5;
    let mut worst = 0.0f64;
    let mut points = 0;
    while points < 1000 {
        let c = instances::random_surface(&mut rng, 6..=20);
        for _ in 0..10 {
            let x = instances::sample_theta_corners(c.face_count(), &mut rng);
            let g = gradient(&x, &c);
            let fd: Vec<f64> = (0..c.edge_count())
                .map(|e| {
                    (objective_value(&along_basis(&x, &c, e, h))
                        - objective_value(&along_basis(&x, &c, e, -h)))
                        / (2.0 * h)
                })
                .collect();
            let scale = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let rel = max_abs_diff(&g, &fd) / scale;
            ensure!(rel <= 1e-6, "point {points}: relative error {rel:e}");
            worst = worst.max(rel);
            points += 1;
        }
    }
    let mut formula_gap = 0.0f64;
    for _ in 0..1000 {
        let x = instances::sample_theta_corners(1, &mut rng);
        let d = AngleData(x.face(0));
        for side in 0..3 {
            let a = truncated_length(d, side).map_err(|e| e.to_string())?;
            let b = truncated_length_decoupled(d, side).map_err(|e| e.to_string())?;
            formula_gap = formula_gap.max((a - b).abs());
        }
    }
    ensure!(
        formula_gap <= 1e-10,
        "truncated length forms differ by {formula_gap:e}"
    );
    Ok(format!(
        "{points} points, worst relative error {worst:.1e}; length forms agree to {formula_gap:.1e}"
    ))
}

fn concavity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut highest = f64::NEG_INFINITY;
    for n in 0..100 {
        let c = instances::random_surface(&mut rng, 6..=30);
        let x = instances::sample_theta_corners(c.face_count(), &mut rng);
        let obj = objective_and_gradient(&x, &c, Some(HessianMode::Analytic))
            .map_err(|e| e.to_string())?;
        let hess = obj.hess.ok_or("no Hessian")?.to_dense();
        let top = hess.symmetric_eigen().eigenvalues.max();
        ensure!(top < 0.0, "point {n}: largest eigenvalue {top:e}");
        highest = highest.max(top);
    }
    Ok(format!("100 points, largest eigenvalue {highest:.3e}"))
}

fn identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut subset_gap, mut cone_gap, mut move_gap) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..1000 {
        let c = instances::random_surface(&mut rng, 6..=20);
        let x = instances::sample_theta_corners(c.face_count(), &mut rng);
        let subset: Vec<usize> = loop {
            let s: Vec<usize> = (0..c.face_count()).filter(|_| rng.gen_bool(0.4)).collect();
            if !s.is_empty() {
                break s;
            }
        };
        let (lhs, rhs) = formula_sett(&x, &subset, &c).map_err(|e| e.to_string())?;
        subset_gap = subset_gap.max((lhs - rhs).abs());

        let ev = edge_and_vertex_functionals(&x, &c).map_err(|e| e.to_string())?;
        let cones = check_target(&ev.psi_of_x, &c)
            .map_err(|e| e.to_string())?
            .cone_angles;
        cone_gap = cone_gap.max(max_abs_diff(&cones, &ev.r_v));

        let b = ConformalVector(
            (0..c.edge_count())
                .map(|_| rng.gen_range(-0.05..0.05))
                .collect(),
        );
        let y = hypdel::functionals::conformal_move(&x, &b, &c).map_err(|e| e.to_string())?;
        let moved = edge_and_vertex_functionals(&y, &c).map_err(|e| e.to_string())?;
        move_gap = move_gap
            .max(max_abs_diff(moved.psi_of_x.psi(), ev.psi_of_x.psi()))
            .max(max_abs_diff(&moved.r_v, &ev.r_v));
    }
    ensure!(subset_gap <= 1e-12, "subset identity off by {subset_gap:e}");
    ensure!(cone_gap <= 1e-12, "cone angles off by {cone_gap:e}");
    ensure!(
        move_gap <= 1e-12,
        "conformal move changed Ψ by {move_gap:e}"
    );
    Ok(format!(
        "1000 samples: subset {subset_gap:.1e}, cone {cone_gap:.1e}, conformal {move_gap:.1e}"
    ))
}

/// `-∫₀^θ ln(2 sin t) dt` by adaptive Simpson on `ln(sin t / t)`, with the
/// `ln(2t)` part integrated in closed form.
fn lobachevsky_quadrature(theta: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
    }
    fn recurse(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (left, right) = (simpson(f, a, m), simpson(f, m, b));
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            recurse(f, a, m, left, tol / 2.0, depth - 1)
                + recurse(f, m, b, right, tol / 2.0, depth - 1)
        }
    }
    let smooth = |t: f64| if t == 0.0 { 0.0 } else { (t.sin() / t).ln() };
    let whole = simpson(&smooth, 0.0, theta);
    -(theta * (2.0 * theta).ln() - theta + recurse(&smooth, 0.0, theta, whole, 1e-15, 50))
}

fn prism_geometry() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for n in 0..100 {
        let d = loop {
            let d: [f64; 3] = [0; 3].map(|_| rng.gen_range(0.02..PI));
            if d.iter().sum::<f64>() < PI - 0.02 {
                break d;
            }
        };
        let prism = prism_from_disk(&centred_triangle(d).map(|p| to_poincare(&p)));
        for i in 0..3 {
            let vertical = (prism.vertical[i] - d[i]).abs();
            let top = (prism.top[i] - expected_top_dihedral(d, i)).abs();
            ensure!(
                vertical <= 1e-9 && top <= 1e-9,
                "face {n} {d:?}: {vertical:e}, {top:e}"
            );
            worst = worst.max(vertical).max(top);
        }
    }
    let mut lambda_gap = 0.0f64;
    for i in 1..400 {
        let theta = i as f64 * PI / 400.0;
        lambda_gap = lambda_gap.max((lobachevsky(theta) - lobachevsky_quadrature(theta)).abs());
    }
    let at_sixth = lobachevsky(PI / 6.0);
    lambda_gap = lambda_gap.max((at_sixth - lobachevsky_quadrature(PI / 6.0)).abs());
    ensure!(
        lambda_gap <= 1e-10,
        "Λ differs from quadrature by {lambda_gap:e}"
    );
    ensure!((at_sixth - 0.5074708).abs() < 5e-8, "Λ(π/6) = {at_sixth}");
    Ok(format!(
        "100 faces, dihedral error {worst:.1e}; Λ gap {lambda_gap:.1e}, Λ(π/6) = {at_sixth:.7}"
    ))
}

fn scale() -> Outcome {
    let (c, p) = instances::seeded_round_trip(480, 2, 480);
    let start = Instant::now();
    let u = uniformize(&p, &c, &SolveOptions::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure!(u.residual <= 1e-10, "residual {:e}", u.residual);
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!(
        "{} faces, residual {:.1e} after {} iterations in {elapsed:.2?}",
        c.face_count(),
        u.residual,
        u.iterations
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("symmetric exact solve", symmetric_exact_solve),
        (
            "circumcircle angles on round trips",
            circumcircle_angles_match,
        ),
        ("uniqueness from two starts", uniqueness),
        ("LP and subset oracle agree", oracle_equivalence),
        ("gradient exactness", gradient_exactness),
        ("concavity", concavity),
        ("linear identities", identities),
        ("prism geometry and Λ", prism_geometry),
        ("480-face solve", scale),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(msg) => println!("criterion {} PASS {name}: {msg}", k + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {msg}", k + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
