//! Newton ascent of the volume objective over a conformal class.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::complex::SurfaceComplex;
use crate::error::{check_len, Error, Result};
use crate::feasibility::{margin_lp, LpVerdict, DEFAULT_EPS_MIN};
use crate::functionals::{add_basis_vector, psi_map, AngleSystem, EdgeTarget};
use crate::volume::{gradient, objective_and_gradient, objective_value, side_lengths, HessianMode};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    /// Stop once every edge has the same length in both faces to this
    /// tolerance.
    pub tol: f64,
    pub max_iter: usize,
    pub hessian: HessianMode,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 200,
            hessian: HessianMode::Analytic,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct UniformSolution {
    pub angles: AngleSystem,
    /// Edge lengths, the mean of the two one-sided values.
    pub lengths: Vec<f64>,
    /// Largest one-sided length mismatch over all edges.
    pub residual: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub objective: f64,
    /// `H` at the start point and after each accepted step.
    pub history: Vec<f64>,
    pub target_echo: EdgeTarget,
}

const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 60;

/// Per-edge lengths and the largest disagreement between the two faces.
pub fn edge_lengths(x: &AngleSystem, c: &SurfaceComplex) -> (Vec<f64>, f64) {
    let side = side_lengths(x);
    let mut residual: f64 = 0.0;
    let lengths = (0..c.edge_count())
        .map(|e| {
            let [s, t] = c.edge_sides(e).map(|s| side[s.slot()]);
            residual = residual.max((s - t).abs());
            0.5 * (s + t)
        })
        .collect();
    (lengths, residual)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn step(x: &AngleSystem, c: &SurfaceComplex, dir: &DVector<f64>, t: f64) -> AngleSystem {
    let mut values = x.values().to_vec();
    for (e, &d) in dir.iter().enumerate() {
        if d != 0.0 {
            add_basis_vector(&mut values, c, e, t * d);
        }
    }
    AngleSystem::new(values)
}

/// Backtracking along `dir`. Armijo on `H`, except when the predicted gain is
/// below the rounding level of `H`, where a smaller gradient decides.
fn line_search(
    x: &AngleSystem,
    c: &SurfaceComplex,
    value: f64,
    grad: &[f64],
    dir: &DVector<f64>,
) -> Option<(AngleSystem, f64)> {
    let slope: f64 = grad.iter().zip(dir.iter()).map(|(g, d)| g * d).sum();
    if !(slope > 0.0) {
        return None;
    }
    let noise = 1e-13 * value.abs().max(1.0);
    let grad_norm = max_abs(grad);
    let mut t = 1.0;
    for _ in 0..MAX_HALVINGS {
        let cand = step(x, c, dir, t);
        if cand.interior_margin() > 0.0 {
            let h = objective_value(&cand);
            if h >= value + ARMIJO * t * slope {
                return Some((cand, h));
            }
            if t * slope <= noise && max_abs(&gradient(&cand, c)) < grad_norm {
                return Some((cand, h));
            }
        }
        t *= 0.5;
    }
    None
}

/// Maximizes `H` from `x0`, which must be interior with `Ψ(x0) = p`.
pub fn uniformize_from(
    x0: &AngleSystem,
    p: &EdgeTarget,
    c: &SurfaceComplex,
    opts: &SolveOptions,
) -> Result<UniformSolution> {
    check_len(c.corner_count(), x0.len())?;
    check_len(c.edge_count(), p.len())?;
    p.require_delaunay()?;
    let mut x = x0.clone();
    let mut history = Vec::new();
    for iteration in 0..=opts.max_iter {
        let obj = objective_and_gradient(&x, c, Some(opts.hessian))?;
        if history.is_empty() {
            history.push(obj.value);
        }
        let (lengths, residual) = edge_lengths(&x, c);
        if residual <= opts.tol {
            return Ok(UniformSolution {
                gradient_norm: max_abs(&obj.grad),
                angles: x,
                lengths,
                residual,
                iterations: iteration,
                objective: obj.value,
                history,
                target_echo: p.clone(),
            });
        }
        if iteration == opts.max_iter {
            return Err(Error::MaxIterExceeded {
                iterations: iteration,
                residual,
                min_margin: x.interior_margin(),
            });
        }
        let grad = DVector::from_column_slice(&obj.grad);
        let neg_hess = -obj.hess.expect("Hessian requested").to_dense();
        let newton = neg_hess.cholesky().map(|ch| ch.solve(&grad));
        let accepted = newton
            .and_then(|dir| line_search(&x, c, obj.value, &obj.grad, &dir))
            .or_else(|| line_search(&x, c, obj.value, &obj.grad, &grad));
        match accepted {
            Some((next, h)) => {
                x = next;
                history.push(h);
            }
            None => return Err(Error::NumericalBreakdown(iteration)),
        }
    }
    unreachable!("loop returns by max_iter")
}

/// Full pipeline: margin LP for a start point, then Newton ascent.
pub fn uniformize(
    p: &EdgeTarget,
    c: &SurfaceComplex,
    opts: &SolveOptions,
) -> Result<UniformSolution> {
    let lp = margin_lp(p, c, DEFAULT_EPS_MIN)?;
    if lp.status != LpVerdict::Feasible {
        return Err(Error::Infeasible {
            epsilon: lp.epsilon_star,
        });
    }
    uniformize_from(&lp.x_star, p, c, opts)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Edges (or faces, for realizability) that fail the check.
    pub offending: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub checks: Vec<Check>,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

/// Re-checks a solution: gradient at most `10 tol`, negative definite
/// Hessian, `Ψ(u) = p` to `1e-9`, and every face realizable.
pub fn certify(u: &UniformSolution, c: &SurfaceComplex, tol: f64) -> Certificate {
    let x = &u.angles;
    let mut checks = Vec::new();
    if x.len() != c.corner_count() || u.target_echo.len() != c.edge_count() {
        checks.push(Check {
            name: "dimensions",
            value: x.len() as f64,
            tolerance: c.corner_count() as f64,
            passed: false,
            offending: vec![],
        });
        return Certificate { checks };
    }
    let margin = x.interior_margin();
    let bad_faces: Vec<usize> = (0..c.face_count())
        .filter(|&f| !AngleSystem::new(x.face(f).to_vec()).is_interior())
        .collect();
    checks.push(Check {
        name: "realizable",
        value: margin,
        tolerance: 0.0,
        passed: bad_faces.is_empty(),
        offending: bad_faces,
    });
    let psi = psi_map(x, c).expect("dimensions checked");
    let psi_err: Vec<f64> = psi
        .psi()
        .iter()
        .zip(u.target_echo.psi())
        .map(|(a, b)| (a - b).abs())
        .collect();
    checks.push(Check {
        name: "psi_matches_target",
        value: max_abs(&psi_err),
        tolerance: 1e-9,
        passed: psi_err.iter().all(|&d| d <= 1e-9),
        offending: (0..psi_err.len())
            .filter(|&e| !(psi_err[e] <= 1e-9))
            .collect(),
    });
    if margin > 0.0 {
        let obj = objective_and_gradient(x, c, Some(HessianMode::Analytic)).expect("interior");
        let limit = 10.0 * tol;
        checks.push(Check {
            name: "gradient",
            value: max_abs(&obj.grad),
            tolerance: limit,
            passed: obj.grad.iter().all(|g| g.abs() <= limit),
            offending: (0..obj.grad.len())
                .filter(|&e| !(obj.grad[e].abs() <= limit))
                .collect(),
        });
        let hess: DMatrix<f64> = obj.hess.expect("requested").to_dense();
        let top = SymmetricEigen::new(hess).eigenvalues.max();
        checks.push(Check {
            name: "hessian_negative_definite",
            value: top,
            tolerance: 0.0,
            passed: top < 0.0,
            offending: vec![],
        });
    }
    Certificate { checks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feasibility::initial_plus_point;
    use crate::functionals::edge_and_vertex_functionals;
    use crate::instances;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn equilateral_length(a: f64) -> f64 {
        ((a.cos() + a.cos().powi(2)) / a.sin().powi(2)).acosh()
    }

    #[test]
    fn symmetric_genus_two() {
        let c = instances::one_vertex_genus(2);
        let p = instances::symmetric_target(&c);
        let u = uniformize(&p, &c, &SolveOptions::default()).unwrap();
        for &a in u.angles.values() {
            assert!((a - PI / 9.0).abs() < 1e-9, "{a}");
        }
        let l = equilateral_length(PI / 9.0);
        for &len in &u.lengths {
            assert!((len - l).abs() < 1e-8);
        }
        assert!(u.residual <= 1e-10);
        assert!(certify(&u, &c, 1e-10).passed());
    }

    #[test]
    fn round_trip_and_uniqueness() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..10 {
            let c = instances::random_surface(&mut rng, 6..=40);
            let (p, x) = instances::round_trip_target(&c, &mut rng);
            let opts = SolveOptions::default();
            let u = uniformize(&p, &c, &opts).unwrap();
            let v = uniformize_from(&x, &p, &c, &opts).unwrap();
            let q = psi_map(&u.angles, &c).unwrap();
            for (a, b) in q.psi().iter().zip(p.psi()) {
                assert!((a - b).abs() < 1e-8);
            }
            for (a, b) in u.angles.values().iter().zip(v.angles.values()) {
                assert!((a - b).abs() < 1e-7, "{a} vs {b}");
            }
            assert!(
                certify(&u, &c, opts.tol).passed(),
                "{:?}",
                certify(&u, &c, opts.tol)
            );
        }
    }

    #[test]
    fn objective_increases_and_class_is_preserved() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let c = instances::random_complex(2, 24, &mut rng);
        let (p, x) = instances::round_trip_target(&c, &mut rng);
        let before = edge_and_vertex_functionals(&x, &c).unwrap();
        let u = uniformize_from(&x, &p, &c, &SolveOptions::default()).unwrap();
        for w in u.history.windows(2) {
            assert!(w[1] >= w[0], "{w:?}");
        }
        let after = edge_and_vertex_functionals(&u.angles, &c).unwrap();
        for (a, b) in before.theta.iter().zip(&after.theta) {
            assert!((a - b).abs() < 1e-11);
        }
        for (a, b) in before.r_v.iter().zip(&after.r_v) {
            assert!((a - b).abs() < 1e-11);
        }
    }

    #[test]
    fn interior_half_target_point_gives_the_same_solution() {
        let c = instances::one_vertex_genus(2);
        let p = EdgeTarget::new(vec![0.3, 0.4, 0.35, 0.33, 0.37, 0.32, 0.36, 0.31, 0.3]);
        let x = initial_plus_point(&p, &c).unwrap();
        assert!(x.is_interior());
        let a = uniformize(&p, &c, &SolveOptions::default()).unwrap();
        let b = uniformize_from(&x, &p, &c, &SolveOptions::default()).unwrap();
        for (s, t) in a.angles.values().iter().zip(b.angles.values()) {
            assert!((s - t).abs() < 1e-7);
        }
    }

    #[test]
    fn infeasible_target_is_reported() {
        let c = instances::two_vertex_genus_two();
        let p = instances::two_vertex_infeasible_target(&c);
        assert!(matches!(
            uniformize(&p, &c, &SolveOptions::default()),
            Err(Error::Infeasible { .. })
        ));
    }

    #[test]
    fn iteration_limit_reports_diagnostics() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let c = instances::random_complex(2, 30, &mut rng);
        let (p, x) = instances::round_trip_target(&c, &mut rng);
        let opts = SolveOptions {
            max_iter: 0,
            ..SolveOptions::default()
        };
        match uniformize_from(&x, &p, &c, &opts) {
            Err(Error::MaxIterExceeded {
                residual,
                min_margin,
                ..
            }) => assert!(residual > 0.0 && min_margin > 0.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn perturbed_solution_fails_certification() {
        let c = instances::one_vertex_genus(2);
        let p = instances::symmetric_target(&c);
        let mut u = uniformize(&p, &c, &SolveOptions::default()).unwrap();
        u.angles.values_mut()[4] += 1e-3;
        let cert = certify(&u, &c, 1e-10);
        let grad = cert.checks.iter().find(|k| k.name == "gradient").unwrap();
        assert!(!grad.passed);
        // Corner 4 belongs to face 1, so only its edges can be named.
        assert!(!grad.offending.is_empty());
        assert!(grad.offending.iter().all(|e| c.face_edges(1).contains(e)));
    }
}
