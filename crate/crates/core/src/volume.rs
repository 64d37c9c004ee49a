//! Hyperbolic triangle lengths, truncated prism edge lengths, ideal prism
//! volumes and the volume objective over a conformal class.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Vector2, Vector3};

use crate::complex::{next, prev, Side, SurfaceComplex};
use crate::error::{check_len, Error, Result};
use crate::functionals::{add_basis_vector, face_values, side_weight, AngleSystem};
use crate::hyperbolic::{self, lift_ideal, Point};
use crate::lobachevsky::lobachevsky;

/// Corner angles `(A, B, C)` of one face, by corner index.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AngleData(pub [f64; 3]);

impl AngleData {
    pub fn is_realizable(&self) -> bool {
        let d = self.0;
        d.iter().all(|&a| a > 0.0 && a < PI) && d.iter().sum::<f64>() < PI
    }

    fn require_realizable(&self) -> Result<()> {
        if self.is_realizable() {
            Ok(())
        } else {
            Err(Error::NotRealizable(self.0))
        }
    }
}

/// `sinh²(a_i / 2)` for the side opposite corner `i`, from
/// `cos A + cos(B + C) = 2 cos(σ/2) cos(ψ_A)`.
fn half_sinh_sq(d: [f64; 3], i: usize) -> f64 {
    let ff = face_values(d);
    (0.5 * ff.sigma).cos() * ff.psi[i].cos() / (d[next(i)].sin() * d[prev(i)].sin())
}

/// Side lengths of the hyperbolic triangle with the given angles, side `i`
/// opposite corner `i`: `cosh a = (cos A + cos B cos C) / (sin B sin C)`.
pub fn triangle_lengths(d: AngleData) -> Result<[f64; 3]> {
    d.require_realizable()?;
    Ok([0, 1, 2].map(|i| 2.0 * half_sinh_sq(d.0, i).sqrt().asinh()))
}

/// Truncated length `a* = 2 ln sinh(a / 2)` of the prism's top edge over side
/// `side`, through the side length.
pub fn truncated_length(d: AngleData, side: usize) -> Result<f64> {
    let a = triangle_lengths(d)?[side];
    Ok(2.0 * (0.5 * a).sinh().ln())
}

/// The same quantity in the decoupled angle/curvature form
/// `a* = ln((cos(A - k) - cos A) / k) + ln(-k) - ln sin B - ln sin C - ln 2`.
pub fn truncated_length_decoupled(d: AngleData, side: usize) -> Result<f64> {
    d.require_realizable()?;
    let [a, b, c] = [side, next(side), prev(side)].map(|i| d.0[i]);
    let k = a + b + c - PI;
    let neg = b.sin().ln() + c.sin().ln() - (((a - k).cos() - a.cos()) / k).ln() - (-k).ln();
    Ok(-neg - std::f64::consts::LN_2)
}

/// Truncated lengths of all three sides (stable form).
fn truncated_lengths_unchecked(d: [f64; 3]) -> [f64; 3] {
    [0, 1, 2].map(|i| half_sinh_sq(d, i).ln())
}

/// Partial derivatives `∂a*_i / ∂A_j`.
fn truncated_length_jacobian(d: [f64; 3]) -> [[f64; 3]; 3] {
    let ff = face_values(d);
    let half_tan_sigma = 0.5 * (0.5 * ff.sigma).tan();
    let mut jac = [[0.0; 3]; 3];
    for i in 0..3 {
        let tan_psi = ff.psi[i].tan();
        for j in 0..3 {
            jac[i][j] = if j == i {
                -half_tan_sigma + 0.5 * tan_psi
            } else {
                -half_tan_sigma - 0.5 * tan_psi - 1.0 / d[j].tan()
            };
        }
    }
    jac
}

/// Triangle with the given angles, centred at its vertex centroid. Vertex `i`
/// carries angle `d[i]`; vertices run counter-clockwise.
pub fn centred_triangle(d: [f64; 3]) -> [Point; 3] {
    let len = [0, 1, 2].map(|i| 2.0 * half_sinh_sq(d, i).sqrt().asinh());
    let p0 = hyperbolic::origin();
    let p1 = hyperbolic::polar_point(0.0, len[2]);
    let p2 = hyperbolic::polar_point(d[0], len[1]);
    let centre = hyperbolic::normalize_point(&(p0 + p1 + p2));
    let m = hyperbolic::recenter(&centre, &p0);
    [m * p0, m * p1, m * p2]
}

/// The six ideal vertices of the prism over a triangle given in the Poincaré
/// disk: upper lifts first, then lower lifts.
pub fn prism_vertices(disk: &[Vector2<f64>; 3]) -> [Vector3<f64>; 6] {
    [
        lift_ideal(&disk[0], 1.0),
        lift_ideal(&disk[1], 1.0),
        lift_ideal(&disk[2], 1.0),
        lift_ideal(&disk[0], -1.0),
        lift_ideal(&disk[1], -1.0),
        lift_ideal(&disk[2], -1.0),
    ]
}

/// Stereographic projection of the unit sphere from `(1, 0, 0)`.
fn stereographic(p: &Vector3<f64>) -> Vector2<f64> {
    Vector2::new(p[1], p[2]) / (1.0 - p[0])
}

fn euclidean_angle(at: Vector2<f64>, a: Vector2<f64>, b: Vector2<f64>) -> f64 {
    let (u, v) = (a - at, b - at);
    (u.x * v.y - u.y * v.x).abs().atan2(u.dot(&v))
}

/// Dihedral angles of the ideal tetrahedron with the given vertices: the
/// angles of the triangle `(0, 1, w)` where a Möbius map sends the first three
/// vertices to `∞, 0, 1` and the fourth to `w`.
pub fn ideal_tetrahedron_angles(v: [Vector3<f64>; 4]) -> [f64; 3] {
    let z = v.map(|p| stereographic(&p));
    // w = (z3 - z1)(z2 - z0) / ((z3 - z0)(z2 - z1)) as complex numbers.
    let mul = |a: Vector2<f64>, b: Vector2<f64>| {
        Vector2::new(a.x * b.x - a.y * b.y, a.x * b.y + a.y * b.x)
    };
    let div = |a: Vector2<f64>, b: Vector2<f64>| {
        let n = b.norm_squared();
        Vector2::new(a.x * b.x + a.y * b.y, a.y * b.x - a.x * b.y) / n
    };
    let w = div(mul(z[3] - z[1], z[2] - z[0]), mul(z[3] - z[0], z[2] - z[1]));
    let (o, one) = (Vector2::zeros(), Vector2::new(1.0, 0.0));
    let alpha = euclidean_angle(o, one, w);
    let beta = euclidean_angle(one, w, o);
    [alpha, beta, PI - alpha - beta]
}

pub fn ideal_tetrahedron_volume(v: [Vector3<f64>; 4]) -> f64 {
    ideal_tetrahedron_angles(v)
        .iter()
        .map(|&a| lobachevsky(a))
        .sum()
}

/// Volume of the ideal prism over a triangle given by its Poincaré-disk
/// vertices, split as `(P1 P2 P3 Q1)`, `(P2 P3 Q1 Q2)`, `(P3 Q1 Q2 Q3)`.
pub fn prism_volume_from_disk(disk: &[Vector2<f64>; 3]) -> f64 {
    let [p1, p2, p3, q1, q2, q3] = prism_vertices(disk);
    ideal_tetrahedron_volume([p1, p2, p3, q1])
        + ideal_tetrahedron_volume([p2, p3, q1, q2])
        + ideal_tetrahedron_volume([p3, q1, q2, q3])
}

fn prism_volume_unchecked(d: [f64; 3]) -> f64 {
    let tri = centred_triangle(d);
    prism_volume_from_disk(&tri.map(|p| hyperbolic::to_poincare(&p)))
}

/// Volume of the ideal prism `P(d)`.
pub fn prism_volume(d: AngleData) -> Result<f64> {
    d.require_realizable()?;
    Ok(prism_volume_unchecked(d.0))
}

/// Symmetric edge-by-edge Hessian stored as per-face contributions.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeHessian {
    dim: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl EdgeHessian {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Raw `(row, col, value)` contributions; repeated positions add up.
    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for &(i, j, v) in &self.entries {
            m[(i, j)] += v;
        }
        m
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum HessianMode {
    #[default]
    Analytic,
    /// Central differences of the face-local gradient.
    FiniteDifference,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Objective {
    pub value: f64,
    /// `dH(w_e)` for each edge.
    pub grad: Vec<f64>,
    pub hess: Option<EdgeHessian>,
}

/// Truncated length of every side, indexed by corner slot.
pub fn side_truncated_lengths(x: &AngleSystem) -> Vec<f64> {
    (0..x.face_count())
        .flat_map(|f| truncated_lengths_unchecked(x.face(f)))
        .collect()
}

/// Length of every side inside its own face, indexed by corner slot.
pub fn side_lengths(x: &AngleSystem) -> Vec<f64> {
    (0..x.face_count())
        .flat_map(|f| {
            let d = x.face(f);
            [0, 1, 2].map(|i| 2.0 * half_sinh_sq(d, i).sqrt().asinh())
        })
        .collect()
}

/// Gradient of `H` in the conformal coordinates:
/// `dH(w_e) = (a*_first - a*_second) / 2`.
pub fn gradient(x: &AngleSystem, c: &SurfaceComplex) -> Vec<f64> {
    let a_star = side_truncated_lengths(x);
    (0..c.edge_count())
        .map(|e| {
            c.edge_sides(e)
                .iter()
                .map(|&s| side_weight(c, s) * a_star[s.slot()])
                .sum()
        })
        .collect()
}

fn analytic_hessian(x: &AngleSystem, c: &SurfaceComplex) -> EdgeHessian {
    let mut entries = Vec::with_capacity(9 * c.face_count());
    for f in 0..c.face_count() {
        let jac = truncated_length_jacobian(x.face(f));
        let sides = [0, 1, 2].map(|i| Side::new(f, i));
        let edges = c.face_edges(f);
        let weights = sides.map(|s| side_weight(c, s));
        for s in 0..3 {
            for r in 0..3 {
                let v = weights[s] * weights[r] * (jac[s][next(r)] + jac[s][prev(r)]);
                entries.push((edges[s], edges[r], v));
            }
        }
    }
    EdgeHessian {
        dim: c.edge_count(),
        entries,
    }
}

fn finite_difference_hessian(x: &AngleSystem, c: &SurfaceComplex) -> EdgeHessian {
    let h = 1e-6;
    let mut entries = Vec::with_capacity(9 * c.face_count());
    for f in 0..c.face_count() {
        let sides = [0, 1, 2].map(|i| Side::new(f, i));
        let edges = c.face_edges(f);
        let weights = sides.map(|s| side_weight(c, s));
        for r in 0..3 {
            let shift = |sign: f64| {
                let mut d = x.face(f);
                d[next(r)] += sign * h * weights[r];
                d[prev(r)] += sign * h * weights[r];
                truncated_lengths_unchecked(d)
            };
            let (plus, minus) = (shift(1.0), shift(-1.0));
            for s in 0..3 {
                let v = weights[s] * (plus[s] - minus[s]) / (2.0 * h);
                entries.push((edges[s], edges[r], v));
            }
        }
    }
    EdgeHessian {
        dim: c.edge_count(),
        entries,
    }
}

/// Sum of prism volumes over all faces.
pub fn objective_value(x: &AngleSystem) -> f64 {
    (0..x.face_count())
        .map(|f| prism_volume_unchecked(x.face(f)))
        .sum()
}

/// `H`, its gradient along each `w_e`, and optionally its Hessian.
pub fn objective_and_gradient(
    x: &AngleSystem,
    c: &SurfaceComplex,
    hessian: Option<HessianMode>,
) -> Result<Objective> {
    check_len(c.corner_count(), x.len())?;
    let margin = x.interior_margin();
    if !(margin > 0.0) {
        return Err(Error::OutsideDomain { margin });
    }
    Ok(Objective {
        value: objective_value(x),
        grad: gradient(x, c),
        hess: hessian.map(|mode| match mode {
            HessianMode::Analytic => analytic_hessian(x, c),
            HessianMode::FiniteDifference => finite_difference_hessian(x, c),
        }),
    })
}

/// `x + t w_e`, for finite-difference checks along a basis direction.
pub fn along_basis(x: &AngleSystem, c: &SurfaceComplex, e: usize, t: f64) -> AngleSystem {
    let mut values = x.values().to_vec();
    add_basis_vector(&mut values, c, e, t);
    AngleSystem::new(values)
}
