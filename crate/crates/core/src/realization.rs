//! Explicit geometry of a uniform solution: developed layout, holonomy,
//! circumcircle intersection angles and ideal prisms.

use std::f64::consts::{PI, TAU};

use nalgebra::{Vector2, Vector3, Vector4};
use serde::Serialize;

use crate::complex::{next, prev, DualTree, Side, SurfaceComplex};
use crate::error::{Error, Result};
use crate::functionals::check_target;
use crate::hyperbolic::{
    self, angle_at, inverse, isometry_between, left_normal, light_like, minkowski_dot,
    minkowski_dot4, place_third, plane_normal, recenter, to_poincare, unit_tangent, Isometry,
    Point,
};
use crate::uniformize::{certify, UniformSolution};
use crate::volume::{prism_vertices, side_lengths};

/// Tolerance `develop` certifies its input against.
pub const DEVELOP_TOL: f64 = 1e-9;
/// Circumcentre determinant below which three points count as collinear.
const COLLINEAR_TOL: f64 = 1e-12;

/// Faces developed along a dual spanning tree.
///
/// Each face has canonical local coordinates (corner 0 at the origin, corner
/// 1 on the positive `x1` axis) and a placement taking them into the
/// developed picture. Verification works in local charts, which stay
/// accurate however deep the tree is.
#[derive(Clone, Debug, PartialEq)]
pub struct Layout {
    pub tree: DualTree,
    pub local: Vec<[Point; 3]>,
    pub placement: Vec<Isometry>,
    /// Developed hyperboloid coordinates.
    pub vertices: Vec<[Point; 3]>,
    pub disk: Vec<[Vector2<f64>; 3]>,
    /// Per edge: the isometry from the second side's face chart into the
    /// first side's face chart.
    pub gluing: Vec<Isometry>,
}

impl Layout {
    /// Isometry from the chart of the face across `side` into the chart of
    /// `side.face`.
    pub fn across(&self, c: &SurfaceComplex, side: Side) -> Isometry {
        let e = c.edge_of(side);
        if c.edge_sides(e)[0] == side {
            self.gluing[e]
        } else {
            inverse(&self.gluing[e])
        }
    }
}

fn local_face(d: [f64; 3], len: [f64; 3]) -> [Point; 3] {
    let p0 = hyperbolic::origin();
    let p1 = hyperbolic::polar_point(0.0, len[2]);
    let p2 = place_third(&p0, &p1, d[0], len[1]);
    [p0, p1, p2]
}

/// Develops with the root face at its canonical position.
pub fn develop(u: &UniformSolution, c: &SurfaceComplex, tree: &DualTree) -> Result<Layout> {
    develop_with_root(u, c, tree, &Isometry::identity())
}

/// Develops with the root face moved by `root`.
pub fn develop_with_root(
    u: &UniformSolution,
    c: &SurfaceComplex,
    tree: &DualTree,
    root: &Isometry,
) -> Result<Layout> {
    let cert = certify(u, c, DEVELOP_TOL);
    if !cert.passed() {
        let names: Vec<&str> = cert.failures().iter().map(|k| k.name).collect();
        return Err(Error::NotCertified(names.join(", ")));
    }
    let x = &u.angles;
    let side_len = side_lengths(x);
    let local: Vec<[Point; 3]> = (0..c.face_count())
        .map(|f| local_face(x.face(f), [0, 1, 2].map(|i| side_len[3 * f + i])))
        .collect();
    // Side (f, s) runs corner s+1 -> s+2; its mate (g, t) runs the other way.
    let gluing: Vec<Isometry> = (0..c.edge_count())
        .map(|e| {
            let [a, b] = c.edge_sides(e);
            let (pf, qf) = (local[a.face][next(a.index)], local[a.face][prev(a.index)]);
            let (pg, qg) = (local[b.face][prev(b.index)], local[b.face][next(b.index)]);
            isometry_between(&pg, &qg, &pf, &qf)
        })
        .collect();
    let mut layout = Layout {
        tree: tree.clone(),
        local,
        placement: vec![Isometry::identity(); c.face_count()],
        vertices: vec![[Point::zeros(); 3]; c.face_count()],
        disk: vec![[Vector2::zeros(); 3]; c.face_count()],
        gluing,
    };
    for &f in &tree.order {
        let m = match tree.parent[f] {
            None => *root,
            Some(link) => {
                layout.placement[link.parent_side.face] * layout.across(c, link.parent_side)
            }
        };
        layout.placement[f] = m;
        let mut v = layout.local[f].map(|p| hyperbolic::normalize_point(&(m * p)));
        if let Some(link) = tree.parent[f] {
            // Share the parent's copies of the common edge bit for bit.
            let (s, t) = (link.parent_side, link.child_side);
            v[prev(t.index)] = layout.vertices[s.face][next(s.index)];
            v[next(t.index)] = layout.vertices[s.face][prev(s.index)];
        }
        layout.vertices[f] = v;
        layout.disk[f] = v.map(|p| to_poincare(&p));
    }
    Ok(layout)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HolonomyReport {
    /// Total developed angle around each vertex.
    pub vertex_angles: Vec<f64>,
    /// Cone angles the target prescribes.
    pub cone_angles: Vec<f64>,
    /// `|developed - prescribed|` per vertex.
    pub vertex_defects: Vec<f64>,
    /// Per vertex: how far the loop of gluings around it is from the
    /// rotation by the developed angle.
    pub loop_closure: Vec<f64>,
    /// `(edge, |length difference|)` for every non-tree edge.
    pub edge_mismatch: Vec<(usize, f64)>,
}

impl HolonomyReport {
    pub fn max_vertex_defect(&self) -> f64 {
        self.vertex_defects.iter().fold(0.0, |m, d| m.max(*d))
    }

    pub fn max_edge_mismatch(&self) -> f64 {
        self.edge_mismatch.iter().fold(0.0, |m, d| m.max(d.1))
    }

    pub fn max_loop_closure(&self) -> f64 {
        self.loop_closure.iter().fold(0.0, |m, d| m.max(*d))
    }
}

fn wrap_angle(a: f64) -> f64 {
    a - TAU * (a / TAU).round()
}

/// Walks the corners around every vertex, summing developed angles and
/// composing the gluings met on the way.
pub fn holonomy_report(layout: &Layout, u: &UniformSolution, c: &SurfaceComplex) -> HolonomyReport {
    let nv = c.vertex_count();
    let mut vertex_angles = vec![0.0; nv];
    let mut loop_closure = vec![0.0; nv];
    let mut seen = vec![false; c.corner_count()];
    for f in 0..c.face_count() {
        for i in 0..3 {
            if seen[3 * f + i] {
                continue;
            }
            let v = c.corner_vertex(f, i);
            let (start_face, start_corner) = (f, i);
            let mut m = Isometry::identity();
            let (mut g, mut k) = (f, i);
            let mut total = 0.0;
            loop {
                seen[3 * g + k] = true;
                let pts = &layout.local[g];
                total += angle_at(&pts[k], &pts[next(k)], &pts[prev(k)]);
                // Cross the side that ends at corner k, counter-clockwise.
                let side = Side::new(g, next(k));
                let mate = c.mate(side);
                m *= layout.across(c, side);
                g = mate.face;
                k = next(mate.index);
                if (g, k) == (start_face, start_corner) {
                    break;
                }
            }
            let p = layout.local[start_face][start_corner];
            let q = layout.local[start_face][next(start_corner)];
            let t = unit_tangent(&p, &q);
            let n = left_normal(&p, &t);
            let mq = m * q;
            let dir = unit_tangent(&p, &mq);
            let turn = minkowski_dot(&dir, &n).atan2(minkowski_dot(&dir, &t));
            let drift = (m * p - p).norm();
            loop_closure[v] = drift + wrap_angle(turn - total).abs();
            vertex_angles[v] = total;
        }
    }
    let cone_angles = check_target(&u.target_echo, c)
        .map(|t| t.cone_angles)
        .unwrap_or_else(|_| vec![f64::NAN; nv]);
    let vertex_defects = vertex_angles
        .iter()
        .zip(&cone_angles)
        .map(|(a, b)| (a - b).abs())
        .collect();
    let edge_mismatch = layout
        .tree
        .non_tree_edges
        .iter()
        .map(|&e| {
            let [a, b] = c.edge_sides(e);
            let len = |s: Side| {
                let pts = &layout.local[s.face];
                hyperbolic::distance(&pts[next(s.index)], &pts[prev(s.index)])
            };
            (e, (len(a) - len(b)).abs())
        })
        .collect();
    HolonomyReport {
        vertex_angles,
        cone_angles,
        vertex_defects,
        loop_closure,
        edge_mismatch,
    }
}

/// Euclidean circle (or line, when `radius` is infinite) through three
/// points of the disk.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EuclideanCircle {
    pub center: Vector2<f64>,
    pub radius: f64,
}

pub fn circle_through(
    a: Vector2<f64>,
    b: Vector2<f64>,
    c: Vector2<f64>,
) -> Option<EuclideanCircle> {
    let (u, v) = (b - a, c - a);
    let det = 2.0 * (u.x * v.y - u.y * v.x);
    if det.abs() < COLLINEAR_TOL {
        return None;
    }
    let (uu, vv) = (u.norm_squared(), v.norm_squared());
    let off = Vector2::new(v.y * uu - u.y * vv, u.x * vv - v.x * uu) / det;
    Some(EuclideanCircle {
        center: a + off,
        radius: off.norm(),
    })
}

/// The two faces at edge `e` in one chart: the first side's face chart,
/// with the other face brought over by the gluing. Returns the shared
/// endpoints `(P, Q)` and the two apexes.
fn edge_chart(layout: &Layout, c: &SurfaceComplex, e: usize) -> (Point, Point, Point, Point) {
    let [a, b] = c.edge_sides(e);
    let f = &layout.local[a.face];
    let g = layout.gluing[e] * layout.local[b.face][b.index];
    (
        f[next(a.index)],
        f[prev(a.index)],
        f[a.index],
        hyperbolic::normalize_point(&g),
    )
}

/// Angle at the origin between the positive `x` axis and the circumcircle
/// through `0`, `q` (on that axis) and `r`, on the far side from `r`.
fn one_sided_angle(q: Vector2<f64>, r: Vector2<f64>) -> Option<f64> {
    if r.y.abs() < COLLINEAR_TOL {
        return None;
    }
    match circle_through(Vector2::zeros(), q, r) {
        // Straight geodesic circle: the tangent is the chord itself.
        None => Some(0.0),
        Some(circ) => {
            let mut t = Vector2::new(-circ.center.y, circ.center.x);
            if t.y * r.y > 0.0 {
                t = -t;
            }
            Some(t.y.abs().atan2(t.x))
        }
    }
}

/// Intersection angle of the circumcircles of the two faces at each edge,
/// as the sum of the two one-sided angles.
pub fn circumcircle_angles(layout: &Layout, c: &SurfaceComplex) -> Result<Vec<f64>> {
    (0..c.edge_count())
        .map(|e| {
            let (p, q, r1, r2) = edge_chart(layout, c, e);
            let m = recenter(&p, &q);
            let [qd, r1d, r2d] = [q, r1, r2].map(|pt| to_poincare(&(m * pt)));
            let qd = Vector2::new(qd.norm(), 0.0);
            let [a, b] = c.edge_sides(e);
            let s1 = one_sided_angle(qd, r1d).ok_or(Error::DegenerateCircle { face: a.face })?;
            let s2 = one_sided_angle(qd, r2d).ok_or(Error::DegenerateCircle { face: b.face })?;
            Ok(s1 + s2)
        })
        .collect()
}

/// Interior angle between two faces from their outward unit normals:
/// `cos φ = -⟨n1, n2⟩`, evaluated stably.
fn dihedral(n1: &Vector4<f64>, n2: &Vector4<f64>) -> f64 {
    let a = -n1;
    let d = a - n2;
    let s = a + n2;
    2.0 * minkowski_dot4(&d, &d)
        .max(0.0)
        .sqrt()
        .atan2(minkowski_dot4(&s, &s).max(0.0).sqrt())
}

fn ball_to_hyperboloid(b: &Vector3<f64>) -> Vector4<f64> {
    let r2 = b.norm_squared();
    Vector4::new(1.0 + r2, 2.0 * b[0], 2.0 * b[1], 2.0 * b[2]) / (1.0 - r2)
}

fn outward(n: Vector4<f64>, inside: &Vector4<f64>) -> Vector4<f64> {
    if minkowski_dot4(&n, inside) > 0.0 {
        -n
    } else {
        n
    }
}

/// One face's ideal prism.
#[derive(Clone, Debug, PartialEq)]
pub struct Prism {
    /// Upper lifts of corners 0, 1, 2, then lower lifts.
    pub points: [Vector3<f64>; 6],
    /// Outward normals: top, bottom, then the vertical face over each side.
    pub normals: [Vector4<f64>; 5],
    /// Dihedral along the vertical edge through each corner.
    pub vertical: [f64; 3],
    /// Dihedral along the top edge over each side.
    pub top: [f64; 3],
    /// Dihedral along the bottom edge over each side.
    pub bottom: [f64; 3],
}

/// The prism over a triangle given by its disk vertices (counter-clockwise).
pub fn prism_from_disk(disk: &[Vector2<f64>; 3]) -> Prism {
    let pts = prism_vertices(disk);
    let ll = pts.map(|p| light_like(&p));
    let centroid = (disk[0] + disk[1] + disk[2]) / 3.0;
    let inside = ball_to_hyperboloid(&Vector3::new(centroid.x, centroid.y, 0.0));
    let top = outward(plane_normal(&ll[0], &ll[1], &ll[2]), &inside);
    let bottom = outward(plane_normal(&ll[3], &ll[4], &ll[5]), &inside);
    let side = [0, 1, 2].map(|i| {
        let (j, k) = (next(i), prev(i));
        outward(plane_normal(&ll[j], &ll[k], &ll[j + 3]), &inside)
    });
    Prism {
        points: pts,
        normals: [top, bottom, side[0], side[1], side[2]],
        vertical: [0, 1, 2].map(|i| dihedral(&side[next(i)], &side[prev(i)])),
        top: [0, 1, 2].map(|i| dihedral(&top, &side[i])),
        bottom: [0, 1, 2].map(|i| dihedral(&bottom, &side[i])),
    }
}

/// Prism of every face, each built in its own chart centred at the face's
/// vertex centroid.
pub fn build_prisms(layout: &Layout) -> Vec<Prism> {
    layout
        .local
        .iter()
        .map(|pts| {
            let centre = hyperbolic::normalize_point(&(pts[0] + pts[1] + pts[2]));
            let m = recenter(&centre, &pts[0]);
            prism_from_disk(&pts.map(|p| to_poincare(&(m * p))))
        })
        .collect()
}

/// Angle between the top faces of the two prisms at each edge, with the
/// prisms placed side by side. Equals the circumcircle intersection angle.
pub fn prism_pair_angles(layout: &Layout, c: &SurfaceComplex) -> Vec<f64> {
    (0..c.edge_count())
        .map(|e| {
            let [a, b] = c.edge_sides(e);
            let (p, q, _, _) = edge_chart(layout, c, e);
            let mid = hyperbolic::normalize_point(&(p + q));
            let m = recenter(&mid, &q);
            let f = layout.local[a.face].map(|pt| to_poincare(&(m * pt)));
            let g = layout.local[b.face].map(|pt| to_poincare(&(m * (layout.gluing[e] * pt))));
            let n1 = prism_from_disk(&f).normals[0];
            let n2 = prism_from_disk(&g).normals[0];
            dihedral(&n1, &n2)
        })
        .collect()
}

/// Closed-form top-edge dihedral `(π + A - B - C) / 2` for side `i`.
pub fn expected_top_dihedral(d: [f64; 3], i: usize) -> f64 {
    (PI + d[i] - d[next(i)] - d[prev(i)]) / 2.0
}
