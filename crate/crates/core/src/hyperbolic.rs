//! Hyperboloid, Poincaré and ball-model helpers.
//!
//! Points of the hyperbolic plane are unit timelike vectors `(x0, x1, x2)` with
//! `-x0² + x1² + x2² = -1`, `x0 > 0`. Isometries are Lorentz matrices.

use nalgebra::{Matrix3, Matrix4, Vector2, Vector3, Vector4};

pub type Point = Vector3<f64>;
pub type Isometry = Matrix3<f64>;

const ETA: [f64; 3] = [-1.0, 1.0, 1.0];

pub fn minkowski_dot(a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    -a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn origin() -> Point {
    Point::new(1.0, 0.0, 0.0)
}

/// Hyperbolic distance, via `|a - b|² = 4 sinh²(d/2)` for accuracy at short
/// range.
pub fn distance(a: &Point, b: &Point) -> f64 {
    let diff = a - b;
    let sq = minkowski_dot(&diff, &diff).max(0.0);
    2.0 * (0.5 * sq.sqrt()).asinh()
}

/// Rescales a timelike vector onto the upper sheet.
pub fn normalize_point(p: &Point) -> Point {
    let n = (-minkowski_dot(p, p)).sqrt();
    let q = p / n;
    if q[0] < 0.0 {
        -q
    } else {
        q
    }
}

fn normalize_spacelike(v: &Vector3<f64>) -> Vector3<f64> {
    v / minkowski_dot(v, v).sqrt()
}

/// Unit tangent at `from` pointing along the geodesic toward `to`.
pub fn unit_tangent(from: &Point, to: &Point) -> Vector3<f64> {
    let t = to + minkowski_dot(to, from) * from;
    normalize_spacelike(&t)
}

/// Tangent at `p` obtained by turning `t` a quarter turn counter-clockwise.
pub fn left_normal(p: &Point, t: &Vector3<f64>) -> Vector3<f64> {
    let cross = p.cross(t);
    normalize_spacelike(&Vector3::new(ETA[0] * cross[0], cross[1], cross[2]))
}

/// Point at distance `dist` from `from`, in the direction obtained by turning
/// the direction toward `toward` counter-clockwise by `angle`.
pub fn place_third(from: &Point, toward: &Point, angle: f64, dist: f64) -> Point {
    let t = unit_tangent(from, toward);
    let n = left_normal(from, &t);
    let dir = angle.cos() * t + angle.sin() * n;
    normalize_point(&(dist.cosh() * from + dist.sinh() * dir))
}

/// Point at distance `dist` from the origin along the `x1` axis rotated by
/// `angle`.
pub fn polar_point(angle: f64, dist: f64) -> Point {
    Point::new(
        dist.cosh(),
        dist.sinh() * angle.cos(),
        dist.sinh() * angle.sin(),
    )
}

/// Lorentz frame at `p` with first tangent toward `toward`: columns
/// `(p, t, n)`. Maps the origin frame to this frame.
pub fn frame(p: &Point, toward: &Point) -> Isometry {
    let t = unit_tangent(p, toward);
    let n = left_normal(p, &t);
    Isometry::from_columns(&[*p, t, n])
}

/// Inverse of a Lorentz matrix: `η Mᵀ η`.
pub fn inverse(m: &Isometry) -> Isometry {
    let eta = Matrix3::from_diagonal(&Vector3::from(ETA));
    eta * m.transpose() * eta
}

/// Orientation-preserving isometry taking `(p_from, q_from)` to
/// `(p_to, q_to)`; the two segments must have equal length.
pub fn isometry_between(p_from: &Point, q_from: &Point, p_to: &Point, q_to: &Point) -> Isometry {
    frame(p_to, q_to) * inverse(&frame(p_from, q_from))
}

/// Isometry moving `p` to the origin, sending the direction toward `toward`
/// to the positive `x1` axis.
pub fn recenter(p: &Point, toward: &Point) -> Isometry {
    inverse(&frame(p, toward))
}

pub fn to_poincare(p: &Point) -> Vector2<f64> {
    Vector2::new(p[1], p[2]) / (1.0 + p[0])
}

pub fn from_poincare(z: &Vector2<f64>) -> Point {
    let r2 = z.norm_squared();
    let d = 1.0 - r2;
    Point::new((1.0 + r2) / d, 2.0 * z[0] / d, 2.0 * z[1] / d)
}

/// Klein-model image of a hyperboloid point.
pub fn to_klein(p: &Point) -> Vector2<f64> {
    Vector2::new(p[1], p[2]) / p[0]
}

/// Angle at `p` between the geodesics toward `a` and toward `b`, in `[0, π]`.
pub fn angle_at(p: &Point, a: &Point, b: &Point) -> f64 {
    let ta = unit_tangent(p, a);
    let tb = unit_tangent(p, b);
    let n = left_normal(p, &ta);
    minkowski_dot(&tb, &n).atan2(minkowski_dot(&tb, &ta)).abs()
}

/// Lift of a Poincaré-disk point `(u, v)` of the equatorial plane to the upper
/// (`sign = 1`) or lower (`sign = -1`) ideal endpoint of the perpendicular
/// geodesic, on the unit sphere of the ball model.
pub fn lift_ideal(z: &Vector2<f64>, sign: f64) -> Vector3<f64> {
    let r2 = z.norm_squared();
    let s = 1.0 + r2;
    Vector3::new(2.0 * z[0] / s, 2.0 * z[1] / s, sign * (1.0 - r2) / s)
}

/// Minkowski product on `R^{3,1}` with the time coordinate first.
pub fn minkowski_dot4(a: &Vector4<f64>, b: &Vector4<f64>) -> f64 {
    -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

/// Light-like representative `(1, ξ)` of an ideal point `ξ` on the unit sphere.
pub fn light_like(xi: &Vector3<f64>) -> Vector4<f64> {
    Vector4::new(1.0, xi[0], xi[1], xi[2])
}

/// Unit spacelike normal of the hyperbolic plane through three ideal points,
/// up to sign.
pub fn plane_normal(a: &Vector4<f64>, b: &Vector4<f64>, c: &Vector4<f64>) -> Vector4<f64> {
    // Euclidean null vector m of (a, b, c) by cofactors; n = η m.
    let rows = Matrix4::from_rows(&[
        a.transpose(),
        b.transpose(),
        c.transpose(),
        Vector4::zeros().transpose(),
    ]);
    let mut m = Vector4::zeros();
    for j in 0..4 {
        let minor = rows.remove_row(3).remove_column(j);
        let sign = if (3 + j) % 2 == 0 { 1.0 } else { -1.0 };
        m[j] = sign * minor.determinant();
    }
    let n = Vector4::new(-m[0], m[1], m[2], m[3]);
    n / minkowski_dot4(&n, &n).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polar_points_lie_on_the_hyperboloid() {
        let p = polar_point(0.7, 2.3);
        assert!((minkowski_dot(&p, &p) + 1.0).abs() < 1e-12);
        assert!((distance(&origin(), &p) - 2.3).abs() < 1e-14);
    }

    #[test]
    fn place_third_turns_left() {
        let o = origin();
        let a = polar_point(0.0, 1.0);
        let b = place_third(&o, &a, PI / 3.0, 1.5);
        assert!((distance(&o, &b) - 1.5).abs() < 1e-14);
        assert!((angle_at(&o, &a, &b) - PI / 3.0).abs() < 1e-14);
        // Counter-clockwise: positive x2.
        assert!(b[2] > 0.0);
    }

    #[test]
    fn isometry_between_matches_segments() {
        let (p, q) = (polar_point(0.3, 0.8), polar_point(1.9, 1.1));
        let d = distance(&p, &q);
        let p2 = polar_point(-2.0, 0.4);
        let q2 = place_third(&p2, &origin(), 0.9, d);
        let m = isometry_between(&p, &q, &p2, &q2);
        assert!((m * p - p2).norm() < 1e-12);
        assert!((m * q - q2).norm() < 1e-12);
        let eta = Matrix3::from_diagonal(&Vector3::from(ETA));
        assert!((m.transpose() * eta * m - eta).norm() < 1e-12);
        assert!(m.determinant() > 0.0);
    }

    #[test]
    fn poincare_round_trip() {
        let p = polar_point(2.1, 1.7);
        let back = from_poincare(&to_poincare(&p));
        assert!((back - p).norm() < 1e-12);
    }

    #[test]
    fn lift_of_the_origin_is_a_pole() {
        let z = Vector2::zeros();
        assert_eq!(lift_ideal(&z, 1.0), Vector3::new(0.0, 0.0, 1.0));
        assert_eq!(lift_ideal(&z, -1.0), Vector3::new(0.0, 0.0, -1.0));
        let w = lift_ideal(&Vector2::new(0.3, -0.5), 1.0);
        assert!((w.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn plane_normal_is_orthogonal() {
        let pts = [
            Vector3::new(1.0, 0.0, 0.0),
            Vector3::new(0.0, 1.0, 0.0),
            Vector3::new(0.0, 0.0, 1.0),
        ]
        .map(|v| light_like(&v));
        let n = plane_normal(&pts[0], &pts[1], &pts[2]);
        for p in &pts {
            assert!(minkowski_dot4(&n, p).abs() < 1e-14);
        }
        assert!((minkowski_dot4(&n, &n) - 1.0).abs() < 1e-14);
    }
}
