//! SVG drawings of a layout and OBJ meshes of the prisms.

use std::fmt::Write;

use nalgebra::{Vector2, Vector3};

use crate::complex::{next, prev, SurfaceComplex};
use crate::hyperbolic::to_poincare;
use crate::realization::{circle_through, Layout};
use crate::volume::prism_vertices;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SvgOptions {
    /// Draw, for each edge, the circumcircles of its two faces placed side
    /// by side.
    pub circumcircles: bool,
}

fn fmt(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

/// SVG y points down; the disk is drawn with y up.
fn pt(z: Vector2<f64>) -> String {
    format!("{} {}", fmt(z.x), fmt(-z.y))
}

/// SVG path command for the geodesic from `a` to `b` in the Poincaré disk.
fn geodesic(a: Vector2<f64>, b: Vector2<f64>) -> String {
    let det = a.x * b.y - a.y * b.x;
    if det.abs() < 1e-12 {
        return format!("L {}", pt(b));
    }
    // Centre c of the orthogonal circle: c·a = (|a|² + 1)/2, likewise for b.
    let (ra, rb) = (
        (a.norm_squared() + 1.0) / 2.0,
        (b.norm_squared() + 1.0) / 2.0,
    );
    let c = Vector2::new(ra * b.y - rb * a.y, a.x * rb - b.x * ra) / det;
    let r = (c.norm_squared() - 1.0).max(0.0).sqrt();
    // Counter-clockwise about c in the y-up picture is clockwise on screen.
    let (u, v) = (a - c, b - c);
    let sweep = u.x * v.y - u.y * v.x < 0.0;
    format!("A {} {} 0 0 {} {}", fmt(r), fmt(r), u8::from(sweep), pt(b))
}

/// The developed faces as geodesic triangles in the unit Poincaré disk.
pub fn export_svg(layout: &Layout, c: &SurfaceComplex, opts: SvgOptions) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"-1.05 -1.05 2.1 2.1\">\n",
    );
    out.push_str("<circle class=\"boundary\" cx=\"0\" cy=\"0\" r=\"1\" fill=\"none\" stroke=\"black\" stroke-width=\"0.004\"/>\n");
    for (f, z) in layout.disk.iter().enumerate() {
        let _ = write!(
            out,
            "<path class=\"face\" data-face=\"{f}\" d=\"M {}",
            pt(z[0])
        );
        for i in 0..3 {
            let _ = write!(out, " {}", geodesic(z[i], z[(i + 1) % 3]));
        }
        out.push_str(" Z\" fill=\"#9ecae1\" fill-opacity=\"0.35\" stroke=\"#08519c\" stroke-width=\"0.003\"/>\n");
    }
    if opts.circumcircles {
        for e in 0..c.edge_count() {
            let [a, b] = c.edge_sides(e);
            let m = layout.placement[a.face];
            let other = layout.local[b.face].map(|p| to_poincare(&(m * layout.gluing[e] * p)));
            let _ = writeln!(out, "<g class=\"circumcircle\" data-edge=\"{e}\">");
            for z in [layout.disk[a.face], other] {
                if let Some(circ) = circle_through(z[0], z[1], z[2]) {
                    let _ = writeln!(
                        out,
                        "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"none\" stroke=\"#e6550d\" stroke-width=\"0.002\"/>",
                        fmt(circ.center.x),
                        fmt(-circ.center.y),
                        fmt(circ.radius)
                    );
                }
            }
            out.push_str("</g>\n");
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Prisms in the Klein model of the ball: ideal vertices on the unit sphere,
/// straight edges. One object per face; vertices shared between prisms are
/// merged when within `1e-9`.
pub fn export_obj(layout: &Layout) -> String {
    let mut out = String::from("# ideal prisms, Klein ball model\n");
    let mut verts: Vec<Vector3<f64>> = Vec::new();
    let mut index_of = |p: Vector3<f64>, out: &mut String| -> usize {
        if let Some(i) = verts.iter().position(|q| (q - p).norm() <= 1e-9) {
            return i + 1;
        }
        verts.push(p);
        let _ = writeln!(out, "v {:.12} {:.12} {:.12}", p.x, p.y, p.z);
        verts.len()
    };
    let mut faces = String::new();
    for (f, disk) in layout.disk.iter().enumerate() {
        let pts = prism_vertices(disk);
        let idx = pts.map(|p| index_of(p, &mut out));
        let _ = writeln!(faces, "o face_{f}");
        let _ = writeln!(faces, "f {} {} {}", idx[0], idx[1], idx[2]);
        let _ = writeln!(faces, "f {} {} {}", idx[5], idx[4], idx[3]);
        for i in 0..3 {
            let (j, k) = (next(i), prev(i));
            let _ = writeln!(
                faces,
                "f {} {} {} {}",
                idx[j + 3],
                idx[k + 3],
                idx[k],
                idx[j]
            );
        }
    }
    out.push_str(&faces);
    out
}
