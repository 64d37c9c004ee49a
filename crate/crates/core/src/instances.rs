//! Standard complexes and seeded generators for test and demo instances.

use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::complex::{next, prev, Side, SurfaceComplex};
use crate::functionals::{AngleSystem, EdgeTarget};

/// Fan triangulation of the `4g`-gon with edge word
/// `a1 b1 a1⁻¹ b1⁻¹ ... ag bg ag⁻¹ bg⁻¹`: `4g - 2` faces, one vertex.
///
/// Polygon corners `P0 .. P(4g-1)`, face `j` is `(P0, P(j+1), P(j+2))`.
pub fn one_vertex_genus(genus: usize) -> SurfaceComplex {
    assert!(genus >= 1, "genus must be positive");
    let n = 4 * genus;
    // Polygon side k runs P(k) -> P(k+1).
    let polygon_side = |k: usize| -> Side {
        if k == 0 {
            Side::new(0, 2)
        } else if k == n - 1 {
            Side::new(n - 3, 1)
        } else {
            Side::new(k - 1, 0)
        }
    };
    let mut gluing = Vec::with_capacity(6 * genus - 3);
    for b in 0..genus {
        let k = 4 * b;
        gluing.push([polygon_side(k), polygon_side(k + 2)]);
        gluing.push([polygon_side(k + 1), polygon_side(k + 3)]);
    }
    for j in 0..n - 3 {
        gluing.push([Side::new(j, 1), Side::new(j + 1, 2)]);
    }
    SurfaceComplex::new(n - 2, &gluing).expect("fan triangulation is a closed surface")
}

/// Boundary of a tetrahedron, outward oriented.
pub fn tetrahedron() -> SurfaceComplex {
    SurfaceComplex::from_triangles(&[[1, 2, 3], [0, 3, 2], [0, 1, 3], [0, 2, 1]])
        .expect("tetrahedron boundary is closed")
}

/// Genus-2 complex with 8 faces and 2 vertices: the one-vertex fan with a new
/// vertex inserted in face 0.
pub fn two_vertex_genus_two() -> SurfaceComplex {
    subdivide_face(&one_vertex_genus(2), 0)
}

/// Inserts a vertex inside face `f` (a 1-to-3 split).
///
/// Face `f` keeps its side 0 and gets the new vertex at corner 0; the two new
/// faces are appended and carry old sides 1 and 2 as their side 0.
pub fn subdivide_face(c: &SurfaceComplex, f: usize) -> SurfaceComplex {
    let n = c.face_count();
    let (g1, g2) = (n, n + 1);
    let remap = |s: Side| -> Side {
        if s.face != f {
            return s;
        }
        match s.index {
            0 => s,
            1 => Side::new(g1, 0),
            _ => Side::new(g2, 0),
        }
    };
    let mut gluing: Vec<[Side; 2]> = c.gluing().into_iter().map(|p| p.map(remap)).collect();
    gluing.push([Side::new(f, 1), Side::new(g1, 2)]);
    gluing.push([Side::new(g1, 1), Side::new(g2, 2)]);
    gluing.push([Side::new(g2, 1), Side::new(f, 2)]);
    SurfaceComplex::new(n + 2, &gluing).expect("subdivision keeps the surface closed")
}

/// Flips edge `e` inside the quadrilateral formed by its two faces. Returns
/// `None` if both sides lie on one face or the flip would leave a vertex with
/// fewer than three corners.
pub fn flip_edge(c: &SurfaceComplex, e: usize) -> Option<SurfaceComplex> {
    let [sf, sg] = c.edge_sides(e);
    let (f, g) = (sf.face, sg.face);
    if f == g {
        return None;
    }
    let (s, t) = (sf.index, sg.index);
    let mut degree = vec![0usize; c.vertex_count()];
    for face in 0..c.face_count() {
        for i in 0..3 {
            degree[c.corner_vertex(face, i)] += 1;
        }
    }
    let b = c.corner_vertex(f, next(s));
    let cc = c.corner_vertex(f, prev(s));
    if degree[b] <= 3 || degree[cc] <= 3 {
        return None;
    }
    // f = (a, b, c) with side s from b to c; g has side t from c to b and
    // apex d. New f' = (a, b, d), g' = (d, c, a).
    let remap = |x: Side| -> Side {
        if x.face == f {
            if x.index == next(s) {
                return Side::new(g, 0);
            }
            if x.index == prev(s) {
                return Side::new(f, 2);
            }
        } else if x.face == g {
            if x.index == next(t) {
                return Side::new(f, 0);
            }
            if x.index == prev(t) {
                return Side::new(g, 2);
            }
        }
        x
    };
    let gluing: Vec<[Side; 2]> = (0..c.edge_count())
        .map(|k| {
            if k == e {
                [Side::new(f, 1), Side::new(g, 1)]
            } else {
                c.edge_sides(k).map(remap)
            }
        })
        .collect();
    SurfaceComplex::new(c.face_count(), &gluing).ok()
}

/// Random closed complex of the given genus with `faces` faces: the one-vertex
/// fan, random 1-to-3 splits, then random flips.
///
/// `faces` must be at least `4 * genus - 2` and of the same parity.
pub fn random_complex<R: Rng>(genus: usize, faces: usize, rng: &mut R) -> SurfaceComplex {
    let base = 4 * genus - 2;
    assert!(
        faces >= base && (faces - base) % 2 == 0,
        "genus {genus} needs an even face count of at least {base}"
    );
    let mut c = one_vertex_genus(genus);
    while c.face_count() < faces {
        let f = rng.gen_range(0..c.face_count());
        c = subdivide_face(&c, f);
    }
    let flips = 2 * c.edge_count();
    for _ in 0..flips {
        let e = rng.gen_range(0..c.edge_count());
        if let Some(flipped) = flip_edge(&c, e) {
            c = flipped;
        }
    }
    c
}

/// Samples an angle system by its θ-corners: each in `(0.1, π/2 - 0.1)` with
/// face sums above `π + 0.1`. Every corner angle is then above `0.2` and every
/// face angle sum below `π - 0.2`.
pub fn sample_theta_corners<R: Rng>(face_count: usize, rng: &mut R) -> AngleSystem {
    let (lo, hi) = (0.1, PI / 2.0 - 0.1);
    let mut values = Vec::with_capacity(3 * face_count);
    for _ in 0..face_count {
        let theta = loop {
            let t: [f64; 3] = [0; 3].map(|_| rng.gen_range(lo..hi));
            if t.iter().sum::<f64>() > PI + 0.1 {
                break t;
            }
        };
        values.extend(crate::functionals::angles_from_theta_corners(theta));
    }
    AngleSystem::new(values)
}

/// Target realized by a random angle system on `c`, returned with that system.
pub fn round_trip_target<R: Rng>(c: &SurfaceComplex, rng: &mut R) -> (EdgeTarget, AngleSystem) {
    let x = sample_theta_corners(c.face_count(), rng);
    let p = crate::functionals::psi_map(&x, c).expect("sampled system matches the complex");
    (p, x)
}

/// The non-singular symmetric target `ψ = π / |E|` on a one-vertex complex.
pub fn symmetric_target(c: &SurfaceComplex) -> EdgeTarget {
    EdgeTarget::new(vec![PI / c.edge_count() as f64; c.edge_count()])
}

/// Target on [`two_vertex_genus_two`] whose face 1 has incident `θ` summing
/// below `π`, so `{1}` alone violates the subset condition.
pub fn two_vertex_infeasible_target(c: &SurfaceComplex) -> EdgeTarget {
    let mut psi = vec![0.2; c.edge_count()];
    for e in c.face_edges(1) {
        psi[e] = 2.3;
    }
    EdgeTarget::new(psi)
}

/// Delaunay target that is feasible or not with roughly even odds: a
/// round-trip target, and half the time one face's three edges are reset to
/// `ψ` drawn from `(1.0, 2.6)`.
pub fn random_delaunay_target<R: Rng>(c: &SurfaceComplex, rng: &mut R) -> EdgeTarget {
    let (p, _) = round_trip_target(c, rng);
    if rng.gen_bool(0.5) {
        return p;
    }
    let mut psi = p.psi().to_vec();
    let f = rng.gen_range(0..c.face_count());
    for e in c.face_edges(f) {
        psi[e] = rng.gen_range(1.0..2.6);
    }
    EdgeTarget::new(psi)
}

/// The same complex with face `f` renamed `n - 1 - f`. Edge order is kept,
/// so edge targets carry over unchanged.
pub fn reverse_faces(c: &SurfaceComplex) -> SurfaceComplex {
    let n = c.face_count();
    let gluing: Vec<[Side; 2]> = c
        .gluing()
        .into_iter()
        .map(|pair| pair.map(|s| Side::new(n - 1 - s.face, s.index)))
        .collect();
    SurfaceComplex::new(n, &gluing).expect("relabeling keeps the surface closed")
}

/// Seeded random complex of the given genus and face count with a
/// round-trip target, which is feasible by construction.
pub fn seeded_round_trip(seed: u64, genus: usize, faces: usize) -> (SurfaceComplex, EdgeTarget) {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let c = random_complex(genus, faces, &mut rng);
    let (p, _) = round_trip_target(&c, &mut rng);
    (c, p)
}

/// Random genus-2 or genus-3 complex with a face count drawn from `faces`.
/// Genus 3 is only chosen when its 10-face base fits in the range.
pub fn random_surface<R: Rng>(
    rng: &mut R,
    faces: std::ops::RangeInclusive<usize>,
) -> SurfaceComplex {
    let (start, end) = (*faces.start(), *faces.end());
    let mut genus = *[2usize, 3].choose(rng).unwrap();
    if end < 4 * genus - 2 {
        genus = 2;
    }
    let base = 4 * genus - 2;
    let mut lo = start.max(base);
    lo += (lo - base) % 2;
    assert!(lo <= end, "no genus-{genus} face count in {start}..={end}");
    let n = lo + 2 * rng.gen_range(0..=(end - lo) / 2);
    random_complex(genus, n, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn genus_three_fan() {
        let c = one_vertex_genus(3);
        assert_eq!(
            (c.face_count(), c.edge_count(), c.vertex_count()),
            (10, 15, 1)
        );
        assert_eq!(c.euler_and_genus(), (-4, 3));
    }

    #[test]
    fn flips_and_splits_keep_topology() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for faces in [6, 8, 20, 40] {
            let c = random_complex(2, faces, &mut rng);
            assert_eq!(c.face_count(), faces);
            assert_eq!(3 * c.face_count(), 2 * c.edge_count());
            assert_eq!(c.euler_and_genus(), (-2, 2));
        }
    }

    #[test]
    fn flip_is_an_involution_up_to_relabeling() {
        let c = two_vertex_genus_two();
        let mut flipped_any = false;
        for e in 0..c.edge_count() {
            if let Some(d) = flip_edge(&c, e) {
                flipped_any = true;
                assert_eq!(d.euler_and_genus(), (-2, 2));
                let back = flip_edge(&d, e);
                if let Some(back) = back {
                    assert_eq!(back.vertex_count(), c.vertex_count());
                }
            }
        }
        assert!(flipped_any);
    }

    #[test]
    fn random_surface_respects_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let c = random_surface(&mut rng, 6..=40);
            assert!((6..=40).contains(&c.face_count()), "{}", c.face_count());
            assert!(c.euler_characteristic() < 0);
        }
    }

    #[test]
    fn sampled_systems_are_interior() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = sample_theta_corners(50, &mut rng);
        assert!(x.interior_margin() > 0.19);
    }
}
