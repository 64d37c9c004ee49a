//! Angle systems and the linear functionals on them.
//!
//! An angle system is a vector with one slot per corner; slot `3 * f + i` is
//! the angle of face `f` at corner `i`, opposite side `i`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::complex::{next, prev, Side, SurfaceComplex};
use crate::error::{check_len, Error, Result};

/// Tolerance for identities that are exact in exact arithmetic.
pub const IDENTITY_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AngleSystem(Vec<f64>);

impl AngleSystem {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn constant(face_count: usize, angle: f64) -> Self {
        Self(vec![angle; 3 * face_count])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn face_count(&self) -> usize {
        self.0.len() / 3
    }

    pub fn get(&self, f: usize, i: usize) -> f64 {
        self.0[3 * f + i]
    }

    /// The three corner angles of face `f`, by corner index.
    pub fn face(&self, f: usize) -> [f64; 3] {
        [self.0[3 * f], self.0[3 * f + 1], self.0[3 * f + 2]]
    }

    /// Smallest of all `α`, `π - α` and `π - σ`; positive exactly when every
    /// face is a realizable hyperbolic triangle.
    pub fn interior_margin(&self) -> f64 {
        let mut margin = f64::INFINITY;
        for f in 0..self.face_count() {
            let d = self.face(f);
            for a in d {
                margin = margin.min(a).min(PI - a);
            }
            margin = margin.min(PI - d.iter().sum::<f64>());
        }
        margin
    }

    pub fn is_interior(&self) -> bool {
        self.interior_margin() > 0.0
    }
}

/// Edge data `p`, stored as the angle complements `ψ^e`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeTarget {
    psi: Vec<f64>,
}

impl EdgeTarget {
    pub fn new(psi: Vec<f64>) -> Self {
        Self { psi }
    }

    pub fn from_theta(theta: &[f64]) -> Self {
        Self::new(theta.iter().map(|t| PI - t).collect())
    }

    pub fn psi(&self) -> &[f64] {
        &self.psi
    }

    /// Intersection angles `θ^e = π - ψ^e`.
    pub fn theta(&self) -> Vec<f64> {
        self.psi.iter().map(|p| PI - p).collect()
    }

    pub fn len(&self) -> usize {
        self.psi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psi.is_empty()
    }

    /// Fails with the first edge whose `ψ` lies outside `(0, π)`.
    pub fn require_delaunay(&self) -> Result<()> {
        match self.psi.iter().position(|&p| !(p > 0.0 && p < PI)) {
            None => Ok(()),
            Some(edge) => Err(Error::NotDelaunay {
                edge,
                value: self.psi[edge],
            }),
        }
    }
}

/// Coefficients of a conformal deformation in the basis `{w_e}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConformalVector(pub Vec<f64>);

/// Per-face values of the face covectors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FaceFunctionals {
    pub sigma: f64,
    /// Curvature `σ - π`.
    pub k: f64,
    /// One-sided angle complement at each side.
    pub psi: [f64; 3],
    /// One-sided intersection angle at each side.
    pub theta: [f64; 3],
}

pub fn face_values(d: [f64; 3]) -> FaceFunctionals {
    let sigma = d[0] + d[1] + d[2];
    let psi = [0, 1, 2].map(|i| (d[next(i)] + d[prev(i)] - d[i]) / 2.0);
    let theta = [0, 1, 2].map(|i| (PI + d[i] - d[next(i)] - d[prev(i)]) / 2.0);
    FaceFunctionals {
        sigma,
        k: sigma - PI,
        psi,
        theta,
    }
}

pub fn face_functionals(x: &AngleSystem, f: usize) -> FaceFunctionals {
    face_values(x.face(f))
}

/// Corner angles from the three θ-corners of a face: `α_i = π - θ_j - θ_k`.
pub fn angles_from_theta_corners(theta: [f64; 3]) -> [f64; 3] {
    [0, 1, 2].map(|i| PI - theta[next(i)] - theta[prev(i)])
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeVertexFunctionals {
    pub psi: Vec<f64>,
    pub theta: Vec<f64>,
    /// Sum of corner angles at each vertex.
    pub r_v: Vec<f64>,
    pub psi_of_x: EdgeTarget,
}

pub fn edge_and_vertex_functionals(
    x: &AngleSystem,
    c: &SurfaceComplex,
) -> Result<EdgeVertexFunctionals> {
    check_len(c.corner_count(), x.len())?;
    let mut psi = vec![0.0; c.edge_count()];
    let mut r_v = vec![0.0; c.vertex_count()];
    for f in 0..c.face_count() {
        let ff = face_functionals(x, f);
        let edges = c.face_edges(f);
        for i in 0..3 {
            psi[edges[i]] += ff.psi[i];
            r_v[c.corner_vertex(f, i)] += x.get(f, i);
        }
    }
    let theta = psi.iter().map(|p| PI - p).collect();
    Ok(EdgeVertexFunctionals {
        psi_of_x: EdgeTarget::new(psi.clone()),
        psi,
        theta,
        r_v,
    })
}

/// The linear map `Ψ`.
pub fn psi_map(x: &AngleSystem, c: &SurfaceComplex) -> Result<EdgeTarget> {
    Ok(edge_and_vertex_functionals(x, c)?.psi_of_x)
}

/// Sign of `w_e` on a side: `+1/2` on the first side of the edge.
pub(crate) fn side_weight(c: &SurfaceComplex, side: Side) -> f64 {
    if c.edge_sides(c.edge_of(side))[0] == side {
        0.5
    } else {
        -0.5
    }
}

/// Adds `coef * w_e` to the corner slots in place.
pub(crate) fn add_basis_vector(values: &mut [f64], c: &SurfaceComplex, e: usize, coef: f64) {
    for side in c.edge_sides(e) {
        let w = coef * side_weight(c, side);
        values[3 * side.face + next(side.index)] += w;
        values[3 * side.face + prev(side.index)] += w;
    }
}

/// The conformal basis vector `w_e`: `±1/2` on the two corners adjacent to
/// each side of `e`, positive on the edge's first side.
pub fn conformal_basis_vector(c: &SurfaceComplex, e: usize) -> AngleSystem {
    let mut values = vec![0.0; c.corner_count()];
    add_basis_vector(&mut values, c, e, 1.0);
    AngleSystem(values)
}

/// `x + Σ b_e w_e`.
pub fn conformal_move(
    x: &AngleSystem,
    b: &ConformalVector,
    c: &SurfaceComplex,
) -> Result<AngleSystem> {
    check_len(c.corner_count(), x.len())?;
    check_len(c.edge_count(), b.0.len())?;
    let mut values = x.0.clone();
    for (e, &coef) in b.0.iter().enumerate() {
        if coef != 0.0 {
            add_basis_vector(&mut values, c, e, coef);
        }
    }
    Ok(AngleSystem(values))
}

#[derive(Clone, Debug, PartialEq)]
pub struct TargetCheck {
    pub delaunay: bool,
    pub nonsingular: bool,
    pub cone_angles: Vec<f64>,
}

/// Delaunay and non-singularity tests; cone angles count loop edges twice.
pub fn check_target(p: &EdgeTarget, c: &SurfaceComplex) -> Result<TargetCheck> {
    check_len(c.edge_count(), p.len())?;
    let mut cone_angles = vec![0.0; c.vertex_count()];
    for (e, &psi) in p.psi().iter().enumerate() {
        for v in c.edge_endpoints(e) {
            cone_angles[v] += psi;
        }
    }
    Ok(TargetCheck {
        delaunay: p.require_delaunay().is_ok(),
        nonsingular: cone_angles
            .iter()
            .all(|a| (a - 2.0 * PI).abs() <= IDENTITY_TOL),
        cone_angles,
    })
}

/// Face-local edge mask: bit `e` set for each edge of the face.
fn face_edge_masks(c: &SurfaceComplex) -> Vec<u128> {
    (0..c.face_count())
        .map(|f| c.face_edges(f).iter().fold(0u128, |m, &e| m | (1u128 << e)))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct BruteForceFeasibility {
    pub feasible: bool,
    /// A face subset attaining the minimal margin, when infeasible.
    pub witness: Option<Vec<usize>>,
    /// `min_S (Σ_{e incident to S} θ^e - π|S|)` over nonempty `S`.
    pub margin: f64,
    pub minimizer: Vec<usize>,
}

pub const DEFAULT_BRUTE_FORCE_MAX_FACES: usize = 20;

/// Checks `Σ θ^e > π |S|` over every nonempty face subset `S`, where the sum
/// runs over edges incident to at least one face of `S`.
pub fn feasibility_bruteforce(
    p: &EdgeTarget,
    c: &SurfaceComplex,
    max_faces: usize,
) -> Result<BruteForceFeasibility> {
    check_len(c.edge_count(), p.len())?;
    let faces = c.face_count();
    // Edge masks are u128; 3F/2 edges must fit.
    let max = max_faces.min(84);
    if faces > max {
        return Err(Error::TooLarge { faces, max });
    }
    p.require_delaunay()?;
    let theta = p.theta();
    let masks = face_edge_masks(c);
    let mut best = f64::INFINITY;
    let mut best_subset = 0u128;
    for subset in 1u128..(1u128 << faces) {
        let mut edges = 0u128;
        let mut bits = subset;
        while bits != 0 {
            let f = bits.trailing_zeros() as usize;
            edges |= masks[f];
            bits &= bits - 1;
        }
        let mut sum = 0.0;
        let mut bits = edges;
        while bits != 0 {
            let e = bits.trailing_zeros() as usize;
            sum += theta[e];
            bits &= bits - 1;
        }
        let margin = sum - PI * subset.count_ones() as f64;
        if margin < best {
            best = margin;
            best_subset = subset;
        }
    }
    let minimizer: Vec<usize> = (0..faces).filter(|f| best_subset >> f & 1 == 1).collect();
    let feasible = best > 0.0;
    Ok(BruteForceFeasibility {
        feasible,
        witness: (!feasible).then(|| minimizer.clone()),
        margin: best,
        minimizer,
    })
}

/// Both sides of the subset identity for `θ` summed over the edges incident
/// to `subset`. Returns `(lhs, rhs)`.
pub fn formula_sett(x: &AngleSystem, subset: &[usize], c: &SurfaceComplex) -> Result<(f64, f64)> {
    check_len(c.corner_count(), x.len())?;
    let mut in_subset = vec![false; c.face_count()];
    for &f in subset {
        in_subset[f] = true;
    }
    let mut incident = vec![false; c.edge_count()];
    for (f, _) in in_subset.iter().enumerate().filter(|(_, &b)| b) {
        for e in c.face_edges(f) {
            incident[e] = true;
        }
    }
    let ev = edge_and_vertex_functionals(x, c)?;
    let lhs: f64 = (0..c.edge_count())
        .filter(|&e| incident[e])
        .map(|e| ev.theta[e])
        .sum();
    let mut rhs = 0.0;
    for (f, _) in in_subset.iter().enumerate().filter(|(_, &b)| b) {
        rhs += PI - face_functionals(x, f).k / 2.0;
    }
    for e in (0..c.edge_count()).filter(|&e| incident[e]) {
        for side in c.edge_sides(e) {
            if !in_subset[side.face] {
                let ff = face_functionals(x, side.face);
                rhs += FRAC_PI_2 - ff.psi[side.index];
            }
        }
    }
    Ok((lhs, rhs))
}
