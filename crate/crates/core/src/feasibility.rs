//! Constructive feasibility: the margin LP and the half-target start point.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::complex::SurfaceComplex;
use crate::error::{check_len, Result};
use crate::functionals::{
    angles_from_theta_corners, face_values, psi_map, AngleSystem, EdgeTarget,
};
use crate::simplex::{self, LinearProgram, LpStatus, Relation, Row};

pub const DEFAULT_EPS_MIN: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LpVerdict {
    Feasible,
    Infeasible,
    Degenerate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MarginLpResult {
    pub epsilon_star: f64,
    pub x_star: AngleSystem,
    pub status: LpVerdict,
    pub pivots: usize,
}

/// The point whose θ-corners are half the edge targets. It satisfies
/// `Ψ(x) = p` with every corner in `(0, π)`, but faces may have `σ ≥ π`.
pub fn initial_plus_point(p: &EdgeTarget, c: &SurfaceComplex) -> Result<AngleSystem> {
    check_len(c.edge_count(), p.len())?;
    p.require_delaunay()?;
    let theta = p.theta();
    let mut values = Vec::with_capacity(c.corner_count());
    for f in 0..c.face_count() {
        let t = c.face_edges(f).map(|e| theta[e] / 2.0);
        values.extend(angles_from_theta_corners(t));
    }
    Ok(AngleSystem::new(values))
}

/// Coefficient of corner `j` in the one-sided `ψ` of side `i`.
fn psi_coefficient(i: usize, j: usize) -> f64 {
    if i == j {
        -0.5
    } else {
        0.5
    }
}

/// Maximizes `ε` subject to `Ψ(x) = p`, every `α ≥ ε` and every
/// `π - σ ≥ ε`.
///
/// Variables are `s = α - ε ≥ 0` and `ε = ε⁺ - ε⁻`, so the corner bounds
/// become sign constraints and only the edge and face rows remain.
pub fn margin_lp(p: &EdgeTarget, c: &SurfaceComplex, eps_min: f64) -> Result<MarginLpResult> {
    check_len(c.edge_count(), p.len())?;
    p.require_delaunay()?;
    let corners = c.corner_count();
    let (eps_plus, eps_minus) = (corners, corners + 1);
    let mut rows = Vec::with_capacity(c.edge_count() + c.face_count());
    for e in 0..c.edge_count() {
        let mut coeffs = Vec::with_capacity(8);
        for side in c.edge_sides(e) {
            for j in 0..3 {
                coeffs.push((3 * side.face + j, psi_coefficient(side.index, j)));
            }
        }
        // Shifting all corners by ε moves each side's ψ by ε/2.
        coeffs.push((eps_plus, 1.0));
        coeffs.push((eps_minus, -1.0));
        rows.push(Row {
            coeffs,
            relation: Relation::Eq,
            rhs: p.psi()[e],
        });
    }
    for f in 0..c.face_count() {
        let mut coeffs: Vec<(usize, f64)> = (0..3).map(|j| (3 * f + j, 1.0)).collect();
        coeffs.push((eps_plus, 4.0));
        coeffs.push((eps_minus, -4.0));
        rows.push(Row {
            coeffs,
            relation: Relation::Le,
            rhs: PI,
        });
    }
    let mut objective = vec![0.0; corners + 2];
    objective[eps_plus] = 1.0;
    objective[eps_minus] = -1.0;
    let lp = LinearProgram {
        vars: corners + 2,
        objective,
        rows,
    };
    let sol = simplex::solve(&lp)?;
    // The program is always feasible (take ε very negative) and ε ≤ π/4.
    debug_assert_eq!(sol.status, LpStatus::Optimal);
    let eps = sol.x[eps_plus] - sol.x[eps_minus];
    let x = AngleSystem::new(sol.x[..corners].iter().map(|s| s + eps).collect());
    let x = polish(&x, p, c);
    let status = if eps > eps_min {
        LpVerdict::Feasible
    } else if eps < -eps_min {
        LpVerdict::Infeasible
    } else {
        LpVerdict::Degenerate
    };
    Ok(MarginLpResult {
        epsilon_star: eps,
        x_star: x,
        status,
        pivots: sol.pivots,
    })
}

/// Removes the round-off residual of `Ψ(x) = p`. Each side's `ψ` is
/// `π/2` minus its θ-corner, so shifting one θ-corner per edge fixes that
/// edge without touching the others.
pub fn polish(x: &AngleSystem, p: &EdgeTarget, c: &SurfaceComplex) -> AngleSystem {
    let Ok(current) = psi_map(x, c) else {
        return x.clone();
    };
    let mut theta: Vec<[f64; 3]> = (0..c.face_count())
        .map(|f| face_values(x.face(f)).theta)
        .collect();
    for e in 0..c.edge_count() {
        let side = c.edge_sides(e)[0];
        theta[side.face][side.index] -= p.psi()[e] - current.psi()[e];
    }
    AngleSystem::new(
        theta
            .into_iter()
            .flat_map(angles_from_theta_corners)
            .collect(),
    )
}
