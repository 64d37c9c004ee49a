//! Browser bindings. Every export takes and returns JSON text so the page
//! needs no generated TypeScript types; errors come back as rejected strings.

use hypdel::export::{export_svg, SvgOptions};
use hypdel::feasibility::DEFAULT_EPS_MIN;
use hypdel::functionals::{check_target, feasibility_bruteforce, DEFAULT_BRUTE_FORCE_MAX_FACES};
use hypdel::hyperbolic::to_poincare;
use hypdel::io::{parse_instance, to_json, InstanceFile};
use hypdel::realization::{
    circumcircle_angles, expected_top_dihedral, holonomy_report, prism_from_disk,
};
use hypdel::volume::{centred_triangle, prism_volume, triangle_lengths, AngleData};
use hypdel::{develop, instances, margin_lp, uniformize, EdgeTarget, Error, LpVerdict};
use hypdel::{SolveOptions, SurfaceComplex};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn load(instance: &str) -> Result<(SurfaceComplex, EdgeTarget), Error> {
    let inst = parse_instance(instance)?;
    let c = inst.complex()?;
    let p = inst.target()?;
    check_target(&p, &c)?;
    p.require_delaunay()?;
    Ok((c, p))
}

/// Instance text for the symmetric one-vertex surface (`seed` absent) or a
/// seeded random surface with a round-trip target.
pub fn generate_instance(genus: usize, faces: usize, seed: Option<u64>) -> Result<String, String> {
    if genus < 2 {
        return Err("genus must be at least 2".into());
    }
    let (c, p) = match seed {
        None => {
            let c = instances::one_vertex_genus(genus);
            let p = instances::symmetric_target(&c);
            (c, p)
        }
        Some(seed) => {
            let base = 4 * genus - 2;
            if faces < base || (faces - base) % 2 != 0 {
                return Err(format!(
                    "genus {genus} needs an even face count of at least {base}"
                ));
            }
            instances::seeded_round_trip(seed, genus, faces)
        }
    };
    Ok(to_json(&InstanceFile::new(&c, &p)))
}

/// Margin LP verdict, plus the subset search when the complex is small.
pub fn check_instance(instance: &str) -> Result<String, String> {
    let (c, p) = load(instance).map_err(|e| e.to_string())?;
    let lp = margin_lp(&p, &c, DEFAULT_EPS_MIN).map_err(|e| e.to_string())?;
    let brute = if c.face_count() <= DEFAULT_BRUTE_FORCE_MAX_FACES {
        let bf = feasibility_bruteforce(&p, &c, DEFAULT_BRUTE_FORCE_MAX_FACES)
            .map_err(|e| e.to_string())?;
        json!({"feasible": bf.feasible, "margin": bf.margin, "witness": bf.witness})
    } else {
        serde_json::Value::Null
    };
    Ok(json!({
        "faces": c.face_count(),
        "edges": c.edge_count(),
        "vertices": c.vertex_count(),
        "feasible": lp.status == LpVerdict::Feasible,
        "epsilon_star": lp.epsilon_star,
        "brute_force": brute,
    })
    .to_string())
}

/// Solves, develops into the disk, and returns the drawing with the checks.
pub fn solve_instance(instance: &str, circumcircles: bool) -> Result<String, String> {
    let (c, p) = load(instance).map_err(|e| e.to_string())?;
    let u = uniformize(&p, &c, &SolveOptions::default()).map_err(|e| e.to_string())?;
    let layout = develop(&u, &c, &c.dual_spanning_tree(0)).map_err(|e| e.to_string())?;
    let angles = circumcircle_angles(&layout, &c).map_err(|e| e.to_string())?;
    let angle_error = angles.iter().zip(p.psi()).fold(0.0f64, |m, (a, psi)| {
        m.max((a - (std::f64::consts::PI - psi)).abs())
    });
    let h = holonomy_report(&layout, &u, &c);
    Ok(json!({
        "svg": export_svg(&layout, &c, SvgOptions { circumcircles }),
        "iterations": u.iterations,
        "residual": u.residual,
        "objective": u.objective,
        "circumcircle_angle_error": angle_error,
        "holonomy_defect": h.max_vertex_defect(),
        "edge_mismatch": h.max_edge_mismatch(),
    })
    .to_string())
}

/// Dihedral angles and volume of the ideal prism over a triangle with the
/// given angles.
pub fn prism_report(a: f64, b: f64, c: f64) -> Result<String, String> {
    let d = [a, b, c];
    let volume = prism_volume(AngleData(d)).map_err(|e| e.to_string())?;
    let lengths = triangle_lengths(AngleData(d)).map_err(|e| e.to_string())?;
    let prism = prism_from_disk(&centred_triangle(d).map(|p| to_poincare(&p)));
    let expected_top = [0, 1, 2].map(|i| expected_top_dihedral(d, i));
    let ideal_vertices = prism.points.map(|p| [p.x, p.y, p.z]);
    Ok(json!({
        "volume": volume,
        "lengths": lengths,
        "vertical": prism.vertical,
        "top": prism.top,
        "expected_top": expected_top,
        "ideal_vertices": ideal_vertices,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn generate(genus: usize, faces: usize, seed: Option<u64>) -> Result<String, JsValue> {
    generate_instance(genus, faces, seed).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn check(instance: &str) -> Result<String, JsValue> {
    check_instance(instance).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn solve(instance: &str, circumcircles: bool) -> Result<String, JsValue> {
    solve_instance(instance, circumcircles).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn prism(a: f64, b: f64, c: f64) -> Result<String, JsValue> {
    prism_report(a, b, c).map_err(|e| JsValue::from_str(&e))
}
