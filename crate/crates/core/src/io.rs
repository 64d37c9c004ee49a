//! JSON instance and solution files.
//!
//! Instance: `{"faces": F, "gluing": [[[f, s], [g, t]], ...], "targets": {"psi": [...]}}`
//! with `"theta"` allowed in place of `"psi"`. Edge `k` is the `k`-th pair.
//! Angles are radians, written in shortest round-trip form.

use serde::{Deserialize, Serialize};

use crate::complex::{Side, SurfaceComplex};
use crate::error::{Error, Result};
use crate::functionals::{AngleSystem, EdgeTarget};
use crate::uniformize::UniformSolution;

pub const SOLUTION_VERSION: &str = "hypdel-1";

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Targets {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<f64>>,
}

impl Targets {
    pub fn from_psi(p: &EdgeTarget) -> Self {
        Self {
            psi: Some(p.psi().to_vec()),
            theta: None,
        }
    }

    pub fn target(&self) -> Result<EdgeTarget> {
        match (&self.psi, &self.theta) {
            (Some(psi), None) => Ok(EdgeTarget::new(psi.clone())),
            (None, Some(theta)) => Ok(EdgeTarget::from_theta(theta)),
            _ => Err(Error::InvalidInput(
                "targets must give exactly one of \"psi\" and \"theta\"".into(),
            )),
        }
    }
}

fn gluing_of(c: &SurfaceComplex) -> Vec<[[usize; 2]; 2]> {
    c.gluing()
        .into_iter()
        .map(|pair| pair.map(|s| [s.face, s.index]))
        .collect()
}

fn complex_of(faces: usize, gluing: &[[[usize; 2]; 2]]) -> Result<SurfaceComplex> {
    let pairs: Vec<[Side; 2]> = gluing
        .iter()
        .map(|pair| pair.map(|[f, s]| Side::new(f, s)))
        .collect();
    Ok(SurfaceComplex::new(faces, &pairs)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub faces: usize,
    pub gluing: Vec<[[usize; 2]; 2]>,
    pub targets: Targets,
}

impl InstanceFile {
    pub fn new(c: &SurfaceComplex, p: &EdgeTarget) -> Self {
        Self {
            faces: c.face_count(),
            gluing: gluing_of(c),
            targets: Targets::from_psi(p),
        }
    }

    pub fn complex(&self) -> Result<SurfaceComplex> {
        complex_of(self.faces, &self.gluing)
    }

    pub fn target(&self) -> Result<EdgeTarget> {
        self.targets.target()
    }
}

/// A solved instance: the complex, the corner angles (slot `3 f + i` is the
/// angle of face `f` opposite side `i`), edge lengths and the target.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub version: String,
    pub faces: usize,
    pub gluing: Vec<[[usize; 2]; 2]>,
    pub targets: Targets,
    pub angles: Vec<f64>,
    pub lengths: Vec<f64>,
    pub residual: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub objective: f64,
}

impl SolutionFile {
    pub fn new(c: &SurfaceComplex, u: &UniformSolution) -> Self {
        Self {
            version: SOLUTION_VERSION.into(),
            faces: c.face_count(),
            gluing: gluing_of(c),
            targets: Targets::from_psi(&u.target_echo),
            angles: u.angles.values().to_vec(),
            lengths: u.lengths.clone(),
            residual: u.residual,
            gradient_norm: u.gradient_norm,
            iterations: u.iterations,
            objective: u.objective,
        }
    }

    pub fn complex(&self) -> Result<SurfaceComplex> {
        complex_of(self.faces, &self.gluing)
    }

    pub fn solution(&self) -> Result<UniformSolution> {
        if self.version != SOLUTION_VERSION {
            return Err(Error::InvalidInput(format!(
                "unsupported solution version {:?}",
                self.version
            )));
        }
        Ok(UniformSolution {
            angles: AngleSystem::new(self.angles.clone()),
            lengths: self.lengths.clone(),
            residual: self.residual,
            gradient_norm: self.gradient_norm,
            iterations: self.iterations,
            objective: self.objective,
            history: Vec::new(),
            target_echo: self.targets.target()?,
        })
    }
}

pub fn parse_instance(text: &str) -> Result<InstanceFile> {
    serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))
}

pub fn parse_solution(text: &str) -> Result<SolutionFile> {
    serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}
