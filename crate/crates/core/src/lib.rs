//! Hyperbolic Delaunay structures on closed triangulated surfaces.
//!
//! Given circumscribing-disk intersection angles on the edges of a closed
//! triangulated surface, this crate decides whether they are realized by a
//! hyperbolic Delaunay triangulation, computes the realizing metric by
//! maximizing a sum of ideal prism volumes over a conformal class, and builds
//! the resulting geometry.

pub mod complex;
pub mod error;
pub mod export;
pub mod feasibility;
pub mod functionals;
pub mod hyperbolic;
pub mod instances;
pub mod io;
pub mod lobachevsky;
pub mod realization;
pub mod simplex;
pub mod uniformize;
pub mod volume;

pub use complex::{ComplexError, DualTree, Side, SurfaceComplex};
pub use error::{Error, Result};
pub use feasibility::{initial_plus_point, margin_lp, LpVerdict, MarginLpResult};
pub use functionals::{AngleSystem, ConformalVector, EdgeTarget};
pub use realization::{develop, Layout, Prism};
pub use uniformize::{certify, uniformize, uniformize_from, SolveOptions, UniformSolution};
