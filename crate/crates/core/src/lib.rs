//! Geometry of general rotational surfaces in pseudo-Euclidean 4-space E⁴₂ and
//! detection of pointwise 1-type Gauss maps.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod analysis;
pub mod curve;
pub mod detector;
pub mod gauss_map;
pub mod grid;
pub mod jet;
pub mod mesh;
pub mod surface;
pub mod tolerances;

pub use algebra::{Bivector, PseudoVector4};
pub use analysis::{run_analysis, AnalysisConfig, AnalysisError, AnalysisReport};
pub use curve::{AnalyticPreset, CurveError, CurveSpec, ExponentialFamilyParams, ProfileCurve, Sign};
pub use detector::{classify_flat_one_type, detect, verify_theorem, Classification, OneTypeKind, OneTypeReport};
pub use gauss_map::{calibrate, LaplacianConvention};
pub use grid::{GridSpec, LaplacianMode};
pub use jet::Jet3;
pub use mesh::Mesh;
pub use surface::SurfaceKind;
pub use tolerances::Tolerances;
