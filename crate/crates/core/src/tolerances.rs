//! Every numeric threshold used by validation, classification and detection.

use serde::{Deserialize, Serialize};

/// Central tolerance record. All fields can be overridden from configuration;
/// missing fields keep their defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Max |(x′)² − (y′)² − 1| accepted by curve validation.
    pub unit_speed: f64,
    /// Max |μ₁μ₂ + 1/b₀²| accepted for exponential-family parameters.
    pub family_constraint: f64,
    /// Gauss and Codazzi identity residuals.
    pub identity: f64,
    /// Off-diagonal entries of frame Gram matrices.
    pub gram: f64,
    /// Max |K| for a surface to count as flat.
    pub flat: f64,
    /// Max |b|, |c| for a surface to count as totally geodesic.
    pub totally_geodesic: f64,
    /// Relative residual threshold of the 1-type detector.
    pub detect: f64,
    /// ‖C‖∞ below which the 1-type relation is of the first kind.
    pub c_zero: f64,
    /// Relative spread of f below which f counts as constant.
    pub f_constant: f64,
    /// ‖ΔG‖∞ below which the Gauss map counts as harmonic, relative to max(1, ‖G‖∞).
    pub harmonic: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            unit_speed: 1e-9,
            family_constraint: 1e-12,
            identity: 1e-8,
            gram: 1e-10,
            flat: 1e-9,
            totally_geodesic: 1e-10,
            detect: 1e-6,
            c_zero: 1e-8,
            f_constant: 1e-8,
            harmonic: 1e-10,
        }
    }
}

/// Default number of uniform samples used to validate a curve.
pub const DEFAULT_VALIDATION_SAMPLES: usize = 257;
