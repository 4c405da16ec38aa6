//! End-to-end analysis of one surface: validation, sampling, identities,
//! Laplacian agreement, detection and classification, gathered in one report.

use crate::curve::{CurveError, CurveSpec, ProfileCurve, Sign, ValidationReport};
use crate::detector::{classify_flat_one_type, detect, Classification, OneTypeKind, OneTypeReport};
use crate::gauss_map::{
    calibrate, laplacian_closed, laplacian_numeric, CalibrationReport, LaplacianConvention, DEFAULT_STEP,
};
use crate::grid::{identity_maxima, sample_field, GridSpec, IdentityMaxima, LaplacianMode};
use crate::mesh::check_projection;
use crate::surface::SurfaceKind;
use crate::tolerances::Tolerances;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use thiserror::Error;

pub const DEFAULT_GRID: usize = 33;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsWeighting {
    /// Use the calibrated convention.
    #[default]
    Auto,
    On,
    Off,
}

impl EpsWeighting {
    pub fn resolve(self) -> LaplacianConvention {
        match self {
            EpsWeighting::Auto => calibrate().chosen,
            EpsWeighting::On => LaplacianConvention::EpsWeighted,
            EpsWeighting::Off => LaplacianConvention::Unweighted,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Flags {
    pub numeric_laplacian: bool,
    pub richardson: bool,
    pub eps_weighted: EpsWeighting,
    pub step: f64,
}

impl Default for Flags {
    fn default() -> Self {
        Self { numeric_laplacian: false, richardson: false, eps_weighted: EpsWeighting::Auto, step: DEFAULT_STEP }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub t_range: Option<[f64; 2]>,
    pub s_range: Option<[f64; 2]>,
    pub nt: usize,
    pub ns: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { t_range: None, s_range: None, nt: DEFAULT_GRID, ns: DEFAULT_GRID }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputPaths {
    pub report: Option<PathBuf>,
    pub obj: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

fn default_projection() -> [usize; 3] {
    [1, 2, 3]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    pub surface: SurfaceKind,
    pub curve: CurveSpec,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputPaths,
    #[serde(default = "default_projection")]
    pub projection: [usize; 3],
    #[serde(default)]
    pub flags: Flags,
}

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid curve: {0}")]
    Curve(#[from] CurveError),
    #[error("curve validation failed: {}", .0.errors.join("; "))]
    Validation(Box<ValidationReport>),
    #[error("detection failed: {0}")]
    Detection(String),
}

impl AnalysisConfig {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Structural checks that do not need the curve.
    pub fn check(&self) -> Result<(), AnalysisError> {
        let g = &self.grid;
        if g.nt < 2 || g.ns < 2 {
            return Err(AnalysisError::Config(format!("grid must be at least 2x2, got {}x{}", g.nt, g.ns)));
        }
        for (name, r) in [("t_range", g.t_range), ("s_range", g.s_range)] {
            if let Some([lo, hi]) = r {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(AnalysisError::Config(format!("{name} must satisfy lo < hi, got [{lo}, {hi}]")));
                }
            }
        }
        check_projection(self.projection).map_err(AnalysisError::Config)?;
        if !(self.flags.step.is_finite() && self.flags.step > 0.0) {
            return Err(AnalysisError::Config(format!("step must be positive, got {}", self.flags.step)));
        }
        Ok(())
    }

    /// The sampling grid. Without an explicit s range the curve domain is
    /// used, shrunk by one stencil step when the Laplacian is numeric.
    pub fn resolve_grid(&self, curve: &ProfileCurve) -> Result<GridSpec, AnalysisError> {
        let (lo, hi) = curve.domain();
        let s_range = match self.grid.s_range {
            Some([a, b]) => {
                if !(curve.contains(a) && curve.contains(b)) {
                    return Err(AnalysisError::Config(format!(
                        "s_range [{a}, {b}] leaves the curve domain [{lo}, {hi}]"
                    )));
                }
                [a, b]
            }
            None if self.flags.numeric_laplacian => {
                let m = self.flags.step;
                if hi - lo <= 2.0 * m {
                    return Err(AnalysisError::Config("curve domain is narrower than the stencil".into()));
                }
                [lo + m, hi - m]
            }
            None => [lo, hi],
        };
        let mut grid = GridSpec::for_kind(self.surface, s_range, self.grid.nt, self.grid.ns);
        if let Some(t) = self.grid.t_range {
            grid.t_range = t;
            grid.t_endpoint = true;
        }
        Ok(grid)
    }

    pub fn laplacian_mode(&self) -> LaplacianMode {
        if self.flags.numeric_laplacian {
            LaplacianMode::Numeric {
                step: self.flags.step,
                convention: self.flags.eps_weighted.resolve(),
                richardson: self.flags.richardson,
            }
        } else {
            LaplacianMode::Closed
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub surface: SurfaceKind,
    pub epsilon1: Sign,
    pub curve_source: &'static str,
    pub grid: GridSpec,
    pub laplacian: LaplacianMode,
    pub calibration: CalibrationReport,
    pub convention: LaplacianConvention,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureSummary {
    pub min: f64,
    pub max: f64,
    pub max_abs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaplacianAgreement {
    pub points: usize,
    pub step: f64,
    pub convention: LaplacianConvention,
    pub max_abs_diff: f64,
    pub max_relative_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub metadata: Metadata,
    pub validation: ValidationReport,
    pub curvature: CurvatureSummary,
    pub identities: IdentityMaxima,
    pub laplacian_agreement: LaplacianAgreement,
    pub detector: OneTypeReport,
    pub classification: Classification,
    pub pointwise_one_type: bool,
    pub kind: OneTypeKind,
    /// The constant value of f when the Gauss map is globally 1-type.
    pub f_constant: Option<f64>,
}

/// Closed against numeric ΔG at every grid point whose stencil fits in the domain.
pub fn laplacian_agreement(
    kind: SurfaceKind,
    curve: &ProfileCurve,
    grid: &GridSpec,
    step: f64,
    convention: LaplacianConvention,
) -> Result<LaplacianAgreement, CurveError> {
    let pts: Vec<_> =
        grid.points().into_iter().filter(|&(_, s)| curve.contains(s - step) && curve.contains(s + step)).collect();
    let diffs = pts
        .par_iter()
        .map(|&(t, s)| {
            let closed = laplacian_closed(kind, curve, t, s)?.ambient;
            let num = laplacian_numeric(kind, curve, t, s, step, convention, false)?;
            let d = (num - closed).max_abs();
            Ok((d, d / closed.max_abs().max(1.0)))
        })
        .collect::<Result<Vec<_>, CurveError>>()?;
    Ok(LaplacianAgreement {
        points: pts.len(),
        step,
        convention,
        max_abs_diff: diffs.iter().map(|d| d.0).fold(0.0, f64::max),
        max_relative_diff: diffs.iter().map(|d| d.1).fold(0.0, f64::max),
    })
}

pub fn build_curve(config: &AnalysisConfig) -> Result<ProfileCurve, AnalysisError> {
    if let Some(p) = config.curve.family {
        p.check(&config.tolerances)?;
    }
    Ok(config.curve.build()?)
}

fn source_name(spec: &CurveSpec) -> &'static str {
    if spec.family.is_some() {
        "family"
    } else if spec.analytic.is_some() {
        "analytic"
    } else {
        "samples"
    }
}

pub fn run_analysis(config: &AnalysisConfig) -> Result<AnalysisReport, AnalysisError> {
    config.check()?;
    let curve = build_curve(config)?;
    let tol = config.tolerances;
    let validation = curve.validate_default(&tol);
    if !validation.passed() {
        return Err(AnalysisError::Validation(Box::new(validation)));
    }
    let grid = config.resolve_grid(&curve)?;
    let mode = config.laplacian_mode();
    let convention = config.flags.eps_weighted.resolve();

    let detection = |e: CurveError| AnalysisError::Detection(e.to_string());
    let samples = sample_field(config.surface, &curve, &grid, mode).map_err(detection)?;
    let detector = detect(&samples, &tol).map_err(|e| AnalysisError::Detection(e.to_string()))?;
    let s_values = grid.s_values();
    let classification = classify_flat_one_type(config.surface, &curve, &s_values, &tol).map_err(detection)?;
    let identities = identity_maxima(&curve, &s_values).map_err(detection)?;
    let agreement =
        laplacian_agreement(config.surface, &curve, &grid, config.flags.step, convention).map_err(detection)?;
    let curvature = CurvatureSummary {
        min: samples.iter().map(|x| x.k).fold(f64::INFINITY, f64::min),
        max: samples.iter().map(|x| x.k).fold(f64::NEG_INFINITY, f64::max),
        max_abs: detector.max_abs_k,
    };

    Ok(AnalysisReport {
        metadata: Metadata {
            tool: "pgl",
            version: env!("CARGO_PKG_VERSION"),
            surface: config.surface,
            epsilon1: curve.epsilon1(),
            curve_source: source_name(&config.curve),
            grid,
            laplacian: mode,
            calibration: calibrate(),
            convention,
            tolerances: tol,
        },
        validation,
        curvature,
        identities,
        laplacian_agreement: agreement,
        pointwise_one_type: detector.pointwise_one_type,
        kind: detector.kind,
        f_constant: detector.global_one_type.then_some(detector.f_stats.mean),
        classification,
        detector,
    })
}
