//! Rectangular (t, s) grids and parallel sampling of the Gauss map field.

use crate::algebra::wedge;
use crate::algebra::{Bivector, PseudoVector4};
use crate::curve::{linspace, CurveError, ProfileCurve};
use crate::gauss_map::{frame_bivectors, laplacian_frame_coeffs, laplacian_numeric, LaplacianConvention, DEFAULT_STEP};
use crate::surface::{curvature_from_local, frame_at, immersion, residuals_from_local, SurfaceKind};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub t_range: [f64; 2],
    pub s_range: [f64; 2],
    pub nt: usize,
    pub ns: usize,
    /// Whether the last t value equals `t_range[1]`. Off for periodic rotations.
    #[serde(default = "yes")]
    pub t_endpoint: bool,
}

fn yes() -> bool {
    true
}

impl GridSpec {
    pub fn new(t_range: [f64; 2], s_range: [f64; 2], nt: usize, ns: usize) -> Self {
        Self { t_range, s_range, nt, ns, t_endpoint: true }
    }

    /// Default window for a surface kind: the kind's t range and the given s range.
    pub fn for_kind(kind: SurfaceKind, s_range: [f64; 2], nt: usize, ns: usize) -> Self {
        let (lo, hi) = kind.default_t_range();
        Self { t_range: [lo, hi], s_range, nt, ns, t_endpoint: !kind.is_periodic() }
    }

    pub fn check(&self) -> Result<(), String> {
        if self.nt < 2 || self.ns < 2 {
            return Err(format!("grid must be at least 2x2, got {}x{}", self.nt, self.ns));
        }
        for (name, [lo, hi]) in [("t", self.t_range), ("s", self.s_range)] {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(format!("{name} range must satisfy lo < hi, got [{lo}, {hi}]"));
            }
        }
        Ok(())
    }

    pub fn t_values(&self) -> Vec<f64> {
        let [lo, hi] = self.t_range;
        if self.t_endpoint {
            linspace(lo, hi, self.nt)
        } else {
            let dt = (hi - lo) / self.nt as f64;
            (0..self.nt).map(|i| lo + dt * i as f64).collect()
        }
    }

    pub fn s_values(&self) -> Vec<f64> {
        linspace(self.s_range[0], self.s_range[1], self.ns)
    }

    pub fn len(&self) -> usize {
        self.nt * self.ns
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid points in row-major order: s outer, t inner.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let ts = self.t_values();
        self.s_values().into_iter().flat_map(|s| ts.iter().map(move |&t| (t, s))).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum LaplacianMode {
    Closed,
    Numeric { step: f64, convention: LaplacianConvention, richardson: bool },
}

impl LaplacianMode {
    pub fn numeric(convention: LaplacianConvention, richardson: bool) -> Self {
        LaplacianMode::Numeric { step: DEFAULT_STEP, convention, richardson }
    }
}

/// Everything the detector needs at one grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldSample {
    pub t: f64,
    pub s: f64,
    pub position: PseudoVector4,
    pub k: f64,
    pub gauss: Bivector,
    pub laplacian: Bivector,
}

fn sample_one(
    kind: SurfaceKind,
    curve: &ProfileCurve,
    t: f64,
    s: f64,
    mode: LaplacianMode,
) -> Result<FieldSample, CurveError> {
    let g = curve.local(s)?;
    let fr = frame_at(kind, &g, t);
    let laplacian = match mode {
        LaplacianMode::Closed => {
            let co = laplacian_frame_coeffs(kind, &g);
            let basis = frame_bivectors(&fr);
            (0..6).fold(Bivector::ZERO, |acc, i| acc + co[i] * basis[i])
        }
        LaplacianMode::Numeric { step, convention, richardson } => {
            laplacian_numeric(kind, curve, t, s, step, convention, richardson)?
        }
    };
    let (x, y) = (g.point.x.v0, g.point.y.v0);
    Ok(FieldSample {
        t,
        s,
        position: immersion(kind, x, y, t),
        k: curvature_from_local(kind, &g),
        gauss: wedge(fr.e1, fr.e2),
        laplacian,
    })
}

/// Samples the whole grid in parallel; output order follows [`GridSpec::points`].
pub fn sample_field(
    kind: SurfaceKind,
    curve: &ProfileCurve,
    grid: &GridSpec,
    mode: LaplacianMode,
) -> Result<Vec<FieldSample>, CurveError> {
    grid.points().into_par_iter().map(|(t, s)| sample_one(kind, curve, t, s, mode)).collect()
}

/// Positions only, for mesh export.
pub fn sample_positions(
    kind: SurfaceKind,
    curve: &ProfileCurve,
    grid: &GridSpec,
) -> Result<Vec<(f64, f64, PseudoVector4, f64)>, CurveError> {
    grid.points()
        .into_par_iter()
        .map(|(t, s)| {
            let g = curve.local(s)?;
            let p = immersion(kind, g.point.x.v0, g.point.y.v0, t);
            Ok((t, s, p, curvature_from_local(kind, &g)))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct IdentityMaxima {
    pub gauss: f64,
    pub codazzi: f64,
}

pub fn identity_maxima(curve: &ProfileCurve, s_values: &[f64]) -> Result<IdentityMaxima, CurveError> {
    let rs: Vec<_> =
        s_values.par_iter().map(|&s| curve.local(s).map(|g| residuals_from_local(&g))).collect::<Result<_, _>>()?;
    Ok(rs.iter().fold(IdentityMaxima::default(), |m, r| IdentityMaxima {
        gauss: m.gauss.max(r.gauss.abs()),
        codazzi: m.codazzi.max(r.codazzi.abs()),
    }))
}
