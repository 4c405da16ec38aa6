//! Pointwise 1-type detection: find f and a constant C with ΔG = f(G + C).
//!
//! The relation is bilinear in (f, C). For fixed C each f_k is a one-dimensional
//! projection; for fixed f the best C is an explicit weighted mean. Alternating
//! the two never increases Σ‖ΔG_k − f_k(G_k + C)‖².

use crate::algebra::Bivector;
use crate::curve::{synthesize_family, CurveError, ExponentialFamilyParams, ProfileCurve, Sign};
use crate::grid::{sample_field, FieldSample, GridSpec, LaplacianMode};
use crate::surface::{curvature_from_local, SurfaceKind};
use crate::tolerances::Tolerances;
use nalgebra::{SMatrix, SVector};
use serde::Serialize;
use thiserror::Error;

pub const MIN_SAMPLES: usize = 8;
pub const MAX_ITERATIONS: usize = 100;
pub const C_STEP_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DetectError {
    #[error("detector needs at least {needed} distinct samples, got {found}")]
    TooFewSamples { found: usize, needed: usize },
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OneTypeKind {
    First,
    Second,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FSample {
    pub t: f64,
    pub s: f64,
    pub f: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OneTypeReport {
    pub flat: bool,
    pub max_abs_k: f64,
    pub harmonic: bool,
    pub pointwise_one_type: bool,
    pub kind: OneTypeKind,
    pub f_samples: Vec<FSample>,
    pub f_stats: FStats,
    #[serde(rename = "C")]
    pub c: Bivector,
    /// max_k ‖ΔG_k − f_k(G_k + C)‖∞
    pub residual_max: f64,
    /// `residual_max` divided by max_k ‖ΔG_k‖∞.
    pub relative_residual: f64,
    pub global_one_type: bool,
    pub converged: bool,
    pub iterations: usize,
    /// Which starting point produced the accepted solution.
    pub start: &'static str,
}

impl OneTypeReport {
    pub fn f_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.f_samples.iter().map(|x| x.f)
    }
}

fn project_f(l: Bivector, g: Bivector, c: Bivector) -> f64 {
    let w = g + c;
    let den = w.euclidean_dot(w);
    if den <= f64::MIN_POSITIVE {
        0.0
    } else {
        l.euclidean_dot(w) / den
    }
}

fn refit_c(g: &[Bivector], l: &[Bivector], f: &[f64]) -> Option<Bivector> {
    let den: f64 = f.iter().map(|v| v * v).sum();
    if den <= f64::MIN_POSITIVE {
        return None;
    }
    let num = (0..g.len()).fold(Bivector::ZERO, |acc, k| acc + f[k] * (l[k] - f[k] * g[k]));
    Some((1.0 / den) * num)
}

struct Solve {
    c: Bivector,
    f: Vec<f64>,
    residual: f64,
    iterations: usize,
    converged: bool,
}

fn residual(g: &[Bivector], l: &[Bivector], f: &[f64], c: Bivector) -> f64 {
    (0..g.len()).map(|k| (l[k] - f[k] * (g[k] + c)).max_abs()).fold(0.0, f64::max)
}

fn als(g: &[Bivector], l: &[Bivector], start: Bivector, induced_first: bool, step_tol: f64) -> Solve {
    let mut c = start;
    let mut f: Vec<f64> = Vec::with_capacity(g.len());
    let mut converged = false;
    let mut iterations = 0;
    for it in 0..MAX_ITERATIONS {
        iterations = it + 1;
        f.clear();
        f.extend((0..g.len()).map(|k| {
            let gg = g[k].inner(g[k]);
            if it == 0 && induced_first && gg.abs() > 1e-300 {
                l[k].inner(g[k]) / gg
            } else {
                project_f(l[k], g[k], c)
            }
        }));
        let Some(next) = refit_c(g, l, &f) else {
            converged = true;
            break;
        };
        let moved = (next - c).max_abs();
        c = next;
        if moved < step_tol {
            converged = true;
            break;
        }
    }
    f.clear();
    f.extend((0..g.len()).map(|k| project_f(l[k], g[k], c)));
    let residual = residual(g, l, &f, c);
    Solve { c, f, residual, iterations, converged }
}

/// Least-squares C from the parallelism conditions ΔG_k ∥ (G_k + C):
/// ΔG_i C_j − ΔG_j C_i = ΔG_j G_i − ΔG_i G_j for every component pair.
fn parallelism_start(g: &[Bivector], l: &[Bivector]) -> Option<Bivector> {
    let mut ata = SMatrix::<f64, 6, 6>::zeros();
    let mut atb = SVector::<f64, 6>::zeros();
    for k in 0..g.len() {
        let (gk, lk) = (g[k].to_array(), l[k].to_array());
        let scale = l[k].max_abs();
        if scale <= f64::MIN_POSITIVE {
            continue;
        }
        let w = 1.0 / (scale * scale);
        for i in 0..6 {
            for j in (i + 1)..6 {
                let mut row = SVector::<f64, 6>::zeros();
                row[j] = lk[i];
                row[i] = -lk[j];
                let rhs = lk[j] * gk[i] - lk[i] * gk[j];
                ata += w * row * row.transpose();
                atb += w * rhs * row;
            }
        }
    }
    let eps = 1e-12 * ata.norm().max(f64::MIN_POSITIVE);
    let sol = ata.svd(true, true).solve(&atb, eps).ok()?;
    Some(Bivector::from_array(std::array::from_fn(|i| sol[i])))
}

fn stats(v: &[f64]) -> FStats {
    if v.is_empty() {
        return FStats { min: 0.0, max: 0.0, mean: 0.0, std: 0.0 };
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    FStats {
        min: v.iter().copied().fold(f64::INFINITY, f64::min),
        max: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        mean,
        std: var.sqrt(),
    }
}

/// Decides whether the sampled Gauss map is pointwise 1-type.
pub fn detect(samples: &[FieldSample], tol: &Tolerances) -> Result<OneTypeReport, DetectError> {
    for (i, x) in samples.iter().enumerate() {
        let finite = x.gauss.to_array().iter().chain(&x.laplacian.to_array()).all(|v| v.is_finite()) && x.k.is_finite();
        if !finite {
            return Err(DetectError::NonFinite(i));
        }
    }
    let mut keys: Vec<(u64, u64)> = samples.iter().map(|x| (x.t.to_bits(), x.s.to_bits())).collect();
    keys.sort_unstable();
    keys.dedup();
    if keys.len() < MIN_SAMPLES {
        return Err(DetectError::TooFewSamples { found: keys.len(), needed: MIN_SAMPLES });
    }

    let g: Vec<Bivector> = samples.iter().map(|x| x.gauss).collect();
    let l: Vec<Bivector> = samples.iter().map(|x| x.laplacian).collect();
    let max_abs_k = samples.iter().map(|x| x.k.abs()).fold(0.0, f64::max);
    let flat = max_abs_k <= tol.flat;
    let g_scale = g.iter().map(|v| v.max_abs()).fold(0.0, f64::max);
    let l_scale = l.iter().map(|v| v.max_abs()).fold(0.0, f64::max);

    let with_f = |f: &[f64]| samples.iter().zip(f).map(|(x, &f)| FSample { t: x.t, s: x.s, f }).collect::<Vec<_>>();

    if l_scale <= tol.harmonic * g_scale.max(1.0) {
        let f = vec![0.0; samples.len()];
        return Ok(OneTypeReport {
            flat,
            max_abs_k,
            harmonic: true,
            pointwise_one_type: true,
            kind: OneTypeKind::First,
            f_stats: stats(&f),
            f_samples: with_f(&f),
            c: Bivector::ZERO,
            residual_max: l_scale,
            relative_residual: 0.0,
            global_one_type: false,
            converged: true,
            iterations: 0,
            start: "harmonic",
        });
    }

    let step_tol = C_STEP_TOL * g_scale.max(1.0);
    let threshold = tol.detect * l_scale;
    let mut best = als(&g, &l, Bivector::ZERO, true, step_tol);
    let mut start = "zero";
    if best.residual > threshold || !best.converged {
        if let Some(c0) = parallelism_start(&g, &l) {
            let alt = als(&g, &l, c0, false, step_tol);
            if alt.residual < best.residual {
                best = alt;
                start = "parallelism";
            }
        }
    }

    let pointwise = best.residual <= threshold;
    let kind = match (pointwise, best.c.max_abs() <= tol.c_zero) {
        (false, _) => OneTypeKind::None,
        (true, true) => OneTypeKind::First,
        (true, false) => OneTypeKind::Second,
    };
    let f_stats = stats(&best.f);
    let global =
        pointwise && f_stats.std <= tol.f_constant * best.f.iter().map(|v| v.abs()).sum::<f64>() / best.f.len() as f64;
    Ok(OneTypeReport {
        flat,
        max_abs_k,
        harmonic: false,
        pointwise_one_type: pointwise,
        kind,
        f_samples: with_f(&best.f),
        f_stats,
        c: best.c,
        residual_max: best.residual,
        relative_residual: best.residual / l_scale,
        global_one_type: global,
        converged: best.converged,
        iterations: best.iterations,
        start,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum Classification {
    TotallyGeodesic,
    ExponentialFamily { params: ExponentialFamilyParams, fit_residual: f64 },
    NotFlat { max_abs_k: f64 },
    FlatNotOneType,
    Indeterminate { reason: String },
}

struct LineFit {
    slope: f64,
    intercept: f64,
    residual: f64,
}

fn fit_line(x: &[f64], y: &[f64]) -> Option<LineFit> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).abs()).fold(0.0, f64::max);
    Some(LineFit { slope, intercept, residual })
}

const FIT_TOL: f64 = 1e-8;

fn recover_family(curve: &ProfileCurve, s: &[f64], b: f64, tol: &Tolerances) -> Result<Classification, CurveError> {
    let mut up = Vec::with_capacity(s.len());
    let mut down = Vec::with_capacity(s.len());
    let mut signs = (0.0, 0.0);
    for &si in s {
        let p = curve.jets(si)?;
        let (u, d) = (p.x.v0 + p.y.v0, p.x.v0 - p.y.v0);
        if u == 0.0 || d == 0.0 {
            return Ok(Classification::Indeterminate { reason: format!("x ± y vanishes at s = {si}") });
        }
        if signs == (0.0, 0.0) {
            signs = (u.signum(), d.signum());
        } else if signs != (u.signum(), d.signum()) {
            return Ok(Classification::Indeterminate { reason: format!("x ± y changes sign near s = {si}") });
        }
        up.push(u.abs().ln());
        down.push(d.abs().ln());
    }
    let (Some(fu), Some(fd)) = (fit_line(s, &up), fit_line(s, &down)) else {
        return Ok(Classification::Indeterminate { reason: "fewer than two distinct s samples".into() });
    };
    let b0 = 0.5 * (fd.slope - fu.slope);
    let fit_residual = fu.residual.max(fd.residual).max((fu.slope + fd.slope).abs());
    if fit_residual > FIT_TOL * (1.0 + b0.abs()) {
        return Ok(Classification::Indeterminate { reason: format!("log-linear fit residual {fit_residual:.3e}") });
    }
    if (b0 - b).abs() > FIT_TOL * (1.0 + b.abs()) {
        return Ok(Classification::Indeterminate { reason: format!("fitted b0 = {b0} disagrees with b = {b}") });
    }
    let p = signs.0 * fu.intercept.exp();
    let q = signs.1 * fd.intercept.exp();
    let d = 0.5 * (p.abs() / q.abs()).ln();
    let params = ExponentialFamilyParams::new(b0, q * d.exp(), p * (-d).exp(), d, Sign::Plus);
    let scale = (1.0 / (b0 * b0)).max(1.0);
    if params.constraint_residual() > tol.identity * scale {
        return Ok(Classification::Indeterminate {
            reason: format!("recovered parameters miss the constraint by {:.3e}", params.constraint_residual()),
        });
    }
    Ok(Classification::ExponentialFamily { params, fit_residual })
}

/// Places a curve in the flat / pointwise 1-type classification using the
/// invariants sampled at `s`.
pub fn classify_flat_one_type(
    kind: SurfaceKind,
    curve: &ProfileCurve,
    s: &[f64],
    tol: &Tolerances,
) -> Result<Classification, CurveError> {
    if s.is_empty() {
        return Ok(Classification::Indeterminate { reason: "no samples".into() });
    }
    let locals = s.iter().map(|&v| curve.local(v)).collect::<Result<Vec<_>, _>>()?;
    let max_bc = locals.iter().map(|g| g.inv.b.abs().max(g.inv.c.abs())).fold(0.0, f64::max);
    if max_bc <= tol.totally_geodesic {
        return Ok(Classification::TotallyGeodesic);
    }
    let max_abs_k = locals.iter().map(|g| curvature_from_local(kind, g).abs()).fold(0.0, f64::max);
    if max_abs_k > tol.flat {
        return Ok(Classification::NotFlat { max_abs_k });
    }
    let b_ref = locals[0].inv.b;
    let a_zero = locals.iter().all(|g| g.inv.a.abs() <= tol.identity);
    let b_const = locals.iter().all(|g| {
        (g.inv.b - b_ref).abs() <= tol.identity * (1.0 + b_ref.abs())
            && (g.inv.c - g.inv.b).abs() <= tol.identity * (1.0 + b_ref.abs())
    });
    if curve.epsilon1() == Sign::Plus && a_zero && b_const {
        return recover_family(curve, s, b_ref, tol);
    }
    Ok(Classification::FlatNotOneType)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremCheck {
    pub passed: bool,
    pub failing_stage: Option<String>,
    pub params: ExponentialFamilyParams,
    pub kind: SurfaceKind,
    pub expected_f: f64,
    pub max_relative_f_error: f64,
    pub report: Option<OneTypeReport>,
    pub classification: Option<Classification>,
}

/// The value of f on a family member: ΔG = −4b₀²G.
pub fn family_f(b0: f64) -> f64 {
    -4.0 * b0 * b0
}

/// Default family window: s ∈ [−1, 1] on the kind's default t range, 17×17.
pub fn default_family_grid(kind: SurfaceKind) -> GridSpec {
    GridSpec::for_kind(kind, [-1.0, 1.0], 17, 17)
}

/// Synthesizes a family member and checks every claim about it: flat,
/// pointwise 1-type of the first kind, f ≡ −4b₀², C = 0 and f constant.
pub fn verify_theorem(
    kind: SurfaceKind,
    params: ExponentialFamilyParams,
    grid: &GridSpec,
    tol: &Tolerances,
) -> TheoremCheck {
    let expected_f = family_f(params.b0);
    let mut out = TheoremCheck {
        passed: false,
        failing_stage: None,
        params,
        kind,
        expected_f,
        max_relative_f_error: f64::NAN,
        report: None,
        classification: None,
    };
    let fail = |mut o: TheoremCheck, stage: String| {
        o.failing_stage = Some(stage);
        o
    };
    if let Err(e) = params.check(tol) {
        return fail(out, format!("constraint: {e}"));
    }
    if let Err(e) = grid.check() {
        return fail(out, format!("grid: {e}"));
    }
    let curve = match synthesize_family(params, (grid.s_range[0], grid.s_range[1])) {
        Ok(c) => c,
        Err(e) => return fail(out, format!("synthesis: {e}")),
    };
    let v = curve.validate(&grid.s_values(), tol);
    if !v.passed() {
        return fail(out, format!("validation: {}", v.errors.join("; ")));
    }
    let samples = match sample_field(kind, &curve, grid, LaplacianMode::Closed) {
        Ok(s) => s,
        Err(e) => return fail(out, format!("sampling: {e}")),
    };
    let report = match detect(&samples, tol) {
        Ok(r) => r,
        Err(e) => return fail(out, format!("detection: {e}")),
    };
    out.max_relative_f_error = report.f_values().map(|f| (f - expected_f).abs() / expected_f.abs()).fold(0.0, f64::max);
    out.classification = classify_flat_one_type(kind, &curve, &grid.s_values(), tol).ok();
    let stage = if !report.flat {
        Some(format!("flatness: max|K| = {:.3e}", report.max_abs_k))
    } else if !report.pointwise_one_type {
        Some(format!("pointwise 1-type: relative residual {:.3e}", report.relative_residual))
    } else if report.kind != OneTypeKind::First {
        Some(format!("first kind: |C| = {:.3e}", report.c.max_abs()))
    } else if out.max_relative_f_error > tol.detect {
        Some(format!("f value: relative error {:.3e} against {expected_f}", out.max_relative_f_error))
    } else if !report.global_one_type {
        Some(format!("f constancy: std {:.3e}", report.f_stats.std))
    } else if !matches!(out.classification, Some(Classification::ExponentialFamily { .. })) {
        Some(format!("classification: {:?}", out.classification))
    } else {
        None
    };
    out.report = Some(report);
    match stage {
        Some(s) => fail(out, s),
        None => {
            out.passed = true;
            out
        }
    }
}
