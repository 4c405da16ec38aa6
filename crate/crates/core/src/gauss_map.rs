//! Gauss map G = e₁∧e₂ into Λ²E⁴₂ and its Laplacian.
//!
//! The closed-form Laplacian is expressed on the frame bivectors e_i∧e_j. The
//! numeric one treats the six coordinates of G as scalar functions and applies
//! a second-order central stencil in (t, s).

use crate::algebra::{wedge, Bivector, PseudoVector4, BIVECTOR_BASIS};
use crate::curve::{AnalyticPreset, CurveError, LocalGeometry, ProfileCurve, Sign};
use crate::surface::{frame_at, immersion, FrameAtPoint, SurfaceKind};
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

/// Default step of the numeric Laplacian stencil.
pub const DEFAULT_STEP: f64 = 1e-3;

/// Weighting of the two second-derivative terms of the Laplacian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LaplacianConvention {
    /// Δf = −Σ (e_i e_i f − (∇_{e_i} e_i) f)
    Unweighted,
    /// Δf = −Σ ε_i (e_i e_i f − (∇_{e_i} e_i) f), ε_i = ⟨e_i, e_i⟩
    EpsWeighted,
}

/// The six frame bivectors e_i∧e_j in storage order (12, 13, 14, 23, 24, 34).
pub fn frame_bivectors(fr: &FrameAtPoint) -> [Bivector; 6] {
    let e = fr.vectors();
    BIVECTOR_BASIS.map(|(i, j)| wedge(e[i], e[j]))
}

/// Coefficients of `v` on the frame bivectors: ⟨v, e_i∧e_j⟩ / (ε_i ε_j).
pub fn frame_coordinates(fr: &FrameAtPoint, v: Bivector) -> [f64; 6] {
    let basis = frame_bivectors(fr);
    std::array::from_fn(|k| {
        let (i, j) = BIVECTOR_BASIS[k];
        v.inner(basis[k]) / (fr.signs[i] * fr.signs[j])
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussSample {
    pub t: f64,
    pub s: f64,
    pub position: PseudoVector4,
    pub gauss: Bivector,
    pub frame_bivectors: [Bivector; 6],
}

pub fn gauss_map_at(kind: SurfaceKind, curve: &ProfileCurve, t: f64, s: f64) -> Result<GaussSample, CurveError> {
    let g = curve.local(s)?;
    let fr = frame_at(kind, &g, t);
    let (x, y) = (g.point.x.v0, g.point.y.v0);
    let position = immersion(kind, x, y, t);
    Ok(GaussSample { t, s, position, gauss: wedge(fr.e1, fr.e2), frame_bivectors: frame_bivectors(&fr) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedLaplacian {
    /// Coefficients on e₁₂, e₁₃, e₁₄, e₂₃, e₂₄, e₃₄.
    pub frame: [f64; 6],
    pub ambient: Bivector,
}

/// Frame coefficients of ΔG from a, b, c and their derivatives.
pub fn laplacian_frame_coeffs(kind: SurfaceKind, g: &LocalGeometry) -> [f64; 6] {
    let (a, b, c) = (g.inv.a, g.inv.b, g.inv.c);
    let (db, dc) = (g.dinv.db, g.dinv.dc);
    let e = g.eps1;
    let f = kind.flip();
    [
        -(3.0 * b * b + c * c),
        2.0 * a * b - e * a * c + dc,
        0.0,
        0.0,
        f * (3.0 * a * b - e * db),
        2.0 * f * (e * b * c - b * b),
    ]
}

pub fn laplacian_closed_at(kind: SurfaceKind, g: &LocalGeometry, t: f64) -> ClosedLaplacian {
    let frame = laplacian_frame_coeffs(kind, g);
    let basis = frame_bivectors(&frame_at(kind, g, t));
    let ambient = (0..6).fold(Bivector::ZERO, |acc, k| acc + frame[k] * basis[k]);
    ClosedLaplacian { frame, ambient }
}

pub fn laplacian_closed(
    kind: SurfaceKind,
    curve: &ProfileCurve,
    t: f64,
    s: f64,
) -> Result<ClosedLaplacian, CurveError> {
    Ok(laplacian_closed_at(kind, &curve.local(s)?, t))
}

fn stencil(
    kind: SurfaceKind,
    curve: &ProfileCurve,
    t: f64,
    s: f64,
    h: f64,
    convention: LaplacianConvention,
) -> Result<Bivector, CurveError> {
    let g0 = curve.local(s)?;
    let gp = curve.local(s + h)?;
    let gm = curve.local(s - h)?;
    let fr = |g: &LocalGeometry, t: f64| frame_at(kind, g, t);
    let f0 = fr(&g0, t);
    let (ftp, ftm) = (fr(&g0, t + h), fr(&g0, t - h));
    let (fsp, fsm) = (fr(&gp, t), fr(&gm, t));
    let n = g0.norm;

    let g_c = wedge(f0.e1, f0.e2);
    let (g_tp, g_tm) = (wedge(ftp.e1, ftp.e2), wedge(ftm.e1, ftm.e2));
    let (g_sp, g_sm) = (wedge(fsp.e1, fsp.e2), wedge(fsm.e1, fsm.e2));

    let inv2h = 0.5 / h;
    let invh2 = 1.0 / (h * h);
    let g_t = inv2h * (g_tp - g_tm);
    let g_s = inv2h * (g_sp - g_sm);
    let g_tt = invh2 * (g_tp - 2.0 * g_c + g_tm);
    let g_ss = invh2 * (g_sp - 2.0 * g_c + g_sm);

    // tangential parts of ∇̃_{e₁}e₁ = (1/N)∂_t e₁ and ∇̃_{e₂}e₂ = ∂_s e₂
    let d11 = (inv2h / n) * (ftp.e1 - ftm.e1);
    let d22 = inv2h * (fsp.e2 - fsm.e2);
    let tangential = |v: PseudoVector4| (v.dot(f0.e1) / f0.signs[0], v.dot(f0.e2) / f0.signs[1]);
    let apply = |(al, be): (f64, f64)| (al / n) * g_t + be * g_s;

    let term1 = (1.0 / (n * n)) * g_tt - apply(tangential(d11));
    let term2 = g_ss - apply(tangential(d22));
    let (w1, w2) = match convention {
        LaplacianConvention::Unweighted => (1.0, 1.0),
        LaplacianConvention::EpsWeighted => (f0.signs[0], f0.signs[1]),
    };
    Ok(-(w1 * term1 + w2 * term2))
}

/// Numeric ΔG at (t, s). The whole stencil must lie inside the curve domain.
pub fn laplacian_numeric(
    kind: SurfaceKind,
    curve: &ProfileCurve,
    t: f64,
    s: f64,
    h: f64,
    convention: LaplacianConvention,
    richardson: bool,
) -> Result<Bivector, CurveError> {
    if !(h.is_finite() && h > 0.0) {
        return Err(CurveError::Parameter(format!("stencil step must be positive, got {h}")));
    }
    let coarse = stencil(kind, curve, t, s, h, convention)?;
    if !richardson {
        return Ok(coarse);
    }
    let fine = stencil(kind, curve, t, s, 0.5 * h, convention)?;
    Ok((1.0 / 3.0) * (4.0 * fine - coarse))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CalibrationReport {
    pub unweighted_error: f64,
    pub eps_weighted_error: f64,
    pub chosen: LaplacianConvention,
}

fn calibration_cases() -> Vec<(SurfaceKind, ProfileCurve)> {
    vec![
        (
            SurfaceKind::M1Hyperbolic,
            ProfileCurve::analytic(
                AnalyticPreset::Hyperbola { m: 1.0, n: 0.0, x0: 0.0, y0: 0.0 },
                (-1.0, 1.0),
                Sign::Plus,
            )
            .expect("calibration curve"),
        ),
        (
            SurfaceKind::M2Elliptic,
            ProfileCurve::analytic(
                AnalyticPreset::Hyperbola { m: 1.0, n: 0.0, x0: 0.0, y0: 0.0 },
                (-1.0, 1.0),
                Sign::Plus,
            )
            .expect("calibration curve"),
        ),
    ]
}

fn calibration_error(convention: LaplacianConvention) -> f64 {
    let mut worst = 0.0_f64;
    for (kind, curve) in calibration_cases() {
        for &t in &[-0.7, 0.0, 0.45] {
            for &s in &[-0.5, 0.1, 0.6] {
                let num = laplacian_numeric(kind, &curve, t, s, DEFAULT_STEP, convention, false)
                    .expect("calibration stencil");
                let closed = laplacian_closed(kind, &curve, t, s).expect("calibration point").ambient;
                worst = worst.max((num - closed).max_abs());
            }
        }
    }
    worst
}

/// Compares both conventions against the closed form on two reference surfaces
/// and keeps the closer one.
pub fn run_calibration() -> CalibrationReport {
    let unweighted_error = calibration_error(LaplacianConvention::Unweighted);
    let eps_weighted_error = calibration_error(LaplacianConvention::EpsWeighted);
    let chosen = if eps_weighted_error <= unweighted_error {
        LaplacianConvention::EpsWeighted
    } else {
        LaplacianConvention::Unweighted
    };
    CalibrationReport { unweighted_error, eps_weighted_error, chosen }
}

/// [`run_calibration`], computed once per process.
pub fn calibrate() -> CalibrationReport {
    static REPORT: OnceLock<CalibrationReport> = OnceLock::new();
    *REPORT.get_or_init(run_calibration)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{synthesize_family, ExponentialFamilyParams};

    fn example1() -> ProfileCurve {
        ProfileCurve::analytic(AnalyticPreset::Hyperbola { m: 1.0, n: 0.0, x0: 0.0, y0: 0.0 }, (-2.0, 2.0), Sign::Plus)
            .unwrap()
    }

    fn curves() -> Vec<(ProfileCurve, f64)> {
        vec![
            (example1(), 0.3),
            (ProfileCurve::analytic(AnalyticPreset::Parabola, (1.0, 2.0), Sign::Minus).unwrap(), 1.4),
            (
                ProfileCurve::analytic(
                    AnalyticPreset::Hyperbola { m: 1.3, n: 0.1, x0: 0.3, y0: 0.5 },
                    (-1.0, 1.0),
                    Sign::Plus,
                )
                .unwrap(),
                0.2,
            ),
            (ProfileCurve::analytic(AnalyticPreset::Line { k: 0.3 }, (1.0, 2.0), Sign::Minus).unwrap(), 1.5),
            (
                ProfileCurve::analytic(AnalyticPreset::FlatSpiral { k: 1.0, c0: 0.0 }, (-2.0, -1.0), Sign::Plus)
                    .unwrap(),
                -1.5,
            ),
        ]
    }

    #[test]
    fn gauss_map_at_origin_of_example1() {
        let g = gauss_map_at(SurfaceKind::M1Hyperbolic, &example1(), 0.0, 0.0).unwrap();
        assert_eq!(g.gauss, Bivector::basis(0, 1));
        assert_eq!(g.position, PseudoVector4::new(0.0, 0.0, 0.0, 1.0));
    }

    #[test]
    fn example1_gauss_map_closed_form() {
        // G₁₂ = cosh²t + sinh²s on the first example
        for (t, s) in [(0.4, -0.3), (1.1, 0.9)] {
            let g = gauss_map_at(SurfaceKind::M1Hyperbolic, &example1(), t, s).unwrap().gauss;
            let want = t.cosh().powi(2) + s.sinh().powi(2);
            assert!((g.c12 - want).abs() < 1e-12);
        }
    }

    #[test]
    fn gauss_map_is_unit_timelike_or_spacelike() {
        for kind in SurfaceKind::ALL {
            for (c, s) in curves() {
                let g = gauss_map_at(kind, &c, 0.3, s).unwrap().gauss;
                let e = c.local(s).unwrap().eps1;
                let want = kind.frame_signs(e)[0];
                assert!((g.inner(g) - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn example1_laplacian_is_minus_four_g() {
        for (t, s) in [(0.0, 0.0), (0.7, -0.4), (-1.2, 1.1)] {
            let g = gauss_map_at(SurfaceKind::M1Hyperbolic, &example1(), t, s).unwrap().gauss;
            let lap = laplacian_closed(SurfaceKind::M1Hyperbolic, &example1(), t, s).unwrap();
            assert!((lap.ambient - (-4.0) * g).max_abs() < 1e-12);
            assert_eq!(lap.frame[1], 0.0);
        }
    }

    #[test]
    fn family_laplacian_is_minus_four_b0_squared_g() {
        let p = ExponentialFamilyParams::new(-2.0, 1.0, -0.25, 0.3, Sign::Plus);
        let c = synthesize_family(p, (-1.0, 1.0)).unwrap();
        for kind in SurfaceKind::ALL {
            let g = gauss_map_at(kind, &c, 0.4, 0.2).unwrap().gauss;
            let lap = laplacian_closed(kind, &c, 0.4, 0.2).unwrap().ambient;
            assert!((lap + 16.0 * g).max_abs() < 1e-10 * g.max_abs().max(1.0));
        }
    }

    #[test]
    fn frame_coordinates_roundtrip() {
        for kind in SurfaceKind::ALL {
            for (c, s) in curves() {
                let g = c.local(s).unwrap();
                let lap = laplacian_closed_at(kind, &g, 0.6);
                let back = frame_coordinates(&frame_at(kind, &g, 0.6), lap.ambient);
                for (k, (x, y)) in back.iter().zip(lap.frame).enumerate() {
                    assert!((x - y).abs() < 1e-10, "{kind} {k}");
                }
            }
        }
    }

    #[test]
    fn numeric_weighted_matches_closed_everywhere() {
        for kind in SurfaceKind::ALL {
            for (c, s) in curves() {
                for t in [-0.5, 0.35] {
                    let closed = laplacian_closed(kind, &c, t, s).unwrap().ambient;
                    let e1 = (laplacian_numeric(kind, &c, t, s, 2e-3, LaplacianConvention::EpsWeighted, false)
                        .unwrap()
                        - closed)
                        .max_abs();
                    let e2 = (laplacian_numeric(kind, &c, t, s, 1e-3, LaplacianConvention::EpsWeighted, false)
                        .unwrap()
                        - closed)
                        .max_abs();
                    let scale = closed.max_abs().max(1.0);
                    assert!(e2 < 1e-4 * scale, "{kind} s={s} t={t} err={e2}");
                    assert!(e2 < 1e-8 || e1 / e2 > 3.0, "{kind} s={s} ratio={}", e1 / e2);
                }
            }
        }
    }

    #[test]
    fn richardson_reduces_error() {
        let c = example1();
        let closed = laplacian_closed(SurfaceKind::M1Hyperbolic, &c, 1.3, 1.2).unwrap().ambient;
        let plain =
            laplacian_numeric(SurfaceKind::M1Hyperbolic, &c, 1.3, 1.2, 1e-2, LaplacianConvention::EpsWeighted, false)
                .unwrap();
        let rich =
            laplacian_numeric(SurfaceKind::M1Hyperbolic, &c, 1.3, 1.2, 1e-2, LaplacianConvention::EpsWeighted, true)
                .unwrap();
        assert!((rich - closed).max_abs() < 0.05 * (plain - closed).max_abs());
    }

    #[test]
    fn unweighted_disagrees_off_the_tied_cases() {
        // M₁ with ε₁ = −1: the two conventions differ
        let c = ProfileCurve::analytic(AnalyticPreset::Parabola, (1.0, 2.0), Sign::Minus).unwrap();
        let closed = laplacian_closed(SurfaceKind::M1Hyperbolic, &c, 0.2, 1.5).unwrap().ambient;
        let un =
            laplacian_numeric(SurfaceKind::M1Hyperbolic, &c, 0.2, 1.5, 1e-3, LaplacianConvention::Unweighted, false)
                .unwrap();
        assert!((un - closed).max_abs() > 1e-2);
    }

    #[test]
    fn calibration_picks_weighted() {
        let r = calibrate();
        assert_eq!(r.chosen, LaplacianConvention::EpsWeighted);
        assert!(r.eps_weighted_error < 1e-4);
        assert!(r.unweighted_error > 1e-2);
    }

    #[test]
    fn stencil_outside_domain_is_an_error() {
        let c = example1();
        let r =
            laplacian_numeric(SurfaceKind::M1Hyperbolic, &c, 0.0, 2.0, 1e-3, LaplacianConvention::EpsWeighted, false);
        assert!(matches!(r, Err(CurveError::OutOfDomain { .. })));
    }
}
