//! General rotational surfaces M₁ (hyperbolic rotation) and M₂ (elliptic
//! rotation) of a profile curve, with their adapted frames, second fundamental
//! form, connection forms and curvature.
//!
//! All quantities come from closed forms in a, b, c; nothing is orthonormalised
//! numerically. The frame sign conventions are fixed: e₁ is the normalised
//! t-derivative, e₂ = ∂φ/∂s, and (e₃, e₄) span the normal plane.

use crate::algebra::PseudoVector4;
use crate::curve::{CurveError, LocalGeometry, ProfileCurve};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SurfaceKind {
    /// φ = (y sinh t, x cosh t, x sinh t, y cosh t)
    #[serde(rename = "M1", alias = "m1", alias = "M1_hyperbolic")]
    M1Hyperbolic,
    /// φ = (x cos t, x sin t, y cos t, y sin t)
    #[serde(rename = "M2", alias = "m2", alias = "M2_elliptic")]
    M2Elliptic,
}

impl SurfaceKind {
    pub const ALL: [SurfaceKind; 2] = [SurfaceKind::M1Hyperbolic, SurfaceKind::M2Elliptic];

    /// +1 for M₁, −1 for M₂: the overall sign flip between the two tables.
    pub fn flip(self) -> f64 {
        match self {
            SurfaceKind::M1Hyperbolic => 1.0,
            SurfaceKind::M2Elliptic => -1.0,
        }
    }

    /// Causal signs (⟨e₁,e₁⟩, ⟨e₂,e₂⟩, ⟨e₃,e₃⟩, ⟨e₄,e₄⟩).
    pub fn frame_signs(self, eps1: f64) -> [f64; 4] {
        let f = self.flip();
        [f * eps1, 1.0, -1.0, -f * eps1]
    }

    /// Default rotation-parameter window.
    pub fn default_t_range(self) -> (f64, f64) {
        match self {
            SurfaceKind::M1Hyperbolic => (-2.0, 2.0),
            SurfaceKind::M2Elliptic => (0.0, std::f64::consts::TAU),
        }
    }

    /// True when the rotation is 2π-periodic in t.
    pub fn is_periodic(self) -> bool {
        matches!(self, SurfaceKind::M2Elliptic)
    }
}

impl fmt::Display for SurfaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SurfaceKind::M1Hyperbolic => "M1",
            SurfaceKind::M2Elliptic => "M2",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrameAtPoint {
    pub e1: PseudoVector4,
    pub e2: PseudoVector4,
    pub e3: PseudoVector4,
    pub e4: PseudoVector4,
    pub signs: [f64; 4],
}

impl FrameAtPoint {
    pub fn vectors(&self) -> [PseudoVector4; 4] {
        [self.e1, self.e2, self.e3, self.e4]
    }

    pub fn gram(&self) -> [[f64; 4]; 4] {
        let v = self.vectors();
        std::array::from_fn(|i| std::array::from_fn(|j| v[i].dot(v[j])))
    }

    /// Largest deviation of the Gram matrix from `diag(signs)`.
    pub fn gram_defect(&self) -> f64 {
        let g = self.gram();
        let mut worst = 0.0_f64;
        for (i, row) in g.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                let target = if i == j { self.signs[i] } else { 0.0 };
                worst = worst.max((v - target).abs());
            }
        }
        worst
    }

    /// Combination Σ coeffs[k]·e_k.
    pub fn combine(&self, coeffs: [f64; 4]) -> PseudoVector4 {
        let v = self.vectors();
        (0..4).fold(PseudoVector4::ZERO, |acc, k| acc + coeffs[k] * v[k])
    }

    /// Coefficients of `v` on the frame: ⟨v, e_k⟩ / ⟨e_k, e_k⟩.
    pub fn coordinates(&self, v: PseudoVector4) -> [f64; 4] {
        let e = self.vectors();
        std::array::from_fn(|k| v.dot(e[k]) / self.signs[k])
    }
}

/// A 1-form α ω₁ + β ω₂ on the surface.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct OneForm {
    pub omega1: f64,
    pub omega2: f64,
}

impl OneForm {
    const fn new(omega1: f64, omega2: f64) -> Self {
        Self { omega1, omega2 }
    }
}

/// Pairs (A, B) of the connection forms ω_AB in [`ShapeData::connection`].
pub const CONNECTION_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShapeData {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// (h³₁₁, h³₁₂, h³₂₂)
    pub h3: [f64; 3],
    /// (h⁴₁₁, h⁴₁₂, h⁴₂₂)
    pub h4: [f64; 3],
    /// ω₁₂, ω₁₃, ω₁₄, ω₂₃, ω₂₄, ω₃₄ on the co-frame (ω₁, ω₂).
    pub connection: [OneForm; 6],
    /// ω₁ = `dual_dt`·dt; ω₂ = ds.
    pub dual_dt: f64,
}

/// ∇̃_{e_i} e_A for i ∈ {1, 2}, A ∈ {1..4}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CovariantTable {
    /// Frame coefficients: `coeffs[i][A]` expands ∇̃_{e_{i+1}} e_{A+1} on e₁..e₄.
    pub coeffs: [[[f64; 4]; 4]; 2],
    /// The same derivatives as ambient vectors.
    pub vectors: [[PseudoVector4; 4]; 2],
}

pub fn eval_surface(kind: SurfaceKind, curve: &ProfileCurve, t: f64, s: f64) -> Result<PseudoVector4, CurveError> {
    let p = curve.jets(s)?;
    Ok(immersion(kind, p.x.v0, p.y.v0, t))
}

pub(crate) fn immersion(kind: SurfaceKind, x: f64, y: f64, t: f64) -> PseudoVector4 {
    match kind {
        SurfaceKind::M1Hyperbolic => {
            let (sh, ch) = (t.sinh(), t.cosh());
            PseudoVector4::new(y * sh, x * ch, x * sh, y * ch)
        }
        SurfaceKind::M2Elliptic => {
            let (sn, cs) = t.sin_cos();
            PseudoVector4::new(x * cs, x * sn, y * cs, y * sn)
        }
    }
}

/// Adapted frame from precomputed profile data.
pub fn frame_at(kind: SurfaceKind, g: &LocalGeometry, t: f64) -> FrameAtPoint {
    let (x, y) = (g.point.x.v0, g.point.y.v0);
    let (dx, dy) = (g.point.x.v1, g.point.y.v1);
    let k = 1.0 / g.norm;
    let signs = kind.frame_signs(g.eps1);
    match kind {
        SurfaceKind::M1Hyperbolic => {
            let (sh, ch) = (t.sinh(), t.cosh());
            FrameAtPoint {
                e1: k * PseudoVector4::new(y * ch, x * sh, x * ch, y * sh),
                e2: PseudoVector4::new(dy * sh, dx * ch, dx * sh, dy * ch),
                e3: PseudoVector4::new(dx * sh, dy * ch, dy * sh, dx * ch),
                e4: k * PseudoVector4::new(x * ch, y * sh, y * ch, x * sh),
                signs,
            }
        }
        SurfaceKind::M2Elliptic => {
            let (sn, cs) = t.sin_cos();
            FrameAtPoint {
                e1: k * PseudoVector4::new(-x * sn, x * cs, -y * sn, y * cs),
                e2: PseudoVector4::new(dx * cs, dx * sn, dy * cs, dy * sn),
                e3: PseudoVector4::new(dy * cs, dy * sn, dx * cs, dx * sn),
                e4: k * PseudoVector4::new(y * sn, -y * cs, x * sn, -x * cs),
                signs,
            }
        }
    }
}

pub fn frame(kind: SurfaceKind, curve: &ProfileCurve, t: f64, s: f64) -> Result<FrameAtPoint, CurveError> {
    Ok(frame_at(kind, &curve.local(s)?, t))
}

pub fn shape_from_local(kind: SurfaceKind, g: &LocalGeometry) -> ShapeData {
    let (a, b, c) = (g.inv.a, g.inv.b, g.inv.c);
    let e = g.eps1;
    let f = kind.flip();
    ShapeData {
        a,
        b,
        c,
        h3: [f * b, 0.0, c],
        h4: [0.0, b, 0.0],
        connection: [
            OneForm::new(e * a, 0.0),
            OneForm::new(e * b, 0.0),
            OneForm::new(0.0, b),
            OneForm::new(0.0, c),
            OneForm::new(f * e * b, 0.0),
            OneForm::new(f * e * a, 0.0),
        ],
        dual_dt: f * e * g.norm,
    }
}

pub fn shape_data(kind: SurfaceKind, curve: &ProfileCurve, s: f64) -> Result<ShapeData, CurveError> {
    Ok(shape_from_local(kind, &curve.local(s)?))
}

/// K = ε₁b² − bc on M₁ and K̄ = bc − ε₁b² on M₂.
pub fn curvature_from_local(kind: SurfaceKind, g: &LocalGeometry) -> f64 {
    let (b, c) = (g.inv.b, g.inv.c);
    kind.flip() * (g.eps1 * b * b - b * c)
}

pub fn gaussian_curvature(kind: SurfaceKind, curve: &ProfileCurve, s: f64) -> Result<f64, CurveError> {
    Ok(curvature_from_local(kind, &curve.local(s)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityResiduals {
    /// ε₁a² − a′ − (bc − ε₁b²)
    pub gauss: f64,
    /// b′ − (2ε₁ab − ac)
    pub codazzi: f64,
}

pub fn residuals_from_local(g: &LocalGeometry) -> IdentityResiduals {
    let (a, b, c) = (g.inv.a, g.inv.b, g.inv.c);
    let e = g.eps1;
    IdentityResiduals {
        gauss: e * a * a - g.dinv.da - (b * c - e * b * b),
        codazzi: g.dinv.db - (2.0 * e * a * b - a * c),
    }
}

/// Gauss and Codazzi residuals; identical for both rotation kinds.
pub fn gauss_codazzi_residuals(curve: &ProfileCurve, s: f64) -> Result<IdentityResiduals, CurveError> {
    Ok(residuals_from_local(&curve.local(s)?))
}

pub fn covariant_table_at(kind: SurfaceKind, g: &LocalGeometry, fr: &FrameAtPoint) -> CovariantTable {
    let (a, b, c) = (g.inv.a, g.inv.b, g.inv.c);
    let e = g.eps1;
    let f = kind.flip();
    let coeffs = [
        [[0.0, f * a, -f * b, 0.0], [-e * a, 0.0, 0.0, -f * e * b], [-e * b, 0.0, 0.0, -f * e * a], [0.0, -b, a, 0.0]],
        [[0.0, 0.0, 0.0, -f * e * b], [0.0, 0.0, -c, 0.0], [0.0, -c, 0.0, 0.0], [-f * e * b, 0.0, 0.0, 0.0]],
    ];
    let vectors = coeffs.map(|row| row.map(|co| fr.combine(co)));
    CovariantTable { coeffs, vectors }
}

pub fn covariant_derivative_table(
    kind: SurfaceKind,
    curve: &ProfileCurve,
    t: f64,
    s: f64,
) -> Result<CovariantTable, CurveError> {
    let g = curve.local(s)?;
    let fr = frame_at(kind, &g, t);
    Ok(covariant_table_at(kind, &g, &fr))
}
