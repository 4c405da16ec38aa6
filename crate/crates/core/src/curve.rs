//! Unit-speed profile curves α(s) = (x(s), y(s)) and their invariant functions.
//!
//! A curve is described by a [`CurveSource`] (closed-form family, named
//! analytic preset, tabulated samples, or a user closure), a parameter domain
//! and the declared sign ε₁. Everything downstream factors through the three
//! functions
//!
//! ```text
//! a = (x x′ − y y′) / (ε₁(y² − x²))
//! b = (x y′ − x′ y) / (ε₁(y² − x²))
//! c = x″ y′ − x′ y″
//! ```
//!
//! and their first derivatives, which are obtained through [`Jet3`] arithmetic.

use crate::jet::{Jet3, JetDomainError};
use crate::tolerances::{Tolerances, DEFAULT_VALIDATION_SAMPLES};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurveError {
    #[error("jet evaluation failed at s = {s}: {source}")]
    Jet { s: f64, source: JetDomainError },
    #[error("regularity violated at s = {s}: eps1*(y^2 - x^2) = {value}")]
    Regularity { s: f64, value: f64 },
    #[error("s = {s} lies outside the curve domain [{min}, {max}]")]
    OutOfDomain { s: f64, min: f64, max: f64 },
    #[error("invalid curve parameters: {0}")]
    Parameter(String),
    #[error("invalid curve specification: {0}")]
    Spec(String),
}

/// A sign ±1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn from_f64(v: f64) -> Option<Self> {
        if v == 1.0 {
            Some(Sign::Plus)
        } else if v == -1.0 {
            Some(Sign::Minus)
        } else {
            None
        }
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;

    fn try_from(v: i8) -> Result<Self, String> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(format!("sign must be 1 or -1, got {other}")),
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        match s {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", i8::from(*self))
    }
}

/// Parameters of the flat, pointwise 1-type profile family
/// `x = ½ε(μ₂e^θ + μ₁e^{−θ})`, `y = ½ε(μ₂e^θ − μ₁e^{−θ})`, `θ = −b₀s + d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentialFamilyParams {
    pub b0: f64,
    pub mu1: f64,
    pub mu2: f64,
    #[serde(default)]
    pub d: f64,
    #[serde(default = "plus")]
    pub eps: Sign,
}

fn plus() -> Sign {
    Sign::Plus
}

impl ExponentialFamilyParams {
    pub fn new(b0: f64, mu1: f64, mu2: f64, d: f64, eps: Sign) -> Self {
        Self { b0, mu1, mu2, d, eps }
    }

    /// μ₁μ₂ + 1/b₀², which vanishes on admissible parameters.
    pub fn constraint_residual(&self) -> f64 {
        self.mu1 * self.mu2 + 1.0 / (self.b0 * self.b0)
    }

    pub fn check(&self, tol: &Tolerances) -> Result<(), CurveError> {
        let finite = [self.b0, self.mu1, self.mu2, self.d].iter().all(|v| v.is_finite());
        if !finite {
            return Err(CurveError::Parameter("family parameters must be finite".into()));
        }
        if self.b0 == 0.0 {
            return Err(CurveError::Parameter("b0 must be non-zero".into()));
        }
        let r = self.constraint_residual();
        // relative to 1/b0², the scale of each term
        if r.abs() > tol.family_constraint * (1.0 / (self.b0 * self.b0)).max(1.0) {
            return Err(CurveError::Parameter(format!(
                "mu1*mu2 = {} but must equal -1/b0^2 = {}",
                self.mu1 * self.mu2,
                -1.0 / (self.b0 * self.b0)
            )));
        }
        Ok(())
    }

    fn eval(&self, s: Jet3) -> (Jet3, Jet3) {
        let theta = s * (-self.b0) + self.d;
        let half_eps = 0.5 * self.eps.value();
        let up = theta.exp() * (self.mu2 * half_eps);
        let down = (-theta).exp() * (self.mu1 * half_eps);
        (up + down, up - down)
    }
}

/// Named closed-form profile curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum AnalyticPreset {
    /// `x = x0 + sinh(m s + n)/m`, `y = y0 + cosh(m s + n)/m`. With m = 1 and
    /// zero offsets this is x = sinh s, y = cosh s.
    Hyperbola {
        #[serde(default = "one")]
        m: f64,
        #[serde(default)]
        n: f64,
        #[serde(default)]
        x0: f64,
        #[serde(default)]
        y0: f64,
    },
    /// `x = s/√(1−k²)`, `y = k x` with |k| < 1; a totally geodesic profile.
    Line { k: f64 },
    /// `x = ∫₀ˢ √(1+σ²) dσ`, `y = s²/2`; a non-flat profile.
    Parabola,
    /// `x = r sinh φ`, `y = r cosh φ` with `r = √k (c0 − s)`,
    /// `φ = λ ln(c0 − s)`, `λ = √(1 + 1/k)`, for s < c0.
    /// Flat with a(s) = 1/(c0 − s) ≠ 0, hence not of pointwise 1-type.
    FlatSpiral {
        #[serde(default = "one")]
        k: f64,
        #[serde(default)]
        c0: f64,
    },
    /// `x = cosh s`, `y = sinh s`; timelike, so it fails the unit-speed check.
    CoshSinh,
    /// `x = y = cosh s`; the profile behind the printed form of the circle ×
    /// hyperbola example, which degenerates (y² − x² ≡ 0).
    CoshCosh,
}

fn one() -> f64 {
    1.0
}

impl AnalyticPreset {
    fn check(&self) -> Result<(), CurveError> {
        match *self {
            AnalyticPreset::Hyperbola { m, .. } if m == 0.0 || !m.is_finite() => {
                Err(CurveError::Parameter("hyperbola preset needs finite m != 0".into()))
            }
            AnalyticPreset::Line { k } if !(k.abs() < 1.0) => {
                Err(CurveError::Parameter(format!("line preset needs |k| < 1, got {k}")))
            }
            AnalyticPreset::FlatSpiral { k, .. } if !(k > 0.0 && k.is_finite()) => {
                Err(CurveError::Parameter(format!("flat_spiral preset needs k > 0, got {k}")))
            }
            _ => Ok(()),
        }
    }

    fn eval(&self, s: Jet3) -> Result<(Jet3, Jet3), JetDomainError> {
        Ok(match *self {
            AnalyticPreset::Hyperbola { m, n, x0, y0 } => {
                let u = s * m + n;
                (u.sinh() * (1.0 / m) + x0, u.cosh() * (1.0 / m) + y0)
            }
            AnalyticPreset::Line { k } => {
                let x = s * (1.0 / (1.0 - k * k).sqrt());
                (x, x * k)
            }
            AnalyticPreset::Parabola => {
                let root = (s * s + 1.0).sqrt()?;
                ((s * root + s.asinh()) * 0.5, s * s * 0.5)
            }
            AnalyticPreset::FlatSpiral { k, c0 } => {
                let lambda = (1.0 + 1.0 / k).sqrt();
                let w = -s + c0;
                let r = w * k.sqrt();
                let phi = w.ln()? * lambda;
                (r * phi.sinh(), r * phi.cosh())
            }
            AnalyticPreset::CoshSinh => (s.cosh(), s.sinh()),
            AnalyticPreset::CoshCosh => (s.cosh(), s.cosh()),
        })
    }
}

/// Tabulated curve `[s, x, y]`, lifted to jets by differentiating a local
/// interpolating polynomial through the nearest nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCurve {
    s: Vec<f64>,
    x: Vec<f64>,
    y: Vec<f64>,
}

/// Nodes per local interpolation window (polynomial degree + 1).
const SAMPLE_WINDOW: usize = 8;

impl SampledCurve {
    pub fn new(samples: &[[f64; 3]]) -> Result<Self, CurveError> {
        if samples.len() < 4 {
            return Err(CurveError::Spec("sampled curves need at least 4 samples".into()));
        }
        if samples.iter().flatten().any(|v| !v.is_finite()) {
            return Err(CurveError::Spec("samples must be finite".into()));
        }
        if samples.windows(2).any(|w| w[1][0] <= w[0][0]) {
            return Err(CurveError::Spec("sample parameters must be strictly increasing".into()));
        }
        Ok(Self {
            s: samples.iter().map(|r| r[0]).collect(),
            x: samples.iter().map(|r| r[1]).collect(),
            y: samples.iter().map(|r| r[2]).collect(),
        })
    }

    pub fn span(&self) -> (f64, f64) {
        (self.s[0], self.s[self.s.len() - 1])
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    fn window(&self, s: f64) -> std::ops::Range<usize> {
        let n = self.s.len();
        let w = SAMPLE_WINDOW.min(n);
        let pos = self.s.partition_point(|&v| v < s);
        let start = pos.saturating_sub(w / 2).min(n - w);
        start..start + w
    }

    fn eval(&self, s: Jet3) -> (Jet3, Jet3) {
        let nodes = self.window(s.v0);
        let mut x = Jet3::constant(0.0);
        let mut y = Jet3::constant(0.0);
        for i in nodes.clone() {
            let mut basis = Jet3::constant(1.0);
            for j in nodes.clone().filter(|&j| j != i) {
                basis = basis * ((s - self.s[j]) * (1.0 / (self.s[i] - self.s[j])));
            }
            x = x + basis * self.x[i];
            y = y + basis * self.y[i];
        }
        (x, y)
    }
}

pub type CurveFn = dyn Fn(Jet3) -> Result<(Jet3, Jet3), JetDomainError> + Send + Sync;

#[derive(Clone)]
pub enum CurveSource {
    Family(ExponentialFamilyParams),
    Analytic(AnalyticPreset),
    Sampled(SampledCurve),
    Custom(Arc<CurveFn>),
}

impl fmt::Debug for CurveSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveSource::Family(p) => f.debug_tuple("Family").field(p).finish(),
            CurveSource::Analytic(p) => f.debug_tuple("Analytic").field(p).finish(),
            CurveSource::Sampled(c) => write!(f, "Sampled({} nodes)", c.len()),
            CurveSource::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// x, y jets at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub s: f64,
    pub x: Jet3,
    pub y: Jet3,
}

impl CurvePoint {
    /// (x′)² − (y′)² − 1.
    pub fn unit_speed_residual(&self) -> f64 {
        self.x.v1 * self.x.v1 - self.y.v1 * self.y.v1 - 1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Invariants {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedInvariants {
    pub da: f64,
    pub db: f64,
    pub dc: f64,
}

/// Everything a rotation surface needs from its profile at one parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalGeometry {
    pub point: CurvePoint,
    pub eps1: f64,
    /// ε₁(y² − x²), positive on regular curves.
    pub regularity: f64,
    /// √(ε₁(y² − x²)).
    pub norm: f64,
    pub inv: Invariants,
    pub dinv: DerivedInvariants,
}

#[derive(Debug, Clone)]
pub struct ProfileCurve {
    source: CurveSource,
    domain: (f64, f64),
    epsilon1: Sign,
}

impl ProfileCurve {
    pub fn new(source: CurveSource, domain: (f64, f64), epsilon1: Sign) -> Result<Self, CurveError> {
        let (lo, hi) = domain;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(CurveError::Spec(format!("degenerate domain [{lo}, {hi}]")));
        }
        match &source {
            CurveSource::Family(p) => {
                p.check(&Tolerances::default())?;
                if epsilon1 != Sign::Plus {
                    return Err(CurveError::Parameter("exponential family curves have epsilon1 = 1".into()));
                }
            }
            CurveSource::Analytic(p) => p.check()?,
            CurveSource::Sampled(c) => {
                let (a, b) = c.span();
                if lo < a || hi > b {
                    return Err(CurveError::Spec(format!("domain [{lo}, {hi}] exceeds sample span [{a}, {b}]")));
                }
            }
            CurveSource::Custom(_) => {}
        }
        Ok(Self { source, domain, epsilon1 })
    }

    pub fn analytic(preset: AnalyticPreset, domain: (f64, f64), epsilon1: Sign) -> Result<Self, CurveError> {
        Self::new(CurveSource::Analytic(preset), domain, epsilon1)
    }

    pub fn custom<F>(f: F, domain: (f64, f64), epsilon1: Sign) -> Result<Self, CurveError>
    where
        F: Fn(Jet3) -> Result<(Jet3, Jet3), JetDomainError> + Send + Sync + 'static,
    {
        Self::new(CurveSource::Custom(Arc::new(f)), domain, epsilon1)
    }

    pub fn source(&self) -> &CurveSource {
        &self.source
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn epsilon1(&self) -> Sign {
        self.epsilon1
    }

    pub fn contains(&self, s: f64) -> bool {
        let (lo, hi) = self.domain;
        let slack = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
        s >= lo - slack && s <= hi + slack
    }

    /// x and y jets at `s`.
    pub fn jets(&self, s: f64) -> Result<CurvePoint, CurveError> {
        if !self.contains(s) {
            let (min, max) = self.domain;
            return Err(CurveError::OutOfDomain { s, min, max });
        }
        let var = Jet3::variable(s);
        let (x, y) = match &self.source {
            CurveSource::Family(p) => Ok(p.eval(var)),
            CurveSource::Analytic(p) => p.eval(var),
            CurveSource::Sampled(c) => Ok(c.eval(var)),
            CurveSource::Custom(f) => f(var),
        }
        .map_err(|source| CurveError::Jet { s, source })?;
        Ok(CurvePoint { s, x, y })
    }

    /// a, b, c and their derivatives at `s`.
    pub fn local(&self, s: f64) -> Result<LocalGeometry, CurveError> {
        let point = self.jets(s)?;
        let eps1 = self.epsilon1.value();
        let CurvePoint { x, y, .. } = point;
        let denom = (y * y - x * x).scale(eps1);
        if !(denom.v0 > 0.0) {
            return Err(CurveError::Regularity { s, value: denom.v0 });
        }
        let (dx, dy) = (x.derivative(), y.derivative());
        let (ddx, ddy) = (dx.derivative(), dy.derivative());
        let jet_err = |source| CurveError::Jet { s, source };
        // only v0 and v1 of these jets are used; both are exact for order-3 inputs
        let a = (x * dx - y * dy).try_div(denom).map_err(jet_err)?;
        let b = (x * dy - dx * y).try_div(denom).map_err(jet_err)?;
        let c = ddx * dy - dx * ddy;
        Ok(LocalGeometry {
            point,
            eps1,
            regularity: denom.v0,
            norm: denom.v0.sqrt(),
            inv: Invariants { a: a.v0, b: b.v0, c: c.v0 },
            dinv: DerivedInvariants { da: a.v1, db: b.v1, dc: c.v1 },
        })
    }

    pub fn invariants_abc(&self, s: f64) -> Result<Invariants, CurveError> {
        self.local(s).map(|g| g.inv)
    }

    pub fn derived_invariants(&self, s: f64) -> Result<DerivedInvariants, CurveError> {
        self.local(s).map(|g| g.dinv)
    }

    /// Check unit speed and regularity on the given parameter values.
    pub fn validate(&self, samples: &[f64], tol: &Tolerances) -> ValidationReport {
        let eps1 = self.epsilon1.value();
        let evaluated: Vec<_> = samples
            .par_iter()
            .map(|&s| {
                self.jets(s).map(|p| {
                    let reg = eps1 * (p.y.v0 * p.y.v0 - p.x.v0 * p.x.v0);
                    (s, p.unit_speed_residual().abs(), reg)
                })
            })
            .collect();
        let mut report = ValidationReport {
            samples: samples.len(),
            max_unit_speed_residual: 0.0,
            worst_unit_speed_s: None,
            min_regularity: f64::INFINITY,
            worst_regularity_s: None,
            unit_speed_ok: true,
            regular_ok: true,
            errors: Vec::new(),
        };
        for item in evaluated {
            match item {
                Ok((s, res, reg)) => {
                    if !(res <= report.max_unit_speed_residual) {
                        report.max_unit_speed_residual = res;
                        report.worst_unit_speed_s = Some(s);
                    }
                    if !(reg >= report.min_regularity) {
                        report.min_regularity = reg;
                        report.worst_regularity_s = Some(s);
                    }
                }
                Err(e) => report.errors.push(e.to_string()),
            }
        }
        report.unit_speed_ok = report.errors.is_empty() && report.max_unit_speed_residual <= tol.unit_speed;
        report.regular_ok = report.errors.is_empty() && report.min_regularity > 0.0;
        if report.errors.is_empty() {
            if let (false, Some(s)) = (report.unit_speed_ok, report.worst_unit_speed_s) {
                report.errors.push(format!(
                    "unit-speed residual {:.3e} at s = {s} exceeds {:.1e}",
                    report.max_unit_speed_residual, tol.unit_speed
                ));
            }
            if let (false, Some(s)) = (report.regular_ok, report.worst_regularity_s) {
                report
                    .errors
                    .push(format!("eps1*(y^2 - x^2) = {:.3e} at s = {s} is not positive", report.min_regularity));
            }
        }
        report
    }

    /// Validation on the default uniform grid over the domain.
    pub fn validate_default(&self, tol: &Tolerances) -> ValidationReport {
        let (lo, hi) = self.domain;
        self.validate(&linspace(lo, hi, DEFAULT_VALIDATION_SAMPLES), tol)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub samples: usize,
    pub max_unit_speed_residual: f64,
    pub worst_unit_speed_s: Option<f64>,
    pub min_regularity: f64,
    pub worst_regularity_s: Option<f64>,
    pub unit_speed_ok: bool,
    pub regular_ok: bool,
    pub errors: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.unit_speed_ok && self.regular_ok
    }
}

/// Build the profile of the classified flat family. Both rotation kinds share
/// the same profile.
pub fn synthesize_family(params: ExponentialFamilyParams, domain: (f64, f64)) -> Result<ProfileCurve, CurveError> {
    ProfileCurve::new(CurveSource::Family(params), domain, Sign::Plus)
}

/// `n` uniform samples on `[lo, hi]`, endpoints included.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// JSON curve description: exactly one of `family`, `analytic`, `samples`,
/// plus `domain` and (except for families) `epsilon1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<ExponentialFamilyParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analytic: Option<AnalyticPreset>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<[f64; 3]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon1: Option<Sign>,
    pub domain: [f64; 2],
}

impl CurveSpec {
    pub fn from_json(text: &str) -> Result<Self, CurveError> {
        serde_json::from_str(text).map_err(|e| CurveError::Spec(e.to_string()))
    }

    pub fn build(&self) -> Result<ProfileCurve, CurveError> {
        let domain = (self.domain[0], self.domain[1]);
        let given = [self.family.is_some(), self.analytic.is_some(), self.samples.is_some()];
        if given.iter().filter(|&&g| g).count() != 1 {
            return Err(CurveError::Spec(
                "exactly one of \"family\", \"analytic\" or \"samples\" must be given".into(),
            ));
        }
        if let Some(p) = self.family {
            let eps1 = self.epsilon1.unwrap_or(Sign::Plus);
            return ProfileCurve::new(CurveSource::Family(p), domain, eps1);
        }
        let eps1 = self.epsilon1.ok_or_else(|| CurveError::Spec("\"epsilon1\" is required for this curve".into()))?;
        if let Some(p) = self.analytic {
            return ProfileCurve::analytic(p, domain, eps1);
        }
        let samples = self.samples.as_deref().unwrap_or_default();
        ProfileCurve::new(CurveSource::Sampled(SampledCurve::new(samples)?), domain, eps1)
    }
}
