//! Order-3 truncated Taylor jets.
//!
//! A [`Jet3`] carries a value and its first three derivatives with respect to
//! a single real parameter. Arithmetic follows the Leibniz rule for products
//! and Faà di Bruno's formula for composition with elementary functions, so
//! closed-form profile curves yield exact derivatives up to rounding.

use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum JetDomainError {
    #[error("division by a jet with zero value")]
    DivisionByZero,
    #[error("square root of non-positive value {0}")]
    SqrtNonPositive(f64),
    #[error("logarithm of non-positive value {0}")]
    LogNonPositive(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Jet3 {
    pub v0: f64,
    pub v1: f64,
    pub v2: f64,
    pub v3: f64,
}

impl Jet3 {
    pub const fn new(v0: f64, v1: f64, v2: f64, v3: f64) -> Self {
        Self { v0, v1, v2, v3 }
    }

    pub const fn constant(v: f64) -> Self {
        Self::new(v, 0.0, 0.0, 0.0)
    }

    /// Jet of the identity map at `s`.
    pub const fn variable(s: f64) -> Self {
        Self::new(s, 1.0, 0.0, 0.0)
    }

    pub const fn to_array(self) -> [f64; 4] {
        [self.v0, self.v1, self.v2, self.v3]
    }

    pub fn scale(self, k: f64) -> Self {
        Self::new(k * self.v0, k * self.v1, k * self.v2, k * self.v3)
    }

    /// Jet of the derivative. The third-order slot is unknown and set to zero,
    /// so only `v0..v2` of the result are meaningful.
    pub fn derivative(self) -> Self {
        Self::new(self.v1, self.v2, self.v3, 0.0)
    }

    /// Compose with a scalar function `g` given its derivatives `g, g′, g″, g‴`
    /// evaluated at `self.v0`.
    pub fn compose(self, g: [f64; 4]) -> Self {
        let (a1, a2, a3) = (self.v1, self.v2, self.v3);
        Self::new(g[0], g[1] * a1, g[2] * a1 * a1 + g[1] * a2, g[3] * a1 * a1 * a1 + 3.0 * g[2] * a1 * a2 + g[1] * a3)
    }

    pub fn recip(self) -> Result<Self, JetDomainError> {
        Self::constant(1.0).try_div(self)
    }

    pub fn try_div(self, rhs: Self) -> Result<Self, JetDomainError> {
        let b0 = rhs.v0;
        if b0 == 0.0 || !b0.is_finite() {
            return Err(JetDomainError::DivisionByZero);
        }
        let q0 = self.v0 / b0;
        let q1 = (self.v1 - q0 * rhs.v1) / b0;
        let q2 = (self.v2 - 2.0 * q1 * rhs.v1 - q0 * rhs.v2) / b0;
        let q3 = (self.v3 - 3.0 * q2 * rhs.v1 - 3.0 * q1 * rhs.v2 - q0 * rhs.v3) / b0;
        Ok(Self::new(q0, q1, q2, q3))
    }

    pub fn exp(self) -> Self {
        let e = self.v0.exp();
        self.compose([e; 4])
    }

    pub fn sinh(self) -> Self {
        let (s, c) = (self.v0.sinh(), self.v0.cosh());
        self.compose([s, c, s, c])
    }

    pub fn cosh(self) -> Self {
        let (s, c) = (self.v0.sinh(), self.v0.cosh());
        self.compose([c, s, c, s])
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.v0.sin_cos();
        self.compose([s, c, -s, -c])
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.v0.sin_cos();
        self.compose([c, -s, -c, s])
    }

    pub fn sqrt(self) -> Result<Self, JetDomainError> {
        let u = self.v0;
        if u <= 0.0 || u.is_nan() {
            return Err(JetDomainError::SqrtNonPositive(u));
        }
        let r = u.sqrt();
        Ok(self.compose([r, 0.5 / r, -0.25 / (u * r), 0.375 / (u * u * r)]))
    }

    pub fn ln(self) -> Result<Self, JetDomainError> {
        let u = self.v0;
        if u <= 0.0 || u.is_nan() {
            return Err(JetDomainError::LogNonPositive(u));
        }
        Ok(self.compose([u.ln(), 1.0 / u, -1.0 / (u * u), 2.0 / (u * u * u)]))
    }

    pub fn asinh(self) -> Self {
        let u = self.v0;
        let q = 1.0 + u * u;
        let r = q.sqrt();
        self.compose([u.asinh(), 1.0 / r, -u / (q * r), (2.0 * u * u - 1.0) / (q * q * r)])
    }

    pub fn powi(self, n: i32) -> Self {
        let u = self.v0;
        let n_f = f64::from(n);
        self.compose([
            u.powi(n),
            n_f * u.powi(n - 1),
            n_f * (n_f - 1.0) * u.powi(n - 2),
            n_f * (n_f - 1.0) * (n_f - 2.0) * u.powi(n - 3),
        ])
    }
}

impl From<f64> for Jet3 {
    fn from(v: f64) -> Self {
        Self::constant(v)
    }
}

impl Add for Jet3 {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self::new(self.v0 + o.v0, self.v1 + o.v1, self.v2 + o.v2, self.v3 + o.v3)
    }
}

impl Add<f64> for Jet3 {
    type Output = Self;

    fn add(self, k: f64) -> Self {
        Self::new(self.v0 + k, self.v1, self.v2, self.v3)
    }
}

impl Sub for Jet3 {
    type Output = Self;

    fn sub(self, o: Self) -> Self {
        Self::new(self.v0 - o.v0, self.v1 - o.v1, self.v2 - o.v2, self.v3 - o.v3)
    }
}

impl Sub<f64> for Jet3 {
    type Output = Self;

    fn sub(self, k: f64) -> Self {
        self + (-k)
    }
}

impl Neg for Jet3 {
    type Output = Self;

    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl Mul for Jet3 {
    type Output = Self;

    fn mul(self, b: Self) -> Self {
        let a = self;
        Self::new(
            a.v0 * b.v0,
            a.v1 * b.v0 + a.v0 * b.v1,
            a.v2 * b.v0 + 2.0 * a.v1 * b.v1 + a.v0 * b.v2,
            a.v3 * b.v0 + 3.0 * a.v2 * b.v1 + 3.0 * a.v1 * b.v2 + a.v0 * b.v3,
        )
    }
}

impl Mul<f64> for Jet3 {
    type Output = Self;

    fn mul(self, k: f64) -> Self {
        self.scale(k)
    }
}

impl Mul<Jet3> for f64 {
    type Output = Jet3;

    fn mul(self, j: Jet3) -> Jet3 {
        j.scale(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: Jet3, b: [f64; 4], tol: f64) -> bool {
        a.to_array().iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * (1.0 + y.abs()))
    }

    #[test]
    fn square_of_variable() {
        let s = Jet3::variable(2.0);
        assert_eq!((s * s).to_array(), [4.0, 4.0, 2.0, 0.0]);
    }

    #[test]
    fn elementary_functions_at_zero() {
        let s = Jet3::variable(0.0);
        assert_eq!(s.exp().to_array(), [1.0, 1.0, 1.0, 1.0]);
        assert_eq!(s.sinh().to_array(), [0.0, 1.0, 0.0, 1.0]);
        assert_eq!(s.cosh().to_array(), [1.0, 0.0, 1.0, 0.0]);
        assert_eq!(s.sin().to_array(), [0.0, 1.0, 0.0, -1.0]);
        assert_eq!(s.cos().to_array(), [1.0, 0.0, -1.0, 0.0]);
    }

    #[test]
    fn domain_errors() {
        let zero = Jet3::constant(0.0);
        assert_eq!(Jet3::variable(1.0).try_div(zero), Err(JetDomainError::DivisionByZero));
        assert!(matches!(Jet3::variable(-1.0).sqrt(), Err(JetDomainError::SqrtNonPositive(_))));
        assert!(matches!(Jet3::variable(0.0).ln(), Err(JetDomainError::LogNonPositive(_))));
    }

    #[test]
    fn derivative_shifts() {
        let j = Jet3::new(1.0, 2.0, 3.0, 4.0);
        assert_eq!(j.derivative().to_array(), [2.0, 3.0, 4.0, 0.0]);
    }

    // Hand-derived reference derivatives of composite functions.
    #[test]
    fn compositions_match_analytic_derivatives() {
        for &s in &[-1.3, -0.2, 0.4, 1.7] {
            let x = Jet3::variable(s);
            // exp(sin s)
            let (sn, cs) = s.sin_cos();
            let e = sn.exp();
            let d1 = e * cs;
            let d2 = e * (cs * cs - sn);
            let d3 = e * (cs * cs * cs - 3.0 * sn * cs - cs);
            assert!(close(x.sin().exp(), [e, d1, d2, d3], 1e-12));

            // sinh(s²)
            let u = s * s;
            let (sh, ch) = (u.sinh(), u.cosh());
            let d1 = 2.0 * s * ch;
            let d2 = 2.0 * ch + 4.0 * u * sh;
            let d3 = 12.0 * s * sh + 8.0 * s * u * ch;
            assert!(close((x * x).sinh(), [sh, d1, d2, d3], 1e-12));

            // cosh(s) / (2 + cos s)
            let q = 2.0 + cs;
            let f = |t: f64| t.cosh() / (2.0 + t.cos());
            let v = f(s);
            let jet = x.cosh().try_div(x.cos() + 2.0).unwrap();
            // derivatives via the quotient identities q·f = cosh
            let (qd1, qd2, qd3) = (-sn, -cs, sn);
            let f1 = (s.sinh() - qd1 * v) / q;
            let f2 = (s.cosh() - 2.0 * qd1 * f1 - qd2 * v) / q;
            let f3 = (s.sinh() - 3.0 * qd1 * f2 - 3.0 * qd2 * f1 - qd3 * v) / q;
            assert!(close(jet, [v, f1, f2, f3], 1e-12));
        }
    }

    #[test]
    fn sqrt_ln_asinh_against_closed_forms() {
        let s = 1.3;
        let x = Jet3::variable(s);
        let r = s.sqrt();
        assert!(close(x.sqrt().unwrap(), [r, 0.5 / r, -0.25 / (s * r), 0.375 / (s * s * r)], 1e-14));
        assert!(close(x.ln().unwrap(), [s.ln(), 1.0 / s, -1.0 / (s * s), 2.0 / (s * s * s)], 1e-14));
        // asinh s = ln(s + sqrt(1 + s²))
        let alt = (x + (x * x + 1.0).sqrt().unwrap()).ln().unwrap();
        assert!(close(x.asinh(), alt.to_array(), 1e-13));
    }

    proptest! {
        #[test]
        fn cubic_polynomials_are_reproduced(
            c in prop::array::uniform4(-5.0..5.0f64),
            s in -3.0..3.0f64,
        ) {
            let x = Jet3::variable(s);
            let p = x * x * x * c[3] + x * x * c[2] + x * c[1] + c[0];
            let v = c[0] + c[1] * s + c[2] * s * s + c[3] * s * s * s;
            let d1 = c[1] + 2.0 * c[2] * s + 3.0 * c[3] * s * s;
            let d2 = 2.0 * c[2] + 6.0 * c[3] * s;
            let d3 = 6.0 * c[3];
            prop_assert!(close(p, [v, d1, d2, d3], 1e-12));
        }

        #[test]
        fn division_inverts_multiplication(
            a in prop::array::uniform4(-3.0..3.0f64),
            b in prop::array::uniform4(-3.0..3.0f64),
        ) {
            let a = Jet3::new(a[0], a[1], a[2], a[3]);
            let mut b = Jet3::new(b[0], b[1], b[2], b[3]);
            b.v0 = b.v0.signum() * (b.v0.abs() + 0.5);
            let back = (a * b).try_div(b).unwrap();
            prop_assert!(close(back, a.to_array(), 1e-10));
        }

        #[test]
        fn cosh_minus_sinh_is_exp_of_negative(s in -3.0..3.0f64) {
            let x = Jet3::variable(s);
            let lhs = x.cosh() - x.sinh();
            prop_assert!(close(lhs, (-x).exp().to_array(), 1e-12));
        }
    }
}
