//! Vectors of E⁴₂ and the exterior square Λ²E⁴₂.
//!
//! The ambient metric is fixed to `dx₁² + dx₂² − dx₃² − dx₄²`. Bivectors are
//! stored on the lexicographic basis `(12, 13, 14, 23, 24, 34)` and carry the
//! inner product induced by Gram determinants, which is diagonal on that basis
//! with signs `(+, −, −, −, −, +)`.

use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub};

/// Causal signs of the standard basis vectors ε₁..ε₄.
pub const METRIC_SIGNS: [f64; 4] = [1.0, 1.0, -1.0, -1.0];

/// Index pairs of the bivector basis, in storage order.
pub const BIVECTOR_BASIS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Induced signs ⟨ε_i∧ε_j, ε_i∧ε_j⟩ in storage order.
pub const BIVECTOR_SIGNS: [f64; 6] = [1.0, -1.0, -1.0, -1.0, -1.0, 1.0];

/// A point or vector of E⁴₂.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PseudoVector4 {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub x4: f64,
}

impl PseudoVector4 {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0, 0.0);

    pub const fn new(x1: f64, x2: f64, x3: f64, x4: f64) -> Self {
        Self { x1, x2, x3, x4 }
    }

    pub const fn from_array(c: [f64; 4]) -> Self {
        Self::new(c[0], c[1], c[2], c[3])
    }

    pub const fn to_array(self) -> [f64; 4] {
        [self.x1, self.x2, self.x3, self.x4]
    }

    /// Standard basis vector ε_{i+1} (zero-based `i`).
    pub fn basis(i: usize) -> Self {
        let mut c = [0.0; 4];
        c[i] = 1.0;
        Self::from_array(c)
    }

    pub fn dot(self, other: Self) -> f64 {
        inner4(self, other)
    }

    pub fn wedge(self, other: Self) -> Bivector {
        wedge(self, other)
    }

    /// Largest absolute coordinate.
    pub fn max_abs(self) -> f64 {
        self.to_array().iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

impl Index<usize> for PseudoVector4 {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        match i {
            0 => &self.x1,
            1 => &self.x2,
            2 => &self.x3,
            3 => &self.x4,
            _ => panic!("PseudoVector4 index {i} out of range"),
        }
    }
}

impl Add for PseudoVector4 {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self::new(self.x1 + o.x1, self.x2 + o.x2, self.x3 + o.x3, self.x4 + o.x4)
    }
}

impl Sub for PseudoVector4 {
    type Output = Self;

    fn sub(self, o: Self) -> Self {
        Self::new(self.x1 - o.x1, self.x2 - o.x2, self.x3 - o.x3, self.x4 - o.x4)
    }
}

impl Neg for PseudoVector4 {
    type Output = Self;

    fn neg(self) -> Self {
        Self::new(-self.x1, -self.x2, -self.x3, -self.x4)
    }
}

impl Mul<PseudoVector4> for f64 {
    type Output = PseudoVector4;

    fn mul(self, v: PseudoVector4) -> PseudoVector4 {
        PseudoVector4::new(self * v.x1, self * v.x2, self * v.x3, self * v.x4)
    }
}

impl Mul<f64> for PseudoVector4 {
    type Output = Self;

    fn mul(self, k: f64) -> Self {
        k * self
    }
}

/// ⟨u, v⟩ = u₁v₁ + u₂v₂ − u₃v₃ − u₄v₄.
pub fn inner4(u: PseudoVector4, v: PseudoVector4) -> f64 {
    u.x1 * v.x1 + u.x2 * v.x2 - u.x3 * v.x3 - u.x4 * v.x4
}

/// Element of Λ²E⁴₂ on the basis `{ε_i∧ε_j : i < j}`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Bivector {
    pub c12: f64,
    pub c13: f64,
    pub c14: f64,
    pub c23: f64,
    pub c24: f64,
    pub c34: f64,
}

impl Bivector {
    pub const ZERO: Self = Self::from_array([0.0; 6]);

    pub const fn from_array(c: [f64; 6]) -> Self {
        Self { c12: c[0], c13: c[1], c14: c[2], c23: c[3], c24: c[4], c34: c[5] }
    }

    pub const fn to_array(self) -> [f64; 6] {
        [self.c12, self.c13, self.c14, self.c23, self.c24, self.c34]
    }

    /// Basis bivector `ε_{i+1} ∧ ε_{j+1}` for zero-based `i < j`.
    pub fn basis(i: usize, j: usize) -> Self {
        wedge(PseudoVector4::basis(i), PseudoVector4::basis(j))
    }

    pub fn inner(self, other: Self) -> f64 {
        inner6(self, other)
    }

    pub fn max_abs(self) -> f64 {
        self.to_array().iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Plain coordinate dot product (Euclidean on the storage basis).
    pub fn euclidean_dot(self, other: Self) -> f64 {
        self.to_array().iter().zip(other.to_array()).map(|(a, b)| a * b).sum()
    }

    pub fn map(self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_array(self.to_array().map(f))
    }
}

impl Add for Bivector {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        let (a, b) = (self.to_array(), o.to_array());
        Self::from_array(std::array::from_fn(|k| a[k] + b[k]))
    }
}

impl AddAssign for Bivector {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for Bivector {
    type Output = Self;

    fn sub(self, o: Self) -> Self {
        let (a, b) = (self.to_array(), o.to_array());
        Self::from_array(std::array::from_fn(|k| a[k] - b[k]))
    }
}

impl Neg for Bivector {
    type Output = Self;

    fn neg(self) -> Self {
        self.map(|v| -v)
    }
}

impl Mul<Bivector> for f64 {
    type Output = Bivector;

    fn mul(self, b: Bivector) -> Bivector {
        b.map(|v| self * v)
    }
}

impl Mul<f64> for Bivector {
    type Output = Self;

    fn mul(self, k: f64) -> Self {
        k * self
    }
}

/// `c_ij = u_i v_j − u_j v_i` for `i < j`.
pub fn wedge(u: PseudoVector4, v: PseudoVector4) -> Bivector {
    Bivector::from_array(BIVECTOR_BASIS.map(|(i, j)| u[i] * v[j] - u[j] * v[i]))
}

/// Induced indefinite inner product on Λ²E⁴₂.
pub fn inner6(a: Bivector, b: Bivector) -> f64 {
    let (a, b) = (a.to_array(), b.to_array());
    (0..6).map(|k| BIVECTOR_SIGNS[k] * a[k] * b[k]).sum()
}
