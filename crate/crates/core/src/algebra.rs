//! Complex 2×2 matrices and the identification of Euclidean 3-space with su(2).
//!
//! A vector `(x, y, z)` corresponds to `(i/2)(x σ₁ − y σ₂ + z σ₃)`, i.e. the
//! matrix `[[iz/2, (ix − y)/2], [(ix + y)/2, −iz/2]]`. Under this map the
//! Euclidean inner product is `−2 tr(XY)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A complex 2×2 matrix, row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub m11: Complex64,
    pub m12: Complex64,
    pub m21: Complex64,
    pub m22: Complex64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 {
        m11: Complex64::new(1.0, 0.0),
        m12: Complex64::new(0.0, 0.0),
        m21: Complex64::new(0.0, 0.0),
        m22: Complex64::new(1.0, 0.0),
    };

    pub const ZERO: Mat2 = Mat2 {
        m11: Complex64::new(0.0, 0.0),
        m12: Complex64::new(0.0, 0.0),
        m21: Complex64::new(0.0, 0.0),
        m22: Complex64::new(0.0, 0.0),
    };

    /// Pauli matrix σ₃.
    pub const SIGMA3: Mat2 = Mat2 {
        m11: Complex64::new(1.0, 0.0),
        m12: Complex64::new(0.0, 0.0),
        m21: Complex64::new(0.0, 0.0),
        m22: Complex64::new(-1.0, 0.0),
    };

    pub const fn new(m11: Complex64, m12: Complex64, m21: Complex64, m22: Complex64) -> Self {
        Self { m11, m12, m21, m22 }
    }

    pub fn diag(d1: Complex64, d2: Complex64) -> Self {
        Self::new(d1, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), d2)
    }

    pub fn det(&self) -> Complex64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn trace(&self) -> Complex64 {
        self.m11 + self.m22
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::new(
            self.m11.conj(),
            self.m21.conj(),
            self.m12.conj(),
            self.m22.conj(),
        )
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.m11, self.m21, self.m12, self.m22)
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        Self::new(
            self.m11.conj(),
            self.m12.conj(),
            self.m21.conj(),
            self.m22.conj(),
        )
    }

    /// Matrix inverse via the adjugate. Singular input yields non-finite entries.
    pub fn inverse(&self) -> Self {
        let d = self.det();
        Self::new(self.m22 / d, -self.m12 / d, -self.m21 / d, self.m11 / d)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.m11 * s, self.m12 * s, self.m21 * s, self.m22 * s)
    }

    /// Entrywise maximum of absolute values.
    pub fn max_abs(&self) -> f64 {
        self.m11
            .norm()
            .max(self.m12.norm())
            .max(self.m21.norm())
            .max(self.m22.norm())
    }

    /// `‖self − other‖∞` in the entrywise max norm.
    pub fn max_diff(&self, other: &Mat2) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn is_finite(&self) -> bool {
        [self.m11, self.m12, self.m21, self.m22]
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            self.m11, self.m12, self.m21, self.m22
        )
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, r: Mat2) -> Mat2 {
        Mat2::new(
            self.m11 * r.m11 + self.m12 * r.m21,
            self.m11 * r.m12 + self.m12 * r.m22,
            self.m21 * r.m11 + self.m22 * r.m21,
            self.m21 * r.m12 + self.m22 * r.m22,
        )
    }
}

impl Mul<Complex64> for Mat2 {
    type Output = Mat2;

    fn mul(self, s: Complex64) -> Mat2 {
        self.scale(s)
    }
}

impl Mul<f64> for Mat2 {
    type Output = Mat2;

    fn mul(self, s: f64) -> Mat2 {
        self.scale(Complex64::new(s, 0.0))
    }
}

impl Add for Mat2 {
    type Output = Mat2;

    fn add(self, r: Mat2) -> Mat2 {
        Mat2::new(
            self.m11 + r.m11,
            self.m12 + r.m12,
            self.m21 + r.m21,
            self.m22 + r.m22,
        )
    }
}

impl Sub for Mat2 {
    type Output = Mat2;

    fn sub(self, r: Mat2) -> Mat2 {
        Mat2::new(
            self.m11 - r.m11,
            self.m12 - r.m12,
            self.m21 - r.m21,
            self.m22 - r.m22,
        )
    }
}

impl Neg for Mat2 {
    type Output = Mat2;

    fn neg(self) -> Mat2 {
        Mat2::new(-self.m11, -self.m12, -self.m21, -self.m22)
    }
}

/// A point or direction in Euclidean 3-space.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vector3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vector3 {
    pub const ZERO: Vector3 = Vector3 {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(&self, o: &Vector3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(&self, o: &Vector3) -> Vector3 {
        Vector3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(&self, s: f64) -> Vector3 {
        Vector3::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn max_abs_diff(&self, o: &Vector3) -> f64 {
        (self.x - o.x)
            .abs()
            .max((self.y - o.y).abs())
            .max((self.z - o.z).abs())
    }
}

impl Add for Vector3 {
    type Output = Vector3;

    fn add(self, o: Vector3) -> Vector3 {
        Vector3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vector3 {
    type Output = Vector3;

    fn sub(self, o: Vector3) -> Vector3 {
        Vector3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

/// Determinant of the 3×3 matrix with columns `a`, `b`, `c`.
pub fn triple_product(a: &Vector3, b: &Vector3, c: &Vector3) -> f64 {
    a.dot(&b.cross(c))
}

/// An element of the Lie algebra su(2): trace-free and anti-Hermitian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Su2(Mat2);

impl Su2 {
    /// Validates `m` against the su(2) invariants at tolerance `tol`.
    pub fn try_from_matrix(m: Mat2, tol: f64) -> Result<Self> {
        let residual = su2_residual(&m);
        if residual.is_nan() || residual > tol {
            return Err(Error::NotSu2 { residual, tol });
        }
        Ok(Su2(m))
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }
}

/// Largest violation of the su(2) invariants: `max(|tr M|, ‖M + M*‖∞)`.
pub fn su2_residual(m: &Mat2) -> f64 {
    m.trace().norm().max((*m + m.adjoint()).max_abs())
}

/// Largest violation of the SU(2) invariants: `max(|det M − 1|, ‖M M* − Id‖∞)`.
pub fn special_unitary_residual(m: &Mat2) -> f64 {
    let det_dev = (m.det() - Complex64::new(1.0, 0.0)).norm();
    let unit_dev = (*m * m.adjoint()).max_diff(&Mat2::IDENTITY);
    det_dev.max(unit_dev)
}

pub fn is_special_unitary(m: &Mat2, tol: f64) -> bool {
    special_unitary_residual(m) <= tol
}

pub fn to_su2(v: Vector3) -> Su2 {
    let half = 0.5;
    Su2(Mat2::new(
        I * (v.z * half),
        Complex64::new(-v.y * half, v.x * half),
        Complex64::new(v.y * half, v.x * half),
        -I * (v.z * half),
    ))
}

pub fn from_su2(x: &Su2) -> Vector3 {
    let m = x.matrix();
    Vector3::new(2.0 * m.m12.im, -2.0 * m.m12.re, 2.0 * m.m11.im)
}

/// Euclidean inner product of the corresponding vectors, `−2 Re tr(XY)`.
pub fn inner_product(x: &Su2, y: &Su2) -> f64 {
    -2.0 * (*x.matrix() * *y.matrix()).trace().re
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn basis_vectors_map_to_pauli_multiples() {
        let e1 = to_su2(Vector3::new(1.0, 0.0, 0.0));
        assert_eq!(
            *e1.matrix(),
            Mat2::new(c(0.0, 0.0), c(0.0, 0.5), c(0.0, 0.5), c(0.0, 0.0))
        );
        let e3 = to_su2(Vector3::new(0.0, 0.0, 1.0));
        assert_eq!(
            *e3.matrix(),
            Mat2::new(c(0.0, 0.5), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -0.5))
        );
        let zero = to_su2(Vector3::ZERO);
        assert_eq!(zero.matrix().max_abs(), 0.0);
    }

    #[test]
    fn su2_matches_pauli_combination() {
        // (i/2)(x σ₁ − y σ₂ + z σ₃) built from the Pauli matrices directly.
        let (x, y, z) = (0.3, -1.7, 2.2);
        let s1 = Mat2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
        let s2 = Mat2::new(c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0));
        let s3 = Mat2::SIGMA3;
        let expected = (s1 * x - s2 * y + s3 * z) * c(0.0, 0.5);
        let got = to_su2(Vector3::new(x, y, z));
        assert!(got.matrix().max_diff(&expected) < 1e-15);
    }

    #[test]
    fn from_su2_reads_components() {
        let m = Mat2::new(c(0.0, 0.0), c(0.0, 0.4), c(0.0, 0.4), c(0.0, 0.0));
        let v = from_su2(&Su2::try_from_matrix(m, 1e-9).unwrap());
        assert_eq!(v, Vector3::new(0.8, 0.0, 0.0));
        assert_eq!(*to_su2(v).matrix(), m);

        let m = Mat2::new(c(0.0, 0.5), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -0.5));
        let v = from_su2(&Su2::try_from_matrix(m, 1e-9).unwrap());
        assert_eq!(v, Vector3::new(0.0, 0.0, 1.0));
    }

    #[test]
    fn rejects_non_su2() {
        let m = Mat2::IDENTITY;
        assert!(matches!(
            Su2::try_from_matrix(m, 1e-9),
            Err(Error::NotSu2 { .. })
        ));
        let hermitian = Mat2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
        assert!(Su2::try_from_matrix(hermitian, 1e-9).is_err());
    }

    #[test]
    fn inner_products() {
        let e1 = to_su2(Vector3::new(1.0, 0.0, 0.0));
        let e2 = to_su2(Vector3::new(0.0, 1.0, 0.0));
        assert!((inner_product(&e1, &e1) - 1.0).abs() < 1e-15);
        assert!(inner_product(&e1, &e2).abs() < 1e-15);
        let v = to_su2(Vector3::new(3.0, 4.0, 0.0));
        assert!((inner_product(&v, &v) - 25.0).abs() < 1e-13);
    }

    #[test]
    fn special_unitary_predicate() {
        assert!(is_special_unitary(&Mat2::IDENTITY, 1e-12));
        let d = Mat2::diag(c(2.0, 0.0), c(0.5, 0.0));
        assert!(!is_special_unitary(&d, 1e-3));
        let rot = Mat2::diag(c(0.0, 1.0), c(0.0, -1.0));
        assert!(is_special_unitary(&rot, 1e-15));
    }

    #[test]
    fn inverse_of_product() {
        let a = Mat2::new(c(1.0, 2.0), c(0.5, -1.0), c(0.0, 0.3), c(2.0, 0.0));
        let b = a.inverse();
        assert!((a * b).max_diff(&Mat2::IDENTITY) < 1e-14);
    }

    proptest! {
        #[test]
        fn round_trip(x in -1e3f64..1e3, y in -1e3f64..1e3, z in -1e3f64..1e3) {
            let v = Vector3::new(x, y, z);
            let back = from_su2(&to_su2(v));
            prop_assert!(back.max_abs_diff(&v) <= 1e-14 * (1.0 + v.norm()));
        }

        #[test]
        fn image_is_exactly_su2(x in -10f64..10.0, y in -10f64..10.0, z in -10f64..10.0) {
            let m = *to_su2(Vector3::new(x, y, z)).matrix();
            prop_assert_eq!(su2_residual(&m), 0.0);
        }

        #[test]
        fn isometry(
            a in prop::array::uniform3(-10f64..10.0),
            b in prop::array::uniform3(-10f64..10.0),
        ) {
            let u = Vector3::new(a[0], a[1], a[2]);
            let v = Vector3::new(b[0], b[1], b[2]);
            let ip = inner_product(&to_su2(u), &to_su2(v));
            prop_assert!((ip - u.dot(&v)).abs() <= 1e-12);
        }
    }
}
