//! Elementary loop-group factors.
//!
//! A plus factor `e₊(θ, a)` evaluates to
//!
//! ```text
//!   1/√(1 + |a|²λ²) · [[e^{iθ}, aλ], [−āλ, e^{−iθ}]]
//! ```
//!
//! and a minus factor `e₋(κ, b)` is the same shape with `λ⁻¹` in place of
//! `λ`. Both have determinant one for every admissible λ. A phase factor is
//! the λ-independent diagonal `diag(e^{iδ}, e^{−iδ})`.

use num_complex::Complex64;

use crate::algebra::Mat2;
use crate::error::{Error, Result};

/// Which side of a factor a phase multiplies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

fn check_modulus(c: Complex64) -> Result<()> {
    if !(c.re.is_finite() && c.im.is_finite()) {
        return Err(Error::NonFiniteParameter);
    }
    let modulus = c.norm();
    if modulus >= 1.0 {
        return Err(Error::ModulusOutOfRange { modulus });
    }
    Ok(())
}

fn check_angle(x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFiniteParameter)
    }
}

/// Value and λ-derivative of `1/√(1+|c|²t²) [[e^{iφ}, c t], [−c̄ t, e^{−iφ}]]`
/// where `t = t(λ)` has derivative `dt`.
fn elementary(phase: f64, c: Complex64, t: Complex64, dt: Complex64) -> Result<(Mat2, Mat2)> {
    let c2 = c.norm_sqr();
    let s = 1.0 + t * t * c2;
    if s.re <= 0.0 {
        return Err(Error::NormalizerBranch { re: s.re, im: s.im });
    }
    let inv_root = s.sqrt().inv();
    let e = Complex64::from_polar(1.0, phase);
    let numerator = Mat2::new(e, c * t, -c.conj() * t, e.conj());
    let value = numerator * inv_root;
    let off = Mat2::new(
        Complex64::new(0.0, 0.0),
        c,
        -c.conj(),
        Complex64::new(0.0, 0.0),
    );
    // d/dλ (N/√s) = t' (N_c − (|c|² t / s) N) / √s
    let derivative = (off - numerator * (t * c2 / s)) * (inv_root * dt);
    Ok((value, derivative))
}

fn check_lambda(lambda: Complex64) -> Result<()> {
    if lambda.re == 0.0 && lambda.im == 0.0 {
        Err(Error::ZeroSpectralParameter)
    } else {
        Ok(())
    }
}

/// `e₊(θ, a)`: holomorphic inside the unit disk, `|a| < 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlusFactor {
    theta: f64,
    a: Complex64,
}

impl PlusFactor {
    pub fn new(theta: f64, a: Complex64) -> Result<Self> {
        check_angle(theta)?;
        check_modulus(a)?;
        Ok(Self { theta, a })
    }

    /// Skips validation; callers must preserve `|a| < 1`.
    pub(crate) fn from_parts(theta: f64, a: Complex64) -> Self {
        Self { theta, a }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn eval(&self, lambda: Complex64) -> Result<Mat2> {
        self.eval_with_derivative(lambda).map(|(v, _)| v)
    }

    pub fn eval_with_derivative(&self, lambda: Complex64) -> Result<(Mat2, Mat2)> {
        check_lambda(lambda)?;
        elementary(self.theta, self.a, lambda, Complex64::new(1.0, 0.0))
    }

    pub fn inverse(&self) -> Self {
        Self::from_parts(-self.theta, -self.a)
    }

    /// `diag(e^{iδ}, e^{−iδ}) · e₊` (left) or `e₊ · diag(e^{iδ}, e^{−iδ})` (right).
    pub fn absorb(&self, delta: f64, side: Side) -> Self {
        let rot = match side {
            Side::Left => Complex64::from_polar(1.0, delta),
            Side::Right => Complex64::from_polar(1.0, -delta),
        };
        Self::from_parts(self.theta + delta, self.a * rot)
    }
}

/// `e₋(κ, b)`: holomorphic outside the unit disk, `|b| < 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MinusFactor {
    kappa: f64,
    b: Complex64,
}

impl MinusFactor {
    pub fn new(kappa: f64, b: Complex64) -> Result<Self> {
        check_angle(kappa)?;
        check_modulus(b)?;
        Ok(Self { kappa, b })
    }

    pub(crate) fn from_parts(kappa: f64, b: Complex64) -> Self {
        Self { kappa, b }
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    pub fn eval(&self, lambda: Complex64) -> Result<Mat2> {
        self.eval_with_derivative(lambda).map(|(v, _)| v)
    }

    pub fn eval_with_derivative(&self, lambda: Complex64) -> Result<(Mat2, Mat2)> {
        check_lambda(lambda)?;
        let t = lambda.inv();
        elementary(self.kappa, self.b, t, -t * t)
    }

    pub fn inverse(&self) -> Self {
        Self::from_parts(-self.kappa, -self.b)
    }

    pub fn absorb(&self, delta: f64, side: Side) -> Self {
        let rot = match side {
            Side::Left => Complex64::from_polar(1.0, delta),
            Side::Right => Complex64::from_polar(1.0, -delta),
        };
        Self::from_parts(self.kappa + delta, self.b * rot)
    }

    /// Writes `e₋(κ, b) = e₋(0, b e^{iκ}) · diag(e^{iκ}, e^{−iκ})`.
    pub fn split_phase(&self) -> (MinusFactor, PhaseFactor) {
        (
            Self::from_parts(0.0, self.b * Complex64::from_polar(1.0, self.kappa)),
            PhaseFactor::new(self.kappa),
        )
    }
}

/// `diag(e^{iδ}, e^{−iδ})`, independent of λ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseFactor {
    delta: f64,
}

impl PhaseFactor {
    pub fn new(delta: f64) -> Self {
        Self { delta }
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn matrix(&self) -> Mat2 {
        let e = Complex64::from_polar(1.0, self.delta);
        Mat2::diag(e, e.conj())
    }

    pub fn inverse(&self) -> Self {
        Self::new(-self.delta)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Factor {
    Plus(PlusFactor),
    Minus(MinusFactor),
    Phase(PhaseFactor),
}

impl Factor {
    pub fn eval(&self, lambda: Complex64) -> Result<Mat2> {
        match self {
            Factor::Plus(f) => f.eval(lambda),
            Factor::Minus(f) => f.eval(lambda),
            Factor::Phase(f) => {
                check_lambda(lambda)?;
                Ok(f.matrix())
            }
        }
    }

    pub fn eval_with_derivative(&self, lambda: Complex64) -> Result<(Mat2, Mat2)> {
        match self {
            Factor::Plus(f) => f.eval_with_derivative(lambda),
            Factor::Minus(f) => f.eval_with_derivative(lambda),
            Factor::Phase(f) => {
                check_lambda(lambda)?;
                Ok((f.matrix(), Mat2::ZERO))
            }
        }
    }

    pub fn inverse(&self) -> Factor {
        match self {
            Factor::Plus(f) => Factor::Plus(f.inverse()),
            Factor::Minus(f) => Factor::Minus(f.inverse()),
            Factor::Phase(f) => Factor::Phase(f.inverse()),
        }
    }

    /// Re-checks the modulus bound of plus/minus members.
    pub fn validate(&self) -> Result<()> {
        match self {
            Factor::Plus(f) => {
                check_angle(f.theta)?;
                check_modulus(f.a)
            }
            Factor::Minus(f) => {
                check_angle(f.kappa)?;
                check_modulus(f.b)
            }
            Factor::Phase(f) => check_angle(f.delta),
        }
    }
}

impl From<PlusFactor> for Factor {
    fn from(f: PlusFactor) -> Self {
        Factor::Plus(f)
    }
}

impl From<MinusFactor> for Factor {
    fn from(f: MinusFactor) -> Self {
        Factor::Minus(f)
    }
}

impl From<PhaseFactor> for Factor {
    fn from(f: PhaseFactor) -> Self {
        Factor::Phase(f)
    }
}

/// Multiplies a phase into a neighbouring factor without changing the product.
pub fn absorb_phase(phase: PhaseFactor, factor: Factor, side: Side) -> Factor {
    let delta = phase.delta();
    match factor {
        Factor::Plus(f) => Factor::Plus(f.absorb(delta, side)),
        Factor::Minus(f) => Factor::Minus(f.absorb(delta, side)),
        Factor::Phase(f) => Factor::Phase(PhaseFactor::new(f.delta() + delta)),
    }
}
