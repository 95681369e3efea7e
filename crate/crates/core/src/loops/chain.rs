use num_complex::Complex64;

use super::factor::{Factor, MinusFactor, PhaseFactor, PlusFactor};
use crate::algebra::Mat2;
use crate::error::{Error, Result};

/// An ordered product of elementary factors, evaluated left to right.
///
/// Every loop the crate manipulates (frames, potentials, Birkhoff parts) is
/// stored this way, so evaluation at any admissible λ is exact up to rounding.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FactorChain {
    factors: Vec<Factor>,
}

impl FactorChain {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_factors(factors: Vec<Factor>) -> Self {
        Self { factors }
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn push(&mut self, f: impl Into<Factor>) {
        self.factors.push(f.into());
    }

    pub fn append(&mut self, other: &FactorChain) {
        self.factors.extend_from_slice(&other.factors);
    }

    /// `self · other` as a new chain.
    pub fn concat(&self, other: &FactorChain) -> FactorChain {
        let mut out = Vec::with_capacity(self.len() + other.len());
        out.extend_from_slice(&self.factors);
        out.extend_from_slice(&other.factors);
        FactorChain { factors: out }
    }

    /// The chain evaluating to the matrix inverse: reversed order, each factor inverted.
    pub fn inverse(&self) -> FactorChain {
        FactorChain {
            factors: self.factors.iter().rev().map(Factor::inverse).collect(),
        }
    }

    /// `self` repeated `k` times.
    pub fn power(&self, k: usize) -> FactorChain {
        let mut out = Vec::with_capacity(self.len() * k);
        for _ in 0..k {
            out.extend_from_slice(&self.factors);
        }
        FactorChain { factors: out }
    }

    pub fn plus_count(&self) -> usize {
        self.factors
            .iter()
            .filter(|f| matches!(f, Factor::Plus(_)))
            .count()
    }

    pub fn minus_count(&self) -> usize {
        self.factors
            .iter()
            .filter(|f| matches!(f, Factor::Minus(_)))
            .count()
    }

    pub fn plus_factors(&self) -> impl Iterator<Item = &PlusFactor> {
        self.factors.iter().filter_map(|f| match f {
            Factor::Plus(p) => Some(p),
            _ => None,
        })
    }

    pub fn minus_factors(&self) -> impl Iterator<Item = &MinusFactor> {
        self.factors.iter().filter_map(|f| match f {
            Factor::Minus(m) => Some(m),
            _ => None,
        })
    }

    pub fn phase_factors(&self) -> impl Iterator<Item = &PhaseFactor> {
        self.factors.iter().filter_map(|f| match f {
            Factor::Phase(p) => Some(p),
            _ => None,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.factors.iter().try_for_each(Factor::validate)
    }

    pub fn eval(&self, lambda: Complex64) -> Result<Mat2> {
        self.factors
            .iter()
            .try_fold(Mat2::IDENTITY, |acc, f| Ok(acc * f.eval(lambda)?))
    }

    pub fn eval_real(&self, lambda: f64) -> Result<Mat2> {
        self.eval(Complex64::new(lambda, 0.0))
    }

    /// Value and λ-derivative of the product in one forward sweep:
    /// `(P, P') ← (P E, P' E + P E')`.
    pub fn eval_with_derivative(&self, lambda: Complex64) -> Result<(Mat2, Mat2)> {
        let mut value = Mat2::IDENTITY;
        let mut deriv = Mat2::ZERO;
        for f in &self.factors {
            let (e, de) = f.eval_with_derivative(lambda)?;
            deriv = deriv * e + value * de;
            value = value * e;
        }
        Ok((value, deriv))
    }

    /// Exact `∂F/∂λ` at a positive real λ.
    pub fn lambda_derivative(&self, lambda: f64) -> Result<Mat2> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::NonPositiveLambda(lambda));
        }
        self.eval_with_derivative(Complex64::new(lambda, 0.0))
            .map(|(_, d)| d)
    }

    /// Residual of the reality condition `g(λ) = (conj g(λ̄))^{−T}`.
    ///
    /// At real λ this is the unitarity defect; on the unit circle it compares
    /// the values at λ and λ̄.
    pub fn reality_residual(&self, lambda: Complex64) -> Result<f64> {
        let g = self.eval(lambda)?;
        let g_bar = self.eval(lambda.conj())?;
        let mirrored = g_bar.conj().inverse().transpose();
        let scale = g.max_abs().max(1.0);
        let det = (g.det() - 1.0).norm();
        Ok((g.max_diff(&mirrored) / scale).max(det))
    }

    /// Value together with the rounding amplification of the left-to-right
    /// product, `Σₖ ‖E₁⋯Eₖ₋₁‖ ‖Eₖ‖ ‖Eₖ₊₁⋯E_N‖` (entrywise max norm).
    ///
    /// Off the real axis long chains can pass through partial products far
    /// larger than the result; the floating-point value is then only accurate
    /// to about `ε` times this factor.
    pub fn eval_with_condition(&self, lambda: Complex64) -> Result<(Mat2, f64)> {
        let mats = self
            .factors
            .iter()
            .map(|f| f.eval(lambda))
            .collect::<Result<Vec<_>>>()?;
        let mut suffix = vec![1.0; mats.len() + 1];
        let mut acc = Mat2::IDENTITY;
        for (k, e) in mats.iter().enumerate().rev() {
            acc = *e * acc;
            suffix[k] = acc.max_abs();
        }
        let mut value = Mat2::IDENTITY;
        let mut cond = 0.0;
        for (k, e) in mats.iter().enumerate() {
            cond += value.max_abs() * e.max_abs() * suffix[k + 1];
            value = value * *e;
        }
        Ok((value, cond))
    }

    /// Reality residual measured against the rounding amplification of both
    /// evaluations, so that it stays meaningful where the chain is badly
    /// conditioned. Uses the adjugate in place of the inverse, with the
    /// determinant checked separately at the same scale.
    pub fn reality_backward_residual(&self, lambda: Complex64) -> Result<f64> {
        let (g, cg) = self.eval_with_condition(lambda)?;
        let (h, ch) = self.eval_with_condition(lambda.conj())?;
        let h = h.conj();
        let mirrored = Mat2::new(h.m22, -h.m21, -h.m12, h.m11);
        let scale = cg.max(ch).max(1.0);
        let det = (g.det() - 1.0).norm() / (scale * g.max_abs().max(1.0));
        Ok((g.max_diff(&mirrored) / scale).max(det))
    }

    /// Residual of the twisting condition `σ₃ g(λ) σ₃ = g(−λ)`.
    pub fn twist_residual(&self, lambda: Complex64) -> Result<f64> {
        let g = self.eval(lambda)?;
        let g_neg = self.eval(-lambda)?;
        let s = Mat2::SIGMA3;
        Ok((s * g * s).max_diff(&g_neg) / g.max_abs().max(1.0))
    }
}

impl FromIterator<Factor> for FactorChain {
    fn from_iter<I: IntoIterator<Item = Factor>>(iter: I) -> Self {
        Self {
            factors: iter.into_iter().collect(),
        }
    }
}

impl<'a> IntoIterator for &'a FactorChain {
    type Item = &'a Factor;
    type IntoIter = std::slice::Iter<'a, Factor>;

    fn into_iter(self) -> Self::IntoIter {
        self.factors.iter()
    }
}
