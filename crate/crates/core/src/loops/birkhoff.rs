//! Birkhoff factorization of factor chains.
//!
//! Any chain splits as `V₋ · V₊` with `V₋` a product of minus factors that
//! all have `κ = 0` (so `V₋(∞) = Id`) and `V₊` a product of plus factors
//! followed by at most one phase. The split is built from a single identity:
//! `e₊(θ, a) e₋(κ, b) = ẽ₋(κ̃, b̃) ẽ₊(θ̃, ã)` with
//!
//! ```text
//!   ã = a e^{−i(κ+κ̃)},  b̃ = b e^{i(θ+θ̃)},
//!   θ̃ + κ̃ = θ + κ + 2 arg(1 − a b̄ e^{−i(θ+κ)}).
//! ```
//!
//! Moduli are preserved, so a chain whose members satisfy `|a|, |b| < 1`
//! stays inside the domain of the identity throughout.

use num_complex::Complex64;

use super::chain::FactorChain;
use super::factor::{Factor, MinusFactor, PhaseFactor, PlusFactor, Side};
use crate::error::Result;

/// How to split the total phase `θ̃ + κ̃` between the swapped factors.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Normalization {
    /// `κ̃ = 0`; keeps minus factors normalized at λ = ∞.
    #[default]
    ZeroKappa,
    /// `θ̃ = 0`.
    ZeroTheta,
}

/// Rewrites `e₊ e₋` as `ẽ₋ ẽ₊`.
pub fn swap_plus_minus(
    p: &PlusFactor,
    m: &MinusFactor,
    normalization: Normalization,
) -> (MinusFactor, PlusFactor) {
    let (theta, a) = (p.theta(), p.a());
    let (kappa, b) = (m.kappa(), m.b());
    debug_assert!(a.norm() < 1.0 && b.norm() < 1.0);
    let w = Complex64::new(1.0, 0.0) - a * b.conj() * Complex64::from_polar(1.0, -(theta + kappa));
    let total = theta + kappa + 2.0 * w.arg();
    let (theta_t, kappa_t) = match normalization {
        Normalization::ZeroKappa => (total, 0.0),
        Normalization::ZeroTheta => (0.0, total),
    };
    let a_t = a * Complex64::from_polar(1.0, -(kappa + kappa_t));
    let b_t = b * Complex64::from_polar(1.0, theta + theta_t);
    (
        MinusFactor::from_parts(kappa_t, b_t),
        PlusFactor::from_parts(theta_t, a_t),
    )
}

/// Result of [`birkhoff_split`].
#[derive(Clone, Debug, PartialEq)]
pub struct BirkhoffSplit {
    /// Minus factors, all with `κ = 0`.
    pub minus: FactorChain,
    /// Plus factors, optionally followed by one phase.
    pub plus: FactorChain,
    /// Number of swap-identity applications performed.
    pub swaps: usize,
}

/// Pushes every phase rightwards into the next plus/minus factor.
/// Returns the phase-free factors and the residual phase at the right end.
fn eliminate_phases(chain: &FactorChain) -> (Vec<Factor>, f64) {
    let mut out = Vec::with_capacity(chain.len());
    let mut carry = 0.0;
    for f in chain {
        match *f {
            Factor::Phase(ph) => carry += ph.delta(),
            Factor::Plus(p) => {
                out.push(Factor::Plus(p.absorb(carry, Side::Left)));
                carry = 0.0;
            }
            Factor::Minus(m) => {
                out.push(Factor::Minus(m.absorb(carry, Side::Left)));
                carry = 0.0;
            }
        }
    }
    (out, carry)
}

/// Factorizes `chain = minus · plus` by bubbling minus factors leftwards.
///
/// Adjacent `(plus, minus)` pairs are swapped in repeated left-to-right
/// passes until the chain is sorted; each pair of factors is exchanged at most
/// once. Minus factors that never met a plus factor are then normalized to
/// `κ = 0`, and their phases pushed into the plus part.
pub fn birkhoff_split(chain: &FactorChain) -> Result<BirkhoffSplit> {
    chain.validate()?;
    let (mut factors, mut trailing) = eliminate_phases(chain);
    let mut swaps = 0;
    loop {
        let mut swapped = false;
        for i in 1..factors.len() {
            if let (Factor::Plus(p), Factor::Minus(m)) = (factors[i - 1], factors[i]) {
                let (m_t, p_t) = swap_plus_minus(&p, &m, Normalization::ZeroKappa);
                factors[i - 1] = Factor::Minus(m_t);
                factors[i] = Factor::Plus(p_t);
                swaps += 1;
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }

    let mut minus = FactorChain::new();
    let mut plus = FactorChain::new();
    let mut carry = 0.0;
    for f in factors {
        match f {
            Factor::Minus(m) => {
                let (m0, ph) = m.absorb(carry, Side::Left).split_phase();
                minus.push(m0);
                carry = ph.delta();
            }
            Factor::Plus(p) => {
                plus.push(p.absorb(carry, Side::Left));
                carry = 0.0;
            }
            Factor::Phase(_) => unreachable!("phases were eliminated"),
        }
    }
    trailing += carry;
    if trailing != 0.0 {
        plus.push(PhaseFactor::new(trailing));
    }
    Ok(BirkhoffSplit { minus, plus, swaps })
}

/// A Birkhoff split maintained under right multiplication by single factors.
///
/// Appending a minus factor costs one swap per plus factor currently held,
/// so extending a frame by one lattice step is linear in the chain length.
#[derive(Clone, Debug, Default)]
pub struct IncrementalSplit {
    minus: Vec<MinusFactor>,
    plus: Vec<PlusFactor>,
    phase: f64,
    swaps: usize,
}

impl IncrementalSplit {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn swaps(&self) -> usize {
        self.swaps
    }

    pub fn push(&mut self, f: Factor) -> Result<()> {
        f.validate()?;
        match f {
            Factor::Phase(ph) => self.phase += ph.delta(),
            Factor::Plus(p) => {
                self.plus.push(p.absorb(self.phase, Side::Left));
                self.phase = 0.0;
            }
            Factor::Minus(m) => {
                let mut m = m.absorb(self.phase, Side::Left);
                self.phase = 0.0;
                if self.plus.is_empty() {
                    let (m0, ph) = m.split_phase();
                    m = m0;
                    self.phase = ph.delta();
                } else {
                    for p in self.plus.iter_mut().rev() {
                        let (m_t, p_t) = swap_plus_minus(p, &m, Normalization::ZeroKappa);
                        *p = p_t;
                        m = m_t;
                    }
                    self.swaps += self.plus.len();
                }
                self.minus.push(m);
            }
        }
        Ok(())
    }

    pub fn extend(&mut self, chain: &FactorChain) -> Result<()> {
        chain.iter_factors().try_for_each(|f| self.push(f))
    }

    pub fn minus_part(&self) -> FactorChain {
        self.minus.iter().map(|&m| Factor::Minus(m)).collect()
    }

    pub fn plus_part(&self) -> FactorChain {
        let mut out: FactorChain = self.plus.iter().map(|&p| Factor::Plus(p)).collect();
        if self.phase != 0.0 {
            out.push(PhaseFactor::new(self.phase));
        }
        out
    }

    /// `(V₋, V₊-part)` with the current product equal to `V₋ · V₊-part`.
    pub fn parts(&self) -> (FactorChain, FactorChain) {
        (self.minus_part(), self.plus_part())
    }
}

impl FactorChain {
    pub(crate) fn iter_factors(&self) -> impl Iterator<Item = Factor> + '_ {
        self.factors().iter().copied()
    }
}
