//! Extended frames from potential data via a single Birkhoff split.
//!
//! Given normalized potentials `(α, p)` on the n-axis and `(β, q)` on the
//! m-axis, the one-step factors
//!
//! ```text
//!   ξ₊(n) = e₊(0, (i/2) p(n) e^{−iα(n)}),   ξ₋(m) = e₋(0, −(i/2) q(m) e^{iβ(m)})
//! ```
//! are accumulated into `F₊(n) = ξ₊(0)⋯ξ₊(n−1)` and `G₋(m) = ξ₋(0)⋯ξ₋(m−1)`.
//! With the phase `D(n) = diag(e^{ik/2}, e^{−ik/2})`,
//! `k(n) = 2 Σ_{j<n} (−1)^{j+n} α(j)`, the chain `(F₊D)⁻¹G₋` is split as
//! `V₋ · V₊⁻¹` and the frame is `F = G₋V₊ = F₊DV₋`.
//!
//! Generalized potentials replace the one-step factors by arbitrary chains of
//! the form `P₋ ξ₊ P₋` (n-direction) and `P₊ ξ₋ P₊` (m-direction).

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::loops::{Factor, FactorChain, IncrementalSplit, MinusFactor, PhaseFactor, PlusFactor};

fn check_coupling(name: &str, index: usize, v: f64) -> Result<()> {
    let half = (v / 2.0).abs();
    if !v.is_finite() || half == 0.0 || half >= 1.0 {
        return Err(Error::InvalidPotentials(format!(
            "{name}({index}) = {v} violates 0 < |{name}/2| < 1"
        )));
    }
    Ok(())
}

fn check_angles(name: &str, values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::InvalidPotentials(format!(
            "{name}({i}) is not finite"
        ))),
        None => Ok(()),
    }
}

/// Tables of `α, p` (indexed by n) and `β, q` (indexed by m).
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedPotentials {
    alpha: Vec<f64>,
    beta: Vec<f64>,
    p: Vec<f64>,
    q: Vec<f64>,
}

impl NormalizedPotentials {
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>, p: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        check_angles("alpha", &alpha)?;
        check_angles("beta", &beta)?;
        if let Some(&a0) = alpha.first() {
            if a0 != 0.0 {
                return Err(Error::InvalidPotentials(format!(
                    "alpha(0) must be 0, got {a0}"
                )));
            }
        }
        for (i, &v) in p.iter().enumerate() {
            check_coupling("p", i, v)?;
        }
        for (i, &v) in q.iter().enumerate() {
            check_coupling("q", i, v)?;
        }
        Ok(Self { alpha, beta, p, q })
    }

    /// Constant data on an `n_len × m_len` window; `α(0)` is pinned to zero.
    pub fn constant(
        n_len: usize,
        m_len: usize,
        alpha: f64,
        beta: f64,
        p: f64,
        q: f64,
    ) -> Result<Self> {
        Self::periodic(n_len, m_len, &[alpha], &[beta], &[p], &[q])
    }

    /// Cycles each pattern over the window; `α(0)` is pinned to zero.
    pub fn periodic(
        n_len: usize,
        m_len: usize,
        alpha: &[f64],
        beta: &[f64],
        p: &[f64],
        q: &[f64],
    ) -> Result<Self> {
        let cycle = |pattern: &[f64], len: usize, name: &str| -> Result<Vec<f64>> {
            if pattern.is_empty() && len > 0 {
                return Err(Error::InvalidPotentials(format!("empty {name} pattern")));
            }
            Ok((0..len).map(|i| pattern[i % pattern.len()]).collect())
        };
        let mut a = cycle(alpha, n_len, "alpha")?;
        if let Some(a0) = a.first_mut() {
            *a0 = 0.0;
        }
        Self::new(
            a,
            cycle(beta, m_len, "beta")?,
            cycle(p, n_len, "p")?,
            cycle(q, m_len, "q")?,
        )
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    /// Number of n-steps covered by the tables.
    pub fn n_len(&self) -> usize {
        self.alpha.len().min(self.p.len())
    }

    /// Number of m-steps covered by the tables.
    pub fn m_len(&self) -> usize {
        self.beta.len().min(self.q.len())
    }

    fn check_n(&self, n: usize) -> Result<()> {
        if n >= self.n_len() {
            return Err(Error::OutsideWindow {
                axis: "n",
                index: n,
                len: self.n_len(),
            });
        }
        Ok(())
    }

    fn check_m(&self, m: usize) -> Result<()> {
        if m >= self.m_len() {
            return Err(Error::OutsideWindow {
                axis: "m",
                index: m,
                len: self.m_len(),
            });
        }
        Ok(())
    }

    /// `ξ₊(n) = F₊(n)⁻¹ F₊(n+1)`.
    pub fn xi_plus(&self, n: usize) -> Result<PlusFactor> {
        self.check_n(n)?;
        let a = Complex64::new(0.0, 0.5 * self.p[n]) * Complex64::from_polar(1.0, -self.alpha[n]);
        PlusFactor::new(0.0, a)
    }

    /// `ξ₋(m) = G₋(m)⁻¹ G₋(m+1)`.
    pub fn xi_minus(&self, m: usize) -> Result<MinusFactor> {
        self.check_m(m)?;
        let b = Complex64::new(0.0, -0.5 * self.q[m]) * Complex64::from_polar(1.0, self.beta[m]);
        MinusFactor::new(0.0, b)
    }

    /// `F₊(n) = ξ₊(0) ⋯ ξ₊(n−1)`, the identity at n = 0.
    pub fn solve_frame_plus(&self, n: usize) -> Result<FactorChain> {
        if n > 0 {
            self.check_n(n - 1)?;
        }
        (0..n).map(|j| self.xi_plus(j).map(Factor::Plus)).collect()
    }

    /// `G₋(m) = ξ₋(0) ⋯ ξ₋(m−1)`, the identity at m = 0.
    pub fn solve_frame_minus(&self, m: usize) -> Result<FactorChain> {
        if m > 0 {
            self.check_m(m - 1)?;
        }
        (0..m)
            .map(|j| self.xi_minus(j).map(Factor::Minus))
            .collect()
    }

    /// `k(n) = 2 Σ_{j<n} (−1)^{j+n} α(j)`.
    pub fn k(&self, n: usize) -> Result<f64> {
        if n > 0 {
            self.check_n(n - 1)?;
        }
        let sum: f64 = (0..n)
            .map(|j| {
                if (j + n) % 2 == 0 {
                    self.alpha[j]
                } else {
                    -self.alpha[j]
                }
            })
            .sum();
        Ok(2.0 * sum)
    }

    /// `D(n) = diag(e^{ik/2}, e^{−ik/2})`.
    pub fn phase_k(&self, n: usize) -> Result<PhaseFactor> {
        Ok(PhaseFactor::new(0.5 * self.k(n)?))
    }
}

/// `F₊`, `G₋` and `D` materialized over a window.
#[derive(Clone, Debug)]
pub struct FrameFactorization {
    f_plus: Vec<FactorChain>,
    g_minus: Vec<FactorChain>,
    d_phase: Vec<PhaseFactor>,
}

impl FrameFactorization {
    pub fn new(pot: &NormalizedPotentials, n_max: usize, m_max: usize) -> Result<Self> {
        let mut f_plus = vec![FactorChain::new()];
        let mut d_phase = vec![PhaseFactor::new(0.0)];
        for n in 0..n_max {
            let mut next = f_plus[n].clone();
            next.push(pot.xi_plus(n)?);
            f_plus.push(next);
            d_phase.push(pot.phase_k(n + 1)?);
        }
        let mut g_minus = vec![FactorChain::new()];
        for m in 0..m_max {
            let mut next = g_minus[m].clone();
            next.push(pot.xi_minus(m)?);
            g_minus.push(next);
        }
        Ok(Self {
            f_plus,
            g_minus,
            d_phase,
        })
    }

    pub fn f_plus(&self, n: usize) -> Option<&FactorChain> {
        self.f_plus.get(n)
    }

    pub fn g_minus(&self, m: usize) -> Option<&FactorChain> {
        self.g_minus.get(m)
    }

    pub fn d_phase(&self, n: usize) -> Option<PhaseFactor> {
        self.d_phase.get(n).copied()
    }
}

/// Pairs of one-variable chains a frame can be assembled from.
pub trait FrameSource: Sync {
    /// Inclusive bounds `(n_max, m_max)` of the lattice window this source covers.
    fn limits(&self) -> (usize, usize);

    /// The n-side chain whose inverse opens the split: `F₊(n)D(n)` or `F_n`.
    fn n_frame(&self, n: usize) -> Result<FactorChain>;

    /// The m-direction step chain from `m` to `m + 1`.
    fn m_step(&self, m: usize) -> Result<FactorChain>;

    fn m_frame(&self, m: usize) -> Result<FactorChain> {
        let mut out = FactorChain::new();
        for j in 0..m {
            out.append(&self.m_step(j)?);
        }
        Ok(out)
    }
}

impl FrameSource for NormalizedPotentials {
    fn limits(&self) -> (usize, usize) {
        (self.n_len(), self.m_len())
    }

    fn n_frame(&self, n: usize) -> Result<FactorChain> {
        let mut chain = self.solve_frame_plus(n)?;
        chain.push(self.phase_k(n)?);
        Ok(chain)
    }

    fn m_step(&self, m: usize) -> Result<FactorChain> {
        Ok(FactorChain::from_factors(vec![self.xi_minus(m)?.into()]))
    }
}

/// Pair of discrete generalized potentials, cycled over their tables.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralizedPotentials {
    eta_n: Vec<FactorChain>,
    eta_m: Vec<FactorChain>,
}

impl GeneralizedPotentials {
    /// Each `eta_n` entry must contain exactly one plus factor (the rest minus
    /// or phase); each `eta_m` entry exactly one minus factor.
    pub fn new(eta_n: Vec<FactorChain>, eta_m: Vec<FactorChain>) -> Result<Self> {
        if eta_n.is_empty() || eta_m.is_empty() {
            return Err(Error::InvalidPotentials(
                "empty generalized potential table".into(),
            ));
        }
        for (i, c) in eta_n.iter().enumerate() {
            c.validate()?;
            if c.plus_count() != 1 {
                return Err(Error::InvalidPotentials(format!(
                    "eta_n({i}) must contain exactly one plus factor"
                )));
            }
        }
        for (i, c) in eta_m.iter().enumerate() {
            c.validate()?;
            if c.minus_count() != 1 {
                return Err(Error::InvalidPotentials(format!(
                    "eta_m({i}) must contain exactly one minus factor"
                )));
            }
        }
        Ok(Self { eta_n, eta_m })
    }

    pub fn eta_n(&self, n: usize) -> &FactorChain {
        &self.eta_n[n % self.eta_n.len()]
    }

    pub fn eta_m(&self, m: usize) -> &FactorChain {
        &self.eta_m[m % self.eta_m.len()]
    }

    /// `F_n = η_n(0) ⋯ η_n(n−1)`.
    pub fn frame_n(&self, n: usize) -> FactorChain {
        let mut out = FactorChain::new();
        for j in 0..n {
            out.append(self.eta_n(j));
        }
        out
    }

    /// `G_m = η_m(0) ⋯ η_m(m−1)`.
    pub fn frame_m(&self, m: usize) -> FactorChain {
        let mut out = FactorChain::new();
        for j in 0..m {
            out.append(self.eta_m(j));
        }
        out
    }
}

/// Surfaces of revolution: `η_n = η_m⁻¹ = A₊ L A₋` with
/// `A₊ = e₊(0, (i/2)q)`, `A₋ = e₋(0, −(i/2)q)` and `L = diag(e^{ic}, e^{−ic})`,
/// `c = π/ℓ`.
pub fn revolution_potentials(q: f64, ell: u32) -> Result<GeneralizedPotentials> {
    check_coupling("q", 0, q)?;
    if ell == 0 {
        return Err(Error::InvalidPotentials(
            "ell must be a positive integer".into(),
        ));
    }
    let c = PI / f64::from(ell);
    let a_plus = PlusFactor::new(0.0, Complex64::new(0.0, 0.5 * q))?;
    let a_minus = MinusFactor::new(0.0, Complex64::new(0.0, -0.5 * q))?;
    let eta = FactorChain::from_factors(vec![
        a_plus.into(),
        PhaseFactor::new(c).into(),
        a_minus.into(),
    ]);
    let inv = eta.inverse();
    GeneralizedPotentials::new(vec![eta], vec![inv])
}

impl FrameSource for GeneralizedPotentials {
    fn limits(&self) -> (usize, usize) {
        (usize::MAX, usize::MAX)
    }

    fn n_frame(&self, n: usize) -> Result<FactorChain> {
        Ok(self.frame_n(n))
    }

    fn m_step(&self, m: usize) -> Result<FactorChain> {
        Ok(self.eta_m(m).clone())
    }

    fn m_frame(&self, m: usize) -> Result<FactorChain> {
        Ok(self.frame_m(m))
    }
}

/// The same frame assembled from both sides of the split.
#[derive(Clone, Debug, PartialEq)]
pub struct AssembledFrame {
    /// `F₊ D V₋` (normalized) or `F_n V₋` (generalized).
    pub via_n: FactorChain,
    /// `G₋ V₊` (normalized) or `G_m V₊` (generalized).
    pub via_m: FactorChain,
}

fn check_limits<S: FrameSource + ?Sized>(src: &S, n: usize, m: usize) -> Result<()> {
    let (n_max, m_max) = src.limits();
    if n > n_max {
        return Err(Error::OutsideWindow {
            axis: "n",
            index: n,
            len: n_max,
        });
    }
    if m > m_max {
        return Err(Error::OutsideWindow {
            axis: "m",
            index: m,
            len: m_max,
        });
    }
    Ok(())
}

/// Splits `N(n)⁻¹ G(m) = V₋ V₊⁻¹` and returns both assemblies of the frame.
pub fn assemble_frame<S: FrameSource + ?Sized>(
    src: &S,
    n: usize,
    m: usize,
) -> Result<AssembledFrame> {
    check_limits(src, n, m)?;
    let left = src.n_frame(n)?;
    let right = src.m_frame(m)?;
    let mut split = IncrementalSplit::new();
    split.extend(&left.inverse())?;
    split.extend(&right)?;
    let (v_minus, v_plus_inv) = split.parts();
    Ok(AssembledFrame {
        via_n: left.concat(&v_minus),
        via_m: right.concat(&v_plus_inv.inverse()),
    })
}

/// Extended frame `F(n, m) = G₋ V₊` from normalized potentials.
pub fn extended_frame(pot: &NormalizedPotentials, n: usize, m: usize) -> Result<FactorChain> {
    assemble_frame(pot, n, m).map(|f| f.via_m)
}

/// Frame `F_n V₋` from generalized potentials (λ-independent diagonal dropped).
pub fn frame_from_generalized(
    gp: &GeneralizedPotentials,
    n: usize,
    m: usize,
) -> Result<FactorChain> {
    assemble_frame(gp, n, m).map(|f| f.via_n)
}

/// All frames of column `n` for `m = 0..=m_max`, reusing one incremental
/// split along the column.
pub fn frame_column<S: FrameSource + ?Sized>(
    src: &S,
    n: usize,
    m_max: usize,
) -> Result<Vec<AssembledFrame>> {
    check_limits(src, n, m_max)?;
    let left = src.n_frame(n)?;
    let mut split = IncrementalSplit::new();
    split.extend(&left.inverse())?;
    let mut right = FactorChain::new();
    let mut out = Vec::with_capacity(m_max + 1);
    for m in 0..=m_max {
        if m > 0 {
            let step = src.m_step(m - 1)?;
            split.extend(&step)?;
            right.append(&step);
        }
        let (v_minus, v_plus_inv) = split.parts();
        out.push(AssembledFrame {
            via_n: left.concat(&v_minus),
            via_m: right.concat(&v_plus_inv.inverse()),
        });
    }
    Ok(out)
}

/// Assembled frames on the window `0..=n_max × 0..=m_max`, row-major in n.
#[derive(Clone, Debug)]
pub struct ChainGrid {
    n_max: usize,
    m_max: usize,
    frames: Vec<AssembledFrame>,
}

impl ChainGrid {
    pub fn build<S: FrameSource + ?Sized>(src: &S, n_max: usize, m_max: usize) -> Result<Self> {
        check_limits(src, n_max, m_max)?;
        let columns: Vec<Vec<AssembledFrame>> = (0..=n_max)
            .into_par_iter()
            .map(|n| frame_column(src, n, m_max))
            .collect::<Result<_>>()?;
        Ok(Self {
            n_max,
            m_max,
            frames: columns.into_iter().flatten().collect(),
        })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    pub fn get(&self, n: usize, m: usize) -> &AssembledFrame {
        assert!(
            n <= self.n_max && m <= self.m_max,
            "({n}, {m}) outside grid"
        );
        &self.frames[n * (self.m_max + 1) + m]
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), &AssembledFrame)> {
        let w = self.m_max + 1;
        self.frames
            .iter()
            .enumerate()
            .map(move |(i, f)| ((i / w, i % w), f))
    }
}
