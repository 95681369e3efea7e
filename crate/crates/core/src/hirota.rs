//! Discrete sine-Gordon (Hirota) lattice, its Lax frames, and the inverse
//! problem of reading a lattice solution back from frames.
//!
//! The lattice equation on one quad is
//!
//! ```text
//!   sin((u₁₂ − u₁ − u₂ + u)/4) = (pq/4) sin((u₁₂ + u₁ + u₂ + u)/4)
//! ```
//! with Lax matrices
//!
//! ```text
//!   U = Δ₊⁻¹ [[e^{−iθ}, (i/2)pλ], [(i/2)pλ, e^{iθ}]],          θ = (u₁ − u)/2
//!   V = Δ₋⁻¹ [[1, −(i/2)q e^{iφ}/λ], [−(i/2)q e^{−iφ}/λ, 1]],  φ = (u₂ + u)/2
//! ```
//! normalized to determinant one.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::algebra::{from_su2, Mat2, Su2, Vector3};
use crate::dalembert::{ChainGrid, NormalizedPotentials};
use crate::error::{Error, Result};
use crate::surface::{SurfaceMesh, Window};

/// A transition is rejected when its best template fit misses by more than this.
pub const FIT_TOL: f64 = 1e-6;

/// Relative tolerance of the lattice path-independence check.
pub const PATH_TOL: f64 = 1e-11;

/// Solves one quad of the lattice equation for `u₁₂`.
///
/// With `Y = (u₁+u₂)/4` and `X = (u₁₂+u)/4` the equation reads
/// `tan X = r tan Y`, `r = (1+k)/(1−k)`, `k = pq/4`. The branch with
/// `|X − Y| < π/2` is returned, which is continuous in all arguments.
pub fn hirota_step(u: f64, u1: f64, u2: f64, p: f64, q: f64) -> Result<f64> {
    let k = p * q / 4.0;
    if !(k.abs() < 1.0) {
        return Err(Error::HirotaCoupling(k));
    }
    let y = 0.25 * (u1 + u2);
    let r = (1.0 + k) / (1.0 - k);
    let mut x = (r * y.sin()).atan2(y.cos());
    x += 2.0 * PI * ((y - x) / (2.0 * PI)).round();
    Ok(4.0 * x - u)
}

/// Left side minus right side of the lattice equation on one quad.
pub fn quad_residual(u: f64, u1: f64, u2: f64, u12: f64, p: f64, q: f64) -> f64 {
    let lhs = (0.25 * (u12 - u1 - u2 + u)).sin();
    let rhs = 0.25 * p * q * (0.25 * (u12 + u1 + u2 + u)).sin();
    (lhs - rhs).abs()
}

fn plus_norm(p: f64, lambda: Complex64) -> Result<Complex64> {
    let s = 1.0 + (lambda * (0.5 * p)).powi(2);
    if s.re <= 0.0 {
        return Err(Error::NormalizerBranch { re: s.re, im: s.im });
    }
    Ok(s.sqrt())
}

fn minus_norm(q: f64, lambda: Complex64) -> Result<Complex64> {
    if lambda == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroSpectralParameter);
    }
    let s = 1.0 + (lambda.inv() * (0.5 * q)).powi(2);
    if s.re <= 0.0 {
        return Err(Error::NormalizerBranch { re: s.re, im: s.im });
    }
    Ok(s.sqrt())
}

/// `U` with diagonal `e^{∓iθ}` and coupling `p`.
pub fn u_template(theta: f64, p: f64, lambda: Complex64) -> Result<Mat2> {
    let d = plus_norm(p, lambda)?.inv();
    let off = Complex64::new(0.0, 0.5 * p) * lambda;
    Ok(Mat2::new(
        Complex64::from_polar(1.0, -theta),
        off,
        off,
        Complex64::from_polar(1.0, theta),
    )
    .scale(d))
}

/// `V` with off-diagonal phase `e^{±iφ}` and coupling `q`.
pub fn v_template(phi: f64, q: f64, lambda: Complex64) -> Result<Mat2> {
    let d = minus_norm(q, lambda)?.inv();
    let li = lambda.inv();
    let one = Complex64::new(1.0, 0.0);
    Ok(Mat2::new(
        one,
        Complex64::new(0.0, -0.5 * q) * Complex64::from_polar(1.0, phi) * li,
        Complex64::new(0.0, -0.5 * q) * Complex64::from_polar(1.0, -phi) * li,
        one,
    )
    .scale(d))
}

/// Solution `u` of the lattice equation over a window with its couplings.
#[derive(Clone, Debug, PartialEq)]
pub struct HirotaGrid {
    window: Window,
    u: Vec<f64>,
    p: Vec<f64>,
    q: Vec<f64>,
}

impl HirotaGrid {
    /// `u` row-major in n, `p` of length `window.n`, `q` of length `window.m`.
    pub fn new(window: Window, u: Vec<f64>, p: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        if u.len() != window.vertex_count() || p.len() != window.n || q.len() != window.m {
            return Err(Error::InvalidWindow(format!(
                "lattice data sizes u={}, p={}, q={} do not match a {}x{} window",
                u.len(),
                p.len(),
                q.len(),
                window.n,
                window.m
            )));
        }
        if u.iter().chain(&p).chain(&q).any(|v| !v.is_finite()) {
            return Err(Error::InvalidPotentials(
                "lattice data must be finite".into(),
            ));
        }
        Ok(Self { window, u, p, q })
    }

    /// Solves the Goursat problem with `u(0,0) = 0`.
    pub fn from_potentials(pot: &NormalizedPotentials, window: Window) -> Result<Self> {
        Self::from_potentials_with_base(pot, window, 0.0)
    }

    /// Solves the Goursat problem
    /// `u(n+1,0) = 2α(n) + 2u(0,0) − u(n,0)`, `u(0,m+1) = 2β(m) − u(0,m)`
    /// from a given `u(0,0)`, then fills the interior quad by quad. Changing
    /// `u(0,0)` by `γ` changes `u` by `γ(−1)^m`, which leaves `U` and `V` alone.
    pub fn from_potentials_with_base(
        pot: &NormalizedPotentials,
        window: Window,
        u00: f64,
    ) -> Result<Self> {
        if window.n > pot.n_len() || window.m > pot.m_len() {
            return Err(Error::OutsideWindow {
                axis: if window.n > pot.n_len() { "n" } else { "m" },
                index: if window.n > pot.n_len() {
                    window.n
                } else {
                    window.m
                },
                len: if window.n > pot.n_len() {
                    pot.n_len()
                } else {
                    pot.m_len()
                },
            });
        }
        let w = window.m + 1;
        let mut u = vec![0.0; window.vertex_count()];
        u[0] = u00;
        for n in 0..window.n {
            u[(n + 1) * w] = 2.0 * (pot.alpha()[n] + u00) - u[n * w];
        }
        for m in 0..window.m {
            u[m + 1] = 2.0 * pot.beta()[m] - u[m];
        }
        let p = pot.p()[..window.n].to_vec();
        let q = pot.q()[..window.m].to_vec();
        for n in 0..window.n {
            for m in 0..window.m {
                u[(n + 1) * w + m + 1] = hirota_step(
                    u[n * w + m],
                    u[(n + 1) * w + m],
                    u[n * w + m + 1],
                    p[n],
                    q[m],
                )?;
            }
        }
        Self::new(window, u, p, q)
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn u(&self, n: usize, m: usize) -> f64 {
        self.u[n * (self.window.m + 1) + m]
    }

    pub fn values(&self) -> &[f64] {
        &self.u
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    /// Lattice-equation residual of every quad, `[n][m]`.
    pub fn cell_residuals(&self) -> Vec<Vec<f64>> {
        (0..self.window.n)
            .map(|n| {
                (0..self.window.m)
                    .map(|m| {
                        quad_residual(
                            self.u(n, m),
                            self.u(n + 1, m),
                            self.u(n, m + 1),
                            self.u(n + 1, m + 1),
                            self.p[n],
                            self.q[m],
                        )
                    })
                    .collect()
            })
            .collect()
    }

    /// `U(n, m)`, transporting the frame from `(n, m)` to `(n+1, m)`.
    pub fn u_matrix(&self, n: usize, m: usize, lambda: Complex64) -> Result<Mat2> {
        u_template(0.5 * (self.u(n + 1, m) - self.u(n, m)), self.p[n], lambda)
    }

    /// `V(n, m)`, transporting the frame from `(n, m)` to `(n, m+1)`.
    pub fn v_matrix(&self, n: usize, m: usize, lambda: Complex64) -> Result<Mat2> {
        v_template(0.5 * (self.u(n, m + 1) + self.u(n, m)), self.q[m], lambda)
    }

    /// Largest `‖U(n,m) V(n+1,m) − V(n,m) U(n,m+1)‖` over the window.
    pub fn compatibility_residual(&self, lambda: Complex64) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for n in 0..self.window.n {
            for m in 0..self.window.m {
                let a = self.u_matrix(n, m, lambda)? * self.v_matrix(n + 1, m, lambda)?;
                let b = self.v_matrix(n, m, lambda)? * self.u_matrix(n, m + 1, lambda)?;
                worst = worst.max(a.max_diff(&b));
            }
        }
        Ok(worst)
    }
}

/// Largest lattice-equation residual over all quads.
pub fn hirota_residual(grid: &HirotaGrid) -> f64 {
    grid.cell_residuals()
        .into_iter()
        .flatten()
        .fold(0.0, f64::max)
}

/// Frame values at one λ on every lattice point, row-major in n.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeFrames {
    window: Window,
    frames: Vec<Mat2>,
}

impl LatticeFrames {
    pub fn window(&self) -> Window {
        self.window
    }

    pub fn get(&self, n: usize, m: usize) -> Mat2 {
        self.frames[n * (self.window.m + 1) + m]
    }
}

/// Integrates `F(n+1,m) = F U`, `F(n,m+1) = F V` from `F(0,0) = I`.
///
/// Frames are built column by column from the bottom row; each one is then
/// compared against the value reached through the row below-left, which fails
/// with [`Error::PathDependence`] when the Lax pair is not compatible.
pub fn lattice_frames(grid: &HirotaGrid, lambda: Complex64) -> Result<LatticeFrames> {
    let window = grid.window();
    let w = window.m + 1;
    let mut frames = vec![Mat2::IDENTITY; window.vertex_count()];
    for n in 0..window.n {
        frames[(n + 1) * w] = frames[n * w] * grid.u_matrix(n, 0, lambda)?;
    }
    for n in 0..=window.n {
        for m in 0..window.m {
            frames[n * w + m + 1] = frames[n * w + m] * grid.v_matrix(n, m, lambda)?;
        }
    }
    for n in 0..window.n {
        for m in 1..=window.m {
            let other = frames[n * w + m] * grid.u_matrix(n, m, lambda)?;
            let here = frames[(n + 1) * w + m];
            let deviation = here.max_diff(&other) / here.max_abs().max(1.0);
            if deviation > PATH_TOL {
                return Err(Error::PathDependence {
                    n: n + 1,
                    m,
                    deviation,
                });
            }
        }
    }
    Ok(LatticeFrames { window, frames })
}

/// Sym-formula mesh of the lattice frames, with the λ-derivative taken by
/// Richardson-extrapolated central differences of step `h`.
pub fn lattice_mesh(grid: &HirotaGrid, lambda: f64, h: f64) -> Result<SurfaceMesh> {
    if !(lambda > 0.0 && lambda.is_finite()) || !(h > 0.0 && h < lambda) {
        return Err(Error::NonPositiveLambda(lambda));
    }
    let at = |l: f64| lattice_frames(grid, Complex64::new(l, 0.0));
    let f0 = at(lambda)?;
    let (fp, fm) = (at(lambda + h)?, at(lambda - h)?);
    let (fp2, fm2) = (at(lambda + 0.5 * h)?, at(lambda - 0.5 * h)?);
    let window = grid.window();
    let vertices = (0..window.vertex_count())
        .map(|i| {
            let (n, m) = (i / (window.m + 1), i % (window.m + 1));
            let d1 = (fp.get(n, m) - fm.get(n, m)) * (0.5 / h);
            let d2 = (fp2.get(n, m) - fm2.get(n, m)) * (1.0 / h);
            let d = (d2 * 4.0 - d1) * (1.0 / 3.0);
            let x = d * f0.get(n, m).inverse() * lambda;
            Ok(from_su2(&Su2::try_from_matrix(x, 1e-8)?))
        })
        .collect::<Result<Vec<Vector3>>>()?;
    SurfaceMesh::new(window, lambda, vertices)
}

/// Anything that yields a frame at each lattice point of a window.
pub trait FrameProvider: Sync {
    fn window(&self) -> Window;
    fn frame(&self, n: usize, m: usize, lambda: Complex64) -> Result<Mat2>;
}

impl FrameProvider for ChainGrid {
    fn window(&self) -> Window {
        Window {
            n: self.n_max(),
            m: self.m_max(),
        }
    }

    fn frame(&self, n: usize, m: usize, lambda: Complex64) -> Result<Mat2> {
        self.get(n, m).via_m.eval(lambda)
    }
}

impl FrameProvider for HirotaGrid {
    fn window(&self) -> Window {
        self.window
    }

    fn frame(&self, n: usize, m: usize, lambda: Complex64) -> Result<Mat2> {
        let mut f = Mat2::IDENTITY;
        for j in 0..n {
            f = f * self.u_matrix(j, 0, lambda)?;
        }
        for i in 0..m {
            f = f * self.v_matrix(n, i, lambda)?;
        }
        Ok(f)
    }
}

fn transition<P: FrameProvider + ?Sized>(
    provider: &P,
    from: (usize, usize),
    to: (usize, usize),
    lambda: f64,
) -> Result<Mat2> {
    let l = Complex64::new(lambda, 0.0);
    Ok(provider.frame(from.0, from.1, l)?.inverse() * provider.frame(to.0, to.1, l)?)
}

/// Reduces an angle into `(−π/2, π/2]`.
fn reduce_half_turn(x: f64) -> f64 {
    let mut y = x - PI * (x / PI).round();
    if y <= -FRAC_PI_2 {
        y += PI;
    }
    y
}

/// Reduces an angle into `(−π, π]`.
fn wrap_pi(x: f64) -> f64 {
    let y = x - 2.0 * PI * (x / (2.0 * PI)).round();
    if y <= -PI {
        y + 2.0 * PI
    } else {
        y
    }
}

/// A provider with a λ-independent diagonal gauge `diag(e^{iγ}, e^{−iγ})`
/// applied on the right, chosen so that the transitions carry purely
/// imaginary `U` off-diagonals and real `V` diagonals.
///
/// The gauge is read off at `λ = 1` along the row `m = 0` and then up each
/// column; `γ(0,0) = 0` and each step takes the smallest admissible correction.
/// It does not change the Sym-formula surface.
pub struct GaugeFixed<'a, P: FrameProvider + ?Sized> {
    inner: &'a P,
    gamma: Vec<f64>,
}

impl<'a, P: FrameProvider + ?Sized> GaugeFixed<'a, P> {
    pub fn new(inner: &'a P) -> Result<Self> {
        let window = inner.window();
        let w = window.m + 1;
        let mut gamma = vec![0.0; window.vertex_count()];
        for n in 0..window.n {
            let t = transition(inner, (n, 0), (n + 1, 0), 1.0)?;
            let g = gamma[n * w];
            gamma[(n + 1) * w] = reduce_half_turn(t.m12.arg() - FRAC_PI_2 - g);
        }
        for n in 0..=window.n {
            for m in 0..window.m {
                let t = transition(inner, (n, m), (n, m + 1), 1.0)?;
                let g = gamma[n * w + m];
                gamma[n * w + m + 1] = wrap_pi(g - t.m11.arg());
            }
        }
        Ok(Self { inner, gamma })
    }

    pub fn gamma(&self, n: usize, m: usize) -> f64 {
        self.gamma[n * (self.inner.window().m + 1) + m]
    }
}

impl<P: FrameProvider + ?Sized> FrameProvider for GaugeFixed<'_, P> {
    fn window(&self) -> Window {
        self.inner.window()
    }

    fn frame(&self, n: usize, m: usize, lambda: Complex64) -> Result<Mat2> {
        let g = self.gamma(n, m);
        let d = Mat2::diag(
            Complex64::from_polar(1.0, g),
            Complex64::from_polar(1.0, -g),
        );
        Ok(self.inner.frame(n, m, lambda)? * d)
    }
}

/// Best `U` template for an n-step: `u₁ − u = 2θ` (mod 4π).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UFit {
    pub theta: f64,
    pub p: f64,
    pub residual: f64,
}

impl UFit {
    pub fn u_diff(&self) -> f64 {
        2.0 * self.theta
    }
}

/// Best `V` template for an m-step: `u₂ + u = 2φ` (mod 4π, up to the sign of q).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VFit {
    pub phi: f64,
    pub q: f64,
    pub residual: f64,
}

impl VFit {
    pub fn u_sum(&self) -> f64 {
        2.0 * self.phi
    }

    /// The same matrix written with `−q`: `φ` moves by π.
    pub fn flipped(&self) -> VFit {
        VFit {
            phi: wrap_pi(self.phi + PI),
            q: -self.q,
            residual: self.residual,
        }
    }
}

fn check_samples(lambdas: &[f64]) -> Result<()> {
    let mut distinct: Vec<f64> = lambdas.to_vec();
    if let Some(&bad) = distinct.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
        return Err(Error::NonPositiveLambda(bad));
    }
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: distinct.len(),
        });
    }
    Ok(())
}

/// Fits the `U` template to an n-step transition sampled at positive λ.
pub fn fit_u<P: FrameProvider + ?Sized>(
    provider: &P,
    n: usize,
    m: usize,
    lambdas: &[f64],
) -> Result<UFit> {
    check_samples(lambdas)?;
    let samples = lambdas
        .iter()
        .map(|&l| Ok((l, transition(provider, (n, m), (n + 1, m), l)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut rot = Complex64::new(0.0, 0.0);
    let mut p = 0.0;
    for (l, t) in &samples {
        rot += t.m11.conj() / t.m11.norm();
        p += 2.0 * t.m12.im / (l * t.m11.norm());
    }
    let theta = rot.arg();
    p /= samples.len() as f64;
    if p.abs() < 1e-12 {
        return Err(Error::DegenerateTransition { n, m });
    }
    let mut residual: f64 = 0.0;
    for (l, t) in &samples {
        residual = residual.max(t.max_diff(&u_template(theta, p, Complex64::new(*l, 0.0))?));
    }
    Ok(UFit { theta, p, residual })
}

/// Fits the `V` template to an m-step transition, taking `q ≥ 0`.
pub fn fit_v<P: FrameProvider + ?Sized>(
    provider: &P,
    n: usize,
    m: usize,
    lambdas: &[f64],
) -> Result<VFit> {
    check_samples(lambdas)?;
    let samples = lambdas
        .iter()
        .map(|&l| Ok((l, transition(provider, (n, m), (n, m + 1), l)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut w = Complex64::new(0.0, 0.0);
    for (l, t) in &samples {
        w += Complex64::new(0.0, 2.0 * l) * t.m12 / t.m11;
    }
    w /= samples.len() as f64;
    let q = w.norm();
    if q < 1e-12 {
        return Err(Error::DegenerateTransition { n, m });
    }
    let phi = w.arg();
    let mut residual: f64 = 0.0;
    for (l, t) in &samples {
        residual = residual.max(t.max_diff(&v_template(phi, q, Complex64::new(*l, 0.0))?));
    }
    Ok(VFit { phi, q, residual })
}

/// Both transitions leaving `(n, m)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellTransitions {
    pub u: UFit,
    pub v: VFit,
}

/// Fits both transitions out of `(n, m)`, rejecting fits worse than [`FIT_TOL`].
pub fn extract_transitions<P: FrameProvider + ?Sized>(
    provider: &P,
    n: usize,
    m: usize,
    lambdas: &[f64],
) -> Result<CellTransitions> {
    let u = fit_u(provider, n, m, lambdas)?;
    if u.residual > FIT_TOL {
        return Err(Error::TransitionFit {
            n,
            m,
            template: "U",
            residual: u.residual,
        });
    }
    let v = fit_v(provider, n, m, lambdas)?;
    if v.residual > FIT_TOL {
        return Err(Error::TransitionFit {
            n,
            m,
            template: "V",
            residual: v.residual,
        });
    }
    Ok(CellTransitions { u, v })
}

/// A lattice solution read back from frames.
#[derive(Clone, Debug, PartialEq)]
pub struct Reconstruction {
    pub grid: HirotaGrid,
    /// Largest template-fit residual over all edges.
    pub fit_residual_max: f64,
    /// Largest disagreement between edges that must carry the same data:
    /// `p` along columns, `|q|` along rows, and `u₂ + u` against the fitted sums.
    pub consistency_max: f64,
}

fn wrap_4pi(x: f64) -> f64 {
    x - 4.0 * PI * (x / (4.0 * PI)).round()
}

/// Reads `u`, `p` and `q` off every edge of the provider's window.
///
/// `u(0,0) = 0`; `u` is propagated up the first column through the fitted
/// sums and along rows through the fitted differences. The sign of `q(m)` is
/// not visible in a single `V` transition; `q_signs` (one entry per m,
/// negative meaning `q < 0`) selects it, otherwise `q ≥ 0` is used.
pub fn reconstruct_lattice<P: FrameProvider + ?Sized>(
    provider: &P,
    lambdas: &[f64],
    q_signs: Option<&[f64]>,
) -> Result<Reconstruction> {
    check_samples(lambdas)?;
    let window = provider.window();
    let w = window.m + 1;
    if let Some(s) = q_signs {
        if s.len() < window.m {
            return Err(Error::InvalidWindow(format!(
                "{} q signs given for {} m-steps",
                s.len(),
                window.m
            )));
        }
    }

    let u_fits: Vec<UFit> = (0..window.n * w)
        .into_par_iter()
        .map(|i| fit_u(provider, i / w, i % w, lambdas))
        .collect::<Result<_>>()?;
    let v_fits: Vec<VFit> = (0..(window.n + 1) * window.m)
        .into_par_iter()
        .map(|i| {
            let (n, m) = (i / window.m, i % window.m);
            let fit = fit_v(provider, n, m, lambdas)?;
            let negative = q_signs.is_some_and(|s| s[m] < 0.0);
            Ok(if negative { fit.flipped() } else { fit })
        })
        .collect::<Result<_>>()?;
    let uf = |n: usize, m: usize| &u_fits[n * w + m];
    let vf = |n: usize, m: usize| &v_fits[n * window.m + m];

    let mut u = vec![0.0; window.vertex_count()];
    for m in 0..window.m {
        u[m + 1] = vf(0, m).u_sum() - u[m];
    }
    for n in 0..window.n {
        for m in 0..=window.m {
            u[(n + 1) * w + m] = u[n * w + m] + uf(n, m).u_diff();
        }
    }

    let p: Vec<f64> = (0..window.n).map(|n| uf(n, 0).p).collect();
    let q: Vec<f64> = (0..window.m).map(|m| vf(0, m).q).collect();

    let mut consistency: f64 = 0.0;
    for n in 0..window.n {
        for m in 0..=window.m {
            consistency = consistency.max((uf(n, m).p - p[n]).abs());
        }
    }
    for n in 0..=window.n {
        for m in 0..window.m {
            let v = vf(n, m);
            consistency = consistency.max((v.q - q[m]).abs());
            consistency =
                consistency.max(wrap_4pi(u[n * w + m + 1] + u[n * w + m] - v.u_sum()).abs());
        }
    }

    let fit_residual_max = u_fits
        .iter()
        .map(|f| f.residual)
        .chain(v_fits.iter().map(|f| f.residual))
        .fold(0.0, f64::max);
    Ok(Reconstruction {
        grid: HirotaGrid::new(window, u, p, q)?,
        fit_residual_max,
        consistency_max: consistency,
    })
}

/// Normalized potentials read off the axes of a lattice solution,
/// `α(n) = ½(u(n+1,0) + u(n,0)) − u(0,0)` and `β(m) = ½(u(0,m+1) + u(0,m))`,
/// reduced into `(−π, π]`.
pub fn recover_potentials(grid: &HirotaGrid) -> (Vec<f64>, Vec<f64>) {
    let window = grid.window();
    let alpha = (0..window.n)
        .map(|n| wrap_pi(0.5 * (grid.u(n + 1, 0) + grid.u(n, 0)) - grid.u(0, 0)))
        .collect();
    let beta = (0..window.m)
        .map(|m| wrap_pi(0.5 * (grid.u(0, m + 1) + grid.u(0, m))))
        .collect();
    (alpha, beta)
}

/// Distance between two angles modulo 2π.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    wrap_pi(a - b).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dalembert::revolution_potentials;
    use crate::surface::build_mesh;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn real(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    /// Root of `sin(X − Y) − k sin(X + Y)` on `[Y − π/2, Y + π/2]` by bisection.
    fn bisect_step(u: f64, u1: f64, u2: f64, p: f64, q: f64) -> f64 {
        let y = 0.25 * (u1 + u2);
        let k = 0.25 * p * q;
        let g = |x: f64| (x - y).sin() - k * (x + y).sin();
        let (mut lo, mut hi) = (y - FRAC_PI_2, y + FRAC_PI_2);
        let glo = g(lo);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (g(mid) > 0.0) == (glo > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        4.0 * 0.5 * (lo + hi) - u
    }

    #[test]
    fn step_matches_bisection() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let u = rng.gen_range(-6.0..6.0);
            let u1 = rng.gen_range(-6.0..6.0);
            let u2 = rng.gen_range(-6.0..6.0);
            let p = rng.gen_range(-1.6..1.6);
            let q = rng.gen_range(-1.6..1.6);
            let a = hirota_step(u, u1, u2, p, q).unwrap();
            let b = bisect_step(u, u1, u2, p, q);
            assert!((a - b).abs() < 1e-12, "{a} {b}");
            assert!(quad_residual(u, u1, u2, a, p, q) < 1e-14);
        }
    }

    #[test]
    fn step_with_zero_coupling_is_linear() {
        let v = hirota_step(0.3, 1.0, -0.4, 0.0, 1.2).unwrap();
        assert!((v - (1.0 - 0.4 - 0.3)).abs() < 1e-15);
    }

    #[test]
    fn step_rejects_strong_coupling() {
        assert_eq!(
            hirota_step(0.0, 0.0, 0.0, 2.0, 2.0),
            Err(Error::HirotaCoupling(1.0))
        );
        assert!(hirota_step(0.0, 0.0, 0.0, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn templates_have_unit_determinant() {
        for l in [real(0.5), real(2.0), Complex64::from_polar(1.0, 0.9)] {
            let u = u_template(0.4, 1.3, l).unwrap();
            let v = v_template(-1.1, 0.7, l).unwrap();
            assert!((u.det() - 1.0).norm() < 1e-14);
            assert!((v.det() - 1.0).norm() < 1e-14);
        }
    }

    fn sample_potentials() -> NormalizedPotentials {
        NormalizedPotentials::new(
            vec![0.0, 0.5, -0.3, 1.0, 0.2],
            vec![0.4, -0.8, 0.1, 0.6],
            vec![1.1, -0.7, 0.5, 1.5, -1.2],
            vec![0.9, 1.3, -0.6, 0.4],
        )
        .unwrap()
    }

    #[test]
    fn goursat_solution_satisfies_lattice_equation() {
        let pot = sample_potentials();
        let grid = HirotaGrid::from_potentials(&pot, Window::new(5, 4).unwrap()).unwrap();
        assert_eq!(grid.u(0, 0), 0.0);
        assert!((grid.u(1, 0) - 0.0).abs() < 1e-15);
        assert!((grid.u(0, 1) - 0.8).abs() < 1e-15);
        assert!(hirota_residual(&grid) < 1e-14);
        assert!(grid.compatibility_residual(real(1.3)).unwrap() < 1e-13);
    }

    #[test]
    fn lattice_frames_match_direct_products() {
        let pot = sample_potentials();
        let grid = HirotaGrid::from_potentials(&pot, Window::new(5, 4).unwrap()).unwrap();
        let l = Complex64::from_polar(1.0, 0.7);
        let frames = lattice_frames(&grid, l).unwrap();
        for n in 0..=5 {
            for m in 0..=4 {
                let f = grid.frame(n, m, l).unwrap();
                assert!(frames.get(n, m).max_diff(&f) < 1e-13);
            }
        }
    }

    #[test]
    fn incompatible_lattice_is_path_dependent() {
        let pot = sample_potentials();
        let good = HirotaGrid::from_potentials(&pot, Window::new(3, 3).unwrap()).unwrap();
        let mut u = good.values().to_vec();
        u[5] += 0.01;
        let bad = HirotaGrid::new(good.window(), u, good.p().to_vec(), good.q().to_vec()).unwrap();
        assert!(matches!(
            lattice_frames(&bad, real(1.0)),
            Err(Error::PathDependence { .. })
        ));
    }

    #[test]
    fn base_value_does_not_change_frames() {
        let pot = sample_potentials();
        let w = Window::new(5, 4).unwrap();
        let a = HirotaGrid::from_potentials(&pot, w).unwrap();
        let b = HirotaGrid::from_potentials_with_base(&pot, w, 0.9).unwrap();
        for n in 0..=5 {
            for m in 0..=4 {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                assert!((b.u(n, m) - a.u(n, m) - 0.9 * sign).abs() < 1e-13);
            }
        }
        for l in [real(0.6), real(1.9)] {
            let fa = lattice_frames(&a, l).unwrap();
            let fb = lattice_frames(&b, l).unwrap();
            for n in 0..=5 {
                for m in 0..=4 {
                    assert!(fa.get(n, m).max_diff(&fb.get(n, m)) < 1e-13);
                }
            }
        }
    }

    #[test]
    fn reconstruction_round_trip() {
        let pot = sample_potentials();
        let w = Window::new(5, 4).unwrap();
        let grid = HirotaGrid::from_potentials(&pot, w).unwrap();
        let signs: Vec<f64> = pot.q().to_vec();
        let rec = reconstruct_lattice(&grid, &[0.5, 1.0, 2.0], Some(&signs)).unwrap();
        assert!(rec.fit_residual_max < 1e-13);
        assert!(rec.consistency_max < 1e-12);
        for (a, b) in rec.grid.p().iter().zip(pot.p()) {
            assert!((a - b).abs() < 1e-13);
        }
        for (a, b) in rec.grid.q().iter().zip(pot.q()) {
            assert!((a - b).abs() < 1e-13);
        }
        assert!(hirota_residual(&rec.grid) < 1e-13);
        let (alpha, beta) = recover_potentials(&rec.grid);
        for (a, b) in alpha.iter().zip(pot.alpha()) {
            assert!(angle_distance(*a, *b) < 1e-12);
        }
        for (a, b) in beta.iter().zip(pot.beta()) {
            assert!(angle_distance(*a, *b) < 1e-12);
        }
    }

    #[test]
    fn reconstruction_without_sign_hint_still_solves() {
        let pot = sample_potentials();
        let grid = HirotaGrid::from_potentials(&pot, Window::new(5, 4).unwrap()).unwrap();
        let rec = reconstruct_lattice(&grid, &[0.7, 1.6], None).unwrap();
        assert!(rec.grid.q().iter().all(|&q| q > 0.0));
        assert!(hirota_residual(&rec.grid) < 1e-13);
    }

    #[test]
    fn extraction_requires_two_samples() {
        let pot = sample_potentials();
        let grid = HirotaGrid::from_potentials(&pot, Window::new(2, 2).unwrap()).unwrap();
        assert_eq!(
            extract_transitions(&grid, 0, 0, &[1.0, 1.0]),
            Err(Error::TooFewSamples { needed: 2, got: 1 })
        );
        let t = extract_transitions(&grid, 1, 1, &[0.5, 1.5]).unwrap();
        assert!((t.u.p - pot.p()[1]).abs() < 1e-13);
    }

    #[test]
    fn gauge_fixed_revolution_is_a_lattice_solution() {
        let gp = revolution_potentials(0.8, 8).unwrap();
        let chains = ChainGrid::build(&gp, 6, 5).unwrap();
        let fixed = GaugeFixed::new(&chains).unwrap();
        let lambdas = [0.5, 1.0, 2.0];
        assert!(extract_transitions(&chains, 0, 0, &lambdas).is_err());
        let t = extract_transitions(&fixed, 2, 3, &lambdas).unwrap();
        assert!(t.u.residual < 1e-12 && t.v.residual < 1e-12);
        let rec = reconstruct_lattice(&fixed, &lambdas, None).unwrap();
        assert!(rec.fit_residual_max < 1e-12);
        assert!(rec.consistency_max < 1e-10);
        assert!(hirota_residual(&rec.grid) < 1e-12);

        // The gauge leaves the surface alone.
        let mesh = build_mesh(&gp, Window::new(6, 5).unwrap(), 1.0).unwrap();
        let lat = lattice_mesh(&rec.grid, 1.0, 1e-5).unwrap();
        assert!(
            mesh.max_deviation(&lat) < 1e-8,
            "{}",
            mesh.max_deviation(&lat)
        );
    }

    #[test]
    fn lattice_mesh_matches_chain_mesh() {
        let pot = sample_potentials();
        let w = Window::new(5, 4).unwrap();
        let grid = HirotaGrid::from_potentials(&pot, w).unwrap();
        for l in [0.5, 1.0, 2.0] {
            let a = lattice_mesh(&grid, l, 1e-5).unwrap();
            let b = build_mesh(&pot, w, l).unwrap();
            assert!(a.max_deviation(&b) < 1e-8, "{}", a.max_deviation(&b));
        }
    }
}
