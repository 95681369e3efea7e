//! Sym-formula immersion and quad meshes over lattice windows.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{from_su2, triple_product, Su2, Vector3};
use crate::dalembert::{ChainGrid, FrameSource};
use crate::error::{Error, Result};
use crate::loops::FactorChain;

/// Tolerance for the su(2) check on `λ F_λ F⁻¹`.
pub const SYM_SU2_TOL: f64 = 1e-10;

/// Inclusive lattice window `0..=n × 0..=m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Window {
    pub n: usize,
    pub m: usize,
}

impl Window {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::InvalidWindow(format!(
                "window must be at least 1x1, got {n}x{m}"
            )));
        }
        Ok(Self { n, m })
    }

    pub fn vertex_count(&self) -> usize {
        (self.n + 1) * (self.m + 1)
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveLambda(lambda))
    }
}

/// `f = λ ∂F/∂λ F⁻¹` read back as a vector of Euclidean 3-space.
pub fn sym_point(frame: &FactorChain, lambda: f64) -> Result<Vector3> {
    check_lambda(lambda)?;
    let (f, df) = frame.eval_with_derivative(Complex64::new(lambda, 0.0))?;
    let x = df * f.inverse() * lambda;
    let su2 = Su2::try_from_matrix(x, SYM_SU2_TOL)?;
    Ok(from_su2(&su2))
}

/// Vertices of a surface over a lattice window, row-major in n.
///
/// Quads are `(n,m), (n+1,m), (n+1,m+1), (n,m+1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceMesh {
    window: Window,
    lambda: f64,
    vertices: Vec<Vector3>,
}

impl SurfaceMesh {
    pub fn new(window: Window, lambda: f64, vertices: Vec<Vector3>) -> Result<Self> {
        if vertices.len() != window.vertex_count() {
            return Err(Error::InvalidWindow(format!(
                "expected {} vertices, got {}",
                window.vertex_count(),
                vertices.len()
            )));
        }
        if let Some(i) = vertices.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidWindow(format!("vertex {i} is not finite")));
        }
        Ok(Self {
            window,
            lambda,
            vertices,
        })
    }

    pub fn from_chain_grid(grid: &ChainGrid, lambda: f64) -> Result<Self> {
        let window = Window::new(grid.n_max(), grid.m_max())?;
        let vertices = (0..window.vertex_count())
            .into_par_iter()
            .map(|i| {
                let (n, m) = (i / (window.m + 1), i % (window.m + 1));
                sym_point(&grid.get(n, m).via_m, lambda)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(window, lambda, vertices)
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn vertices(&self) -> &[Vector3] {
        &self.vertices
    }

    pub fn index(&self, n: usize, m: usize) -> usize {
        n * (self.window.m + 1) + m
    }

    pub fn vertex(&self, n: usize, m: usize) -> Vector3 {
        self.vertices[self.index(n, m)]
    }

    pub fn vertex_mut(&mut self, n: usize, m: usize) -> &mut Vector3 {
        let i = self.index(n, m);
        &mut self.vertices[i]
    }

    /// Zero-based vertex indices of every quad, row-major in n.
    pub fn quads(&self) -> impl Iterator<Item = [usize; 4]> + '_ {
        let w = self.window;
        (0..w.n).flat_map(move |n| {
            (0..w.m).map(move |m| {
                [
                    self.index(n, m),
                    self.index(n + 1, m),
                    self.index(n + 1, m + 1),
                    self.index(n, m + 1),
                ]
            })
        })
    }

    /// Largest vertexwise deviation from another mesh on the same window.
    pub fn max_deviation(&self, other: &SurfaceMesh) -> f64 {
        assert_eq!(self.window, other.window, "meshes on different windows");
        self.vertices
            .iter()
            .zip(&other.vertices)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }
}

/// Sym-formula mesh of the frames generated by `src` over `window`.
pub fn build_mesh<S: FrameSource + ?Sized>(
    src: &S,
    window: Window,
    lambda: f64,
) -> Result<SurfaceMesh> {
    check_lambda(lambda)?;
    let grid = ChainGrid::build(src, window.n, window.m)?;
    SurfaceMesh::from_chain_grid(&grid, lambda)
}

/// Residuals of the two defining conditions of a discrete PS surface.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct GeometryCheck {
    pub coplanarity_max: f64,
    pub opposite_edge_max: f64,
    /// `[n−1][m−1]` for interior vertices.
    pub coplanarity_cells: Vec<Vec<f64>>,
    /// `[n][m]` for the quad with lower corner `(n, m)`.
    pub opposite_edge_cells: Vec<Vec<f64>>,
    /// Lattice points `[n, m]` with a zero-length incident edge.
    pub degenerate_vertices: Vec<[usize; 2]>,
}

/// Measures planarity of vertex stars and equality of opposite quad edges.
///
/// The planarity residual at an interior vertex is
/// `|det[f₁−f, f₂−f, f₋₁−f]| + |det[f₁−f, f₂−f, f₋₂−f]|` divided by the
/// cube of the mean incident edge length.
pub fn check_discrete_ps(mesh: &SurfaceMesh) -> GeometryCheck {
    let Window { n: nn, m: mm } = mesh.window();
    let mut out = GeometryCheck::default();

    for n in 1..nn {
        let mut row = Vec::with_capacity(mm.saturating_sub(1));
        for m in 1..mm {
            let f = mesh.vertex(n, m);
            let e1 = mesh.vertex(n + 1, m) - f;
            let e2 = mesh.vertex(n, m + 1) - f;
            let e1b = mesh.vertex(n - 1, m) - f;
            let e2b = mesh.vertex(n, m - 1) - f;
            let mean = 0.25 * (e1.norm() + e2.norm() + e1b.norm() + e2b.norm());
            let lengths = [e1.norm(), e2.norm(), e1b.norm(), e2b.norm()];
            if lengths.iter().any(|&l| l == 0.0) {
                out.degenerate_vertices.push([n, m]);
                row.push(0.0);
                continue;
            }
            let vol = triple_product(&e1, &e2, &e1b).abs() + triple_product(&e1, &e2, &e2b).abs();
            let r = vol / (mean * mean * mean);
            out.coplanarity_max = out.coplanarity_max.max(r);
            row.push(r);
        }
        out.coplanarity_cells.push(row);
    }

    for n in 0..nn {
        let mut row = Vec::with_capacity(mm);
        for m in 0..mm {
            let f = mesh.vertex(n, m);
            let f1 = mesh.vertex(n + 1, m);
            let f2 = mesh.vertex(n, m + 1);
            let f12 = mesh.vertex(n + 1, m + 1);
            let a0 = (f1 - f).norm();
            let a1 = (f12 - f2).norm();
            let b0 = (f2 - f).norm();
            let b1 = (f12 - f1).norm();
            if a0 == 0.0 || b0 == 0.0 {
                out.degenerate_vertices.push([n, m]);
            }
            let d = (a0 - a1).abs().max((b0 - b1).abs());
            out.opposite_edge_max = out.opposite_edge_max.max(d);
            row.push(d);
        }
        out.opposite_edge_cells.push(row);
    }
    out.degenerate_vertices.sort_unstable();
    out.degenerate_vertices.dedup();
    out
}

/// Spread of `|f₁ − f|` along m (for each n) and of `|f₂ − f|` along n (for each m).
pub fn edge_length_spread(mesh: &SurfaceMesh) -> (f64, f64) {
    let Window { n: nn, m: mm } = mesh.window();
    let spread = |lengths: Vec<f64>| {
        let lo = lengths.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = lengths.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        hi - lo
    };
    let a = (0..nn)
        .map(|n| {
            spread(
                (0..=mm)
                    .map(|m| (mesh.vertex(n + 1, m) - mesh.vertex(n, m)).norm())
                    .collect(),
            )
        })
        .fold(0.0, f64::max);
    let b = (0..mm)
        .map(|m| {
            spread(
                (0..=nn)
                    .map(|n| (mesh.vertex(n, m + 1) - mesh.vertex(n, m)).norm())
                    .collect(),
            )
        })
        .fold(0.0, f64::max);
    (a, b)
}
