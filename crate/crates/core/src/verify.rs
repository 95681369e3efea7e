//! One-stop verification of a computed surface and its frames.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::special_unitary_residual;
use crate::dalembert::{ChainGrid, FrameSource};
use crate::error::Result;
use crate::hirota::{reconstruct_lattice, GaugeFixed};
use crate::surface::{check_discrete_ps, SurfaceMesh, Window};

/// Spectral samples used to fit transitions.
pub const FIT_LAMBDAS: [f64; 3] = [0.5, 1.0, 2.0];

/// Pass thresholds: `geometric` for the mesh conditions, `algebraic` for
/// everything measured on frames.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub geometric: f64,
    pub algebraic: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            geometric: 1e-9,
            algebraic: 1e-10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub lambda: f64,
    pub window: Window,
    pub coplanarity_max: f64,
    pub opposite_edge_max: f64,
    pub hirota_residual_max: f64,
    /// Special-unitarity defect at real λ and reality defect on the unit circle.
    pub unitarity_max: f64,
    pub twist_max: f64,
    /// Disagreement between the two assemblies of each frame.
    pub frame_cross_check_max: f64,
    /// Worst template fit or cross-edge inconsistency of the transitions.
    pub transition_fit_max: f64,
    pub coplanarity_cells: Vec<Vec<f64>>,
    pub opposite_edge_cells: Vec<Vec<f64>>,
    pub hirota_cells: Vec<Vec<f64>>,
    pub degenerate_vertices: Vec<[usize; 2]>,
    pub tolerances: Tolerances,
    pub passed: bool,
}

impl VerificationReport {
    /// Names and values of every quantity above its threshold.
    pub fn failures(&self) -> Vec<(&'static str, f64)> {
        let t = self.tolerances;
        [
            ("coplanarity", self.coplanarity_max, t.geometric),
            ("opposite_edge", self.opposite_edge_max, t.geometric),
            ("hirota_residual", self.hirota_residual_max, t.algebraic),
            ("unitarity", self.unitarity_max, t.algebraic),
            ("twist", self.twist_max, t.algebraic),
            ("frame_cross_check", self.frame_cross_check_max, t.algebraic),
            ("transition_fit", self.transition_fit_max, t.algebraic),
        ]
        .into_iter()
        .filter(|(_, v, tol)| !(v <= tol))
        .map(|(name, v, _)| (name, v))
        .collect()
    }
}

fn unit_circle_samples() -> [Complex64; 2] {
    [
        Complex64::from_polar(1.0, std::f64::consts::PI / 5.0),
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0),
    ]
}

fn frame_defects(grid: &ChainGrid, lambda: f64) -> Result<(f64, f64, f64)> {
    let real = Complex64::new(lambda, 0.0);
    let circle = unit_circle_samples();
    let per_frame = grid
        .iter()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(_, f)| {
            let chain = &f.via_m;
            let mut unitary = special_unitary_residual(&chain.eval(real)?);
            let mut twist = chain.twist_residual(real)?;
            let mut cross = {
                let a = chain.eval(real)?;
                a.max_diff(&f.via_n.eval(real)?) / a.max_abs().max(1.0)
            };
            // Off the real axis long chains are ill-conditioned, so the circle
            // checks are measured against each evaluation's rounding amplification.
            for z in circle {
                unitary = unitary.max(chain.reality_backward_residual(z)?);
                twist = twist.max(chain.twist_residual(z)?);
                let (a, ca) = chain.eval_with_condition(z)?;
                let (b, cb) = f.via_n.eval_with_condition(z)?;
                cross = cross.max(a.max_diff(&b) / ca.max(cb).max(1.0));
            }
            Ok((unitary, twist, cross))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_frame.into_iter().fold((0.0, 0.0, 0.0), |acc, x| {
        (acc.0.max(x.0), acc.1.max(x.1), acc.2.max(x.2))
    }))
}

/// Checks a mesh built from `grid` at `mesh.lambda()` against every
/// structural condition: discrete PS geometry, frame reality and twisting,
/// agreement of the two frame assemblies, and the lattice equation for
/// the transitions after gauge fixing.
pub fn verify_frames(
    grid: &ChainGrid,
    mesh: &SurfaceMesh,
    tolerances: Tolerances,
) -> Result<VerificationReport> {
    let geometry = check_discrete_ps(mesh);
    let (unitarity_max, twist_max, frame_cross_check_max) = frame_defects(grid, mesh.lambda())?;
    let fixed = GaugeFixed::new(grid)?;
    let rec = reconstruct_lattice(&fixed, &FIT_LAMBDAS, None)?;
    let hirota_cells = rec.grid.cell_residuals();
    let hirota_residual_max = hirota_cells.iter().flatten().cloned().fold(0.0, f64::max);

    let mut report = VerificationReport {
        lambda: mesh.lambda(),
        window: mesh.window(),
        coplanarity_max: geometry.coplanarity_max,
        opposite_edge_max: geometry.opposite_edge_max,
        hirota_residual_max,
        unitarity_max,
        twist_max,
        frame_cross_check_max,
        transition_fit_max: rec.fit_residual_max.max(rec.consistency_max),
        coplanarity_cells: geometry.coplanarity_cells,
        opposite_edge_cells: geometry.opposite_edge_cells,
        hirota_cells,
        degenerate_vertices: geometry.degenerate_vertices,
        tolerances,
        passed: false,
    };
    report.passed = report.failures().is_empty();
    Ok(report)
}

/// Builds frames and the mesh over `window` and verifies them.
pub fn verify_surface<S: FrameSource + ?Sized>(
    src: &S,
    window: Window,
    lambda: f64,
    tolerances: Tolerances,
) -> Result<(SurfaceMesh, VerificationReport)> {
    let grid = ChainGrid::build(src, window.n, window.m)?;
    let mesh = SurfaceMesh::from_chain_grid(&grid, lambda)?;
    let report = verify_frames(&grid, &mesh, tolerances)?;
    Ok((mesh, report))
}
