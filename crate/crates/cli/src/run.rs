use std::fs;
use std::io;
use std::path::Path;

use num_complex::Complex64;
use psforge::dalembert::ChainGrid;
use psforge::export::{json_string, obj_string};
use psforge::hirota::{hirota_residual, lattice_frames, lattice_mesh, FrameProvider, HirotaGrid};
use psforge::surface::{check_discrete_ps, SurfaceMesh};
use psforge::verify::verify_frames;
use serde::Serialize;
use thiserror::Error;

use crate::config::{Job, Mode, Source};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("computation failed: {0}")]
    Compute(#[from] psforge::Error),
    #[error("residuals exceed tolerance: {0}")]
    Residual(String),
    #[error("I/O error on {path}: {source}")]
    Io { path: String, source: io::Error },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Compute(_) | RunError::Residual(_) => 1,
            RunError::Io { .. } => 3,
        }
    }
}

/// A file to be written at the end of a job.
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    /// Human-readable lines for stdout.
    pub summary: Vec<String>,
    /// Set when a checked quantity exceeded its tolerance.
    pub failure: Option<String>,
}

/// `1` → `1`, `1.5` → `1.5`; shortest round-trip form.
fn lambda_tag(l: f64) -> String {
    format!("{l}")
}

fn mesh_name(job: &Job, l: f64) -> String {
    format!("{}_lambda_{}.obj", job.prefix, lambda_tag(l))
}

fn json(value: &impl Serialize) -> Result<String, RunError> {
    json_string(value).map_err(|e| RunError::Config(format!("cannot serialize report: {e}")))
}

fn chain_grid(job: &Job) -> Result<ChainGrid, RunError> {
    Ok(ChainGrid::build(&job.source, job.window.n, job.window.m)?)
}

fn generate(job: &Job) -> Result<Outcome, RunError> {
    let grid = chain_grid(job)?;
    let mut out = Outcome {
        artifacts: vec![],
        summary: vec![],
        failure: None,
    };
    for &l in &job.lambdas {
        let mesh = SurfaceMesh::from_chain_grid(&grid, l)?;
        let name = mesh_name(job, l);
        out.summary.push(format!(
            "lambda {}: {} vertices -> {name}",
            lambda_tag(l),
            mesh.vertices().len()
        ));
        out.artifacts.push(Artifact {
            name,
            contents: obj_string(&mesh),
        });
    }
    Ok(out)
}

fn verify(job: &Job) -> Result<Outcome, RunError> {
    let grid = chain_grid(job)?;
    let mut out = Outcome {
        artifacts: vec![],
        summary: vec![],
        failure: None,
    };
    let mut failed = vec![];
    for &l in &job.lambdas {
        let mesh = SurfaceMesh::from_chain_grid(&grid, l)?;
        let report = verify_frames(&grid, &mesh, job.tolerances)?;
        let status = if report.passed { "PASS" } else { "FAIL" };
        out.summary.push(format!(
            "lambda {}: {status} coplanarity {:.3e} opposite_edge {:.3e} hirota {:.3e} unitarity {:.3e} cross_check {:.3e}",
            lambda_tag(l),
            report.coplanarity_max,
            report.opposite_edge_max,
            report.hirota_residual_max,
            report.unitarity_max,
            report.frame_cross_check_max
        ));
        for (name, v) in report.failures() {
            failed.push(format!("lambda {}: {name} = {v:e}", lambda_tag(l)));
        }
        out.artifacts.push(Artifact {
            name: format!("report_lambda_{}.json", lambda_tag(l)),
            contents: json(&report)?,
        });
    }
    if !failed.is_empty() {
        out.failure = Some(failed.join("; "));
    }
    Ok(out)
}

#[derive(Serialize)]
struct SweepEntry {
    lambda: f64,
    file: String,
    coplanarity_max: f64,
    opposite_edge_max: f64,
    bounding_box: [[f64; 3]; 2],
}

#[derive(Serialize)]
struct SweepSummary {
    window: psforge::surface::Window,
    surfaces: Vec<SweepEntry>,
}

fn sweep(job: &Job) -> Result<Outcome, RunError> {
    let grid = chain_grid(job)?;
    let mut out = Outcome {
        artifacts: vec![],
        summary: vec![],
        failure: None,
    };
    let mut surfaces = vec![];
    for &l in &job.lambdas {
        let mesh = SurfaceMesh::from_chain_grid(&grid, l)?;
        let check = check_discrete_ps(&mesh);
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for v in mesh.vertices() {
            for (k, c) in [v.x, v.y, v.z].into_iter().enumerate() {
                lo[k] = lo[k].min(c);
                hi[k] = hi[k].max(c);
            }
        }
        let name = mesh_name(job, l);
        out.summary
            .push(format!("lambda {}: -> {name}", lambda_tag(l)));
        surfaces.push(SweepEntry {
            lambda: l,
            file: name.clone(),
            coplanarity_max: check.coplanarity_max,
            opposite_edge_max: check.opposite_edge_max,
            bounding_box: [lo, hi],
        });
        out.artifacts.push(Artifact {
            name,
            contents: obj_string(&mesh),
        });
    }
    out.artifacts.push(Artifact {
        name: format!("{}_sweep.json", job.prefix),
        contents: json(&SweepSummary {
            window: job.window,
            surfaces,
        })?,
    });
    Ok(out)
}

#[derive(Serialize)]
struct OracleEntry {
    lambda: f64,
    frame_max_deviation: f64,
    vertex_max_deviation: f64,
}

#[derive(Serialize)]
struct OracleReport {
    window: psforge::surface::Window,
    oracle_hirota_residual_max: f64,
    comparisons: Vec<OracleEntry>,
    tolerance: f64,
    passed: bool,
}

/// Step of the central differences used by the oracle's Sym formula.
const ORACLE_STEP: f64 = 1e-5;

fn oracle_compare(job: &Job) -> Result<Outcome, RunError> {
    let Source::Normalized(pot) = &job.source else {
        return Err(RunError::Config(
            "oracle-compare needs normalized potentials".into(),
        ));
    };
    let grid = chain_grid(job)?;
    let lattice = HirotaGrid::from_potentials(pot, job.window)?;
    let tol = job.tolerances.geometric;
    let mut out = Outcome {
        artifacts: vec![],
        summary: vec![],
        failure: None,
    };
    let mut comparisons = vec![];
    let mut failed = vec![];
    for &l in &job.lambdas {
        let lam = Complex64::new(l, 0.0);
        let frames = lattice_frames(&lattice, lam)?;
        let mut frame_dev: f64 = 0.0;
        for n in 0..=job.window.n {
            for m in 0..=job.window.m {
                let a = grid.frame(n, m, lam)?;
                frame_dev = frame_dev.max(a.max_diff(&frames.get(n, m)));
            }
        }
        let step = ORACLE_STEP.min(0.5 * l);
        let vertex_dev = SurfaceMesh::from_chain_grid(&grid, l)?
            .max_deviation(&lattice_mesh(&lattice, l, step)?);
        out.summary.push(format!(
            "lambda {}: frame deviation {frame_dev:.3e}, vertex deviation {vertex_dev:.3e}",
            lambda_tag(l)
        ));
        if !(frame_dev <= tol && vertex_dev <= tol) {
            failed.push(format!(
                "lambda {}: frame {frame_dev:e}, vertex {vertex_dev:e}",
                lambda_tag(l)
            ));
        }
        comparisons.push(OracleEntry {
            lambda: l,
            frame_max_deviation: frame_dev,
            vertex_max_deviation: vertex_dev,
        });
    }
    out.artifacts.push(Artifact {
        name: format!("{}_oracle.json", job.prefix),
        contents: json(&OracleReport {
            window: job.window,
            oracle_hirota_residual_max: hirota_residual(&lattice),
            comparisons,
            tolerance: tol,
            passed: failed.is_empty(),
        })?,
    });
    if !failed.is_empty() {
        out.failure = Some(failed.join("; "));
    }
    Ok(out)
}

pub fn execute(job: &Job) -> Result<Outcome, RunError> {
    match job.mode {
        Mode::Generate => generate(job),
        Mode::Verify => verify(job),
        Mode::Sweep => sweep(job),
        Mode::OracleCompare => oracle_compare(job),
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> RunError + '_ {
    move |source| RunError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Writes every artifact to a temporary sibling first, then renames all of
/// them into place.
pub fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> Result<(), RunError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let pid = std::process::id();
    let mut staged = Vec::with_capacity(artifacts.len());
    for a in artifacts {
        let tmp = dir.join(format!(".{}.{pid}.tmp", a.name));
        if let Err(e) = fs::write(&tmp, &a.contents) {
            for (t, _) in &staged {
                let _ = fs::remove_file(t);
            }
            return Err(io_err(&tmp)(e));
        }
        staged.push((tmp, dir.join(&a.name)));
    }
    for (tmp, dest) in &staged {
        fs::rename(tmp, dest).map_err(io_err(dest))?;
    }
    Ok(())
}
