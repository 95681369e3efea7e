//! Discrete pseudospherical surfaces from loop-group factor chains.
//!
//! Potentials `(α, p)` and `(β, q)` are turned into plus/minus factor chains,
//! split with an exact Birkhoff factorization, and the resulting extended
//! frames are mapped to quad meshes through the Sym formula
//! `f = λ ∂F/∂λ F⁻¹`. An independent Hirota-lattice integrator cross-checks
//! the frames.

pub mod algebra;
pub mod dalembert;
mod error;
pub mod export;
pub mod hirota;
pub mod loops;
pub mod surface;
pub mod verify;

pub use error::{Error, Result};
