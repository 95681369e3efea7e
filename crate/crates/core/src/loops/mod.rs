//! Loop-group elements as exact chains of elementary factors.

mod birkhoff;
mod chain;
mod factor;

pub use birkhoff::{
    birkhoff_split, swap_plus_minus, BirkhoffSplit, IncrementalSplit, Normalization,
};
pub use chain::FactorChain;
pub use factor::{absorb_phase, Factor, MinusFactor, PhaseFactor, PlusFactor, Side};
