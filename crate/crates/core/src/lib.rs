//! Sylow p-subgroup double cosets of the symmetric group.
//!
//! Permutations are 0-based internally; text formats and the CLI use
//! points `1..=n`.

pub mod closedform;
pub mod dcos;
pub mod decimal;
pub mod error;
pub mod perm;
pub mod prob;
pub mod rng;
pub mod stats;
pub mod sylow;
pub mod witness;

pub use error::{Error, Result};
pub use perm::{CycleType, Permutation};
pub use sylow::{PAdicProfile, StabilizerChain, SylowStructure};
