pub mod cli;
pub mod coherence;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod hamiltonian;
pub mod oracle;
pub mod spin;
pub mod yields;

pub use error::{Error, Result};
