pub mod dde;
pub mod eigen;
pub mod kron;
pub mod error;
pub mod matrix_io;
pub mod reference;
pub mod sweep;
pub mod system;

#[cfg(test)]
mod testing;

pub use error::{Error, Result};
pub use system::{RetardedSystem, SpectrumSummary};
