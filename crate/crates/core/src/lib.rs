pub mod barrier;
pub mod bounds;
pub mod branchmath;
pub mod cli;
pub mod construction;
pub mod error;
pub mod jost;
pub mod potentials;
pub mod quad;
pub mod spectra;
pub mod sums;
pub mod verify;

pub use branchmath::{Wide, C64};
pub use error::{Error, Result};
