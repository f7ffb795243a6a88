//! Text formats, external solvers, batch runs and the command line for
//! [`fmp_core`].

pub mod batch;
pub mod cli;
pub mod external;
pub mod format;

pub use fmp_core;
