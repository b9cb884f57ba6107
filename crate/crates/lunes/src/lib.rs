//! Standard-library side of the simulator: corpus directories, layered
//! configuration, trace files, the threaded executor and the `lunes`
//! command line.

pub mod analyze;
pub mod bench;
pub mod cli;
pub mod corpus_io;
pub mod error;
pub mod exec;
pub mod settings;
pub mod sim;
pub mod trace_io;

pub use error::{CliError, Result};
