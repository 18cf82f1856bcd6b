//! Library half of the `calib` binary: configuration parsing, game
//! execution, CSV artifacts and the SVG convergence plot.

pub mod config;
pub mod csvio;
pub mod error;
pub mod plot;
pub mod runner;

pub use config::{parse_method, parse_nature, resolve_out_dir, ForecasterKind, RunConfig};
pub use error::{CliError, Result};
pub use plot::emit_plot;
pub use runner::{execute, execute_seed, play_seed, RunArtifacts};
