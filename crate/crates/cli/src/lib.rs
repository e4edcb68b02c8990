//! Library half of the `modres` command-line tool: configuration, the entry
//! cache, the command implementations and their output formats.

pub mod cache;
pub mod commands;
pub mod render;

pub use cache::Cache;
pub use commands::{CliError, ResidueRow, RunConfig};
pub use render::{Format, Report};

/// Environment variable consulted when `--cache-dir` is absent.
pub const CACHE_DIR_ENV: &str = "MODRES_CACHE_DIR";
