//! Front end for `vaes-core`: run configurations, the preset catalog, JSON
//! state files, and the verification suites behind the `vaes` binary.

pub mod commands;
pub mod config;
pub mod json;
pub mod presets;
pub mod sample;
pub mod state;
pub mod suite;

use thiserror::Error;
use vaes_core::VaesError;

pub use commands::{cmd_catalog, cmd_classify, cmd_solve, cmd_verify_config, cmd_verify_state, solve_resolved};
pub use config::{Resolved, Route, RunConfig};
pub use state::StateFile;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("invariant failed: {0}")]
    Invariant(String),

    #[error("numerical non-convergence: {0}")]
    NonConvergence(String),
}

impl CliError {
    /// 0 pass, 1 invariant failure, 2 config error, 3 non-convergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invariant(_) => 1,
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::NonConvergence(_) => 3,
        }
    }
}

impl From<VaesError> for CliError {
    fn from(e: VaesError) -> Self {
        match e {
            VaesError::Tail { .. } | VaesError::NonConvergence(_) => CliError::NonConvergence(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Worker pool for suites; `VAES_THREADS` caps its size.
pub fn worker_pool() -> CliResult<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("VAES_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Config(format!("VAES_THREADS must be a positive integer, got {v:?}")))?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| CliError::Config(format!("worker pool: {e}")))
}
