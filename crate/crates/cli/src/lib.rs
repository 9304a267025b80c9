//! Library side of the `superatom` experiment runner: config resolution,
//! artifact writers and the mode dispatcher. The binary in `main.rs` is a
//! thin argument-parsing wrapper so tests can drive everything in-process.

pub mod config;
pub mod output;
pub mod runner;

pub use config::{parse_config_file, resolve, CliOverrides, ConfigFile, Mode, ResolvedConfig};
pub use runner::run;

/// Runner errors, mapped onto process exit codes: configuration 1, solver or
/// integrator 2, i/o 3.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error("solver error: {0}")]
    Solver(#[from] superatom::Error),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Solver(_) => 2,
            CliError::Io { .. } => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Solver(_) => "solver",
            CliError::Io { .. } => "io",
        }
    }

    /// Machine-readable error payload printed to stderr on failure.
    pub fn to_json(&self) -> String {
        serde_json::json!({
            "error": {
                "kind": self.kind(),
                "exit_code": self.exit_code(),
                "message": self.to_string(),
            }
        })
        .to_string()
    }
}

pub(crate) fn io_err(path: &std::path::Path, source: std::io::Error) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        source,
    }
}
