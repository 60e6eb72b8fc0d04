//! `adaptopt` command implementations: workflow validation, optimization
//! runs, exhaustive reference fronts and the read-only results service.

pub mod artifact;
pub mod commands;
pub mod config;
pub mod server;

use std::path::{Path, PathBuf};

use adaptopt_core::cobot::TableError;
use adaptopt_core::moea::EngineError;
use adaptopt_core::problem::AssemblyError;
use adaptopt_core::workflow::WorkflowError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    InvalidWorkflow { path: PathBuf, source: WorkflowError },
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("artifact error: {0}")]
    Artifact(String),
    #[error("server error: {0}")]
    Server(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_owned(),
            source,
        }
    }

    /// 1 for validation and optimization failures, 2 for usage and I/O problems.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Config(_) | CliError::Usage(_) | CliError::Artifact(_) | CliError::Server(_) => 2,
            CliError::Table(TableError::Io(_)) => 2,
            CliError::Engine(EngineError::Config(_)) => 2,
            CliError::InvalidWorkflow { .. } | CliError::Table(_) | CliError::Assembly(_) | CliError::Engine(_) => 1,
        }
    }
}
