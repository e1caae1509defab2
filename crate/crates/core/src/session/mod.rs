//! Request lifecycle: command in, questions out, gate, engine, bundle.

mod config;
mod events;
mod io;
mod orchestrator;
mod repl;
mod spec;

use std::path::{Path, PathBuf};

pub use config::{TrainingConfig, WorkbenchConfig, DEFAULT_BIND, DEFAULT_PORT};
pub use events::{ResultKind, ResultPayload, SessionEvent, COMMAND_PROMPT, NO_PROBLEM, PROBLEM_QUESTION};
pub use io::{EventDialogue, ScriptedIo, SessionIo};
pub use orchestrator::{
    dispatch, interpret_command, parse_test_vector, CommandOutcome, EngineOutput, Workbench,
};
pub use repl::{run_repl, run_session};
pub use spec::{AlgorithmSpec, AlgorithmTable, OptionalKey, Problem, DEFAULT_ALGORITHMS};

use crate::engines::EngineError;
use crate::explain::ExplainError;
use crate::ghg::LedgerError;
use crate::interp::InterpError;
use crate::prep::PrepError;

#[derive(Debug, thiserror::Error)]
pub enum SessionError {
    #[error("config: {0}")]
    Config(String),
    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },
    #[error(transparent)]
    Interp(#[from] InterpError),
    #[error(transparent)]
    Prep(#[from] PrepError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
    #[error(transparent)]
    Explain(#[from] ExplainError),
    #[error("missing keys for {problem}: {}", keys.join(", "))]
    MissingKeys { problem: String, keys: Vec<String> },
    #[error("invalid value {value:?} for {key}")]
    InvalidValue { key: String, value: String },
    #[error("no problem to resolve has been found in your text")]
    NoProblem,
    #[error("startup: {0}")]
    Startup(String),
    #[error("empty command")]
    EmptyCommand,
    #[error("the dialogue ended before the request was complete")]
    Closed,
}

impl SessionError {
    pub(crate) fn io(path: &Path, e: std::io::Error) -> Self {
        SessionError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        }
    }
}
