//! Request tracking, footprint prediction, similar requests and the launch gate.

mod energy;
mod gate;
mod ledger;
mod predictor;
mod record;
mod similar;

use std::path::{Path, PathBuf};

pub use energy::{EnergyModel, DEFAULT_CARBON_INTENSITY, DEFAULT_CPU_POWER_W};
pub use gate::{confirm_gate, format_sci, GateDecision, GatePresentation, LAUNCH_PROMPT, SIMILAR_HEADER};
pub use ledger::{track, JobInfo, Ledger};
pub use predictor::{predict_footprint, FootprintEstimate, FootprintPredictor, MIN_TRAINING_RECORDS, PREDICTOR_HIDDEN};
pub use record::{is_request_id, parse_request_id, request_id, Clock, RequestRecord, StepClock, SystemClock, REQUEST_ID_FORMAT};
pub use similar::{default_cluster_count, similar_requests, Prospective, MAX_SIMILAR};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum LedgerError {
    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },
    #[error("ledger line {line}: {message}")]
    Corrupt { line: usize, message: String },
    #[error("request id already in ledger: {0}")]
    DuplicateId(String),
    #[error("duration and emissions must be non-negative")]
    NegativeMeasure,
    #[error("energy model constants must be strictly positive")]
    InvalidEnergyModel,
}

impl LedgerError {
    pub(crate) fn io(path: &Path, e: std::io::Error) -> Self {
        LedgerError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        }
    }
}
