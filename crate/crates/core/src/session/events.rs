use serde::{Deserialize, Serialize};

use crate::ghg::GatePresentation;
use crate::interp::CommandFrame;

pub const COMMAND_PROMPT: &str = "Please, enter your English command to the framework.";
pub const PROBLEM_QUESTION: &str = "Please clearly identify the type of problem to solve.";
pub const NO_PROBLEM: &str = "no problem to resolve has been found in your text";

/// One message from the workbench to the user.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "payload", rename_all = "snake_case")]
pub enum SessionEvent {
    Prompt { text: String },
    Info { text: String },
    Question {
        #[serde(skip_serializing_if = "Option::is_none")]
        key: Option<String>,
        text: String,
    },
    Estimate {
        text: String,
        presentation: GatePresentation,
    },
    Confirm { text: String },
    Result(Box<ResultPayload>),
    Error { message: String },
}

impl SessionEvent {
    pub fn kind(&self) -> &'static str {
        match self {
            SessionEvent::Prompt { .. } => "prompt",
            SessionEvent::Info { .. } => "info",
            SessionEvent::Question { .. } => "question",
            SessionEvent::Estimate { .. } => "estimate",
            SessionEvent::Confirm { .. } => "confirm",
            SessionEvent::Result(_) => "result",
            SessionEvent::Error { .. } => "error",
        }
    }

    /// Whether the session now waits for an answer.
    pub fn expects_answer(&self) -> bool {
        matches!(self, SessionEvent::Question { .. } | SessionEvent::Confirm { .. })
    }

    /// Human-readable rendering used by the terminal.
    pub fn text(&self) -> String {
        match self {
            SessionEvent::Prompt { text }
            | SessionEvent::Info { text }
            | SessionEvent::Question { text, .. }
            | SessionEvent::Estimate { text, .. }
            | SessionEvent::Confirm { text } => text.clone(),
            SessionEvent::Result(r) => r.summary.clone(),
            SessionEvent::Error { message } => format!("Error: {message}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResultKind {
    Preprocess,
    Clustering,
    Dimensionality,
    Classification,
    Prediction,
    FeatImp,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultPayload {
    pub kind: ResultKind,
    /// Absent for preprocessing, which is not a tracked request.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub request_id: Option<String>,
    pub dataset: String,
    pub frame: CommandFrame,
    pub summary: String,
    /// Engine-specific numbers.
    pub details: serde_json::Value,
    /// Directory of the explain bundle, relative to the output directory.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bundle: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub files: Vec<String>,
}
