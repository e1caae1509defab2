//! English command interpretation: registry questions applied to a command
//! to fill typed slots.

mod frame;
mod qa;
mod registry;

pub use frame::{
    interpret, resolve_key, resolve_key_traced, Binding, CommandFrame, KeyPlan, Resolution,
    TraceStep,
};
pub use qa::{tokenize, Answer, Lexicon, LexicalQa, QaBackend, Topic, WordFamily};
pub use registry::{load_registry, SlotKind, SlotRegistry, SlotRule, DEFAULT_REGISTRY};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum InterpError {
    #[error("registry has no rules")]
    EmptyRegistry,
    #[error("registry parse error at line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("key not in registry: {0}")]
    UnknownKey(String),
}
