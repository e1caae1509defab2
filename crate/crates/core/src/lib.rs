//! Conversational ML workbench: English commands in, tracked and explained results out.

pub mod dialogue;
pub mod engines;
pub mod explain;
pub mod ghg;
pub mod interp;
pub mod prep;
pub mod server;
pub mod session;
