//! Turns an English command into a frame of key/value bindings.
//!
//! cargo run --example interpret_command -- "Reduce the iris dataset to 2 components."

use ml_workbench::interp::{LexicalQa, SlotRegistry};
use ml_workbench::session::{interpret_command, AlgorithmTable};

fn main() {
    let command = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "I want to perform a clustering using iris dataset and having 3 clusters.".into());
    let frame = interpret_command(&command, &SlotRegistry::builtin(), &LexicalQa::default(), &AlgorithmTable::builtin());
    println!("{command}");
    for (key, value) in frame.values() {
        let how = if frame.bindings.contains_key(key) { "found" } else { "default" };
        println!("  {key:<8} = {value} ({how})");
    }
    for key in &frame.unresolved {
        println!("  {key:<8} missing");
    }
}
