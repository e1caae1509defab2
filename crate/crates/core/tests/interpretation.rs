mod common;

use common::*;
use ml_workbench::interp::{interpret, load_registry, resolve_key, KeyPlan, LexicalQa, QaBackend, SlotKind, SlotRegistry};
use ml_workbench::session::{interpret_command, AlgorithmTable};

const CLUSTERING_COMMAND: &str = "I want to perform a clustering using 3 clusters on the iris dataset.";

fn frame_of(command: &str) -> Vec<(String, String)> {
    let f = interpret_command(command, &SlotRegistry::builtin(), &LexicalQa::default(), &AlgorithmTable::builtin());
    f.values().into_iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

fn pairs(p: &[(&str, &str)]) -> Vec<(String, String)> {
    p.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

#[test]
fn registry_rows() {
    let reg = load_registry("Key,Type,Return value,Questions\nPROBLEM,Y/N,CLUSTERING,Is this clustering?\nDATASET,Std.,,What is the dataset?\n".as_bytes()).unwrap();
    assert_eq!(reg.rules()[0].kind, SlotKind::Boolean);
    assert_eq!(reg.rules()[0].return_value, "CLUSTERING");
    assert_eq!(reg.rules()[1].kind, SlotKind::Span);
    assert_eq!(reg.rules()[1].return_value, "");
    assert_eq!(load_registry("".as_bytes()).unwrap_err().to_string(), "registry has no rules");
}

#[test]
fn clustering_command_answers() {
    let qa = LexicalQa::default();
    let dataset = qa.answer_span("What is the dataset?", CLUSTERING_COMMAND).unwrap();
    assert_eq!(dataset.text, "iris");
    assert!(dataset.confidence > 0.0);
    assert_eq!(qa.answer_span("How many groups?", CLUSTERING_COMMAND), None);
    assert_eq!(qa.answer_span("How many clusters?", CLUSTERING_COMMAND).unwrap().text, "3");
    assert!(qa.answer_boolean("Is this clustering?", CLUSTERING_COMMAND).is_yes());
    assert!(!qa.answer_boolean("Is this about classification?", CLUSTERING_COMMAND).is_yes());
    let empty = qa.answer_boolean("Is this clustering?", "");
    assert_eq!((empty.text.as_str(), empty.confidence), ("no", 0.0));
}

#[test]
fn resolve_keys_of_clustering_command() {
    let reg = SlotRegistry::builtin();
    let qa = LexicalQa::default();
    assert_eq!(resolve_key("PROBLEM", CLUSTERING_COMMAND, &reg, &qa).unwrap().unwrap().value, "CLUSTERING");
    assert_eq!(resolve_key("NB_CLST", CLUSTERING_COMMAND, &reg, &qa).unwrap().unwrap().value, "3");
    assert_eq!(resolve_key("NB_CMPS", CLUSTERING_COMMAND, &reg, &qa).unwrap(), None);
}

#[test]
fn empty_command_leaves_required_keys_unresolved() {
    let required = vec!["PROBLEM".to_string(), "DATASET".to_string(), "NB_CLST".to_string()];
    let f = interpret("", &SlotRegistry::builtin(), &LexicalQa::default(), &KeyPlan { required: &required, optional: &[] });
    assert!(f.bindings.is_empty());
    assert_eq!(f.unresolved.len(), 3);
}

#[test]
fn golden_frames() {
    let clustering = pairs(&[("DATASET", "iris"), ("NB_CLST", "3"), ("PROBLEM", "CLUSTERING")]);
    assert_eq!(frame_of(CLUSTERING_COMMAND), clustering);
    assert_eq!(frame_of(CASE1), clustering);
    assert_eq!(frame_of(CASE2), pairs(&[("DATASET", "iris"), ("NB_CMPS", "3"), ("PROBLEM", "DIMENSIONALITY")]));
    assert_eq!(
        frame_of(CASE3),
        pairs(&[
            ("DATASET", "iris"),
            ("PROBLEM", "CLASSIFICATION"),
            ("RANDOM", "REPRODUCTIBLE"),
            ("TEST", "[4.8,3.0,1.4,0.2]"),
        ])
    );
    assert_eq!(frame_of(CASE4_PREPROCESS), pairs(&[("ACTION", "PREPROCESS"), ("DATASET", "iris2")]));
    assert_eq!(
        frame_of(CASE4),
        pairs(&[("DATASET", "iris"), ("PROBLEM", "PREDICTION"), ("TEST", "[4.5,3.1,1.2]")])
    );
    assert_eq!(frame_of(CASE5), pairs(&[("DATASET", "iris"), ("PROBLEM", "FEAT_IMP")]));
}

#[test]
fn defaults_are_reported_apart() {
    let f = interpret_command(CASE4, &SlotRegistry::builtin(), &LexicalQa::default(), &AlgorithmTable::builtin());
    assert!(!f.bindings.contains_key("RANDOM"));
    assert_eq!(f.value("RANDOM"), Some("REPRODUCTIBLE"));
}

#[test]
fn interpret_cli_prints_frame_json() {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_workbench"))
        .args(["interpret", "--command", CASE2])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["bindings"]["NB_CMPS"]["value"], "3");
    assert_eq!(v["bindings"]["PROBLEM"]["value"], "DIMENSIONALITY");
    assert_eq!(v["unresolved"], serde_json::json!([]));
}
