mod common;

use std::io::Cursor;

use common::*;
use ml_workbench::session::{
    run_repl, CommandOutcome, ScriptedIo, SessionEvent, Workbench, WorkbenchConfig, NO_PROBLEM, PROBLEM_QUESTION,
};

fn preprocessed_iris() -> (tempfile::TempDir, Workbench) {
    let (dir, config) = fixture();
    let wb = workbench(config);
    let mut io = ScriptedIo::new(iris_answers());
    assert!(matches!(wb.handle_command(IRIS_PREPROCESS, &mut io), CommandOutcome::Completed(_)));
    (dir, wb)
}

#[test]
fn unrecognized_problem_asks_then_fails() {
    let (_dir, wb) = preprocessed_iris();
    let mut io = ScriptedIo::new(["I have no idea"]);
    let out = wb.handle_command("Please look at the iris dataset.", &mut io);
    assert_eq!(out, CommandOutcome::Failed(NO_PROBLEM.to_string()));
    assert_eq!(
        io.events[0],
        SessionEvent::Question { key: Some("PROBLEM".into()), text: PROBLEM_QUESTION.into() }
    );
    assert_eq!(io.kinds(), ["question", "error"]);
}

#[test]
fn problem_given_after_prompt_is_used() {
    let (_dir, wb) = preprocessed_iris();
    let mut io = ScriptedIo::new(["clustering", "2", "y"]);
    let out = wb.handle_command("Please look at the iris dataset.", &mut io);
    let CommandOutcome::Completed(r) = out else { panic!("{out:?}") };
    assert_eq!(r.frame.value("PROBLEM"), Some("CLUSTERING"));
    assert_eq!(r.frame.value("NB_CLST"), Some("2"));
    let asked: Vec<Option<String>> = io
        .events
        .iter()
        .filter_map(|e| match e {
            SessionEvent::Question { key, .. } => Some(key.clone()),
            _ => None,
        })
        .collect();
    assert_eq!(asked, [Some("PROBLEM".to_string()), Some("NB_CLST".to_string())]);
}

#[test]
fn invalid_answers_are_asked_again() {
    let (_dir, wb) = preprocessed_iris();
    let mut io = ScriptedIo::new(["many", "0", "4", "y"]);
    let out = wb.handle_command("I want a clustering of the iris dataset.", &mut io);
    let CommandOutcome::Completed(r) = out else { panic!("{out:?}") };
    assert_eq!(r.frame.value("NB_CLST"), Some("4"));
    let questions = io.events.iter().filter(|e| matches!(e, SessionEvent::Question { .. })).count();
    assert_eq!(questions, 3);
}

#[test]
fn test_vector_of_wrong_length_is_asked_again() {
    let (_dir, wb) = preprocessed_iris();
    let mut io = ScriptedIo::new(["[5.0,3.4,1.5,0.2]", "y"]);
    let out = wb.handle_command("Perform a classification of the iris dataset. Test [4.8,3.0] value.", &mut io);
    let CommandOutcome::Completed(r) = out else { panic!("{out:?}") };
    assert_eq!(r.frame.value("TEST"), Some("[5.0,3.4,1.5,0.2]"));
    assert!(io.events.iter().any(|e| e.text() == "The test vector needs 4 values, got 2."));
}

#[test]
fn missing_dataset_names_the_path() {
    let (dir, config) = fixture();
    let wb = workbench(config);
    let mut io = ScriptedIo::new(Vec::<String>::new());
    let out = wb.handle_command("I want to perform a clustering using wine dataset and having 3 clusters.", &mut io);
    let CommandOutcome::Failed(msg) = out else { panic!("{out:?}") };
    assert!(msg.contains(&dir.path().join("data/wine.csv").display().to_string()), "{msg}");
    assert_eq!(io.kinds(), ["error"]);
}

#[test]
fn closed_dialogue_aborts_the_gate() {
    let (_dir, wb) = preprocessed_iris();
    let mut io = ScriptedIo::new(["maybe"]);
    assert_eq!(wb.handle_command(CASE1, &mut io), CommandOutcome::Aborted);
    assert_eq!(io.kinds(), ["estimate", "confirm", "info", "confirm", "info"]);
    assert!(wb.ledger().is_empty());
}

#[test]
fn confirm_always_follows_an_estimate() {
    let (_dir, wb) = preprocessed_iris();
    let mut io = ScriptedIo::new(["y"]);
    wb.handle_command(CASE2, &mut io);
    let kinds = io.kinds();
    let c = kinds.iter().position(|k| *k == "confirm").unwrap();
    assert_eq!(kinds[c - 1], "estimate");
}

#[test]
fn auto_confirm_skips_the_question() {
    let (dir, mut config) = fixture();
    config.auto_confirm = true;
    let wb = workbench(config);
    let mut io = ScriptedIo::new(iris_answers());
    wb.handle_command(IRIS_PREPROCESS, &mut io);
    let mut io = ScriptedIo::new(Vec::<String>::new());
    assert!(matches!(wb.handle_command(CASE5, &mut io), CommandOutcome::Completed(_)));
    assert_eq!(io.kinds(), ["estimate", "result"]);
    drop(dir);
}

#[test]
fn repl_reproduces_the_estimate_transcript() {
    let (dir, config) = fixture();
    let mut records = synthetic_records(80, 3, &config.energy);
    for (i, r) in records.iter_mut().take(3).enumerate() {
        r.algorithm = "CLUSTERING".into();
        r.dataset_name = format!("iris_{i}");
        (r.n_rows, r.n_fields) = (150, 4);
    }
    write_ledger(&config.ledger, &records);
    let wb = workbench(config);
    let mut script: Vec<String> = vec![IRIS_PREPROCESS.to_string()];
    script.extend(iris_answers());
    script.extend(lines(&[CASE1, "y", "quit"]));
    let mut out = Vec::new();
    let outcomes = run_repl(&wb, Cursor::new(script.join("\n") + "\n"), &mut out);
    assert_eq!(outcomes.len(), 2);
    let text = String::from_utf8(out).unwrap();
    let est = text.find("Predicted execution time (in sec): ").expect(&text);
    let tail = &text[est..];
    let lines: Vec<&str> = tail.lines().collect();
    assert!(lines[1].starts_with("Predicted generated GHG: ") && lines[1].ends_with(" kg CO2"), "{tail}");
    assert_eq!(lines[2], "");
    assert_eq!(lines[3], "Here are the most similar requests in case launching another request can be avoided.");
    assert!(lines[4].starts_with("   Request _20") && lines[4].contains(" using dataset "), "{}", lines[4]);
    assert!(tail.contains("Launch the request (y/n)?\n> "));
    assert!(text.starts_with("Please, enter your English command to the framework.\n> "));
    assert!(dir.path().join("out").read_dir().unwrap().count() == 1);
}

#[test]
fn shipped_config_loads() {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("workbench.toml");
    let config = WorkbenchConfig::load(&path).unwrap();
    assert_eq!(config.data_dir, datasets_dir());
    assert_eq!(config.training.network.hidden, [32, 32]);
    assert!(Workbench::open(config).is_ok());
}

#[test]
fn bad_config_fails_at_startup() {
    assert!(WorkbenchConfig::load(std::path::Path::new("/no/such/workbench.toml")).is_err());
    let (_dir, mut config) = fixture();
    config.data_dir = config.data_dir.join("missing");
    assert!(Workbench::open(config).is_err());

    let out = std::process::Command::new(env!("CARGO_BIN_EXE_workbench"))
        .args(["repl", "--config", "/no/such/workbench.toml"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("/no/such/workbench.toml"));
}
