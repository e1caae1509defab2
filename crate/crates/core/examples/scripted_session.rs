//! A whole session driven by canned user lines: preprocess iris, cluster it, reduce it.

use ml_workbench::session::{run_session, ScriptedIo, SessionEvent, Workbench, WorkbenchConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    std::fs::create_dir(dir.path().join("data"))?;
    let source = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/datasets/iris.csv");
    std::fs::copy(source, dir.path().join("data/iris.csv"))?;
    let mut config = WorkbenchConfig::in_dir(dir.path());
    config.auto_confirm = true;
    let workbench = Workbench::open(config)?;

    let mut lines = vec!["Do the preprocess of the iris dataset.", ""];
    for name in ["Sepal length in cm", "Sepal width in cm", "Petal length in cm", "Petal width in cm"] {
        lines.extend([name, "1", "1"]);
    }
    lines.extend(["Class", "3", "1", "n"]);
    lines.push("I want to perform a clustering using iris dataset and having 3 clusters.");
    lines.push("Reduce the dimension of the iris dataset to 2 components.");
    let mut io = ScriptedIo::new(lines);

    run_session(&workbench, &mut io);
    for event in &io.events {
        match event {
            SessionEvent::Result(r) => println!("result: {}", r.summary),
            SessionEvent::Question { .. } | SessionEvent::Prompt { .. } => {}
            e => println!("{}: {}", e.kind(), e.text().trim_end()),
        }
    }
    Ok(())
}
