//! Preprocesses the bundled iris CSV in a scratch directory, answering the structure questions from a script.

use ml_workbench::dialogue::{Line, ScriptedDialogue};
use ml_workbench::prep::preprocess;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let source = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/datasets/iris.csv");
    std::fs::copy(source, dir.path().join("iris.csv"))?;

    let mut answers = vec![""];
    for name in ["Sepal length in cm", "Sepal width in cm", "Petal length in cm", "Petal width in cm"] {
        answers.extend([name, "1", "1"]);
    }
    answers.extend(["Class", "3", "1", "n"]);
    let mut dialogue = ScriptedDialogue::new(answers);

    let (schema, data) = preprocess(dir.path(), "iris", &mut dialogue)?;
    for line in &dialogue.transcript {
        match line {
            Line::Asked(q) => print!("{q} "),
            Line::Answered(a) => println!("[{a}]"),
            Line::Said(s) => println!("{s}"),
        }
    }
    println!();
    println!("schema: labels {:?}, types {:?}", schema.feat_label, schema.feat_type);
    println!("{} rows x {} features: {:?}", data.features.len(), data.feature_names.len(), data.feature_names);
    println!("first row after scaling: {:?}", data.features[0]);
    Ok(())
}
