//! Trains the iris classifier, scores it on a held-out split and predicts one flower.

use ml_workbench::dialogue::ScriptedDialogue;
use ml_workbench::engines::{evaluate, learning_curves, predict, train_supervised, ModelKind, SeedPolicy, TrainConfig};
use ml_workbench::prep::{preprocess, split, DEFAULT_SEED, DEFAULT_TRAIN_RATIO};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let source = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/datasets/iris.csv");
    std::fs::copy(source, dir.path().join("iris.csv"))?;
    let mut answers = vec![""];
    for name in ["Sepal length in cm", "Sepal width in cm", "Petal length in cm", "Petal width in cm"] {
        answers.extend([name, "1", "1"]);
    }
    answers.extend(["Class", "3", "1", "n"]);
    let (_, data) = preprocess(dir.path(), "iris", &mut ScriptedDialogue::new(answers))?;

    let config = TrainConfig::default();
    let parts = split(&data, DEFAULT_TRAIN_RATIO, DEFAULT_SEED)?;
    let model = train_supervised(&parts.train, ModelKind::Classifier, SeedPolicy::Reproducible, &config)?;
    println!("held-out accuracy: {:.3}", evaluate(&model, &parts.test)?);

    let flower = [4.8, 3.0, 1.4, 0.2];
    println!("{flower:?} -> {}", predict(&model, &flower, &data.feature_scaling)?);

    let curves = learning_curves(&data, ModelKind::Classifier, 5, &[0.2, 0.5, 1.0], &config, DEFAULT_SEED)?;
    for i in 0..curves.len() {
        println!(
            "{:>4} rows  train {:.3}  validation {:.3}",
            curves.train_sizes[i], curves.train_scores[i].mean, curves.validation_scores[i].mean
        );
    }
    Ok(())
}
