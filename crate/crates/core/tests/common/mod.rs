#![allow(dead_code)]

use std::path::Path;

use chrono::NaiveDate;
use ml_workbench::ghg::StepClock;
use ml_workbench::session::{Workbench, WorkbenchConfig};
use tempfile::TempDir;

pub const CASE1: &str = "I want to perform a clustering using iris dataset and having 3 clusters.";
pub const CASE2: &str = "reduction of dimensionality with iris dataset and having 3 components.";
pub const CASE3: &str =
    "Perform a classification of the iris dataset. I want this request to be reproducible. Test [4.8,3.0,1.4,0.2] value.";
pub const CASE4_PREPROCESS: &str = "Do the preprocess of the iris2 dataset.";
pub const CASE4: &str = "I want to make a prediction using the iris dataset. Test [4.5,3.1,1.2]";
pub const CASE5: &str = "Find the importance of the features with the iris dataset.";
pub const IRIS_PREPROCESS: &str = "Do the preprocess of the iris dataset.";

pub fn lines(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

/// Answers to the structure questions for iris: four plain features and a class.
pub fn iris_answers() -> Vec<String> {
    lines(&[
        "",
        "Sepal length in cm", "1", "1",
        "Sepal width in cm", "1", "1",
        "Petal length in cm", "1", "1",
        "Petal width in cm", "1", "1",
        "Class", "3", "1",
        "n",
    ])
}

/// iris2: three features, petal width as the value to predict.
pub fn iris2_answers() -> Vec<String> {
    lines(&[
        "",
        "Sepal length in cm", "1", "1",
        "Sepal width in cm", "1", "1",
        "Petal length in cm", "1", "1",
        "Petal width in cm", "2", "1",
    ])
}

/// Every user line of the full scripted run: preprocess iris, then cases 1 to 5.
pub fn full_script() -> Vec<String> {
    let mut s = vec![IRIS_PREPROCESS.to_string()];
    s.extend(iris_answers());
    for case in [CASE1, CASE2, CASE3] {
        s.push(case.to_string());
        s.push("y".to_string());
    }
    s.push(CASE4_PREPROCESS.to_string());
    s.extend(iris2_answers());
    s.extend(lines(&[CASE4, "iris2", "y", CASE5, "y"]));
    s
}

pub fn datasets_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/data/datasets"))
}

/// Temp root holding `data/` with the raw iris files, a ledger path and `out/`.
pub fn fixture() -> (TempDir, WorkbenchConfig) {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    std::fs::create_dir_all(&data).unwrap();
    for f in ["iris.csv", "iris2.csv"] {
        std::fs::copy(datasets_dir().join(f), data.join(f)).unwrap();
    }
    let config = WorkbenchConfig::in_dir(dir.path());
    (dir, config)
}

pub fn clock() -> StepClock {
    let t = NaiveDate::from_ymd_opt(2022, 11, 21).unwrap().and_hms_opt(21, 23, 43).unwrap();
    StepClock::new(t, 0.25)
}

pub fn workbench(config: WorkbenchConfig) -> Workbench {
    Workbench::open(config).unwrap().with_clock(clock())
}

/// Ledger history with a planted relation: duration = a(algorithm) * rows * fields, plus 5% noise.
pub fn synthetic_records(n: usize, seed: u64, energy: &ml_workbench::ghg::EnergyModel) -> Vec<ml_workbench::ghg::RequestRecord> {
    use rand::{Rng, SeedableRng};
    use rand_distr::{Distribution, Normal};
    const ALGORITHMS: [(&str, f64); 5] = [
        ("CLUSTERING", 2e-6),
        ("DIMENSIONALITY", 5e-7),
        ("CLASSIFICATION", 4e-5),
        ("PREDICTION", 3e-5),
        ("FEAT_IMP", 1e-5),
    ];
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 0.05).unwrap();
    let start = NaiveDate::from_ymd_opt(2022, 1, 1).unwrap().and_hms_opt(0, 0, 0).unwrap();
    (0..n)
        .map(|i| {
            let (alg, a) = ALGORITHMS[rng.random_range(0..ALGORITHMS.len())];
            let n_rows = rng.random_range(1000..=5000);
            let n_fields = rng.random_range(2..=20);
            let base = a * (n_rows * n_fields) as f64;
            let duration_s = (base * (1.0 + noise.sample(&mut rng))).max(base * 0.5);
            ml_workbench::ghg::RequestRecord {
                request_id: ml_workbench::ghg::request_id(start + chrono::TimeDelta::minutes(i as i64)),
                algorithm: alg.to_string(),
                dataset_name: format!("synthetic_{}", i % 7),
                n_rows,
                n_fields,
                duration_s,
                emissions_kg: energy.emissions_kg(duration_s),
            }
        })
        .collect()
}

/// Writes `records` as a JSON-lines ledger file.
pub fn write_ledger(path: &Path, records: &[ml_workbench::ghg::RequestRecord]) {
    let body: String = records.iter().map(|r| serde_json::to_string(r).unwrap() + "\n").collect();
    std::fs::write(path, body).unwrap();
}
