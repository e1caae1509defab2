//! Random-forest importance on a target that depends on two of four features.

use ml_workbench::engines::{rf_importance, Task};
use ml_workbench::prep::{PreparedDataset, Target};
use rand::{Rng, SeedableRng};

fn main() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let features: Vec<Vec<f64>> = (0..300).map(|_| (0..4).map(|_| rng.random_range(0.0..1.0)).collect()).collect();
    let values = features.iter().map(|f| 3.0 * f[0] + f[2] * f[2]).collect();
    let data = PreparedDataset {
        name: "synthetic".into(),
        feature_names: ["a", "b", "c", "d"].map(String::from).to_vec(),
        features,
        target: Target::Regression { name: "y".into(), values },
        feature_scaling: vec![None; 4],
        target_scaling: None,
    };
    let r = rf_importance(&data, Task::Regression).expect("forest trains");
    for (name, imp) in data.feature_names.iter().zip(&r.importances) {
        println!("{name}: {imp:.3} {}", "#".repeat((imp * 50.0).round() as usize));
    }
}
