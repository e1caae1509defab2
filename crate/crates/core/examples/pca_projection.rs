//! Principal components of correlated 3-d data.

use ml_workbench::engines::pca;
use rand::{Rng, SeedableRng};

fn main() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let x: Vec<Vec<f64>> = (0..200)
        .map(|_| {
            let t: f64 = rng.random_range(-3.0..3.0);
            let s: f64 = rng.random_range(-1.0..1.0);
            vec![t, 0.5 * t + 0.2 * s, s + rng.random_range(-0.05..0.05)]
        })
        .collect();

    let r = pca(&x, 2).expect("two components fit");
    for (i, c) in r.components.iter().enumerate() {
        println!(
            "PC{}: [{:+.3}, {:+.3}, {:+.3}]  variance {:.3} ({:.1}%)",
            i + 1,
            c[0],
            c[1],
            c[2],
            r.explained_variance[i],
            100.0 * r.explained_variance_ratio[i]
        );
    }
    println!("first sample projected: {:?}", r.projected[0]);
}
