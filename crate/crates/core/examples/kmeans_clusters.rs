//! k-means on three Gaussian blobs, with the silhouette of each k.

use ml_workbench::engines::{kmeans, Init};
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};

fn main() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let noise = Normal::new(0.0, 0.4).unwrap();
    let centers = [[0.0, 0.0], [4.0, 4.0], [0.0, 5.0]];
    let x: Vec<Vec<f64>> = (0..150)
        .map(|i| centers[i % 3].iter().map(|c| c + noise.sample(&mut rng)).collect())
        .collect();

    for k in 2..=5 {
        let r = kmeans(&x, k, 0, Init::PlusPlus).expect("valid k");
        println!(
            "k={k}  inertia {:>8.3}  silhouette {:.3}  iterations {}",
            r.inertia,
            r.silhouette_mean.unwrap_or(f64::NAN),
            r.iterations
        );
    }
}
