use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fedce_learn::EvalSet;

/// Gaussian class blobs: each class gets a random center with coordinates
/// drawn from `N(0, separation^2)` and unit-variance samples around it.
/// Samples are laid out class-major (all of class 0 first); partitioning
/// shuffles anyway.
pub fn synth_dataset(
    num_classes: usize,
    dim: usize,
    per_class: usize,
    separation: f64,
    seed: u64,
) -> EvalSet {
    assert!(
        num_classes > 0 && dim > 0 && per_class > 0,
        "all sizes positive"
    );
    assert!(separation >= 0.0, "separation must be non-negative");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let centers: Vec<Vec<f64>> = (0..num_classes)
        .map(|_| (0..dim).map(|_| separation * gaussian(&mut rng)).collect())
        .collect();

    let total = num_classes * per_class;
    let mut features = Array2::zeros((total, dim));
    let mut labels = Vec::with_capacity(total);
    for (class, center) in centers.iter().enumerate() {
        for s in 0..per_class {
            let row = class * per_class + s;
            for d in 0..dim {
                features[[row, d]] = center[d] + gaussian(&mut rng);
            }
            labels.push(class);
        }
    }
    EvalSet::new(features, labels).expect("matching counts by construction")
}

/// Standard normal via Box-Muller; two uniforms per draw keeps the stream
/// layout simple and platform-stable.
fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.random_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}
