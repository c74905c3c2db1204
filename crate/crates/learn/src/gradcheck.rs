use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::loss_and_grad;
use crate::train::init_params;
use crate::{EvalSet, LearnError, ModelSpec, ParamVector};

/// Central finite-difference step.
const FD_STEP: f64 = 1e-5;
/// Gradients with both analytic and numeric magnitude below this are
/// compared as equal.
const NEGLIGIBLE: f64 = 1e-10;

/// Validate the manual backward pass: compare the analytic full-batch
/// gradient at a seeded random initialization against central finite
/// differences on a random sample of up to 50 coordinates (dropout
/// disabled). Returns the worst relative error over the sample.
pub fn gradient_check(spec: ModelSpec, data: &EvalSet, seed: u64) -> Result<f64, LearnError> {
    if data.is_empty() {
        return Err(LearnError::EmptyDataset);
    }
    let params = init_params(spec, seed);
    crate::model::check_match(&params, data)?;

    let x = data.features().view();
    let labels = data.labels();
    let (_, analytic) = loss_and_grad(&params, &x, labels, None);

    let mut coords: Vec<usize> = (0..params.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e3779b97f4a7c15);
    coords.shuffle(&mut rng);
    coords.truncate(50);

    let loss_at = |p: &ParamVector| loss_and_grad(p, &x, labels, None).0;

    let mut worst: f64 = 0.0;
    for &c in &coords {
        let mut plus = params.clone();
        plus.values_mut()[c] += FD_STEP;
        let mut minus = params.clone();
        minus.values_mut()[c] -= FD_STEP;
        let numeric = (loss_at(&plus) - loss_at(&minus)) / (2.0 * FD_STEP);
        let exact = analytic.values()[c];
        let scale = exact.abs().max(numeric.abs());
        if scale < NEGLIGIBLE {
            continue;
        }
        worst = worst.max((exact - numeric).abs() / scale);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::MlpSpec;
    use ndarray::Array2;
    use rand::Rng;

    fn random_set(n: usize, dim: usize, classes: usize, seed: u64) -> EvalSet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let features = Array2::from_shape_fn((n, dim), |_| rng.random_range(-1.0..1.0));
        let labels = (0..n).map(|_| rng.random_range(0..classes)).collect();
        EvalSet::new(features, labels).unwrap()
    }

    #[test]
    fn logistic_gradient_matches_finite_differences() {
        let spec = ModelSpec::Logistic {
            input_dim: 4,
            num_classes: 3,
        };
        let err = gradient_check(spec, &random_set(5, 4, 3, 1), 3).unwrap();
        assert!(err < 1e-6, "relative error {err}");
    }

    #[test]
    fn mlp_gradient_matches_finite_differences() {
        let spec = ModelSpec::Mlp(MlpSpec::new(6, 64, 4, 0.0));
        let err = gradient_check(spec, &random_set(5, 6, 4, 2), 4).unwrap();
        assert!(err < 1e-4, "relative error {err}");
    }
}
