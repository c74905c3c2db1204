use ndarray::{Array2, Axis};

use crate::LearnError;

/// A labeled dataset: one feature row per sample.
#[derive(Debug, Clone)]
pub struct EvalSet {
    features: Array2<f64>,
    labels: Vec<usize>,
}

impl EvalSet {
    pub fn new(features: Array2<f64>, labels: Vec<usize>) -> Result<Self, LearnError> {
        if features.nrows() != labels.len() {
            return Err(LearnError::DimensionMismatch {
                found: labels.len(),
                expected: features.nrows(),
            });
        }
        Ok(EvalSet { features, labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn feature_dim(&self) -> usize {
        self.features.ncols()
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Rows selected by index, in the given order.
    pub fn subset(&self, indices: &[usize]) -> EvalSet {
        let features = self.features.select(Axis(0), indices);
        let labels = indices.iter().map(|&i| self.labels[i]).collect();
        EvalSet { features, labels }
    }

    /// Replace one label (used by noise injection).
    pub fn set_label(&mut self, index: usize, label: usize) {
        self.labels[index] = label;
    }

    pub(crate) fn check_labels(&self, num_classes: usize) -> Result<(), LearnError> {
        for &label in &self.labels {
            if label >= num_classes {
                return Err(LearnError::LabelOutOfRange { label, num_classes });
            }
        }
        Ok(())
    }
}
