use std::path::{Path, PathBuf};

use fedce_learn::EvalSet;

use crate::idx::{load_idx, IdxError};

/// Resolved paths of the four standard MNIST files inside one directory,
/// accepting either plain or `.gz` variants.
#[derive(Debug, Clone)]
pub struct MnistPaths {
    pub train_images: PathBuf,
    pub train_labels: PathBuf,
    pub test_images: PathBuf,
    pub test_labels: PathBuf,
}

impl MnistPaths {
    /// Look for the standard filenames in `dir`.
    pub fn locate(dir: impl AsRef<Path>) -> Option<MnistPaths> {
        let dir = dir.as_ref();
        let find = |stem: &str| -> Option<PathBuf> {
            let plain = dir.join(stem);
            if plain.is_file() {
                return Some(plain);
            }
            let gz = dir.join(format!("{stem}.gz"));
            gz.is_file().then_some(gz)
        };
        Some(MnistPaths {
            train_images: find("train-images-idx3-ubyte")?,
            train_labels: find("train-labels-idx1-ubyte")?,
            test_images: find("t10k-images-idx3-ubyte")?,
            test_labels: find("t10k-labels-idx1-ubyte")?,
        })
    }

    pub fn load_train(&self) -> Result<EvalSet, IdxError> {
        load_idx(&self.train_images, &self.train_labels)
    }

    pub fn load_test(&self) -> Result<EvalSet, IdxError> {
        load_idx(&self.test_images, &self.test_labels)
    }
}
