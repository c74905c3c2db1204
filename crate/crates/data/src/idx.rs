use std::fs::File;
use std::io::Read;
use std::path::Path;

use flate2::read::GzDecoder;
use ndarray::Array2;
use thiserror::Error;

use fedce_learn::EvalSet;

const IMAGES_MAGIC: u32 = 0x0000_0803;
const LABELS_MAGIC: u32 = 0x0000_0801;

#[derive(Debug, Error)]
pub enum IdxError {
    #[error("{path}: expected magic {expected:#010x}, found {found:#010x}")]
    BadMagic {
        path: String,
        expected: u32,
        found: u32,
    },
    #[error("image file has {images} samples but label file has {labels}")]
    CountMismatch { images: usize, labels: usize },
    #[error("{path}: file truncated ({detail})")]
    TruncatedFile { path: String, detail: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Load an MNIST-style IDX image/label pair into an evaluation set with
/// pixel features scaled to `[0, 1]`. Files ending in `.gz` (or starting
/// with the gzip magic) are decompressed transparently.
pub fn load_idx(
    images_path: impl AsRef<Path>,
    labels_path: impl AsRef<Path>,
) -> Result<EvalSet, IdxError> {
    let images_path = images_path.as_ref();
    let labels_path = labels_path.as_ref();
    let image_bytes = read_maybe_gzip(images_path)?;
    let label_bytes = read_maybe_gzip(labels_path)?;

    let (image_count, rows, cols, pixels) = parse_images(images_path, &image_bytes)?;
    let labels = parse_labels(labels_path, &label_bytes)?;
    if image_count != labels.len() {
        return Err(IdxError::CountMismatch {
            images: image_count,
            labels: labels.len(),
        });
    }

    let dim = rows * cols;
    let features = Array2::from_shape_fn((image_count, dim), |(i, j)| {
        f64::from(pixels[i * dim + j]) / 255.0
    });
    let labels = labels.iter().map(|&l| l as usize).collect();
    Ok(EvalSet::new(features, labels).expect("counts checked above"))
}

fn read_maybe_gzip(path: &Path) -> Result<Vec<u8>, IdxError> {
    let mut raw = Vec::new();
    File::open(path)?.read_to_end(&mut raw)?;
    let is_gzip = raw.len() >= 2 && raw[0] == 0x1f && raw[1] == 0x8b;
    if is_gzip {
        let mut decoded = Vec::new();
        GzDecoder::new(raw.as_slice())
            .read_to_end(&mut decoded)
            .map_err(|e| IdxError::TruncatedFile {
                path: path.display().to_string(),
                detail: format!("gzip: {e}"),
            })?;
        Ok(decoded)
    } else {
        Ok(raw)
    }
}

fn be_u32(path: &Path, bytes: &[u8], offset: usize) -> Result<u32, IdxError> {
    bytes
        .get(offset..offset + 4)
        .map(|s| u32::from_be_bytes(s.try_into().unwrap()))
        .ok_or_else(|| IdxError::TruncatedFile {
            path: path.display().to_string(),
            detail: format!("header word at byte {offset}"),
        })
}

fn parse_images<'a>(
    path: &Path,
    bytes: &'a [u8],
) -> Result<(usize, usize, usize, &'a [u8]), IdxError> {
    let magic = be_u32(path, bytes, 0)?;
    if magic != IMAGES_MAGIC {
        return Err(IdxError::BadMagic {
            path: path.display().to_string(),
            expected: IMAGES_MAGIC,
            found: magic,
        });
    }
    let count = be_u32(path, bytes, 4)? as usize;
    let rows = be_u32(path, bytes, 8)? as usize;
    let cols = be_u32(path, bytes, 12)? as usize;
    let expected = 16 + count * rows * cols;
    if bytes.len() < expected {
        return Err(IdxError::TruncatedFile {
            path: path.display().to_string(),
            detail: format!("need {expected} bytes, have {}", bytes.len()),
        });
    }
    Ok((count, rows, cols, &bytes[16..expected]))
}

fn parse_labels<'a>(path: &Path, bytes: &'a [u8]) -> Result<&'a [u8], IdxError> {
    let magic = be_u32(path, bytes, 0)?;
    if magic != LABELS_MAGIC {
        return Err(IdxError::BadMagic {
            path: path.display().to_string(),
            expected: LABELS_MAGIC,
            found: magic,
        });
    }
    let count = be_u32(path, bytes, 4)? as usize;
    let expected = 8 + count;
    if bytes.len() < expected {
        return Err(IdxError::TruncatedFile {
            path: path.display().to_string(),
            detail: format!("need {expected} bytes, have {}", bytes.len()),
        });
    }
    Ok(&bytes[8..expected])
}
