use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Two-layer MLP: input -> rectified hidden layer (with dropout at train
/// time) -> linear output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MlpSpec {
    pub input_dim: usize,
    pub hidden_units: usize,
    pub num_classes: usize,
    /// Hidden-layer dropout probability, inverted scaling at train time.
    pub dropout_p: f64,
}

impl MlpSpec {
    pub fn new(input_dim: usize, hidden_units: usize, num_classes: usize, dropout_p: f64) -> Self {
        assert!(hidden_units > 0, "hidden layer needs at least one unit");
        assert!(
            (0.0..1.0).contains(&dropout_p),
            "dropout probability outside [0,1)"
        );
        MlpSpec {
            input_dim,
            hidden_units,
            num_classes,
            dropout_p,
        }
    }
}

/// Architecture descriptor; doubles as the layout of a flat parameter vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ModelSpec {
    /// Multinomial logistic regression: weights (input x classes) then biases.
    Logistic {
        input_dim: usize,
        num_classes: usize,
    },
    Mlp(MlpSpec),
}

impl ModelSpec {
    pub fn param_count(&self) -> usize {
        match *self {
            ModelSpec::Logistic {
                input_dim,
                num_classes,
            } => input_dim * num_classes + num_classes,
            ModelSpec::Mlp(spec) => {
                spec.input_dim * spec.hidden_units
                    + spec.hidden_units
                    + spec.hidden_units * spec.num_classes
                    + spec.num_classes
            }
        }
    }

    pub fn input_dim(&self) -> usize {
        match *self {
            ModelSpec::Logistic { input_dim, .. } => input_dim,
            ModelSpec::Mlp(spec) => spec.input_dim,
        }
    }

    pub fn num_classes(&self) -> usize {
        match *self {
            ModelSpec::Logistic { num_classes, .. } => num_classes,
            ModelSpec::Mlp(spec) => spec.num_classes,
        }
    }
}

/// Flat model parameters plus their layout. Supports the linear operations
/// federated averaging and pseudo-model accumulation need.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector {
    values: Vec<f64>,
    layout: ModelSpec,
}

impl ParamVector {
    pub fn new(values: Vec<f64>, layout: ModelSpec) -> Self {
        assert_eq!(
            values.len(),
            layout.param_count(),
            "value count does not match the layout"
        );
        ParamVector { values, layout }
    }

    pub fn zeros(layout: ModelSpec) -> Self {
        ParamVector {
            values: vec![0.0; layout.param_count()],
            layout,
        }
    }

    pub fn layout(&self) -> ModelSpec {
        self.layout
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// `self += factor * other`.
    pub fn add_scaled(&mut self, other: &ParamVector, factor: f64) {
        assert_eq!(self.layout, other.layout, "layout mismatch");
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += factor * b;
        }
    }

    /// `self - other`, e.g. a local update delta.
    pub fn minus(&self, other: &ParamVector) -> ParamVector {
        assert_eq!(self.layout, other.layout, "layout mismatch");
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        ParamVector {
            values,
            layout: self.layout,
        }
    }

    /// `sum_k coeff_k * term_k` over vectors of one layout.
    pub fn linear_combination(terms: &[(f64, &ParamVector)]) -> ParamVector {
        assert!(!terms.is_empty(), "empty linear combination");
        let layout = terms[0].1.layout;
        let mut out = ParamVector::zeros(layout);
        for &(coeff, term) in terms {
            out.add_scaled(term, coeff);
        }
        out
    }

    pub fn max_abs_diff(&self, other: &ParamVector) -> f64 {
        assert_eq!(self.layout, other.layout, "layout mismatch");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Serialize as the checkpoint format: magic `FPV1`, a layout header,
    /// and the parameters as little-endian f32.
    ///
    /// Header fields after the magic, all little-endian: kind (u8; 0 =
    /// logistic, 1 = MLP), input_dim (u32), hidden_units (u32; 0 for
    /// logistic), num_classes (u32), dropout (f32; 0 for logistic),
    /// param count (u32).
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(21 + 4 * self.values.len());
        out.extend_from_slice(b"FPV1");
        match self.layout {
            ModelSpec::Logistic {
                input_dim,
                num_classes,
            } => {
                out.push(0);
                out.extend_from_slice(&(input_dim as u32).to_le_bytes());
                out.extend_from_slice(&0u32.to_le_bytes());
                out.extend_from_slice(&(num_classes as u32).to_le_bytes());
                out.extend_from_slice(&0f32.to_le_bytes());
            }
            ModelSpec::Mlp(spec) => {
                out.push(1);
                out.extend_from_slice(&(spec.input_dim as u32).to_le_bytes());
                out.extend_from_slice(&(spec.hidden_units as u32).to_le_bytes());
                out.extend_from_slice(&(spec.num_classes as u32).to_le_bytes());
                out.extend_from_slice(&(spec.dropout_p as f32).to_le_bytes());
            }
        }
        out.extend_from_slice(&(self.values.len() as u32).to_le_bytes());
        for v in &self.values {
            out.extend_from_slice(&(*v as f32).to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<ParamVector, ParamCodecError> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4)? != b"FPV1" {
            return Err(ParamCodecError::BadMagic);
        }
        let kind = r.take(1)?[0];
        let input_dim = r.u32()? as usize;
        let hidden = r.u32()? as usize;
        let num_classes = r.u32()? as usize;
        let dropout = r.f32()? as f64;
        let layout = match kind {
            0 => ModelSpec::Logistic {
                input_dim,
                num_classes,
            },
            1 => ModelSpec::Mlp(MlpSpec::new(input_dim, hidden, num_classes, dropout)),
            other => return Err(ParamCodecError::UnknownKind(other)),
        };
        let count = r.u32()? as usize;
        if count != layout.param_count() {
            return Err(ParamCodecError::CountMismatch {
                header: count,
                layout: layout.param_count(),
            });
        }
        let mut values = Vec::with_capacity(count);
        for _ in 0..count {
            values.push(r.f32()? as f64);
        }
        Ok(ParamVector { values, layout })
    }
}

#[derive(Debug, Error)]
pub enum ParamCodecError {
    #[error("bad magic; not a parameter checkpoint")]
    BadMagic,
    #[error("unknown model kind {0}")]
    UnknownKind(u8),
    #[error("header claims {header} parameters but the layout needs {layout}")]
    CountMismatch { header: usize, layout: usize },
    #[error("checkpoint truncated")]
    Truncated,
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], ParamCodecError> {
        if self.pos + n > self.bytes.len() {
            return Err(ParamCodecError::Truncated);
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, ParamCodecError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f32(&mut self) -> Result<f32, ParamCodecError> {
        Ok(f32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
}
