//! Forward and backward passes, hand-derived. The loss everywhere is mean
//! softmax cross-entropy over the batch.

use ndarray::{Array2, ArrayView1, ArrayView2, Axis};

use crate::{EvalSet, LearnError, ModelSpec, ParamVector};

/// Parameter slice offsets for one layout.
struct Slots {
    w1: (usize, usize),
    b1: (usize, usize),
    w2: Option<(usize, usize)>,
    b2: Option<(usize, usize)>,
}

fn slots(spec: ModelSpec) -> Slots {
    match spec {
        ModelSpec::Logistic {
            input_dim,
            num_classes,
        } => {
            let w = input_dim * num_classes;
            Slots {
                w1: (0, w),
                b1: (w, w + num_classes),
                w2: None,
                b2: None,
            }
        }
        ModelSpec::Mlp(spec) => {
            let w1 = spec.input_dim * spec.hidden_units;
            let b1 = w1 + spec.hidden_units;
            let w2 = b1 + spec.hidden_units * spec.num_classes;
            let b2 = w2 + spec.num_classes;
            Slots {
                w1: (0, w1),
                b1: (w1, b1),
                w2: Some((b1, w2)),
                b2: Some((w2, b2)),
            }
        }
    }
}

fn view<'a>(
    values: &'a [f64],
    range: (usize, usize),
    shape: (usize, usize),
) -> ArrayView2<'a, f64> {
    ArrayView2::from_shape(shape, &values[range.0..range.1]).expect("layout invariant")
}

fn view1<'a>(values: &'a [f64], range: (usize, usize)) -> ArrayView1<'a, f64> {
    ArrayView1::from(&values[range.0..range.1])
}

/// MLP intermediates kept for the backward pass: pre-activation and
/// (dropped) hidden activations.
type MlpTrace = (Array2<f64>, Array2<f64>);

/// Logits for a batch. `dropout_mask`, when given, is applied to the hidden
/// activations of an MLP (entries are 0 or 1/(1-p)); evaluation passes None.
/// Returns the intermediates needed for the backward pass.
pub(crate) fn forward(
    params: &ParamVector,
    x: &ArrayView2<f64>,
    dropout_mask: Option<&Array2<f64>>,
) -> (Array2<f64>, Option<MlpTrace>) {
    let spec = params.layout();
    let s = slots(spec);
    let values = params.values();
    match spec {
        ModelSpec::Logistic {
            input_dim,
            num_classes,
        } => {
            let w = view(values, s.w1, (input_dim, num_classes));
            let b = view1(values, s.b1);
            let logits = x.dot(&w) + b;
            (logits, None)
        }
        ModelSpec::Mlp(mlp) => {
            let w1 = view(values, s.w1, (mlp.input_dim, mlp.hidden_units));
            let b1 = view1(values, s.b1);
            let w2 = view(values, s.w2.unwrap(), (mlp.hidden_units, mlp.num_classes));
            let b2 = view1(values, s.b2.unwrap());
            let z1 = x.dot(&w1) + b1;
            let mut hidden = z1.mapv(|z| z.max(0.0));
            if let Some(mask) = dropout_mask {
                hidden *= mask;
            }
            let logits = hidden.dot(&w2) + b2;
            (logits, Some((z1, hidden)))
        }
    }
}

/// Row-wise softmax with max subtraction.
fn softmax(logits: &Array2<f64>) -> Array2<f64> {
    let mut out = logits.clone();
    for mut row in out.axis_iter_mut(Axis(0)) {
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        row.mapv_inplace(|v| (v - max).exp());
        let sum = row.sum();
        row.mapv_inplace(|v| v / sum);
    }
    out
}

fn cross_entropy(logits: &Array2<f64>, labels: &[usize]) -> f64 {
    let mut total = 0.0;
    for (row, &label) in logits.axis_iter(Axis(0)).zip(labels) {
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let logsumexp = row.iter().map(|v| (v - max).exp()).sum::<f64>().ln() + max;
        total += logsumexp - row[label];
    }
    total / labels.len() as f64
}

/// Mean cross-entropy loss and its gradient for one batch.
pub(crate) fn loss_and_grad(
    params: &ParamVector,
    x: &ArrayView2<f64>,
    labels: &[usize],
    dropout_mask: Option<&Array2<f64>>,
) -> (f64, ParamVector) {
    let spec = params.layout();
    let s = slots(spec);
    let batch = labels.len() as f64;
    let (logits, trace) = forward(params, x, dropout_mask);
    let loss = cross_entropy(&logits, labels);

    // dL/dlogits = (softmax - onehot) / batch
    let mut g = softmax(&logits);
    for (i, &label) in labels.iter().enumerate() {
        g[[i, label]] -= 1.0;
    }
    g /= batch;

    let mut grads = ParamVector::zeros(spec);
    match spec {
        ModelSpec::Logistic { .. } => {
            let gw = x.t().dot(&g);
            let gb = g.sum_axis(Axis(0));
            write_slot(&mut grads, s.w1, gw.as_slice().expect("contiguous"));
            write_slot(&mut grads, s.b1, gb.as_slice().expect("contiguous"));
        }
        ModelSpec::Mlp(mlp) => {
            let (z1, hidden) = trace.expect("mlp trace");
            let values = params.values();
            let w2 = view(values, s.w2.unwrap(), (mlp.hidden_units, mlp.num_classes));

            let gw2 = hidden.t().dot(&g);
            let gb2 = g.sum_axis(Axis(0));

            // Back through the second layer, the dropout mask, and the
            // rectifier.
            let mut gh = g.dot(&w2.t());
            if let Some(mask) = dropout_mask {
                gh *= mask;
            }
            gh.zip_mut_with(&z1, |gv, &zv| {
                if zv <= 0.0 {
                    *gv = 0.0;
                }
            });
            let gw1 = x.t().dot(&gh);
            let gb1 = gh.sum_axis(Axis(0));

            write_slot(&mut grads, s.w1, gw1.as_slice().expect("contiguous"));
            write_slot(&mut grads, s.b1, gb1.as_slice().expect("contiguous"));
            write_slot(
                &mut grads,
                s.w2.unwrap(),
                gw2.as_slice().expect("contiguous"),
            );
            write_slot(
                &mut grads,
                s.b2.unwrap(),
                gb2.as_slice().expect("contiguous"),
            );
        }
    }
    (loss, grads)
}

fn write_slot(grads: &mut ParamVector, range: (usize, usize), data: &[f64]) {
    grads.values_mut()[range.0..range.1].copy_from_slice(data);
}

/// Mean cross-entropy of `params` on `data`, dropout disabled.
pub fn mean_loss(params: &ParamVector, data: &EvalSet) -> Result<f64, LearnError> {
    if data.is_empty() {
        return Err(LearnError::EmptyDataset);
    }
    check_match(params, data)?;
    let (logits, _) = forward(params, &data.features().view(), None);
    Ok(cross_entropy(&logits, data.labels()))
}

/// Fraction of argmax-correct predictions, dropout disabled. Ties resolve to
/// the lowest class index.
pub(crate) fn accuracy(params: &ParamVector, data: &EvalSet) -> Result<f64, LearnError> {
    if data.is_empty() {
        return Err(LearnError::EmptyDataset);
    }
    check_match(params, data)?;
    let (logits, _) = forward(params, &data.features().view(), None);
    let mut correct = 0usize;
    for (row, &label) in logits.axis_iter(Axis(0)).zip(data.labels()) {
        let pred = argmax(&row);
        if pred == label {
            correct += 1;
        }
    }
    Ok(correct as f64 / data.len() as f64)
}

fn argmax(row: &ArrayView1<f64>) -> usize {
    let mut best = 0;
    let mut best_val = row[0];
    for (i, &v) in row.iter().enumerate().skip(1) {
        if v > best_val {
            best = i;
            best_val = v;
        }
    }
    best
}

pub(crate) fn check_match(params: &ParamVector, data: &EvalSet) -> Result<(), LearnError> {
    let spec = params.layout();
    if data.feature_dim() != spec.input_dim() {
        return Err(LearnError::DimensionMismatch {
            found: data.feature_dim(),
            expected: spec.input_dim(),
        });
    }
    data.check_labels(spec.num_classes())
}
