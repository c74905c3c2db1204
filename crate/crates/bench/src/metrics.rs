use fedce_game::PayoffVector;

/// Payoffs normalized for cross-method comparison: negatives clipped to
/// zero, then scaled to sum to one. When nothing positive remains the
/// uniform split is substituted and flagged.
#[derive(Debug, Clone)]
pub struct NormalizedPayoffs {
    pub values: PayoffVector,
    /// True when the raw vector had no positive mass and the uniform
    /// fallback was used.
    pub degenerate: bool,
}

pub fn normalize_payoffs(raw: &PayoffVector) -> NormalizedPayoffs {
    let n = raw.len();
    let clipped: Vec<f64> = raw.iter().map(|v| v.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if total <= 0.0 {
        return NormalizedPayoffs {
            values: PayoffVector::new(vec![1.0 / n as f64; n]),
            degenerate: true,
        };
    }
    NormalizedPayoffs {
        values: PayoffVector::new(clipped.iter().map(|v| v / total).collect()),
        degenerate: false,
    }
}

/// Largest pairwise gap of a payoff vector (its max minus its min).
pub fn max_dif(payoff: &PayoffVector) -> f64 {
    let max = payoff.iter().fold(f64::NEG_INFINITY, f64::max);
    let min = payoff.iter().fold(f64::INFINITY, f64::min);
    max - min
}

/// Euclidean distance from the uniform split.
pub fn dist_to_uniform(payoff: &PayoffVector) -> f64 {
    let n = payoff.len() as f64;
    payoff
        .iter()
        .map(|v| {
            let d = v - 1.0 / n;
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 2, "correlation needs at least two points");
    let rx = ranks(x);
    let ry = ranks(y);
    pearson(&rx, &ry)
}

fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // Tied block i..=j shares the average rank (1-based).
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            out[idx] = avg;
        }
        i = j + 1;
    }
    out
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (a, b) in x.iter().zip(y) {
        cov += (a - mx) * (b - my);
        vx += (a - mx) * (a - mx);
        vy += (b - my) * (b - my);
    }
    if vx == 0.0 || vy == 0.0 {
        return 0.0;
    }
    cov / (vx * vy).sqrt()
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub(crate) fn stddev(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    let var = values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() - 1) as f64;
    var.sqrt()
}
