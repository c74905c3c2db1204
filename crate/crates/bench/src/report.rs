use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use fedce_game::PayoffVector;

use crate::metrics::{dist_to_uniform, max_dif, mean, stddev};
use crate::BenchError;

#[derive(Debug, Clone)]
struct PayoffRecord {
    method: String,
    seed: u64,
    client: usize,
    noise_rate: f64,
    raw: f64,
    normalized: f64,
}

/// Derive the report artifacts from a results directory:
/// `metrics_n<k>.csv` (per-method means with stddev side columns),
/// `plot_data.csv` (noise rate vs mean normalized payoff) and a plain-text
/// `summary.txt`.
pub fn emit_report(dir: impl AsRef<Path>) -> Result<(), BenchError> {
    let dir = dir.as_ref();
    let payoffs_path = dir.join("payoffs.csv");
    if !payoffs_path.is_file() {
        return Err(BenchError::MissingResults(dir.display().to_string()));
    }
    let records = read_payoffs(&payoffs_path)?;
    if records.is_empty() {
        return Err(BenchError::MissingResults(format!(
            "{} (payoffs.csv has no rows)",
            dir.display()
        )));
    }
    let accs = read_two_column_map(&dir.join("runs.csv"))?; // seed -> (acc, t_train)
    let timings = read_timings(&dir.join("timings.csv"))?; // (method, seed) -> secs

    let num_clients = records.iter().map(|r| r.client).max().unwrap() + 1;

    // method -> seed -> (client, raw, normalized) rows
    type SeedEntries = BTreeMap<u64, Vec<(usize, f64, f64)>>;
    let mut by_method: BTreeMap<String, SeedEntries> = BTreeMap::new();
    for r in &records {
        by_method
            .entry(r.method.clone())
            .or_default()
            .entry(r.seed)
            .or_default()
            .push((r.client, r.raw, r.normalized));
    }

    let mut metrics = String::from(
        "method,acc_mean,acc_std,max_dif_mean,max_dif_std,dist_mean,dist_std,\
         t_method_mean_secs,t_method_std_secs,t_train_mean_secs,b_mean,b_std\n",
    );
    let mut summary = String::new();
    summary.push_str(&format!("clients: {num_clients}\n"));
    summary.push_str(&format!(
        "{:<14} {:>8} {:>9} {:>8} {:>10} {:>9}\n",
        "method", "acc", "max_dif", "dist", "t_method", "B"
    ));

    for (method, seeds) in &by_method {
        let mut acc_v = Vec::new();
        let mut max_dif_v = Vec::new();
        let mut dist_v = Vec::new();
        let mut t_v = Vec::new();
        let mut t_train_v = Vec::new();
        let mut b_v = Vec::new();
        for (seed, entries) in seeds {
            let mut sorted = entries.clone();
            sorted.sort_by_key(|(client, _, _)| *client);
            let raw: Vec<f64> = sorted.iter().map(|(_, r, _)| *r).collect();
            let normalized: Vec<f64> = sorted.iter().map(|(_, _, n)| *n).collect();
            let norm_vec = PayoffVector::new(normalized);
            max_dif_v.push(max_dif(&norm_vec));
            dist_v.push(dist_to_uniform(&norm_vec));
            b_v.push(raw.iter().sum::<f64>());
            if let Some(&(acc, t_train)) = accs.get(seed) {
                acc_v.push(acc);
                t_train_v.push(t_train);
            }
            if let Some(&secs) = timings.get(&(method.clone(), *seed)) {
                t_v.push(secs);
            }
        }
        let or_zero = |v: &Vec<f64>| if v.is_empty() { 0.0 } else { mean(v) };
        metrics.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            method,
            or_zero(&acc_v),
            stddev(&acc_v),
            mean(&max_dif_v),
            stddev(&max_dif_v),
            mean(&dist_v),
            stddev(&dist_v),
            or_zero(&t_v),
            stddev(&t_v),
            or_zero(&t_train_v),
            mean(&b_v),
            stddev(&b_v),
        ));
        summary.push_str(&format!(
            "{:<14} {:>8.4} {:>9.4} {:>8.4} {:>9.3}s {:>9.3}\n",
            method,
            or_zero(&acc_v),
            mean(&max_dif_v),
            mean(&dist_v),
            or_zero(&t_v),
            mean(&b_v),
        ));
    }
    fs::write(dir.join(format!("metrics_n{num_clients}.csv")), metrics)?;

    // Plot data: mean normalized payoff per (method, client).
    let mut plot = String::from("noise_rate,normalized_payoff,method\n");
    for (method, seeds) in &by_method {
        let mut per_client: BTreeMap<usize, (f64, Vec<f64>)> = BTreeMap::new();
        for entries in seeds.values() {
            for &(client, _, normalized) in entries {
                let rate = records
                    .iter()
                    .find(|r| &r.method == method && r.client == client)
                    .map(|r| r.noise_rate)
                    .unwrap_or(0.0);
                let slot = per_client.entry(client).or_insert((rate, Vec::new()));
                slot.1.push(normalized);
            }
        }
        for (_, (rate, values)) in per_client {
            plot.push_str(&format!("{},{},{}\n", rate, mean(&values), method));
        }
    }
    fs::write(dir.join("plot_data.csv"), plot)?;

    let skipped = fs::read_to_string(dir.join("skipped.csv")).unwrap_or_default();
    let skip_count = skipped.lines().count().saturating_sub(1);
    if skip_count > 0 {
        summary.push_str(&format!(
            "skipped method runs: {skip_count} (see skipped.csv)\n"
        ));
    }
    fs::write(dir.join("summary.txt"), summary)?;
    Ok(())
}

fn read_payoffs(path: &Path) -> Result<Vec<PayoffRecord>, BenchError> {
    let text = fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(BenchError::MalformedResults {
                file: path.display().to_string(),
                detail: format!("line {}: expected 6 fields", idx + 1),
            });
        }
        let parse = |what: &str, s: &str| -> Result<f64, BenchError> {
            s.parse().map_err(|_| BenchError::MalformedResults {
                file: path.display().to_string(),
                detail: format!("line {}: bad {what} {s:?}", idx + 1),
            })
        };
        out.push(PayoffRecord {
            method: fields[0].to_string(),
            seed: fields[1]
                .parse()
                .map_err(|_| BenchError::MalformedResults {
                    file: path.display().to_string(),
                    detail: format!("line {}: bad seed", idx + 1),
                })?,
            client: fields[2]
                .parse()
                .map_err(|_| BenchError::MalformedResults {
                    file: path.display().to_string(),
                    detail: format!("line {}: bad client", idx + 1),
                })?,
            noise_rate: parse("noise rate", fields[3])?,
            raw: parse("raw payoff", fields[4])?,
            normalized: parse("normalized payoff", fields[5])?,
        });
    }
    Ok(out)
}

fn read_two_column_map(path: &Path) -> Result<BTreeMap<u64, (f64, f64)>, BenchError> {
    let mut out = BTreeMap::new();
    let Ok(text) = fs::read_to_string(path) else {
        return Ok(out);
    };
    for line in text.lines().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() == 3 {
            if let (Ok(seed), Ok(acc), Ok(t)) =
                (fields[0].parse(), fields[1].parse(), fields[2].parse())
            {
                out.insert(seed, (acc, t));
            }
        }
    }
    Ok(out)
}

fn read_timings(path: &Path) -> Result<BTreeMap<(String, u64), f64>, BenchError> {
    let mut out = BTreeMap::new();
    let Ok(text) = fs::read_to_string(path) else {
        return Ok(out);
    };
    for line in text.lines().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() == 3 {
            if let (Ok(seed), Ok(secs)) = (fields[1].parse(), fields[2].parse()) {
                out.insert((fields[0].to_string(), seed), secs);
            }
        }
    }
    Ok(out)
}
