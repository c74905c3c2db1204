//! Round-log directory format: a `manifest.json` plus one parameter
//! checkpoint per artifact. Checkpoints use the f32 format of
//! [`ParamVector::to_bytes`], so a reloaded run matches the in-memory one to
//! f32 precision.
//!
//! Layout:
//! - `manifest.json` — model spec, client ids/sizes, per-round accuracies
//! - `init.fpv` — shared initialization (global model before round 1)
//! - `round_<t>_global.fpv` — global model after round `t`
//! - `round_<t>_client_<id>.fpv` — client `id`'s update delta in round `t`

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use fedce_game::Coalition;
use fedce_learn::{ModelSpec, ParamVector};

use crate::{RoundLog, SimError};

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    model: ModelSpec,
    clients: Vec<ClientMeta>,
    rounds: Vec<RoundMeta>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ClientMeta {
    id: usize,
    size: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct RoundMeta {
    t: usize,
    test_acc_after: f64,
}

pub fn dump_round_logs(dir: impl AsRef<Path>, logs: &[RoundLog]) -> Result<(), SimError> {
    let dir = dir.as_ref();
    if logs.is_empty() {
        return Err(SimError::Manifest("no rounds to dump".into()));
    }
    fs::create_dir_all(dir)?;

    let first = &logs[0];
    let manifest = Manifest {
        model: first.global_before.layout(),
        clients: first
            .sizes
            .iter()
            .map(|(&id, &size)| ClientMeta { id, size })
            .collect(),
        rounds: logs
            .iter()
            .map(|log| RoundMeta {
                t: log.t,
                test_acc_after: log.test_acc_after,
            })
            .collect(),
    };
    let manifest_json =
        serde_json::to_string_pretty(&manifest).map_err(|e| SimError::Manifest(e.to_string()))?;
    fs::write(dir.join("manifest.json"), manifest_json)?;

    fs::write(dir.join("init.fpv"), first.global_before.to_bytes())?;
    for log in logs {
        fs::write(
            dir.join(format!("round_{}_global.fpv", log.t)),
            log.global_after.to_bytes(),
        )?;
        for (id, delta) in &log.local_updates {
            fs::write(
                dir.join(format!("round_{}_client_{}.fpv", log.t, id)),
                delta.to_bytes(),
            )?;
        }
    }
    Ok(())
}

pub fn load_round_logs(dir: impl AsRef<Path>) -> Result<Vec<RoundLog>, SimError> {
    let dir = dir.as_ref();
    let manifest_text = fs::read_to_string(dir.join("manifest.json"))?;
    let manifest: Manifest =
        serde_json::from_str(&manifest_text).map_err(|e| SimError::Manifest(e.to_string()))?;
    if manifest.rounds.is_empty() {
        return Err(SimError::Manifest("manifest lists no rounds".into()));
    }

    let read_params = |name: String| -> Result<ParamVector, SimError> {
        let bytes = fs::read(dir.join(&name))?;
        Ok(ParamVector::from_bytes(&bytes)?)
    };

    let n = manifest.clients.len();
    let participants = Coalition::grand(n);
    let sizes: BTreeMap<usize, usize> = manifest.clients.iter().map(|c| (c.id, c.size)).collect();

    let mut before = read_params("init.fpv".into())?;
    let mut logs = Vec::with_capacity(manifest.rounds.len());
    for round in &manifest.rounds {
        let mut local_updates = BTreeMap::new();
        for client in &manifest.clients {
            let delta = read_params(format!("round_{}_client_{}.fpv", round.t, client.id))?;
            local_updates.insert(client.id, delta);
        }
        let global_after = read_params(format!("round_{}_global.fpv", round.t))?;
        logs.push(RoundLog {
            t: round.t,
            global_before: before.clone(),
            local_updates,
            participants,
            sizes: sizes.clone(),
            global_after: global_after.clone(),
            test_acc_after: round.test_acc_after,
        });
        before = global_after;
    }
    Ok(logs)
}
