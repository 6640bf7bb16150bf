//! JSON-over-strings bindings for the browser demo. Each export takes plain
//! arguments, runs one library operation, and returns a JSON payload the page
//! renders; errors surface as JS exceptions carrying the library message.
//!
//! The crate also builds natively so the payload shapes stay under `cargo
//! test` on the host toolchain.

use std::str::FromStr;

use serde_json::json;
use wasm_bindgen::prelude::*;

use mnemosim::agentsim::seed_row;
use mnemosim::reach::{aggregate_reachability, aggregate_reachability_noninteracting};
use mnemosim::{
    build_experiment_network, mnemonic_reachability, run_experiment_seeded, Condition, ModelParams,
    SimConfig,
};

fn condition(name: &str) -> Result<Condition, String> {
    Condition::from_str(name).map_err(|e| e.to_string())
}

/// Static description of one experiment network: per-round conversation
/// pairs plus the clique layout, for drawing.
#[wasm_bindgen]
pub fn network_json(condition_name: &str) -> Result<String, String> {
    let (tn, partition) = build_experiment_network(condition(condition_name)?);
    let rounds: Vec<Vec<(usize, usize)>> = (0..tn.n_rounds()).map(|t| tn.round_pairs(t)).collect();
    Ok(json!({
        "condition": condition_name,
        "n": tn.n(),
        "rounds": rounds,
        "clusters": partition.clusters(),
    })
    .to_string())
}

/// Reachability matrix and category means for one condition at the given
/// model parameters.
#[wasm_bindgen]
pub fn reachability_json(condition_name: &str, lambda: f64, gamma: f64) -> Result<String, String> {
    let (tn, partition) = build_experiment_network(condition(condition_name)?);
    let params = ModelParams::new(lambda, gamma).map_err(|e| e.to_string())?;
    let rm = mnemonic_reachability(&tn, params);
    let plain = aggregate_reachability(&rm, &partition).map_err(|e| e.to_string())?;
    let noninteracting =
        aggregate_reachability_noninteracting(&rm, &partition, &tn).map_err(|e| e.to_string())?;
    let matrix: Vec<Vec<f64>> = rm.c.rows().into_iter().map(|row| row.to_vec()).collect();
    Ok(json!({
        "condition": condition_name,
        "lambda": lambda,
        "gamma": gamma,
        "matrix": matrix,
        "aggregates": {
            "overall": plain.overall,
            "within": plain.within,
            "neighboring": plain.neighboring,
            "neighboring_noninteracting": noninteracting.neighboring,
            "distant": plain.distant,
        },
    })
    .to_string())
}

/// One agent-model run at the default configuration: memory dynamics per
/// round plus the pre-to-post similarity changes.
#[wasm_bindgen]
pub fn simulate_json(condition_name: &str, seed: u32) -> Result<String, String> {
    let config = SimConfig::default();
    let result = run_experiment_seeded(condition(condition_name)?, &config, u64::from(seed))
        .map_err(|e| e.to_string())?;
    let row = seed_row(&result).map_err(|e| e.to_string())?;
    Ok(json!({
        "condition": condition_name,
        "seed": seed,
        "n_items": config.n_items,
        "overlap_by_round": row.overlap_by_round,
        "diversity_by_round": row.diversity_by_round,
        "convergence_increase": row.convergence_increase,
        "within_increase": row.within_increase,
        "neighboring_increase": row.neighboring_increase,
        "distant_increase": row.distant_increase,
    })
    .to_string())
}
