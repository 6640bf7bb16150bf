//! Agent-based replication of the four-phase conversation experiment:
//! study, individual pre-recall, four conversation rounds on the 16-node
//! schedule, individual post-recall.
//!
//! Memory is a per-item strength in [0,1]. Conversations boost what was
//! mentioned and decay what was not, the minimal mechanism for practice
//! strengthening and suppression of unmentioned material. The update rule
//! lives behind `simulate_conversation`, so alternative memory models can
//! replace it without touching the experiment driver.

use std::fs;
use std::io::Write as IoWrite;
use std::path::Path;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{
    clique_level_similarity, indices_by_round, mnemonic_convergence, similarity_matrix,
    ConversationRecord, RecallMatrix, RecallVector,
};
use crate::net::{build_experiment_network, Condition, EXPERIMENT_ROUNDS};
use crate::stats::{mean, sample_sd};

pub const DEFAULT_N_ITEMS: usize = 30;

/// Per-item memory strengths of one agent.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentMemory {
    strength: Vec<f64>,
}

impl AgentMemory {
    pub fn new(strength: Vec<f64>) -> Result<Self> {
        for &s in &strength {
            if !(0.0..=1.0).contains(&s) {
                return Err(Error::ParamOutOfRange { name: "strength", value: s, bounds: "[0, 1]" });
            }
        }
        Ok(Self { strength })
    }

    pub fn zeros(n_items: usize) -> Self {
        Self { strength: vec![0.0; n_items] }
    }

    pub fn strengths(&self) -> &[f64] {
        &self.strength
    }

    pub fn n_items(&self) -> usize {
        self.strength.len()
    }
}

/// Knobs of the agent model. Serialized as the JSON config file; unknown
/// fields are rejected so typos surface as errors naming the field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    pub n_items: usize,
    /// Probability an item is encoded at study.
    pub p_encode: f64,
    /// Floor recall probability for any item with nonzero strength.
    pub p_recall_base: f64,
    /// Strength increment for mentioned items (clamped at 1).
    pub boost: f64,
    /// Multiplicative strength decay for unmentioned nonzero items.
    pub decay: f64,
    /// Most items a single conversation can cover.
    pub capacity: usize,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n_items: DEFAULT_N_ITEMS,
            p_encode: 0.8,
            p_recall_base: 0.05,
            boost: 0.3,
            decay: 0.8,
            capacity: 10,
            seed: 0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_items == 0 {
            return Err(Error::TooSmall { context: "n_items", min: 1, got: 0 });
        }
        for (name, v) in [("p_encode", self.p_encode), ("p_recall_base", self.p_recall_base)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::ParamOutOfRange { name, value: v, bounds: "[0, 1]" });
            }
        }
        if !(0.0..=1.0).contains(&self.boost) {
            return Err(Error::ParamOutOfRange { name: "boost", value: self.boost, bounds: "[0, 1]" });
        }
        if !(self.decay > 0.0 && self.decay <= 1.0) {
            return Err(Error::ParamOutOfRange { name: "decay", value: self.decay, bounds: "(0, 1]" });
        }
        if self.capacity == 0 {
            return Err(Error::TooSmall { context: "capacity", min: 1, got: 0 });
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: SimConfig =
            serde_json::from_str(s).map_err(|e| Error::Invalid(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// Everything one run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub condition: Condition,
    pub seed: u64,
    pub pre: RecallMatrix,
    pub post: RecallMatrix,
    pub records: Vec<ConversationRecord>,
}

/// Chance an item with this strength surfaces in an individual recall.
pub fn recall_probability(strength: f64, config: &SimConfig) -> f64 {
    if strength <= 0.0 {
        0.0
    } else {
        (config.p_recall_base + strength * (1.0 - config.p_recall_base)).min(1.0)
    }
}

/// Study phase: each item is independently encoded with probability
/// `p_encode`; encoded items start at a uniform strength in (0.5, 1].
pub fn init_agents(n_agents: usize, config: &SimConfig, rng: &mut impl Rng) -> Vec<AgentMemory> {
    (0..n_agents)
        .map(|_| {
            let strength = (0..config.n_items)
                .map(|_| {
                    if rng.random::<f64>() < config.p_encode {
                        1.0 - 0.5 * rng.random::<f64>()
                    } else {
                        0.0
                    }
                })
                .collect();
            AgentMemory { strength }
        })
        .collect()
}

/// Phase 2/4: probabilistic readout of one agent's memory.
pub fn individual_recall(mem: &AgentMemory, config: &SimConfig, rng: &mut impl Rng) -> RecallVector {
    let bits = mem
        .strength
        .iter()
        .map(|&s| u8::from(rng.random::<f64>() < recall_probability(s, config)))
        .collect();
    RecallVector::new(bits).expect("bits are 0/1")
}

/// One conversation: both partners nominate items via individual recall; the
/// union, truncated to `capacity` by highest combined strength (ties to the
/// lower item index), is mentioned. Mentioned items are boosted for both
/// partners; unmentioned nonzero items decay.
pub fn simulate_conversation(
    round: usize,
    pair: (usize, usize),
    a: &mut AgentMemory,
    b: &mut AgentMemory,
    config: &SimConfig,
    rng: &mut impl Rng,
) -> ConversationRecord {
    let nominated_a = individual_recall(a, config, rng);
    let nominated_b = individual_recall(b, config, rng);
    let mut union: Vec<usize> = (0..config.n_items)
        .filter(|&i| nominated_a.get(i) || nominated_b.get(i))
        .collect();
    if union.len() > config.capacity {
        union.sort_by(|&i, &j| {
            let ci = a.strength[i] + b.strength[i];
            let cj = a.strength[j] + b.strength[j];
            cj.total_cmp(&ci).then(i.cmp(&j))
        });
        union.truncate(config.capacity);
        union.sort_unstable();
    }
    let mentioned = RecallVector::from_items(config.n_items, &union).expect("indices in range");
    for agent in [a, b] {
        for (i, s) in agent.strength.iter_mut().enumerate() {
            if mentioned.get(i) {
                *s = (*s + config.boost).min(1.0);
            } else if *s > 0.0 {
                *s *= config.decay;
            }
        }
    }
    ConversationRecord { round, pair, mentioned }
}

// Independent streams per phase so inserting draws in one phase cannot
// perturb another; derived from a single master seed for reproducibility.
fn phase_rngs(seed: u64) -> [ChaCha8Rng; 4] {
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    [(); 4].map(|_| ChaCha8Rng::seed_from_u64(master.next_u64()))
}

/// Runs the full four-phase experiment for one condition at `config.seed`.
pub fn run_experiment(condition: Condition, config: &SimConfig) -> Result<SimResult> {
    run_experiment_seeded(condition, config, config.seed)
}

/// Same, with the seed supplied explicitly (used for paired replications).
pub fn run_experiment_seeded(
    condition: Condition,
    config: &SimConfig,
    seed: u64,
) -> Result<SimResult> {
    config.validate()?;
    let (tn, _) = build_experiment_network(condition);
    let [mut rng_init, mut rng_pre, mut rng_conv, mut rng_post] = phase_rngs(seed);
    let mut agents = init_agents(tn.n(), config, &mut rng_init);
    let pre = RecallMatrix::new(
        agents.iter().map(|m| individual_recall(m, config, &mut rng_pre)).collect(),
    )?;
    let mut records = Vec::with_capacity(EXPERIMENT_ROUNDS * tn.n() / 2);
    for t in 0..tn.n_rounds() {
        for (i, j) in tn.round_pairs(t) {
            debug_assert!(i < j);
            let (left, right) = agents.split_at_mut(j);
            records.push(simulate_conversation(
                t,
                (i, j),
                &mut left[i],
                &mut right[0],
                config,
                &mut rng_conv,
            ));
        }
    }
    let post = RecallMatrix::new(
        agents.iter().map(|m| individual_recall(m, config, &mut rng_post)).collect(),
    )?;
    Ok(SimResult { condition, seed, pre, post, records })
}

/// Per-seed outcome metrics of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedRow {
    pub condition: Condition,
    pub seed: u64,
    pub convergence_increase: f64,
    pub within_increase: f64,
    /// Neighboring-clique pairs that never converse directly.
    pub neighboring_increase: f64,
    pub distant_increase: f64,
    pub overlap_by_round: Vec<f64>,
    pub diversity_by_round: Vec<f64>,
}

/// Computes the outcome metrics of a finished run.
pub fn seed_row(result: &SimResult) -> Result<SeedRow> {
    let (tn, partition) = build_experiment_network(result.condition);
    let pre_sim = similarity_matrix(&result.pre);
    let post_sim = similarity_matrix(&result.post);
    let pre_cat = clique_level_similarity(&pre_sim, &partition, Some(&tn))?;
    let post_cat = clique_level_similarity(&post_sim, &partition, Some(&tn))?;
    let delta = |post: Option<f64>, pre: Option<f64>| {
        post.expect("nonempty category") - pre.expect("nonempty category")
    };
    let indices = indices_by_round(&result.records, &partition)?;
    Ok(SeedRow {
        condition: result.condition,
        seed: result.seed,
        convergence_increase: mnemonic_convergence(&post_sim)? - mnemonic_convergence(&pre_sim)?,
        within_increase: delta(post_cat.within, pre_cat.within),
        neighboring_increase: delta(post_cat.neighboring, pre_cat.neighboring),
        distant_increase: delta(post_cat.distant, pre_cat.distant),
        overlap_by_round: indices.iter().map(|r| r.mean_overlap).collect(),
        diversity_by_round: indices.iter().map(|r| r.mean_diversity).collect(),
    })
}

/// Mean/SD summary of one condition across replications.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionSummary {
    pub condition: Condition,
    pub n_reps: usize,
    pub mean_convergence_increase: f64,
    pub sd_convergence_increase: f64,
    pub mean_within_increase: f64,
    pub sd_within_increase: f64,
    pub mean_neighboring_increase: f64,
    pub sd_neighboring_increase: f64,
    pub mean_distant_increase: f64,
    pub sd_distant_increase: f64,
    pub mean_overlap_by_round: Vec<f64>,
    pub mean_diversity_by_round: Vec<f64>,
}

/// Per-seed rows plus per-condition summaries.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationTable {
    pub rows: Vec<SeedRow>,
    pub summaries: Vec<ConditionSummary>,
}

/// Runs `n_reps` paired replications per condition. Replication `i` of every
/// condition uses seed `config.seed + i`, so rows align by seed for paired
/// comparisons, and each replication is independent of execution order.
pub fn replicate(
    conditions: &[Condition],
    n_reps: usize,
    config: &SimConfig,
) -> Result<ReplicationTable> {
    if n_reps == 0 {
        return Err(Error::TooSmall { context: "n_reps", min: 1, got: 0 });
    }
    if conditions.is_empty() {
        return Err(Error::EmptyInput("conditions"));
    }
    config.validate()?;
    let mut rows = Vec::with_capacity(conditions.len() * n_reps);
    for &condition in conditions {
        for rep in 0..n_reps as u64 {
            let result = run_experiment_seeded(condition, config, config.seed + rep)?;
            rows.push(seed_row(&result)?);
        }
    }
    let summaries = conditions
        .iter()
        .map(|&condition| {
            let cond_rows: Vec<&SeedRow> = rows.iter().filter(|r| r.condition == condition).collect();
            let col = |f: fn(&SeedRow) -> f64| -> Vec<f64> { cond_rows.iter().map(|r| f(r)).collect() };
            let ci = col(|r| r.convergence_increase);
            let wi = col(|r| r.within_increase);
            let ni = col(|r| r.neighboring_increase);
            let di = col(|r| r.distant_increase);
            let m = |v: &[f64]| mean(v).expect("n_reps >= 1");
            // SD undefined for a single replication
            let sd = |v: &[f64]| sample_sd(v).unwrap_or(f64::NAN);
            let round_mean = |pick: fn(&SeedRow) -> &Vec<f64>| -> Vec<f64> {
                (0..EXPERIMENT_ROUNDS)
                    .map(|t| m(&cond_rows.iter().map(|r| pick(r)[t]).collect::<Vec<f64>>()))
                    .collect()
            };
            ConditionSummary {
                condition,
                n_reps: cond_rows.len(),
                mean_convergence_increase: m(&ci),
                sd_convergence_increase: sd(&ci),
                mean_within_increase: m(&wi),
                sd_within_increase: sd(&wi),
                mean_neighboring_increase: m(&ni),
                sd_neighboring_increase: sd(&ni),
                mean_distant_increase: m(&di),
                sd_distant_increase: sd(&di),
                mean_overlap_by_round: round_mean(|r| &r.overlap_by_round),
                mean_diversity_by_round: round_mean(|r| &r.diversity_by_round),
            }
        })
        .collect();
    Ok(ReplicationTable { rows, summaries })
}

fn round_cols(prefix: &str) -> String {
    (0..EXPERIMENT_ROUNDS).map(|t| format!(",{prefix}_round{t}")).collect()
}

/// Per-seed CSV: one row per (condition, seed).
pub fn write_seed_rows_csv<W: IoWrite>(w: &mut W, rows: &[SeedRow]) -> Result<()> {
    writeln!(
        w,
        "condition,seed,convergence_increase,within_increase,neighboring_increase,distant_increase{}{}",
        round_cols("overlap"),
        round_cols("diversity"),
    )?;
    for r in rows {
        let rounds: String = r
            .overlap_by_round
            .iter()
            .chain(&r.diversity_by_round)
            .map(|v| format!(",{v}"))
            .collect();
        writeln!(
            w,
            "{},{},{},{},{},{}{rounds}",
            r.condition.as_str(),
            r.seed,
            r.convergence_increase,
            r.within_increase,
            r.neighboring_increase,
            r.distant_increase,
        )?;
    }
    Ok(())
}

/// Summary CSV: one row per condition.
pub fn write_summary_csv<W: IoWrite>(w: &mut W, summaries: &[ConditionSummary]) -> Result<()> {
    writeln!(
        w,
        "condition,n_reps,mean_convergence_increase,sd_convergence_increase,\
         mean_within_increase,sd_within_increase,mean_neighboring_increase,sd_neighboring_increase,\
         mean_distant_increase,sd_distant_increase{}{}",
        round_cols("mean_overlap"),
        round_cols("mean_diversity"),
    )?;
    for s in summaries {
        let rounds: String = s
            .mean_overlap_by_round
            .iter()
            .chain(&s.mean_diversity_by_round)
            .map(|v| format!(",{v}"))
            .collect();
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}{rounds}",
            s.condition.as_str(),
            s.n_reps,
            s.mean_convergence_increase,
            s.sd_convergence_increase,
            s.mean_within_increase,
            s.sd_within_increase,
            s.mean_neighboring_increase,
            s.sd_neighboring_increase,
            s.mean_distant_increase,
            s.sd_distant_increase,
        )?;
    }
    Ok(())
}

/// Writes `pre.csv`, `post.csv`, and `records.csv` for one run.
pub fn write_result_bundle(result: &SimResult, dir: &Path) -> Result<Vec<std::path::PathBuf>> {
    fs::create_dir_all(dir)?;
    let pre_path = dir.join("pre.csv");
    let post_path = dir.join("post.csv");
    let records_path = dir.join("records.csv");
    let mut buf = Vec::new();
    result.pre.write_csv(&mut buf)?;
    fs::write(&pre_path, &buf)?;
    buf.clear();
    result.post.write_csv(&mut buf)?;
    fs::write(&post_path, &buf)?;
    buf.clear();
    let n_items = result.pre.n_items();
    let item_cols: String = (0..n_items).map(|i| format!(",item{i}")).collect();
    writeln!(buf, "round,node_a,node_b{item_cols}")?;
    for rec in &result.records {
        let bits: String = rec.mentioned.bits().iter().map(|b| format!(",{b}")).collect();
        writeln!(buf, "{},{},{}{bits}", rec.round, rec.pair.0, rec.pair.1)?;
    }
    fs::write(&records_path, &buf)?;
    Ok(vec![pre_path, post_path, records_path])
}
