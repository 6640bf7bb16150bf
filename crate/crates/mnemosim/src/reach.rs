//! The reachability engine: how much one node's conversational recall can
//! influence another's through time-respecting paths, together with a
//! brute-force walk-enumeration oracle and per-node influence trajectories.
//!
//! For rounds A_1..A_r the score matrix is
//!
//! ```text
//! C = Σ_{t=1..r} (1−λ)^{r−t} · A_t
//!   + Σ_{t=1..r−1} Σ_{k=t+1..r} w(t,k) · (A_t · A_{t+1} · ⋯ · A_k)
//! ```
//!
//! with the practice weight `w(t,k) = γ^{k−1}` depending only on the terminal
//! round of the path window (see [`GammaWeighting`] for the alternative
//! reading that multiplies a γ^k factor per round).

use std::io::{BufRead, Write};

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::net::{CliquePartition, TemporalNetwork};

/// Recency rate λ and practice rate γ, both in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub lambda: f64,
    pub gamma: f64,
}

impl ModelParams {
    pub fn new(lambda: f64, gamma: f64) -> Result<Self> {
        for (name, v) in [("lambda", lambda), ("gamma", gamma)] {
            if !(0.0..=1.0).contains(&v) || v.is_nan() {
                return Err(Error::ParamOutOfRange {
                    name: if name == "lambda" { "lambda" } else { "gamma" },
                    value: v,
                    bounds: "in [0, 1]",
                });
            }
        }
        Ok(Self { lambda, gamma })
    }
}

impl Default for ModelParams {
    /// The operating point used for all schedule predictions.
    fn default() -> Self {
        Self { lambda: 1.0, gamma: 0.5 }
    }
}

/// How the practice factor weights a path over rounds t..k.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GammaWeighting {
    /// γ^{k−1}: decay depends only on the terminal round of the window. This
    /// reproduces the intended term-by-term expansion of the model and is the
    /// default.
    #[default]
    TerminalRound,
    /// γ^{k·(k−t+1)}: one γ^k factor per matrix in the product, the reading a
    /// literal parse of the formula suggests. Kept for comparison.
    LiteralProduct,
}

fn practice_weight(gamma: f64, t: usize, k: usize, weighting: GammaWeighting) -> f64 {
    match weighting {
        GammaWeighting::TerminalRound => gamma.powi((k - 1) as i32),
        GammaWeighting::LiteralProduct => gamma.powi((k * (k - t + 1)) as i32),
    }
}

/// Dense node×node score matrix; rows are sources, columns targets. Not
/// symmetric in general: temporal order breaks symmetry of influence.
#[derive(Debug, Clone, PartialEq)]
pub struct ReachabilityMatrix {
    pub c: Array2<f64>,
    pub params: ModelParams,
    pub r: usize,
}

impl ReachabilityMatrix {
    pub fn n(&self) -> usize {
        self.c.nrows()
    }
}

/// Computes the score matrix with the default terminal-round weighting.
pub fn mnemonic_reachability(tn: &TemporalNetwork, params: ModelParams) -> ReachabilityMatrix {
    mnemonic_reachability_with(tn, params, GammaWeighting::TerminalRound)
}

pub fn mnemonic_reachability_with(
    tn: &TemporalNetwork,
    params: ModelParams,
    weighting: GammaWeighting,
) -> ReachabilityMatrix {
    let n = tn.n();
    let r = tn.n_rounds();
    let mut c = Array2::<f64>::zeros((n, n));
    // direct term: recency-weighted single rounds
    for t in 1..=r {
        let w = (1.0 - params.lambda).powi((r - t) as i32);
        if w != 0.0 {
            c.scaled_add(w, tn.round(t - 1));
        }
    }
    // path term: products over consecutive round windows
    for t in 1..r {
        let mut prod = tn.round(t - 1).clone();
        for k in (t + 1)..=r {
            prod = prod.dot(tn.round(k - 1));
            let w = practice_weight(params.gamma, t, k, weighting);
            if w != 0.0 {
                c.scaled_add(w, &prod);
            }
        }
    }
    ReachabilityMatrix { c, params, r }
}

/// Size guard for the brute-force oracle.
#[derive(Debug, Clone, Copy)]
pub struct BruteForceLimit {
    pub max_nodes: usize,
    pub max_rounds: usize,
}

impl Default for BruteForceLimit {
    fn default() -> Self {
        Self { max_nodes: 16, max_rounds: 6 }
    }
}

/// Restates the model by explicit enumeration: every walk that uses exactly
/// one edge from each round of a consecutive window [t, k] contributes the
/// practice weight for that window, and every single edge contributes its
/// recency weight. Intended as an oracle for small networks.
pub fn reachability_bruteforce(tn: &TemporalNetwork, params: ModelParams) -> Result<ReachabilityMatrix> {
    reachability_bruteforce_with(tn, params, GammaWeighting::TerminalRound, BruteForceLimit::default())
}

pub fn reachability_bruteforce_with(
    tn: &TemporalNetwork,
    params: ModelParams,
    weighting: GammaWeighting,
    limit: BruteForceLimit,
) -> Result<ReachabilityMatrix> {
    let n = tn.n();
    let r = tn.n_rounds();
    if n > limit.max_nodes {
        return Err(Error::TooLarge { context: "brute-force reachability (nodes)", got: n, limit: limit.max_nodes });
    }
    if r > limit.max_rounds {
        return Err(Error::TooLarge { context: "brute-force reachability (rounds)", got: r, limit: limit.max_rounds });
    }
    let mut c = Array2::<f64>::zeros((n, n));
    for t in 1..=r {
        let w = (1.0 - params.lambda).powi((r - t) as i32);
        let a = tn.round(t - 1);
        for i in 0..n {
            for j in 0..n {
                if a[[i, j]] != 0.0 {
                    c[[i, j]] += w;
                }
            }
        }
    }
    // walks through consecutive windows [t, k], one edge per round
    for t in 1..r {
        for k in (t + 1)..=r {
            let w = practice_weight(params.gamma, t, k, weighting);
            for start in 0..n {
                let mut frontier = vec![0u64; n]; // walk counts per current node
                frontier[start] = 1;
                for s in t..=k {
                    let a = tn.round(s - 1);
                    let mut next = vec![0u64; n];
                    for (cur, &cnt) in frontier.iter().enumerate() {
                        if cnt == 0 {
                            continue;
                        }
                        for j in 0..n {
                            if a[[cur, j]] != 0.0 {
                                next[j] += cnt;
                            }
                        }
                    }
                    frontier = next;
                }
                for (end, &cnt) in frontier.iter().enumerate() {
                    if cnt > 0 {
                        c[[start, end]] += w * cnt as f64;
                    }
                }
            }
        }
    }
    Ok(ReachabilityMatrix { c, params, r })
}

/// Influence of and to a node after each round: entry t holds the row and
/// column sums of the score matrix computed over rounds 1..=t+1 only.
pub fn influence_trajectory(
    tn: &TemporalNetwork,
    params: ModelParams,
    node: usize,
) -> Result<Vec<(f64, f64)>> {
    if node >= tn.n() {
        return Err(Error::NodeOutOfRange { node, n: tn.n() });
    }
    let mut out = Vec::with_capacity(tn.n_rounds());
    for t in 1..=tn.n_rounds() {
        let prefix = tn.prefix(t)?;
        let rm = mnemonic_reachability(&prefix, params);
        let out_influence = rm.c.row(node).sum();
        let in_influence = rm.c.column(node).sum();
        out.push((out_influence, in_influence));
    }
    Ok(out)
}

/// Category means of a score matrix over ordered node pairs (i ≠ j).
/// `within`/`neighboring`/`distant` are `None` when the partition has no
/// pairs in that category.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReachAggregates {
    pub overall: f64,
    pub within: Option<f64>,
    pub neighboring: Option<f64>,
    pub distant: Option<f64>,
}

fn aggregate_impl(
    rm: &ReachabilityMatrix,
    partition: &CliquePartition,
    exclude_contacts: Option<&TemporalNetwork>,
) -> Result<ReachAggregates> {
    let n = rm.n();
    if n < 2 {
        return Err(Error::TooSmall { context: "aggregate over node pairs", min: 2, got: n });
    }
    if partition.n_nodes() != n {
        return Err(Error::DimensionMismatch { context: "partition vs matrix", expected: n, got: partition.n_nodes() });
    }
    if let Some(tn) = exclude_contacts {
        if tn.n() != n {
            return Err(Error::DimensionMismatch { context: "network vs matrix", expected: n, got: tn.n() });
        }
    }
    let mut sums = [0.0f64; 4]; // overall, within, neighboring, distant
    let mut counts = [0usize; 4];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let v = rm.c[[i, j]];
            sums[0] += v;
            counts[0] += 1;
            let (ci, cj) = (partition.cluster_of(i), partition.cluster_of(j));
            let cat = if ci == cj {
                1
            } else if partition.neighboring(ci, cj) {
                if let Some(tn) = exclude_contacts {
                    if tn.ever_interact(i, j) {
                        continue; // directly interacting cross-clique pair
                    }
                }
                2
            } else {
                3
            };
            sums[cat] += v;
            counts[cat] += 1;
        }
    }
    let cat = |idx: usize| {
        if counts[idx] == 0 { None } else { Some(sums[idx] / counts[idx] as f64) }
    };
    Ok(ReachAggregates {
        overall: sums[0] / counts[0] as f64,
        within: cat(1),
        neighboring: cat(2),
        distant: cat(3),
    })
}

/// Category means over all ordered pairs.
pub fn aggregate_reachability(
    rm: &ReachabilityMatrix,
    partition: &CliquePartition,
) -> Result<ReachAggregates> {
    aggregate_impl(rm, partition, None)
}

/// Same, but the neighboring-clique mean is restricted to pairs that never
/// converse directly in `tn`, the convention used when comparing against
/// similarity categories, which are defined over non-interacting pairs.
pub fn aggregate_reachability_noninteracting(
    rm: &ReachabilityMatrix,
    partition: &CliquePartition,
    tn: &TemporalNetwork,
) -> Result<ReachAggregates> {
    aggregate_impl(rm, partition, Some(tn))
}

/// CSV export: one comment header carrying the run parameters, then the
/// matrix rows. f64 Display is shortest-round-trip, so values survive
/// re-parsing bit-exactly.
pub fn write_reachability_csv<W: Write>(w: &mut W, rm: &ReachabilityMatrix) -> Result<()> {
    writeln!(
        w,
        "# n={},r={},lambda={},gamma={}",
        rm.n(),
        rm.r,
        rm.params.lambda,
        rm.params.gamma
    )?;
    for i in 0..rm.n() {
        let row: Vec<String> = (0..rm.n()).map(|j| rm.c[[i, j]].to_string()).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

/// Reads a square numeric matrix from CSV, skipping `#`/`%` comment lines.
pub fn read_matrix_csv<R: BufRead>(r: R) -> Result<Array2<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in r.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let s = line.trim();
        if s.is_empty() || s.starts_with('#') || s.starts_with('%') {
            continue;
        }
        let row: Vec<f64> = s
            .split(',')
            .map(|f| {
                f.trim().parse().map_err(|_| Error::Parse {
                    line: lineno,
                    msg: format!("expected number, got {f:?}"),
                })
            })
            .collect::<Result<_>>()?;
        rows.push(row);
    }
    let n = rows.len();
    if n == 0 {
        return Err(Error::EmptyInput("matrix CSV"));
    }
    let mut m = Array2::zeros((n, n));
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::DimensionMismatch { context: "matrix CSV row", expected: n, got: row.len() });
        }
        for (j, &v) in row.iter().enumerate() {
            m[[i, j]] = v;
        }
    }
    Ok(m)
}
