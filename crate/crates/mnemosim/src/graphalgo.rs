//! Static-graph machinery for the contact-network pipeline: edge-list
//! ingestion, Girvan–Newman edge betweenness, betweenness-quartile round
//! schedules, Fiedler-vector spectral clustering, and node centralities.

use std::collections::BTreeMap;
use std::io::BufRead;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::net::{CliquePartition, TemporalNetwork};

/// Simple undirected graph: dense node ids, sorted unique edges, no
/// self-loops. `multiplicity` counts how many raw contact events collapsed
/// into each edge (1 for directly constructed graphs).
#[derive(Debug, Clone, PartialEq)]
pub struct StaticGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    multiplicity: Vec<u32>,
    adj: Vec<Vec<usize>>,
}

impl StaticGraph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut norm: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a == b {
                return Err(Error::Invalid(format!("self-loop at node {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::NodeOutOfRange { node: a.max(b), n });
            }
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();
        if norm.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Invalid("duplicate edge".into()));
        }
        let multiplicity = vec![1; norm.len()];
        Ok(Self::assemble(n, norm, multiplicity))
    }

    fn assemble(n: usize, edges: Vec<(usize, usize)>, multiplicity: Vec<u32>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for nbrs in &mut adj {
            nbrs.sort_unstable();
        }
        Self { n, edges, multiplicity, adj }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn multiplicity(&self) -> &[u32] {
        &self.multiplicity
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let key = (a.min(b), a.max(b));
        self.edges.binary_search(&key).is_ok()
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        let key = (a.min(b), a.max(b));
        self.edges.binary_search(&key).ok()
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut comps = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut head = 0;
            while head < comp.len() {
                let v = comp[head];
                head += 1;
                for &w in self.neighbors(v) {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.components().len() == 1
    }
}

/// What edge-list ingestion saw and did.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestStats {
    /// Non-comment, non-blank lines parsed.
    pub contact_events: usize,
    pub self_loops_skipped: usize,
    /// Events beyond the first for an existing pair (collapsed into
    /// multiplicity).
    pub repeated_contacts: usize,
    /// Raw file ids in sorted order; position = compact id.
    pub original_ids: Vec<u64>,
}

/// Reads `src dst [timestamp...]` lines (whitespace separated; `%`/`#`
/// comments skipped), collapses repeated contacts to one edge, drops
/// self-loops, and relabels ids densely in sorted order.
pub fn read_edge_list<R: BufRead>(r: R) -> Result<(StaticGraph, IngestStats)> {
    let mut events: Vec<(u64, u64)> = Vec::new();
    let mut stats = IngestStats::default();
    for (idx, line) in r.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let s = line.trim();
        if s.is_empty() || s.starts_with('%') || s.starts_with('#') {
            continue;
        }
        let mut it = s.split_whitespace();
        let (a, b) = match (it.next(), it.next()) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::Parse { line: lineno, msg: "expected `src dst`".into() }),
        };
        let parse = |tok: &str| {
            tok.parse::<u64>()
                .map_err(|_| Error::Parse { line: lineno, msg: format!("bad node id {tok:?}") })
        };
        let (a, b) = (parse(a)?, parse(b)?);
        stats.contact_events += 1;
        if a == b {
            stats.self_loops_skipped += 1;
            continue;
        }
        events.push((a.min(b), a.max(b)));
    }
    if events.is_empty() {
        return Err(Error::EmptyInput("edge list"));
    }
    let mut ids: Vec<u64> = events.iter().flat_map(|&(a, b)| [a, b]).collect();
    ids.sort_unstable();
    ids.dedup();
    let index: BTreeMap<u64, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut mult: BTreeMap<(usize, usize), u32> = BTreeMap::new();
    for (a, b) in events {
        *mult.entry((index[&a], index[&b])).or_insert(0) += 1;
    }
    let edges: Vec<(usize, usize)> = mult.keys().copied().collect();
    let multiplicity: Vec<u32> = mult.values().copied().collect();
    stats.repeated_contacts = multiplicity.iter().map(|&c| (c - 1) as usize).sum();
    stats.original_ids = ids;
    let n = index.len();
    Ok((StaticGraph::assemble(n, edges, multiplicity), stats))
}

/// Edges with betweenness scores, sorted descending (ties by endpoints).
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeRanking {
    n: usize,
    entries: Vec<((usize, usize), f64)>,
}

impl EdgeRanking {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[((usize, usize), f64)] {
        &self.entries
    }
}

struct BrandesPass {
    order: Vec<usize>,
    sigma: Vec<f64>,
    dist: Vec<i64>,
    /// Predecessors on shortest paths, with the connecting edge index.
    preds: Vec<Vec<(usize, usize)>>,
}

fn brandes_pass(g: &StaticGraph, s: usize) -> BrandesPass {
    let n = g.n();
    let mut dist = vec![-1i64; n];
    let mut sigma = vec![0.0; n];
    let mut preds = vec![Vec::new(); n];
    let mut order = Vec::with_capacity(n);
    dist[s] = 0;
    sigma[s] = 1.0;
    let mut queue = std::collections::VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &w in g.neighbors(v) {
            if dist[w] < 0 {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
            if dist[w] == dist[v] + 1 {
                sigma[w] += sigma[v];
                preds[w].push((v, g.edge_index(v, w).expect("adjacent")));
            }
        }
    }
    BrandesPass { order, sigma, dist, preds }
}

fn edge_scores_from_source(g: &StaticGraph, s: usize) -> Vec<f64> {
    let pass = brandes_pass(g, s);
    let mut delta = vec![0.0; g.n()];
    let mut scores = vec![0.0; g.n_edges()];
    for &w in pass.order.iter().rev() {
        for &(v, ei) in &pass.preds[w] {
            let c = pass.sigma[v] / pass.sigma[w] * (1.0 + delta[w]);
            scores[ei] += c;
            delta[v] += c;
        }
    }
    scores
}

fn sum_over_sources<F>(g: &StaticGraph, len: usize, per_source: F) -> Vec<f64>
where
    F: Fn(usize) -> Vec<f64> + Sync,
{
    // chunked so parallel summation happens in a fixed order regardless of
    // thread count
    let sources: Vec<usize> = (0..g.n()).collect();
    let chunk_sums: Vec<Vec<f64>> = {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            sources
                .par_chunks(16)
                .map(|chunk| {
                    let mut acc = vec![0.0; len];
                    for &s in chunk {
                        for (a, v) in acc.iter_mut().zip(per_source(s)) {
                            *a += v;
                        }
                    }
                    acc
                })
                .collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            sources
                .chunks(16)
                .map(|chunk| {
                    let mut acc = vec![0.0; len];
                    for &s in chunk {
                        for (a, v) in acc.iter_mut().zip(per_source(s)) {
                            *a += v;
                        }
                    }
                    acc
                })
                .collect()
        }
    };
    let mut total = vec![0.0; len];
    for chunk in chunk_sums {
        for (a, v) in total.iter_mut().zip(chunk) {
            *a += v;
        }
    }
    total
}

/// Shortest-path edge betweenness (Girvan–Newman scoring): for each edge,
/// the number of shortest paths over all node pairs that pass through it,
/// with multi-path pairs contributing fractionally.
pub fn edge_betweenness(g: &StaticGraph) -> EdgeRanking {
    let mut scores = sum_over_sources(g, g.n_edges(), |s| edge_scores_from_source(g, s));
    for v in &mut scores {
        *v /= 2.0; // each unordered pair visited from both endpoints
    }
    let mut entries: Vec<((usize, usize), f64)> =
        g.edges().iter().copied().zip(scores).collect();
    entries.sort_by(|(ea, sa), (eb, sb)| sb.total_cmp(sa).then(ea.cmp(eb)));
    EdgeRanking { n: g.n(), entries }
}

/// How ranked edges are laid out over the four conversation rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeOrder {
    /// Highest betweenness first (weak-ties-first analogue).
    Descending,
    /// Descending with the first and last quartile exchanged.
    Ascending,
    /// Seeded shuffle, mixing tie strengths into every round.
    Random(u64),
}

impl EdgeOrder {
    pub fn as_str(&self) -> &'static str {
        match self {
            EdgeOrder::Descending => "descending",
            EdgeOrder::Ascending => "ascending",
            EdgeOrder::Random(_) => "random",
        }
    }
}

impl FromStr for EdgeOrder {
    type Err = Error;

    /// `random` gets seed 0; use `EdgeOrder::Random(seed)` to pick one.
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "desc" | "descending" => Ok(EdgeOrder::Descending),
            "asc" | "ascending" => Ok(EdgeOrder::Ascending),
            "random" | "rand" => Ok(EdgeOrder::Random(0)),
            other => Err(Error::Invalid(format!(
                "unknown edge order {other:?} (expected desc, asc, or random)"
            ))),
        }
    }
}

const N_QUARTILES: usize = 4;

/// Splits the ranking into four consecutive blocks (earlier blocks take the
/// remainder) and builds one round per block.
pub fn quartile_schedule(ranking: &EdgeRanking, order: EdgeOrder) -> Result<TemporalNetwork> {
    let m = ranking.entries.len();
    if m < N_QUARTILES {
        return Err(Error::TooSmall { context: "edges for quartile schedule", min: N_QUARTILES, got: m });
    }
    let mut edges: Vec<(usize, usize)> = ranking.entries.iter().map(|&(e, _)| e).collect();
    if let EdgeOrder::Random(seed) = order {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        edges.shuffle(&mut rng);
    }
    let base = m / N_QUARTILES;
    let rem = m % N_QUARTILES;
    let mut blocks = Vec::with_capacity(N_QUARTILES);
    let mut at = 0;
    for i in 0..N_QUARTILES {
        let size = base + usize::from(i < rem);
        blocks.push(edges[at..at + size].to_vec());
        at += size;
    }
    if order == EdgeOrder::Ascending {
        blocks.swap(0, N_QUARTILES - 1);
    }
    TemporalNetwork::from_round_edges(ranking.n, &blocks)
}

/// How a Fiedler vector becomes a two-way split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SplitRule {
    /// Sweep over the sorted vector, taking the prefix cut with minimum
    /// conductance.
    #[default]
    MinConductance,
    /// Split by coordinate sign; zeros join the smaller side.
    Sign,
}

const FIEDLER_TOL: f64 = 1e-12;
const FIEDLER_MAX_ITERS: usize = 6000;

/// Fiedler vector of a connected subgraph given as local adjacency lists.
/// Power-iterates cI − L_sym on the degree-normalized Laplacian from a fixed
/// start, deflating the trivial D^{1/2}·1 direction, then maps back through
/// D^{-1/2} so the coordinates order nodes for sweep cuts. On regular graphs
/// this coincides with the unnormalized Fiedler vector.
fn fiedler_vector(adj: &[Vec<usize>]) -> Vec<f64> {
    let n = adj.len();
    // eigenvalues of L_sym lie in [0, 2], so cI − L_sym reverses their order
    let c = 3.0;
    let inv_sqrt_deg: Vec<f64> = adj
        .iter()
        .map(|a| if a.is_empty() { 0.0 } else { 1.0 / (a.len() as f64).sqrt() })
        .collect();
    let mut trivial: Vec<f64> = adj.iter().map(|a| (a.len() as f64).sqrt()).collect();
    let tn = trivial.iter().map(|x| x * x).sum::<f64>().sqrt();
    if tn > 0.0 {
        for x in trivial.iter_mut() {
            *x /= tn;
        }
    }
    let project_normalize = |v: &mut [f64]| {
        let dot: f64 = v.iter().zip(&trivial).map(|(a, b)| a * b).sum();
        for (x, t) in v.iter_mut().zip(&trivial) {
            *x -= dot * t;
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            for x in v.iter_mut() {
                *x /= norm;
            }
        }
    };
    let mut v: Vec<f64> = (0..n).map(|i| (1.0 + 0.7 * i as f64).sin()).collect();
    project_normalize(&mut v);
    let mut next = vec![0.0; n];
    for _ in 0..FIEDLER_MAX_ITERS {
        for i in 0..n {
            let nbr: f64 = adj[i].iter().map(|&j| v[j] * inv_sqrt_deg[j]).sum();
            next[i] = (c - 1.0) * v[i] + inv_sqrt_deg[i] * nbr;
        }
        project_normalize(&mut next);
        let drift: f64 = v
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        std::mem::swap(&mut v, &mut next);
        if drift < FIEDLER_TOL {
            break;
        }
    }
    v.iter()
        .zip(&inv_sqrt_deg)
        .map(|(&x, &s)| if s > 0.0 { x * s } else { x })
        .collect()
}

/// Two-way split of local node ids per the rule. Both sides nonempty.
fn bisect(adj: &[Vec<usize>], rule: SplitRule) -> (Vec<usize>, Vec<usize>) {
    let n = adj.len();
    let v = fiedler_vector(adj);
    match rule {
        SplitRule::Sign => {
            let mut a: Vec<usize> = (0..n).filter(|&i| v[i] > 0.0).collect();
            let mut b: Vec<usize> = (0..n).filter(|&i| v[i] < 0.0).collect();
            let zeros: Vec<usize> = (0..n).filter(|&i| v[i] == 0.0).collect();
            if a.len() <= b.len() {
                a.extend(zeros);
            } else {
                b.extend(zeros);
            }
            a.sort_unstable();
            b.sort_unstable();
            if a.is_empty() || b.is_empty() {
                // degenerate vector; fall back to a balanced order split
                let mut idx: Vec<usize> = (0..n).collect();
                idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]).then(i.cmp(&j)));
                let (lo, hi) = idx.split_at(n / 2);
                return (lo.to_vec(), hi.to_vec());
            }
            (a, b)
        }
        SplitRule::MinConductance => {
            let mut idx: Vec<usize> = (0..n).collect();
            idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]).then(i.cmp(&j)));
            let deg: Vec<f64> = adj.iter().map(|a| a.len() as f64).collect();
            let vol_total: f64 = deg.iter().sum();
            let mut in_prefix = vec![false; n];
            let mut vol = 0.0;
            let mut cut = 0.0;
            let mut best: Option<(f64, usize, usize)> = None; // (phi, imbalance, size)
            for (pos, &u) in idx.iter().enumerate().take(n - 1) {
                let into_prefix = adj[u].iter().filter(|&&w| in_prefix[w]).count() as f64;
                cut += deg[u] - 2.0 * into_prefix;
                vol += deg[u];
                in_prefix[u] = true;
                let denom = vol.min(vol_total - vol);
                if denom <= 0.0 {
                    continue;
                }
                let phi = cut / denom;
                let size = pos + 1;
                let imbalance = size.abs_diff(n / 2);
                let cand = (phi, imbalance, size);
                let better = match best {
                    None => true,
                    Some((bp, bi, bs)) => {
                        phi < bp - 1e-15
                            || ((phi - bp).abs() <= 1e-15 && (imbalance, size) < (bi, bs))
                    }
                };
                if better {
                    best = Some(cand);
                }
            }
            let size = match best {
                Some((_, _, s)) => s,
                None => n / 2, // all-isolated fallback
            };
            let (lo, hi) = idx.split_at(size);
            let mut a = lo.to_vec();
            let mut b = hi.to_vec();
            a.sort_unstable();
            b.sort_unstable();
            (a, b)
        }
    }
}

/// Allocates `k` cluster slots across groups proportionally to size, at
/// least one each, capped by group size. Assumes `groups.len() <= k` and
/// `k <=` total size.
fn allocate_slots(sizes: &[usize], k: usize) -> Vec<usize> {
    let total: usize = sizes.iter().sum();
    let mut slots: Vec<usize> = sizes
        .iter()
        .map(|&s| ((k * s + total / 2) / total).clamp(1, s))
        .collect();
    // repair the rounded total toward exactly k, respecting the caps
    loop {
        let assigned: usize = slots.iter().sum();
        if assigned == k {
            break;
        }
        if assigned < k {
            // biggest shortfall vs proportional share gets the extra
            let i = (0..sizes.len())
                .filter(|&i| slots[i] < sizes[i])
                .max_by(|&a, &b| {
                    let da = k as f64 * sizes[a] as f64 / total as f64 - slots[a] as f64;
                    let db = k as f64 * sizes[b] as f64 / total as f64 - slots[b] as f64;
                    da.total_cmp(&db).then(b.cmp(&a))
                })
                .expect("k <= total size");
            slots[i] += 1;
        } else {
            let i = (0..sizes.len())
                .filter(|&i| slots[i] > 1)
                .max_by(|&a, &b| {
                    let da = slots[a] as f64 - k as f64 * sizes[a] as f64 / total as f64;
                    let db = slots[b] as f64 - k as f64 * sizes[b] as f64 / total as f64;
                    da.total_cmp(&db).then(b.cmp(&a))
                })
                .expect("each group needs >= 1");
            slots[i] -= 1;
        }
    }
    slots
}

fn split_into_clusters(
    g: &StaticGraph,
    nodes: Vec<usize>,
    k: usize,
    rule: SplitRule,
    out: &mut Vec<Vec<usize>>,
) {
    if k <= 1 || nodes.len() <= 1 {
        out.push(nodes);
        return;
    }
    // local induced subgraph
    let local_of: BTreeMap<usize, usize> =
        nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let adj: Vec<Vec<usize>> = nodes
        .iter()
        .map(|&v| {
            g.neighbors(v)
                .iter()
                .filter_map(|w| local_of.get(w).copied())
                .collect()
        })
        .collect();
    // components first: a zero eigenvalue per extra component makes the
    // Fiedler vector meaningless across them
    let comps = {
        let mut seen = vec![false; nodes.len()];
        let mut comps: Vec<Vec<usize>> = Vec::new();
        for start in 0..nodes.len() {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut head = 0;
            while head < comp.len() {
                let v = comp[head];
                head += 1;
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    };
    let groups: Vec<Vec<usize>> = if comps.len() > 1 {
        if comps.len() > k {
            // more components than clusters: greedily pack components
            // (largest first) into the currently smallest bucket
            let mut order: Vec<usize> = (0..comps.len()).collect();
            order.sort_by_key(|&i| (usize::MAX - comps[i].len(), comps[i][0]));
            let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); k];
            for ci in order {
                let target = (0..k).min_by_key(|&b| (buckets[b].len(), b)).unwrap();
                buckets[target].extend(&comps[ci]);
            }
            for b in &mut buckets {
                b.sort_unstable();
            }
            for bucket in buckets {
                let global: Vec<usize> = bucket.iter().map(|&i| nodes[i]).collect();
                out.push(global);
            }
            return;
        }
        comps
    } else {
        let (a, b) = bisect(&adj, rule);
        vec![a, b]
    };
    let sizes: Vec<usize> = groups.iter().map(Vec::len).collect();
    let slots = allocate_slots(&sizes, k);
    for (group, k_sub) in groups.into_iter().zip(slots) {
        let global: Vec<usize> = group.into_iter().map(|i| nodes[i]).collect();
        split_into_clusters(g, global, k_sub, rule, out);
    }
}

/// Recursive spectral clustering into `k` clusters using the default
/// minimum-conductance sweep split.
pub fn spectral_clusters(g: &StaticGraph, k: usize) -> Result<CliquePartition> {
    spectral_clusters_with(g, k, SplitRule::default())
}

/// Same with an explicit split rule. Cluster ids are ordered by smallest
/// member node; cluster adjacency is derived from the graph's edges.
pub fn spectral_clusters_with(
    g: &StaticGraph,
    k: usize,
    rule: SplitRule,
) -> Result<CliquePartition> {
    if k == 0 {
        return Err(Error::TooSmall { context: "cluster count", min: 1, got: 0 });
    }
    if k > g.n() {
        return Err(Error::TooLarge { context: "cluster count", got: k, limit: g.n() });
    }
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    split_into_clusters(g, (0..g.n()).collect(), k, rule, &mut clusters);
    clusters.sort_by_key(|c| c[0]);
    let mut assignment = vec![0usize; g.n()];
    for (ci, members) in clusters.iter().enumerate() {
        for &v in members {
            assignment[v] = ci;
        }
    }
    let adjacency: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .filter_map(|&(a, b)| {
            let (ca, cb) = (assignment[a], assignment[b]);
            (ca != cb).then(|| (ca.min(cb), ca.max(cb)))
        })
        .collect();
    CliquePartition::new(assignment, adjacency)
}

/// Four standard per-node centrality measures.
#[derive(Debug, Clone, PartialEq)]
pub struct Centralities {
    pub degree: Vec<f64>,
    /// Classic closeness (n−1)/Σd on connected graphs; harmonic Σ1/d
    /// otherwise.
    pub closeness: Vec<f64>,
    pub betweenness: Vec<f64>,
    pub eigenvector: Vec<f64>,
    pub connected: bool,
}

fn node_scores_from_source(g: &StaticGraph, s: usize) -> Vec<f64> {
    let pass = brandes_pass(g, s);
    let mut delta = vec![0.0; g.n()];
    let mut scores = vec![0.0; g.n()];
    for &w in pass.order.iter().rev() {
        for &(v, _) in &pass.preds[w] {
            delta[v] += pass.sigma[v] / pass.sigma[w] * (1.0 + delta[w]);
        }
        if w != s {
            scores[w] = delta[w];
        }
    }
    scores
}

const EIGEN_TOL: f64 = 1e-12;
const EIGEN_MAX_ITERS: usize = 100_000;

fn eigenvector_centrality(g: &StaticGraph) -> Vec<f64> {
    let n = g.n();
    if g.n_edges() == 0 {
        return vec![0.0; n];
    }
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut next = vec![0.0; n];
    for _ in 0..EIGEN_MAX_ITERS {
        for (i, slot) in next.iter_mut().enumerate() {
            *slot = g.neighbors(i).iter().map(|&j| v[j]).sum();
        }
        let norm = next.iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in next.iter_mut() {
            *x /= norm;
        }
        let drift: f64 = v
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        std::mem::swap(&mut v, &mut next);
        if drift < EIGEN_TOL {
            break;
        }
    }
    v
}

/// Degree, closeness, node betweenness, and eigenvector centrality.
pub fn centralities(g: &StaticGraph) -> Centralities {
    let n = g.n();
    let connected = g.is_connected();
    let degree: Vec<f64> = (0..n).map(|v| g.degree(v) as f64).collect();
    let mut closeness = vec![0.0; n];
    for (s, out) in closeness.iter_mut().enumerate() {
        let pass = brandes_pass(g, s);
        if connected {
            let total: i64 = pass.dist.iter().sum();
            if total > 0 {
                *out = (n as f64 - 1.0) / total as f64;
            }
        } else {
            *out = pass
                .dist
                .iter()
                .enumerate()
                .filter(|&(t, &d)| t != s && d > 0)
                .map(|(_, &d)| 1.0 / d as f64)
                .sum();
        }
    }
    let mut betweenness = sum_over_sources(g, n, |s| node_scores_from_source(g, s));
    for v in &mut betweenness {
        *v /= 2.0;
    }
    Centralities { degree, closeness, betweenness, eigenvector: eigenvector_centrality(g), connected }
}

/// Random graph with planted blocks: nodes grouped consecutively by
/// `sizes`, each within-block pair linked with probability `p_in`, each
/// cross-block pair with `p_out`. Returns the graph and the true block of
/// each node.
pub fn random_block_graph(
    sizes: &[usize],
    p_in: f64,
    p_out: f64,
    seed: u64,
) -> Result<(StaticGraph, Vec<usize>)> {
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(Error::EmptyInput("block sizes"));
    }
    for (name, p) in [("p_in", p_in), ("p_out", p_out)] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::ParamOutOfRange { name, value: p, bounds: "[0, 1]" });
        }
    }
    let n: usize = sizes.iter().sum();
    let truth: Vec<usize> = sizes
        .iter()
        .enumerate()
        .flat_map(|(b, &s)| std::iter::repeat_n(b, s))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let p = if truth[i] == truth[j] { p_in } else { p_out };
            if rand::Rng::random::<f64>(&mut rng) < p {
                edges.push((i, j));
            }
        }
    }
    Ok((StaticGraph::new(n, &edges)?, truth))
}
