//! Temporal conversation networks: per-round adjacency matrices over a fixed
//! node set, the 16-node four-clique experiment topology, and the plain-text
//! serialization format shared with external datasets.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{BufRead, Write};

use ndarray::Array2;

use crate::error::{Error, Result};

/// Experimental condition: whether the cross-clique round runs first or last.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Condition {
    WeakTiesFirst,
    StrongTiesFirst,
}

impl Condition {
    pub fn as_str(&self) -> &'static str {
        match self {
            Condition::WeakTiesFirst => "weak-first",
            Condition::StrongTiesFirst => "strong-first",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Condition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weak-first" | "weak-ties-first" | "wtf" => Ok(Condition::WeakTiesFirst),
            "strong-first" | "strong-ties-first" | "stf" => Ok(Condition::StrongTiesFirst),
            other => Err(Error::Invalid(format!(
                "unknown condition {other:?} (expected weak-first or strong-first)"
            ))),
        }
    }
}

/// A set of disjoint unordered node pairs conversing simultaneously.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundMatching {
    pairs: Vec<(usize, usize)>,
}

impl RoundMatching {
    /// Normalizes pairs to (low, high) sorted order; rejects self-pairs and
    /// nodes appearing twice.
    pub fn new(pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut norm: Vec<(usize, usize)> = Vec::new();
        let mut seen = BTreeSet::new();
        for (a, b) in pairs {
            if a == b {
                return Err(Error::Invalid(format!("self-pair ({a},{b}) in matching")));
            }
            for node in [a, b] {
                if !seen.insert(node) {
                    return Err(Error::Invalid(format!(
                        "node {node} appears in more than one pair of a matching"
                    )));
                }
            }
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();
        Ok(Self { pairs: norm })
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }
}

/// Ordered sequence of symmetric 0/1 adjacency matrices on a shared node set.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalNetwork {
    n: usize,
    rounds: Vec<Array2<f64>>,
}

impl TemporalNetwork {
    /// Builds from raw matrices and validates shape, symmetry, zero diagonal,
    /// and binary entries.
    pub fn from_rounds(rounds: Vec<Array2<f64>>) -> Result<Self> {
        let tn = Self::from_rounds_unchecked(rounds)?;
        let diags = validate(&tn, ValidationMode::Basic);
        if let Some(d) = diags.first() {
            return Err(Error::Invalid(d.to_string()));
        }
        Ok(tn)
    }

    /// Builds without structural validation (the matrices must still agree on
    /// dimension). Useful for constructing inputs for `validate`.
    pub fn from_rounds_unchecked(rounds: Vec<Array2<f64>>) -> Result<Self> {
        let first = rounds.first().ok_or(Error::EmptyInput("temporal network needs >= 1 round"))?;
        let n = first.nrows();
        for (t, a) in rounds.iter().enumerate() {
            if a.nrows() != n || a.ncols() != n {
                return Err(Error::DimensionMismatch {
                    context: "round matrix",
                    expected: n,
                    got: if a.nrows() != n { a.nrows() } else { a.ncols() },
                });
            }
            let _ = t;
        }
        Ok(Self { n, rounds })
    }

    /// Builds each round from an edge list; entries outside [0, n) error.
    pub fn from_round_edges(n: usize, rounds: &[Vec<(usize, usize)>]) -> Result<Self> {
        if rounds.is_empty() {
            return Err(Error::EmptyInput("temporal network needs >= 1 round"));
        }
        let mut mats = Vec::with_capacity(rounds.len());
        for pairs in rounds {
            let mut a = Array2::zeros((n, n));
            for &(i, j) in pairs {
                if i >= n || j >= n {
                    return Err(Error::NodeOutOfRange { node: i.max(j), n });
                }
                if i == j {
                    return Err(Error::Invalid(format!("self-loop on node {i}")));
                }
                a[[i, j]] = 1.0;
                a[[j, i]] = 1.0;
            }
            mats.push(a);
        }
        Self::from_rounds(mats)
    }

    pub fn from_matchings(n: usize, matchings: &[RoundMatching]) -> Result<Self> {
        let rounds: Vec<Vec<(usize, usize)>> =
            matchings.iter().map(|m| m.pairs().to_vec()).collect();
        Self::from_round_edges(n, &rounds)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_rounds(&self) -> usize {
        self.rounds.len()
    }

    pub fn round(&self, t: usize) -> &Array2<f64> {
        &self.rounds[t]
    }

    pub fn rounds(&self) -> &[Array2<f64>] {
        &self.rounds
    }

    /// The network restricted to rounds `0..t` (t >= 1).
    pub fn prefix(&self, t: usize) -> Result<TemporalNetwork> {
        if t == 0 || t > self.rounds.len() {
            return Err(Error::Invalid(format!(
                "prefix length {t} outside 1..={}",
                self.rounds.len()
            )));
        }
        Ok(TemporalNetwork {
            n: self.n,
            rounds: self.rounds[..t].to_vec(),
        })
    }

    /// Edges of round `t` as unordered (low, high) pairs in sorted order.
    pub fn round_pairs(&self, t: usize) -> Vec<(usize, usize)> {
        let a = &self.rounds[t];
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if a[[i, j]] != 0.0 {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// True if nodes `i` and `j` converse in any round.
    pub fn ever_interact(&self, i: usize, j: usize) -> bool {
        self.rounds.iter().any(|a| a[[i, j]] != 0.0)
    }

    /// Entrywise OR of all round matrices.
    pub fn static_union(&self) -> Array2<f64> {
        let mut u = Array2::zeros((self.n, self.n));
        for a in &self.rounds {
            for ((i, j), &v) in a.indexed_iter() {
                if v != 0.0 {
                    u[[i, j]] = 1.0;
                }
            }
        }
        u
    }

    /// Writes the plain-text format: header `n r`, then `round src dst` lines
    /// (0-based) sorted by round and endpoints.
    pub fn write_text<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "{} {}", self.n, self.rounds.len())?;
        for t in 0..self.rounds.len() {
            for (i, j) in self.round_pairs(t) {
                writeln!(w, "{t} {i} {j}")?;
            }
        }
        Ok(())
    }

    /// Parses the plain-text format, reporting the offending line on error.
    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate();
        let (mut n, mut n_rounds) = (0usize, 0usize);
        let mut header_seen = false;
        let mut edges: Vec<Vec<(usize, usize)>> = Vec::new();
        for (idx, line) in &mut lines {
            let lineno = idx + 1;
            let line = line?;
            let s = line.trim();
            if s.is_empty() || s.starts_with('#') || s.starts_with('%') {
                continue;
            }
            let fields: Vec<&str> = s.split_whitespace().collect();
            let parse = |f: &str| -> Result<usize> {
                f.parse().map_err(|_| Error::Parse {
                    line: lineno,
                    msg: format!("expected integer, got {f:?}"),
                })
            };
            if !header_seen {
                if fields.len() != 2 {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("expected header `n r`, got {s:?}"),
                    });
                }
                n = parse(fields[0])?;
                n_rounds = parse(fields[1])?;
                if n_rounds == 0 {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: "round count must be >= 1".into(),
                    });
                }
                edges = vec![Vec::new(); n_rounds];
                header_seen = true;
                continue;
            }
            if fields.len() != 3 {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("expected `round src dst`, got {s:?}"),
                });
            }
            let (t, i, j) = (parse(fields[0])?, parse(fields[1])?, parse(fields[2])?);
            if t >= n_rounds {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("round {t} out of range (r = {n_rounds})"),
                });
            }
            if i >= n || j >= n {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("node out of range (n = {n})"),
                });
            }
            if i == j {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("self-loop on node {i}"),
                });
            }
            edges[t].push((i, j));
        }
        if !header_seen {
            return Err(Error::EmptyInput("temporal network file"));
        }
        Self::from_round_edges(n, &edges)
    }
}

/// Node-to-cluster assignment plus which cluster pairs touch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliquePartition {
    assignment: Vec<usize>,
    n_clusters: usize,
    adjacency: BTreeSet<(usize, usize)>,
}

impl CliquePartition {
    /// `assignment[v]` is the cluster of node v; ids must be dense 0..k.
    /// `adjacency` holds unordered cluster pairs considered neighboring.
    pub fn new(
        assignment: Vec<usize>,
        adjacency: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        if assignment.is_empty() {
            return Err(Error::EmptyInput("partition assignment"));
        }
        let n_clusters = assignment.iter().max().unwrap() + 1;
        let mut used = vec![false; n_clusters];
        for &c in &assignment {
            used[c] = true;
        }
        if used.iter().any(|u| !u) {
            return Err(Error::Invalid("cluster ids must be dense 0..k".into()));
        }
        let mut adj = BTreeSet::new();
        for (a, b) in adjacency {
            if a == b {
                return Err(Error::Invalid(format!("cluster {a} marked adjacent to itself")));
            }
            if a >= n_clusters || b >= n_clusters {
                return Err(Error::Invalid(format!(
                    "cluster pair ({a},{b}) out of range for k = {n_clusters}"
                )));
            }
            adj.insert((a.min(b), a.max(b)));
        }
        Ok(Self {
            assignment,
            n_clusters,
            adjacency: adj,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.assignment.len()
    }

    pub fn n_clusters(&self) -> usize {
        self.n_clusters
    }

    pub fn cluster_of(&self, node: usize) -> usize {
        self.assignment[node]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn adjacency(&self) -> &BTreeSet<(usize, usize)> {
        &self.adjacency
    }

    pub fn neighboring(&self, a: usize, b: usize) -> bool {
        a != b && self.adjacency.contains(&(a.min(b), a.max(b)))
    }

    /// Members of each cluster, sorted by node id.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_clusters];
        for (v, &c) in self.assignment.iter().enumerate() {
            out[c].push(v);
        }
        out
    }

    /// Sidecar text format: header `n k`, then `node cluster` lines, then
    /// `adj ci cj` lines.
    pub fn write_text<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "{} {}", self.assignment.len(), self.n_clusters)?;
        for (v, &c) in self.assignment.iter().enumerate() {
            writeln!(w, "{v} {c}")?;
        }
        for &(a, b) in &self.adjacency {
            writeln!(w, "adj {a} {b}")?;
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let mut assignment: Vec<Option<usize>> = Vec::new();
        let mut adjacency = Vec::new();
        let mut header: Option<(usize, usize)> = None;
        for (idx, line) in r.lines().enumerate() {
            let lineno = idx + 1;
            let line = line?;
            let s = line.trim();
            if s.is_empty() || s.starts_with('#') || s.starts_with('%') {
                continue;
            }
            let fields: Vec<&str> = s.split_whitespace().collect();
            let parse = |f: &str| -> Result<usize> {
                f.parse().map_err(|_| Error::Parse {
                    line: lineno,
                    msg: format!("expected integer, got {f:?}"),
                })
            };
            match header {
                None => {
                    if fields.len() != 2 {
                        return Err(Error::Parse {
                            line: lineno,
                            msg: format!("expected header `n k`, got {s:?}"),
                        });
                    }
                    let n = parse(fields[0])?;
                    header = Some((n, parse(fields[1])?));
                    assignment = vec![None; n];
                }
                Some((n, _k)) => {
                    if fields[0] == "adj" {
                        if fields.len() != 3 {
                            return Err(Error::Parse {
                                line: lineno,
                                msg: "expected `adj ci cj`".into(),
                            });
                        }
                        adjacency.push((parse(fields[1])?, parse(fields[2])?));
                    } else {
                        if fields.len() != 2 {
                            return Err(Error::Parse {
                                line: lineno,
                                msg: format!("expected `node cluster`, got {s:?}"),
                            });
                        }
                        let v = parse(fields[0])?;
                        if v >= n {
                            return Err(Error::Parse {
                                line: lineno,
                                msg: format!("node {v} out of range (n = {n})"),
                            });
                        }
                        assignment[v] = Some(parse(fields[1])?);
                    }
                }
            }
        }
        let (n, _) = header.ok_or(Error::EmptyInput("partition file"))?;
        let assignment: Vec<usize> = assignment
            .into_iter()
            .enumerate()
            .map(|(v, c)| {
                c.ok_or_else(|| Error::Invalid(format!("node {v} missing from partition (n = {n})")))
            })
            .collect::<Result<_>>()?;
        Self::new(assignment, adjacency)
    }
}

/// The fixed experiment topology: 16 nodes in four 4-cliques arranged in a
/// ring, with one cross-clique conversation per node.
///
/// Cliques: a = {0..3}, b = {4..7}, c = {8..11}, d = {12..15}. The ring makes
/// a–b, b–c, c–d, d–a neighboring and a–c, b–d distant. Each clique
/// contributes two members to each adjacent clique's cross pairing.
pub const EXPERIMENT_N: usize = 16;
pub const EXPERIMENT_ROUNDS: usize = 4;

const WEAK_PAIRS: [(usize, usize); 8] = [
    (0, 4),
    (1, 5),
    (6, 8),
    (7, 9),
    (10, 12),
    (11, 13),
    (14, 2),
    (15, 3),
];

fn within_clique_matchings() -> [RoundMatching; 3] {
    let mut m1 = Vec::new();
    let mut m2 = Vec::new();
    let mut m3 = Vec::new();
    for base in [0usize, 4, 8, 12] {
        m1.extend([(base, base + 1), (base + 2, base + 3)]);
        m2.extend([(base, base + 2), (base + 1, base + 3)]);
        m3.extend([(base, base + 3), (base + 1, base + 2)]);
    }
    [
        RoundMatching::new(m1).unwrap(),
        RoundMatching::new(m2).unwrap(),
        RoundMatching::new(m3).unwrap(),
    ]
}

/// The four matchings used by both schedules, in the weak-ties-first order:
/// cross-clique pairing first, then the three within-clique matchings.
pub fn experiment_matchings() -> [RoundMatching; 4] {
    let [m1, m2, m3] = within_clique_matchings();
    let weak = RoundMatching::new(WEAK_PAIRS).unwrap();
    [weak, m1, m2, m3]
}

/// Builds the 16-node, 4-round schedule for a condition together with the
/// clique partition and its ring adjacency.
pub fn build_experiment_network(condition: Condition) -> (TemporalNetwork, CliquePartition) {
    let [weak, m1, m2, m3] = experiment_matchings();
    let order = match condition {
        Condition::WeakTiesFirst => [weak, m1, m2, m3],
        Condition::StrongTiesFirst => [m1, m2, m3, weak],
    };
    let tn = TemporalNetwork::from_matchings(EXPERIMENT_N, &order).unwrap();
    let partition = experiment_partition();
    (tn, partition)
}

/// The clique assignment and ring adjacency of the experiment topology.
pub fn experiment_partition() -> CliquePartition {
    let assignment: Vec<usize> = (0..EXPERIMENT_N).map(|v| v / 4).collect();
    CliquePartition::new(assignment, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap()
}

/// What `validate` checks: `Basic` structural soundness, or additionally the
/// schedule rules of the lab design (perfect matching per round, no repeated
/// partner across rounds).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidationMode {
    Basic,
    Experiment,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Diagnostic {
    Asymmetric { round: usize, i: usize, j: usize },
    SelfLoop { round: usize, node: usize },
    NonBinaryEntry { round: usize, i: usize, j: usize, value: f64 },
    NotAMatching { round: usize, node: usize, partners: usize },
    RepeatedPair { i: usize, j: usize, first_round: usize, repeat_round: usize },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::Asymmetric { round, i, j } => {
                write!(f, "round {round}: entry ({i},{j}) not symmetric")
            }
            Diagnostic::SelfLoop { round, node } => {
                write!(f, "round {round}: self-loop on node {node}")
            }
            Diagnostic::NonBinaryEntry { round, i, j, value } => {
                write!(f, "round {round}: entry ({i},{j}) = {value} is not 0/1")
            }
            Diagnostic::NotAMatching { round, node, partners } => {
                write!(f, "round {round}: node {node} has {partners} partners (matching expects <= 1)")
            }
            Diagnostic::RepeatedPair { i, j, first_round, repeat_round } => {
                write!(f, "pair ({i},{j}) repeats in rounds {first_round} and {repeat_round}")
            }
        }
    }
}

/// Structural diagnostics; never aborts. Empty output means the network is
/// well-formed (for the requested mode).
pub fn validate(tn: &TemporalNetwork, mode: ValidationMode) -> Vec<Diagnostic> {
    let n = tn.n();
    let mut out = Vec::new();
    for (t, a) in tn.rounds().iter().enumerate() {
        for i in 0..n {
            if a[[i, i]] != 0.0 {
                out.push(Diagnostic::SelfLoop { round: t, node: i });
            }
            for j in (i + 1)..n {
                let (x, y) = (a[[i, j]], a[[j, i]]);
                if x != y {
                    out.push(Diagnostic::Asymmetric { round: t, i, j });
                }
                if x != 0.0 && x != 1.0 {
                    out.push(Diagnostic::NonBinaryEntry { round: t, i, j, value: x });
                }
            }
        }
    }
    if mode == ValidationMode::Experiment {
        for (t, a) in tn.rounds().iter().enumerate() {
            for i in 0..n {
                let partners = (0..n).filter(|&j| j != i && a[[i, j]] != 0.0).count();
                if partners > 1 {
                    out.push(Diagnostic::NotAMatching { round: t, node: i, partners });
                }
            }
        }
        let mut first_seen: std::collections::BTreeMap<(usize, usize), usize> =
            std::collections::BTreeMap::new();
        for t in 0..tn.n_rounds() {
            for (i, j) in tn.round_pairs(t) {
                match first_seen.get(&(i, j)) {
                    Some(&t0) => out.push(Diagnostic::RepeatedPair {
                        i,
                        j,
                        first_round: t0,
                        repeat_round: t,
                    }),
                    None => {
                        first_seen.insert((i, j), t);
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weak_first_round_one_pairs_across_cliques() {
        let (tn, _) = build_experiment_network(Condition::WeakTiesFirst);
        let r1 = tn.round_pairs(0);
        assert!(r1.contains(&(0, 4)));
        // rounds 2-4 pair node 0 only with its clique
        for t in 1..4 {
            for (i, j) in tn.round_pairs(t) {
                if i == 0 || j == 0 {
                    let partner = if i == 0 { j } else { i };
                    assert!((1..=3).contains(&partner), "round {t} pairs 0 with {partner}");
                }
            }
        }
    }

    #[test]
    fn strong_first_is_weak_first_rotated() {
        let (w, _) = build_experiment_network(Condition::WeakTiesFirst);
        let (s, _) = build_experiment_network(Condition::StrongTiesFirst);
        assert_eq!(w.round(0), s.round(3));
        assert_eq!(w.round(1), s.round(0));
        assert_eq!(w.round(2), s.round(1));
        assert_eq!(w.round(3), s.round(2));
    }

    #[test]
    fn union_is_degree_four_with_32_edges() {
        for cond in [Condition::WeakTiesFirst, Condition::StrongTiesFirst] {
            let (tn, _) = build_experiment_network(cond);
            let u = tn.static_union();
            let mut edges = 0;
            for i in 0..16 {
                let deg: f64 = (0..16).map(|j| u[[i, j]]).sum();
                assert_eq!(deg, 4.0, "node {i}");
                edges += deg as usize;
            }
            assert_eq!(edges / 2, 32);
        }
    }

    #[test]
    fn experiment_schedule_validates_clean() {
        for cond in [Condition::WeakTiesFirst, Condition::StrongTiesFirst] {
            let (tn, _) = build_experiment_network(cond);
            assert!(validate(&tn, ValidationMode::Experiment).is_empty());
        }
    }

    #[test]
    fn validate_flags_self_loop_and_asymmetry() {
        let mut a = Array2::zeros((3, 3));
        a[[0, 0]] = 1.0;
        a[[1, 2]] = 1.0; // asymmetric on purpose
        let tn = TemporalNetwork::from_rounds_unchecked(vec![a]).unwrap();
        let diags = validate(&tn, ValidationMode::Basic);
        assert!(diags.iter().any(|d| matches!(d, Diagnostic::SelfLoop { node: 0, .. })));
        assert!(diags.iter().any(|d| matches!(d, Diagnostic::Asymmetric { i: 1, j: 2, .. })));
    }

    #[test]
    fn validate_flags_repeated_pair_in_experiment_mode() {
        let rounds = vec![vec![(0, 1)], vec![(0, 1)]];
        let tn = TemporalNetwork::from_round_edges(4, &rounds).unwrap();
        assert!(validate(&tn, ValidationMode::Basic).is_empty());
        let diags = validate(&tn, ValidationMode::Experiment);
        assert!(diags
            .iter()
            .any(|d| matches!(d, Diagnostic::RepeatedPair { i: 0, j: 1, .. })));
    }

    #[test]
    fn matching_rejects_reused_node() {
        assert!(RoundMatching::new([(0, 1), (1, 2)]).is_err());
        assert!(RoundMatching::new([(2, 2)]).is_err());
    }

    #[test]
    fn text_roundtrip() {
        let (tn, _) = build_experiment_network(Condition::WeakTiesFirst);
        let mut buf = Vec::new();
        tn.write_text(&mut buf).unwrap();
        let back = TemporalNetwork::read_text(&buf[..]).unwrap();
        assert_eq!(tn, back);
    }

    #[test]
    fn read_text_reports_line_numbers() {
        let bad = "16 4\n0 0 99\n";
        match TemporalNetwork::read_text(bad.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn partition_roundtrip_and_relations() {
        let p = experiment_partition();
        assert_eq!(p.n_clusters(), 4);
        assert!(p.neighboring(0, 1));
        assert!(p.neighboring(3, 0));
        assert!(!p.neighboring(0, 2));
        assert!(!p.neighboring(1, 3));
        let mut buf = Vec::new();
        p.write_text(&mut buf).unwrap();
        let back = CliquePartition::read_text(&buf[..]).unwrap();
        assert_eq!(p, back);
    }
}
