//! Recall vectors, pairwise similarity, network convergence, and the
//! per-clique overlap/diversity indices computed from conversation records.

use std::io::{BufRead, Write};

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::net::{CliquePartition, TemporalNetwork};

/// Binary per-item memory vector: 1 = the item is present/recalled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecallVector {
    bits: Vec<u8>,
}

impl RecallVector {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(&b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::Invalid(format!("recall entries must be 0/1, got {b}")));
        }
        Ok(Self { bits })
    }

    pub fn zeros(len: usize) -> Self {
        Self { bits: vec![0; len] }
    }

    pub fn from_items(len: usize, items: &[usize]) -> Result<Self> {
        let mut bits = vec![0u8; len];
        for &i in items {
            if i >= len {
                return Err(Error::Invalid(format!("item {i} out of range (len {len})")));
            }
            bits[i] = 1;
        }
        Ok(Self { bits })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i] != 0
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b != 0).count()
    }
}

/// One recall vector per participant, uniform length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecallMatrix {
    rows: Vec<RecallVector>,
}

impl RecallMatrix {
    pub fn new(rows: Vec<RecallVector>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyInput("recall matrix"));
        }
        let len = rows[0].len();
        for r in &rows {
            if r.len() != len {
                return Err(Error::DimensionMismatch { context: "recall vector length", expected: len, got: r.len() });
            }
        }
        Ok(Self { rows })
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_items(&self) -> usize {
        self.rows[0].len()
    }

    pub fn row(&self, i: usize) -> &RecallVector {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[RecallVector] {
        &self.rows
    }

    /// CSV of 0/1 entries, one row per participant.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        for row in &self.rows {
            let cells: Vec<String> = row.bits().iter().map(|b| b.to_string()).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut rows = Vec::new();
        for (idx, line) in r.lines().enumerate() {
            let lineno = idx + 1;
            let line = line?;
            let s = line.trim();
            if s.is_empty() || s.starts_with('#') || s.starts_with('%') {
                continue;
            }
            let bits: Vec<u8> = s
                .split(',')
                .map(|f| match f.trim() {
                    "0" => Ok(0u8),
                    "1" => Ok(1u8),
                    other => Err(Error::Parse { line: lineno, msg: format!("expected 0/1, got {other:?}") }),
                })
                .collect::<Result<_>>()?;
            rows.push(RecallVector::new(bits)?);
        }
        Self::new(rows)
    }
}

/// What one conversation surfaced: the round, the pair, and the mentioned
/// items (shared by both partners).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConversationRecord {
    pub round: usize,
    pub pair: (usize, usize),
    pub mentioned: RecallVector,
}

/// Jaccard overlap |i ∩ j| / |i ∪ j|; two all-zero vectors score 0 (empty
/// recalls share nothing).
pub fn mnemonic_similarity(a: &RecallVector, b: &RecallVector) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { context: "recall vector length", expected: a.len(), got: b.len() });
    }
    let mut inter = 0usize;
    let mut union = 0usize;
    for (&x, &y) in a.bits().iter().zip(b.bits()) {
        let (x, y) = (x != 0, y != 0);
        if x && y {
            inter += 1;
        }
        if x || y {
            union += 1;
        }
    }
    Ok(if union == 0 { 0.0 } else { inter as f64 / union as f64 })
}

/// All-pairs similarity; symmetric with unit diagonal for nonzero rows.
pub fn similarity_matrix(recalls: &RecallMatrix) -> Array2<f64> {
    let n = recalls.n_rows();
    let mut m = Array2::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let s = mnemonic_similarity(recalls.row(i), recalls.row(j)).expect("uniform lengths");
            m[[i, j]] = s;
            m[[j, i]] = s;
        }
    }
    m
}

/// Mean of the n(n−1)/2 distinct off-diagonal entries of a symmetric
/// similarity matrix.
pub fn mnemonic_convergence(sim: &Array2<f64>) -> Result<f64> {
    let n = sim.nrows();
    if n < 2 {
        return Err(Error::TooSmall { context: "convergence over pairs", min: 2, got: n });
    }
    if sim.ncols() != n {
        return Err(Error::DimensionMismatch { context: "similarity matrix", expected: n, got: sim.ncols() });
    }
    let mut sum = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            sum += sim[[i, j]];
        }
    }
    Ok(sum / (n * (n - 1) / 2) as f64)
}

/// Similarity means by cluster relation, over unordered pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CliqueSimilarity {
    pub within: Option<f64>,
    pub neighboring: Option<f64>,
    pub distant: Option<f64>,
}

/// Category means of a similarity matrix. When `contacts` is given, the
/// neighboring-clique mean is restricted to pairs that never converse
/// directly (the categories describe non-interacting participants).
/// Empty categories are `None`, never zero.
pub fn clique_level_similarity(
    sim: &Array2<f64>,
    partition: &CliquePartition,
    contacts: Option<&TemporalNetwork>,
) -> Result<CliqueSimilarity> {
    let n = sim.nrows();
    if partition.n_nodes() != n {
        return Err(Error::DimensionMismatch { context: "partition vs similarity matrix", expected: n, got: partition.n_nodes() });
    }
    if let Some(tn) = contacts {
        if tn.n() != n {
            return Err(Error::DimensionMismatch { context: "network vs similarity matrix", expected: n, got: tn.n() });
        }
    }
    let mut sums = [0.0f64; 3];
    let mut counts = [0usize; 3];
    for i in 0..n {
        for j in (i + 1)..n {
            let (ci, cj) = (partition.cluster_of(i), partition.cluster_of(j));
            let cat = if ci == cj {
                0
            } else if partition.neighboring(ci, cj) {
                if let Some(tn) = contacts {
                    if tn.ever_interact(i, j) {
                        continue;
                    }
                }
                1
            } else {
                2
            };
            sums[cat] += sim[[i, j]];
            counts[cat] += 1;
        }
    }
    let cat = |k: usize| if counts[k] == 0 { None } else { Some(sums[k] / counts[k] as f64) };
    Ok(CliqueSimilarity { within: cat(0), neighboring: cat(1), distant: cat(2) })
}

/// Change in network-level convergence from one recall matrix to another.
pub fn convergence_increase(pre: &RecallMatrix, post: &RecallMatrix) -> Result<f64> {
    if pre.n_rows() != post.n_rows() {
        return Err(Error::DimensionMismatch { context: "recall matrix rows", expected: pre.n_rows(), got: post.n_rows() });
    }
    if pre.n_items() != post.n_items() {
        return Err(Error::DimensionMismatch { context: "recall matrix items", expected: pre.n_items(), got: post.n_items() });
    }
    Ok(mnemonic_convergence(&similarity_matrix(post))? - mnemonic_convergence(&similarity_matrix(pre))?)
}

const CLIQUE_SIZE: usize = 4;

fn check_member_vectors(vectors: &[&RecallVector]) -> Result<usize> {
    if vectors.len() != CLIQUE_SIZE {
        return Err(Error::DimensionMismatch { context: "per-member conversation vectors", expected: CLIQUE_SIZE, got: vectors.len() });
    }
    let len = vectors[0].len();
    for v in vectors {
        if v.len() != len {
            return Err(Error::DimensionMismatch { context: "conversation vector length", expected: len, got: v.len() });
        }
    }
    Ok(len)
}

/// Items that came up in the conversations of all four clique members in a
/// round.
pub fn overlap_index(member_vectors: &[&RecallVector]) -> Result<usize> {
    let len = check_member_vectors(member_vectors)?;
    Ok((0..len)
        .filter(|&i| member_vectors.iter().all(|v| v.get(i)))
        .count())
}

/// Items that came up in at least one but at most three of the four members'
/// conversations.
pub fn diversity_index(member_vectors: &[&RecallVector]) -> Result<usize> {
    let len = check_member_vectors(member_vectors)?;
    Ok((0..len)
        .filter(|&i| {
            let hits = member_vectors.iter().filter(|v| v.get(i)).count();
            (1..CLIQUE_SIZE).contains(&hits)
        })
        .count())
}

/// Per-round indices averaged across the cliques of a partition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundIndices {
    pub round: usize,
    pub mean_overlap: f64,
    pub mean_diversity: f64,
}

/// Builds each member's per-round vector (the mentioned set of the one
/// conversation they took part in) and averages the indices over cliques.
/// Errors if any member is missing a conversation in any round, or has two.
pub fn indices_by_round(
    records: &[ConversationRecord],
    partition: &CliquePartition,
) -> Result<Vec<RoundIndices>> {
    if records.is_empty() {
        return Err(Error::EmptyInput("conversation records"));
    }
    let n = partition.n_nodes();
    let n_rounds = records.iter().map(|r| r.round).max().unwrap() + 1;
    let mut per_member: Vec<Vec<Option<&RecallVector>>> = vec![vec![None; n]; n_rounds];
    for rec in records {
        let (a, b) = rec.pair;
        for node in [a, b] {
            if node >= n {
                return Err(Error::NodeOutOfRange { node, n });
            }
            let slot = &mut per_member[rec.round][node];
            if slot.is_some() {
                return Err(Error::Invalid(format!(
                    "node {node} has two conversations in round {}",
                    rec.round
                )));
            }
            *slot = Some(&rec.mentioned);
        }
    }
    let clusters = partition.clusters();
    let mut out = Vec::with_capacity(n_rounds);
    for (t, row) in per_member.iter().enumerate() {
        let mut overlaps = Vec::with_capacity(clusters.len());
        let mut diversities = Vec::with_capacity(clusters.len());
        for members in &clusters {
            let vectors: Vec<&RecallVector> = members
                .iter()
                .map(|&v| {
                    row[v].ok_or_else(|| {
                        Error::Invalid(format!("node {v} has no conversation in round {t}"))
                    })
                })
                .collect::<Result<_>>()?;
            overlaps.push(overlap_index(&vectors)? as f64);
            diversities.push(diversity_index(&vectors)? as f64);
        }
        out.push(RoundIndices {
            round: t,
            mean_overlap: overlaps.iter().sum::<f64>() / overlaps.len() as f64,
            mean_diversity: diversities.iter().sum::<f64>() / diversities.len() as f64,
        });
    }
    Ok(out)
}

/// Indices table as CSV: `round,overlap,diversity,condition`.
pub fn write_indices_csv<W: Write>(
    w: &mut W,
    rows: &[(String, Vec<RoundIndices>)],
) -> Result<()> {
    writeln!(w, "round,overlap,diversity,condition")?;
    for (condition, indices) in rows {
        for ri in indices {
            writeln!(w, "{},{},{},{}", ri.round, ri.mean_overlap, ri.mean_diversity, condition)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{build_experiment_network, Condition};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn rv(len: usize, items: &[usize]) -> RecallVector {
        RecallVector::from_items(len, items).unwrap()
    }

    #[test]
    fn jaccard_examples() {
        let a = rv(10, &[1, 2, 3]);
        let b = rv(10, &[2, 3, 4]);
        assert_abs_diff_eq!(mnemonic_similarity(&a, &b).unwrap(), 0.5);
        assert_abs_diff_eq!(mnemonic_similarity(&a, &a).unwrap(), 1.0);
        let disjoint = rv(10, &[7, 8]);
        assert_abs_diff_eq!(mnemonic_similarity(&a, &disjoint).unwrap(), 0.0);
        let empty = RecallVector::zeros(10);
        assert_abs_diff_eq!(mnemonic_similarity(&empty, &empty).unwrap(), 0.0);
        assert!(mnemonic_similarity(&a, &RecallVector::zeros(5)).is_err());
    }

    #[test]
    fn similarity_matrix_matches_pairwise_loop() {
        let m = RecallMatrix::new(vec![
            rv(30, &[0, 5, 9, 12]),
            rv(30, &[5, 9, 29]),
            rv(30, &[1, 2, 3]),
            RecallVector::zeros(30),
        ])
        .unwrap();
        let sim = similarity_matrix(&m);
        for i in 0..4 {
            for j in 0..4 {
                let direct = mnemonic_similarity(m.row(i), m.row(j)).unwrap();
                assert_abs_diff_eq!(sim[[i, j]], direct);
            }
        }
        assert_abs_diff_eq!(sim[[3, 3]], 0.0); // all-zero row
    }

    #[test]
    fn convergence_of_small_matrix() {
        let mut sim = Array2::zeros((3, 3));
        sim[[0, 1]] = 0.2;
        sim[[1, 0]] = 0.2;
        sim[[0, 2]] = 0.4;
        sim[[2, 0]] = 0.4;
        sim[[1, 2]] = 0.6;
        sim[[2, 1]] = 0.6;
        assert_abs_diff_eq!(mnemonic_convergence(&sim).unwrap(), 0.4, epsilon = 1e-15);
        assert!(mnemonic_convergence(&Array2::zeros((1, 1))).is_err());
    }

    #[test]
    fn clique_categories_on_experiment_topology() {
        let (tn, part) = build_experiment_network(Condition::WeakTiesFirst);
        let sim = Array2::from_elem((16, 16), 0.25);
        // uniform similarity: every category mean equals the constant
        let with_net = clique_level_similarity(&sim, &part, Some(&tn)).unwrap();
        assert_abs_diff_eq!(with_net.within.unwrap(), 0.25);
        assert_abs_diff_eq!(with_net.neighboring.unwrap(), 0.25);
        assert_abs_diff_eq!(with_net.distant.unwrap(), 0.25);
    }

    #[test]
    fn clique_category_pair_counts() {
        let (tn, part) = build_experiment_network(Condition::WeakTiesFirst);
        let mut within = 0;
        let mut neighboring_all = 0;
        let mut neighboring_noncontact = 0;
        let mut distant = 0;
        for i in 0..16 {
            for j in (i + 1)..16 {
                let (ci, cj) = (part.cluster_of(i), part.cluster_of(j));
                if ci == cj {
                    within += 1;
                } else if part.neighboring(ci, cj) {
                    neighboring_all += 1;
                    if !tn.ever_interact(i, j) {
                        neighboring_noncontact += 1;
                    }
                } else {
                    distant += 1;
                }
            }
        }
        assert_eq!(within, 24);
        assert_eq!(neighboring_all, 64);
        assert_eq!(neighboring_noncontact, 56); // 8 cross-clique pairs converse
        assert_eq!(distant, 32);
        assert_eq!(within + neighboring_all + distant, 120);
    }

    #[test]
    fn overlap_and_diversity_forced_counts() {
        let v1 = rv(30, &[1, 2, 3]);
        let v2 = rv(30, &[1, 2]);
        let v3 = rv(30, &[1, 4]);
        let v4 = rv(30, &[1, 2, 5]);
        let vs = [&v1, &v2, &v3, &v4];
        assert_eq!(overlap_index(&vs).unwrap(), 1); // only item 1 everywhere
        assert_eq!(diversity_index(&vs).unwrap(), 4); // items 2,3,4,5
        let same = [&v1, &v1, &v1, &v1];
        assert_eq!(overlap_index(&same).unwrap(), 3);
        assert_eq!(diversity_index(&same).unwrap(), 0);
        assert!(overlap_index(&vs[..3]).is_err());
    }

    #[test]
    fn indices_by_round_averages_cliques() {
        let (tn, part) = build_experiment_network(Condition::StrongTiesFirst);
        // every conversation mentions everything: overlap 30, diversity 0
        let mut records = Vec::new();
        for t in 0..4 {
            for (a, b) in tn.round_pairs(t) {
                records.push(ConversationRecord {
                    round: t,
                    pair: (a, b),
                    mentioned: rv(30, &(0..30).collect::<Vec<_>>()),
                });
            }
        }
        let rows = indices_by_round(&records, &part).unwrap();
        assert_eq!(rows.len(), 4);
        for row in rows {
            assert_abs_diff_eq!(row.mean_overlap, 30.0);
            assert_abs_diff_eq!(row.mean_diversity, 0.0);
        }
    }

    #[test]
    fn indices_by_round_rejects_missing_member() {
        let (_, part) = build_experiment_network(Condition::StrongTiesFirst);
        let records = vec![ConversationRecord {
            round: 0,
            pair: (0, 1),
            mentioned: rv(30, &[0]),
        }];
        assert!(indices_by_round(&records, &part).is_err());
    }

    #[test]
    fn recall_csv_roundtrip() {
        let m = RecallMatrix::new(vec![rv(5, &[0, 4]), rv(5, &[2]), RecallVector::zeros(5)]).unwrap();
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let back = RecallMatrix::read_csv(&buf[..]).unwrap();
        assert_eq!(m, back);
    }

    proptest! {
        #[test]
        fn jaccard_symmetric_and_bounded(
            xs in proptest::collection::vec(0u8..=1, 30),
            ys in proptest::collection::vec(0u8..=1, 30),
        ) {
            let a = RecallVector::new(xs).unwrap();
            let b = RecallVector::new(ys).unwrap();
            let ab = mnemonic_similarity(&a, &b).unwrap();
            let ba = mnemonic_similarity(&b, &a).unwrap();
            prop_assert_eq!(ab, ba);
            prop_assert!((0.0..=1.0).contains(&ab));
            let is_one = ab == 1.0;
            let identical_nonzero = a == b && a.count_ones() > 0;
            prop_assert_eq!(is_one, identical_nonzero);
        }

        #[test]
        fn overlap_diversity_partition_items(
            bits in proptest::collection::vec(proptest::collection::vec(0u8..=1, 30), 4),
        ) {
            let vs: Vec<RecallVector> = bits.into_iter().map(|b| RecallVector::new(b).unwrap()).collect();
            let refs: Vec<&RecallVector> = vs.iter().collect();
            let ovl = overlap_index(&refs).unwrap();
            let div = diversity_index(&refs).unwrap();
            let unmentioned = (0..30).filter(|&i| refs.iter().all(|v| !v.get(i))).count();
            prop_assert_eq!(ovl + div + unmentioned, 30);
        }
    }
}
