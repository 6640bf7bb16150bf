//! Release gate. Each test checks one acceptance criterion end to end and
//! prints a single `acceptance NN name: PASS|FAIL (...)` line with the
//! measured quantities. Run with `--nocapture` to see the lines for passing
//! checks; failing checks surface their line in the failure output.

use std::collections::HashMap;
use std::sync::OnceLock;
use std::time::Instant;

use mnemosim::*;
use ndarray::Array2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn verdict(id: &str, name: &str, pass: bool, detail: &str, secs: f64) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("acceptance {id} {name}: {tag} ({detail}; {secs:.2} s)");
}

fn max_abs_diff(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(&x, &y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn mean_offdiag(c: &Array2<f64>) -> f64 {
    let n = c.nrows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += c[[i, j]];
            }
        }
    }
    sum / (n * (n - 1)) as f64
}

/// Seven-term closed form of the engine output for a 4-round schedule at
/// λ=1: the last round enters directly, every consecutive-round window
/// [t, k] contributes γ^(k-1) times the chronological product of its rounds.
fn four_round_expansion(tn: &TemporalNetwork, gamma: f64) -> Array2<f64> {
    let a = tn.rounds();
    assert_eq!(a.len(), 4);
    let g1 = gamma;
    let g2 = gamma * gamma;
    let g3 = gamma * gamma * gamma;
    let p12 = a[0].dot(&a[1]);
    let p123 = p12.dot(&a[2]);
    let p1234 = p123.dot(&a[3]);
    let p23 = a[1].dot(&a[2]);
    let p234 = p23.dot(&a[3]);
    let p34 = a[2].dot(&a[3]);
    p12 * g1 + p123 * g2 + p1234 * g3 + p23 * g2 + p234 * g3 + p34 * g3 + &a[3]
}

#[test]
fn criterion_01_expansion_exactness() {
    let t0 = Instant::now();
    let params = ModelParams::new(1.0, 0.5).unwrap();
    let mut worst = 0.0f64;
    for condition in [Condition::WeakTiesFirst, Condition::StrongTiesFirst] {
        let (tn, _) = build_experiment_network(condition);
        let engine = mnemonic_reachability(&tn, params);
        let expansion = four_round_expansion(&tn, params.gamma);
        worst = worst.max(max_abs_diff(&engine.c, &expansion));
    }
    let secs = t0.elapsed().as_secs_f64();
    let pass = worst <= 1e-12 && secs < 1.0;
    verdict(
        "01",
        "four-round expansion exactness",
        pass,
        &format!("both schedules, max |engine - expansion| = {worst:.2e} <= 1e-12"),
        secs,
    );
    assert!(worst <= 1e-12, "engine deviates from the closed-form expansion by {worst:.2e}");
    assert!(secs < 1.0, "took {secs:.2} s, budget 1 s");
}

#[test]
fn criterion_02_bruteforce_equivalence() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20260823);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = rng.random_range(2..=8usize);
        let r = rng.random_range(1..=4usize);
        let p = rng.random_range(0.15..0.6f64);
        let rounds: Vec<Vec<(usize, usize)>> = (0..r)
            .map(|_| {
                let mut edges = Vec::new();
                for i in 0..n {
                    for j in (i + 1)..n {
                        if rng.random::<f64>() < p {
                            edges.push((i, j));
                        }
                    }
                }
                edges
            })
            .collect();
        let tn = TemporalNetwork::from_round_edges(n, &rounds).unwrap();
        let params = ModelParams::new(rng.random::<f64>(), rng.random::<f64>()).unwrap();
        let fast = mnemonic_reachability(&tn, params);
        let slow = reachability_bruteforce(&tn, params).unwrap();
        worst = worst.max(max_abs_diff(&fast.c, &slow.c));
    }
    let secs = t0.elapsed().as_secs_f64();
    let pass = worst <= 1e-12 && secs < 10.0;
    verdict(
        "02",
        "matrix engine vs walk enumeration",
        pass,
        &format!("200 random temporal networks, max entrywise gap = {worst:.2e} <= 1e-12"),
        secs,
    );
    assert!(worst <= 1e-12, "engine and brute force disagree by {worst:.2e}");
    assert!(secs < 10.0, "took {secs:.2} s, budget 10 s");
}

#[test]
fn criterion_03_model_direction_16_nodes() {
    let t0 = Instant::now();
    let params = ModelParams::default();
    let agg = |condition| {
        let (tn, part) = build_experiment_network(condition);
        let rm = mnemonic_reachability(&tn, params);
        let plain = aggregate_reachability(&rm, &part).unwrap();
        let excl = aggregate_reachability_noninteracting(&rm, &part, &tn).unwrap();
        (plain, excl)
    };
    let (w_plain, w_excl) = agg(Condition::WeakTiesFirst);
    let (s_plain, s_excl) = agg(Condition::StrongTiesFirst);
    // Neighboring-clique reachability is compared over pairs that never
    // converse directly; the all-pairs variant is reported alongside.
    let pass = w_plain.overall > s_plain.overall
        && w_plain.within.unwrap() > s_plain.within.unwrap()
        && w_excl.neighboring.unwrap() > s_excl.neighboring.unwrap();
    let secs = t0.elapsed().as_secs_f64();
    let detail = format!(
        "weak-first vs strong-first: overall {:.4} vs {:.4}, within {:.4} vs {:.4}, \
         neighboring non-conversing {:.4} vs {:.4}; reported: neighboring all-pairs \
         {:.4} vs {:.4}, distant {:.4} vs {:.4}",
        w_plain.overall,
        s_plain.overall,
        w_plain.within.unwrap(),
        s_plain.within.unwrap(),
        w_excl.neighboring.unwrap(),
        s_excl.neighboring.unwrap(),
        w_plain.neighboring.unwrap(),
        s_plain.neighboring.unwrap(),
        w_plain.distant.unwrap(),
        s_plain.distant.unwrap(),
    );
    verdict("03", "reachability favors weak-ties-first", pass, &detail, secs);
    assert!(pass, "{detail}");
    assert!(secs < 1.0, "took {secs:.2} s, budget 1 s");
}

static REPLICATION: OnceLock<(ReplicationTable, f64)> = OnceLock::new();

fn replication() -> &'static (ReplicationTable, f64) {
    REPLICATION.get_or_init(|| {
        let t0 = Instant::now();
        let table = replicate(
            &[Condition::WeakTiesFirst, Condition::StrongTiesFirst],
            100,
            &SimConfig::default(),
        )
        .unwrap();
        (table, t0.elapsed().as_secs_f64())
    })
}

fn paired_rows(table: &ReplicationTable) -> Vec<(&SeedRow, &SeedRow)> {
    let mut by_seed: HashMap<u64, (Option<&SeedRow>, Option<&SeedRow>)> = HashMap::new();
    for row in &table.rows {
        let slot = by_seed.entry(row.seed).or_default();
        match row.condition {
            Condition::WeakTiesFirst => slot.0 = Some(row),
            Condition::StrongTiesFirst => slot.1 = Some(row),
        }
    }
    let mut pairs: Vec<_> = by_seed
        .into_values()
        .map(|(w, s)| (w.expect("weak-first row"), s.expect("strong-first row")))
        .collect();
    pairs.sort_by_key(|(w, _)| w.seed);
    pairs
}

fn paired_sign_test<F: Fn(&SeedRow) -> f64>(pairs: &[(&SeedRow, &SeedRow)], f: F) -> (usize, usize, f64) {
    let wins = pairs.iter().filter(|(w, s)| f(w) > f(s)).count();
    let losses = pairs.iter().filter(|(w, s)| f(w) < f(s)).count();
    (wins, losses, sign_test_greater(wins, losses))
}

#[test]
fn criterion_04_simulated_convergence_direction() {
    let (table, build_secs) = replication();
    let pairs = paired_rows(table);
    assert_eq!(pairs.len(), 100);
    let mean_of = |cond: Condition, f: &dyn Fn(&SeedRow) -> f64| {
        let vals: Vec<f64> = table.rows.iter().filter(|r| r.condition == cond).map(f).collect();
        mean(&vals).unwrap()
    };
    let (ci_wins, ci_losses, ci_p) = paired_sign_test(&pairs, |r| r.convergence_increase);
    let (wi_wins, wi_losses, wi_p) = paired_sign_test(&pairs, |r| r.within_increase);
    let ci_w = mean_of(Condition::WeakTiesFirst, &|r| r.convergence_increase);
    let ci_s = mean_of(Condition::StrongTiesFirst, &|r| r.convergence_increase);
    let wi_w = mean_of(Condition::WeakTiesFirst, &|r| r.within_increase);
    let wi_s = mean_of(Condition::StrongTiesFirst, &|r| r.within_increase);
    let pass = ci_w > ci_s && ci_p < 0.05 && wi_w > wi_s && wi_p < 0.05 && *build_secs < 60.0;
    let detail = format!(
        "100 paired seeds: convergence increase {ci_w:.4} vs {ci_s:.4} \
         ({ci_wins}W/{ci_losses}L, p = {ci_p:.2e}), within-clique increase {wi_w:.4} vs {wi_s:.4} \
         ({wi_wins}W/{wi_losses}L, p = {wi_p:.2e})"
    );
    verdict("04", "simulation favors weak-ties-first", pass, &detail, *build_secs);
    assert!(ci_w > ci_s && ci_p < 0.05, "convergence-increase contrast not significant: {detail}");
    assert!(wi_w > wi_s && wi_p < 0.05, "within-clique contrast not significant: {detail}");
    assert!(*build_secs < 60.0, "took {build_secs:.2} s, budget 60 s");
}

#[test]
fn criterion_05_index_dynamics_reverse() {
    let (table, build_secs) = replication();
    let pairs = paired_rows(table);
    let (d1_wins, d1_losses, d1_p) = paired_sign_test(&pairs, |r| r.diversity_by_round[0]);
    let (o1_wins, o1_losses, o1_p) = paired_sign_test(&pairs, |r| -r.overlap_by_round[0]);
    let (d4_wins, d4_losses, d4_p) = paired_sign_test(&pairs, |r| -r.diversity_by_round[3]);
    let (o4_wins, o4_losses, o4_p) = paired_sign_test(&pairs, |r| r.overlap_by_round[3]);
    let pass = d1_p < 0.05 && o1_p < 0.05 && d4_p < 0.05 && o4_p < 0.05;
    let detail = format!(
        "weak-first round 1: diversity higher ({d1_wins}W/{d1_losses}L, p = {d1_p:.2e}), \
         overlap lower ({o1_wins}W/{o1_losses}L, p = {o1_p:.2e}); round 4 reversed: \
         diversity lower ({d4_wins}W/{d4_losses}L, p = {d4_p:.2e}), \
         overlap higher ({o4_wins}W/{o4_losses}L, p = {o4_p:.2e})"
    );
    verdict("05", "diversity and overlap cross over", pass, &detail, *build_secs);
    assert!(pass, "{detail}");
}

#[test]
fn criterion_06_calibration_recovery() {
    let t0 = Instant::now();
    let (tn, _) = build_experiment_network(Condition::WeakTiesFirst);
    let grid = CalibrationGrid::default();
    let tns = vec![tn.clone()];

    let mut exact = 0usize;
    let mut total = 0usize;
    for &lambda in &grid.lambda_values {
        for &gamma in &grid.gamma_values {
            let truth = ModelParams::new(lambda, gamma).unwrap();
            let target = model_target(&tn, truth);
            let found = grid_search(&tns, &[target], &grid).unwrap().best;
            total += 1;
            if found.lambda == lambda && found.gamma == gamma {
                exact += 1;
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut gauss = move || {
        let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
        let u2: f64 = rng.random();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    };
    let points: Vec<ModelParams> = grid
        .lambda_values
        .iter()
        .flat_map(|&l| grid.gamma_values.iter().map(move |&g| ModelParams::new(l, g).unwrap()))
        .collect();
    let mut within_step = 0usize;
    for trial in 0..100 {
        let truth = points[trial % points.len()];
        let mut target = model_target(&tn, truth);
        let offdiag: Vec<f64> = target
            .indexed_iter()
            .filter(|((i, j), _)| i != j)
            .map(|(_, &v)| v)
            .collect();
        let span = offdiag.iter().cloned().fold(f64::MIN, f64::max)
            - offdiag.iter().cloned().fold(f64::MAX, f64::min);
        let mut noise = Array2::zeros(target.dim());
        for v in noise.iter_mut() {
            *v = 0.05 * span * gauss();
        }
        let noise = (&noise + &noise.t()) * 0.5;
        target += &noise;
        let found = grid_search(&tns, &[target], &grid).unwrap().best;
        if (found.lambda - truth.lambda).abs() <= 0.1 + 1e-9
            && (found.gamma - truth.gamma).abs() <= 0.1 + 1e-9
        {
            within_step += 1;
        }
    }

    let secs = t0.elapsed().as_secs_f64();
    let pass = exact == total && within_step >= 90 && secs < 30.0;
    let detail = format!(
        "noiseless {exact}/{total} grid points recovered exactly; \
         5% noise {within_step}/100 trials within one grid step (>= 90)"
    );
    verdict("06", "grid search recovers parameters", pass, &detail, secs);
    assert_eq!(exact, total, "noiseless recovery failed: {detail}");
    assert!(within_step >= 90, "noise robustness below threshold: {detail}");
    assert!(secs < 30.0, "took {secs:.2} s, budget 30 s");
}

#[test]
fn criterion_07_metric_identities() {
    use proptest::prelude::*;
    use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

    let t0 = Instant::now();

    let bits = || proptest::collection::vec(0u8..=1, 30);
    let fresh_runner = || {
        let config = Config { failure_persistence: None, ..Config::default() };
        TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
    };

    let mut runner = fresh_runner();
    runner
        .run(&(bits(), bits()), |(a, b)| {
            let a = RecallVector::new(a).unwrap();
            let b = RecallVector::new(b).unwrap();
            let ab = mnemonic_similarity(&a, &b).unwrap();
            let ba = mnemonic_similarity(&b, &a).unwrap();
            prop_assert_eq!(ab, ba);
            prop_assert!((0.0..=1.0).contains(&ab));
            let aa = mnemonic_similarity(&a, &a).unwrap();
            prop_assert_eq!(aa, if a.count_ones() > 0 { 1.0 } else { 0.0 });
            Ok(())
        })
        .unwrap();

    let mut runner = fresh_runner();
    runner
        .run(
            &(proptest::collection::vec(bits(), 2..6), proptest::sample::select(vec![1u64, 2, 3])),
            |(rows, perm_seed)| {
                let vectors: Vec<RecallVector> =
                    rows.iter().map(|r| RecallVector::new(r.clone()).unwrap()).collect();
                let m = RecallMatrix::new(vectors.clone()).unwrap();
                let base = mnemonic_convergence(&similarity_matrix(&m)).unwrap();
                let mut shuffled = vectors;
                let mut rng = ChaCha8Rng::seed_from_u64(perm_seed);
                for i in (1..shuffled.len()).rev() {
                    shuffled.swap(i, rng.random_range(0..=i));
                }
                let m2 = RecallMatrix::new(shuffled).unwrap();
                let permuted = mnemonic_convergence(&similarity_matrix(&m2)).unwrap();
                prop_assert!((base - permuted).abs() <= 1e-12);
                Ok(())
            },
        )
        .unwrap();

    let mut runner = fresh_runner();
    runner
        .run(&proptest::collection::vec(bits(), 4), |rows| {
            let vs: Vec<RecallVector> =
                rows.iter().map(|r| RecallVector::new(r.clone()).unwrap()).collect();
            let refs: Vec<&RecallVector> = vs.iter().collect();
            let overlap = overlap_index(&refs).unwrap();
            let diversity = diversity_index(&refs).unwrap();
            let unmentioned = (0..30)
                .filter(|&i| vs.iter().all(|v| !v.get(i)))
                .count();
            prop_assert_eq!(overlap + diversity + unmentioned, 30);
            Ok(())
        })
        .unwrap();

    // Category means on the 16-node topology recombine to the overall mean:
    // 24 within + 56 non-conversing neighboring + 8 conversing cross-clique
    // + 32 distant unordered pairs.
    let (tn, part) = build_experiment_network(Condition::WeakTiesFirst);
    let mut runner = fresh_runner();
    runner
        .run(&proptest::collection::vec(0.0..1.0f64, 120), |upper| {
            let mut sim = Array2::<f64>::eye(16);
            let mut it = upper.iter();
            for i in 0..16 {
                for j in (i + 1)..16 {
                    let v = *it.next().unwrap();
                    sim[[i, j]] = v;
                    sim[[j, i]] = v;
                }
            }
            let cats = clique_level_similarity(&sim, &part, Some(&tn)).unwrap();
            let mut conversing = Vec::new();
            for i in 0..16 {
                for j in (i + 1)..16 {
                    let (ci, cj) = (part.cluster_of(i), part.cluster_of(j));
                    if ci != cj && tn.ever_interact(i, j) {
                        prop_assert!(part.neighboring(ci, cj));
                        conversing.push(sim[[i, j]]);
                    }
                }
            }
            prop_assert_eq!(conversing.len(), 8);
            let overall = mnemonic_convergence(&sim).unwrap();
            let recombined = (24.0 * cats.within.unwrap()
                + 56.0 * cats.neighboring.unwrap()
                + 8.0 * mean(&conversing).unwrap()
                + 32.0 * cats.distant.unwrap())
                / 120.0;
            prop_assert!((overall - recombined).abs() <= 1e-9);
            Ok(())
        })
        .unwrap();

    let secs = t0.elapsed().as_secs_f64();
    verdict(
        "07",
        "metric identities hold",
        secs < 5.0,
        "jaccard symmetry and bounds, convergence permutation invariance, \
         overlap + diversity + unmentioned = 30, category partition recombines",
        secs,
    );
    assert!(secs < 5.0, "took {secs:.2} s, budget 5 s");
}

#[test]
fn criterion_08_uniform_centralities() {
    let t0 = Instant::now();
    let (tn, _) = build_experiment_network(Condition::WeakTiesFirst);
    let union = tn.static_union();
    let mut edges = Vec::new();
    for i in 0..16 {
        for j in (i + 1)..16 {
            if union[[i, j]] > 0.0 {
                edges.push((i, j));
            }
        }
    }
    let g = StaticGraph::new(16, &edges).unwrap();
    let c = centralities(&g);
    let spread = |v: &[f64]| {
        v.iter().cloned().fold(f64::MIN, f64::max) - v.iter().cloned().fold(f64::MAX, f64::min)
    };
    let spreads = [
        ("degree", spread(&c.degree)),
        ("closeness", spread(&c.closeness)),
        ("betweenness", spread(&c.betweenness)),
        ("eigenvector", spread(&c.eigenvector)),
    ];
    let worst = spreads.iter().map(|&(_, s)| s).fold(0.0, f64::max);
    let secs = t0.elapsed().as_secs_f64();
    let pass = worst <= 1e-9 && secs < 1.0;
    let detail = format!(
        "16-node union graph, {} edges; max spread across nodes: degree {:.1e}, \
         closeness {:.1e}, betweenness {:.1e}, eigenvector {:.1e}",
        g.n_edges(),
        spreads[0].1,
        spreads[1].1,
        spreads[2].1,
        spreads[3].1,
    );
    verdict("08", "all nodes equally central", pass, &detail, secs);
    assert!(worst <= 1e-9, "{detail}");
    assert!(secs < 1.0, "took {secs:.2} s, budget 1 s");
}

#[test]
fn criterion_09_random_order_on_block_network() {
    let t0 = Instant::now();
    let (g, _) = random_block_graph(&[100, 100, 100, 100], 0.05, 0.005, 1).unwrap();
    let ranking = edge_betweenness(&g);
    let overall = |order: EdgeOrder| {
        let tn = quartile_schedule(&ranking, order).unwrap();
        mean_offdiag(&mnemonic_reachability(&tn, ModelParams::default()).c)
    };
    let desc = overall(EdgeOrder::Descending);
    let asc = overall(EdgeOrder::Ascending);
    let random = overall(EdgeOrder::Random(0));

    // A locally supplied contact edge list gets the same comparison.
    let local = std::env::var("MNEMOSIM_CONTACT_EDGES")
        .unwrap_or_else(|_| "../../data/infection_edges.txt".into());
    let local_note = match std::fs::File::open(&local) {
        Ok(f) => {
            let (lg, stats) = read_edge_list(std::io::BufReader::new(f)).unwrap();
            let lr = edge_betweenness(&lg);
            let o = |order: EdgeOrder| {
                let tn = quartile_schedule(&lr, order).unwrap();
                mean_offdiag(&mnemonic_reachability(&tn, ModelParams::default()).c)
            };
            format!(
                "local contact network ({} nodes, {} contacts): descending {:.5}, \
                 ascending {:.5}, random {:.5}",
                lg.n(),
                stats.contact_events,
                o(EdgeOrder::Descending),
                o(EdgeOrder::Ascending),
                o(EdgeOrder::Random(0)),
            )
        }
        Err(_) => "no local contact edge list supplied".into(),
    };

    let secs = t0.elapsed().as_secs_f64();
    let pass = random > desc && random > asc && secs < 30.0;
    let detail = format!(
        "4-block network n=400 (intra 0.05, inter 0.005, seed 1): overall reachability \
         descending {desc:.5}, ascending {asc:.5}, random {random:.5}; {local_note}"
    );
    verdict("09", "random order beats both sorted orders", pass, &detail, secs);
    assert!(secs < 30.0, "took {secs:.2} s, budget 30 s");
    assert!(
        random > desc && random > asc,
        "random-order overall reachability {random:.5} does not exceed both descending \
         {desc:.5} and ascending {asc:.5} on the pinned 4-block network; on near-regular \
         block graphs the descending schedule concentrates the bridging quartile early and \
         wins at every tested seed and gamma"
    );
}

/// Counts shortest paths through every edge by explicit enumeration: BFS
/// distances from each source, then a walk over the distance-increasing dag.
fn enumerate_edge_betweenness(g: &StaticGraph) -> Vec<f64> {
    let n = g.n();
    let mut scores = vec![0.0; g.n_edges()];
    for s in 0..n {
        let mut dist = vec![usize::MAX; n];
        dist[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &u in g.neighbors(v) {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        for t in (s + 1)..n {
            if dist[t] == usize::MAX {
                continue;
            }
            // collect every shortest s→t path as its edge-index sequence
            let mut paths: Vec<Vec<usize>> = Vec::new();
            let mut stack = vec![(s, Vec::new())];
            while let Some((v, path)) = stack.pop() {
                if v == t {
                    paths.push(path);
                    continue;
                }
                for &u in g.neighbors(v) {
                    if dist[u] == dist[v] + 1 && dist[u] <= dist[t] {
                        let mut next = path.clone();
                        next.push(g.edge_index(v, u).unwrap());
                        stack.push((u, next));
                    }
                }
            }
            let paths: Vec<&Vec<usize>> =
                paths.iter().filter(|p| p.len() == dist[t]).collect();
            let sigma = paths.len() as f64;
            for path in paths {
                for &e in path {
                    scores[e] += 1.0 / sigma;
                }
            }
        }
    }
    scores
}

#[test]
fn criterion_10_graph_algorithm_oracles() {
    let t0 = Instant::now();

    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let n = rng.random_range(4..=10usize);
        let p = rng.random_range(0.25..0.7f64);
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.random::<f64>() < p {
                    edges.push((i, j));
                }
            }
        }
        let g = StaticGraph::new(n, &edges).unwrap();
        let expected = enumerate_edge_betweenness(&g);
        let ranking = edge_betweenness(&g);
        let by_edge: HashMap<(usize, usize), f64> = ranking.entries().iter().cloned().collect();
        for (idx, &e) in g.edges().iter().enumerate() {
            worst = worst.max((by_edge[&e] - expected[idx]).abs());
        }
    }

    let mut recovered = 0usize;
    let mut worst_acc = 1.0f64;
    for seed in 1..=20u64 {
        let (g, truth) = random_block_graph(&[25, 25, 25, 25], 0.9, 0.05, seed).unwrap();
        let part = spectral_clusters(&g, 4).unwrap();
        let assign = part.assignment();
        // best agreement over all 24 label permutations
        let mut best = 0usize;
        let idx = [0usize, 1, 2, 3];
        for a in idx {
            for b in idx {
                for c in idx {
                    for d in idx {
                        if a != b && a != c && a != d && b != c && b != d && c != d {
                            let mapping = [a, b, c, d];
                            let agree = assign
                                .iter()
                                .zip(&truth)
                                .filter(|(&x, &t)| mapping[x] == t)
                                .count();
                            best = best.max(agree);
                        }
                    }
                }
            }
        }
        let acc = best as f64 / truth.len() as f64;
        worst_acc = worst_acc.min(acc);
        if acc >= 0.95 {
            recovered += 1;
        }
    }

    let secs = t0.elapsed().as_secs_f64();
    let pass = worst <= 1e-12 && recovered == 20 && secs < 30.0;
    let detail = format!(
        "edge betweenness vs path enumeration on 50 graphs: max gap {worst:.2e}; \
         planted 4-block recovery (intra 0.9, inter 0.05): {recovered}/20 instances \
         >= 95% accuracy (worst {worst_acc:.3})"
    );
    verdict("10", "graph algorithms match oracles", pass, &detail, secs);
    assert!(worst <= 1e-12, "betweenness disagrees with enumeration: {detail}");
    assert!(recovered == 20, "clustering accuracy below threshold: {detail}");
    assert!(secs < 30.0, "took {secs:.2} s, budget 30 s");
}
