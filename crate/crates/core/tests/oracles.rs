//! Library results checked against slow, independent recomputations.

use std::collections::VecDeque;

use commimmune::centrality::{betweenness, community_scores, ScoreKind};
use commimmune::graph::{inter_community_fraction, split_degree};
use commimmune::lfr::{
    assign_communities, generate, internal_degree, rewire_to_mixing, sample_community_sizes,
    sample_degrees, wire_configuration_model, LfrParams,
};
use commimmune::strategy::{allocate_quota, plan_community, plan_global, StrategyKind};
use commimmune::util::{quota, rng_from_seed};
use commimmune::{Graph, Partition};
use rand::Rng;

fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = rng_from_seed(seed);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                edges.push((a, b));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

/// Distances and shortest-path counts from `s`; `None` marks unreachable nodes.
fn bfs_counts(g: &Graph, s: usize) -> (Vec<Option<usize>>, Vec<u128>) {
    let n = g.node_count();
    let mut dist = vec![None; n];
    let mut count = vec![0u128; n];
    dist[s] = Some(0);
    count[s] = 1;
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        let d = dist[v].unwrap();
        for &w in g.neighbors(v) {
            match dist[w] {
                None => {
                    dist[w] = Some(d + 1);
                    count[w] = count[v];
                    queue.push_back(w);
                }
                Some(dw) if dw == d + 1 => count[w] += count[v],
                _ => {}
            }
        }
    }
    (dist, count)
}

/// Betweenness by enumerating every pair: v lies on `σ_sv σ_vt` of the `σ_st`
/// shortest s-t paths when `d(s,v) + d(v,t) = d(s,t)`.
fn all_pairs_betweenness(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    let tables: Vec<_> = (0..n).map(|s| bfs_counts(g, s)).collect();
    let mut bc = vec![0.0; n];
    for s in 0..n {
        for t in s + 1..n {
            let Some(dst) = tables[s].0[t] else { continue };
            let total = tables[s].1[t] as f64;
            for v in 0..n {
                if v == s || v == t {
                    continue;
                }
                if let (Some(a), Some(b)) = (tables[s].0[v], tables[v].0[t]) {
                    if a + b == dst {
                        bc[v] += (tables[s].1[v] * tables[v].1[t]) as f64 / total;
                    }
                }
            }
        }
    }
    bc
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

#[test]
fn betweenness_matches_pair_enumeration() {
    let mut rng = rng_from_seed(2024);
    for case in 0..50 {
        let n = rng.gen_range(2..=40);
        let p = rng.gen_range(0.03..0.35);
        let g = random_graph(n, p, 1000 + case);
        let fast = betweenness(&g);
        let slow = all_pairs_betweenness(&g);
        for (v, score) in fast.iter() {
            assert!(
                close(score, slow[v]),
                "case {case} node {v}: {score} vs {}",
                slow[v]
            );
        }
    }
}

#[test]
fn betweenness_on_trees_counts_paths_through_each_node() {
    let mut rng = rng_from_seed(7);
    for _ in 0..20 {
        let n = rng.gen_range(2..=100);
        let parent: Vec<usize> = (1..n).map(|v| rng.gen_range(0..v)).collect();
        let edges: Vec<_> = parent
            .iter()
            .enumerate()
            .map(|(i, &p)| (p, i + 1))
            .collect();
        let g = Graph::from_edges(n, &edges).unwrap();
        // Walk both endpoints up to their meeting point and count the interior nodes.
        let depth = {
            let mut d = vec![0usize; n];
            for v in 1..n {
                d[v] = d[parent[v - 1]] + 1;
            }
            d
        };
        let up = |v: usize| parent[v - 1];
        let mut through = vec![0u64; n];
        for s in 0..n {
            for t in s + 1..n {
                let (mut a, mut b) = (s, t);
                let mut path = Vec::new();
                while a != b {
                    if depth[a] >= depth[b] {
                        a = up(a);
                        path.push(a);
                    } else {
                        b = up(b);
                        path.push(b);
                    }
                }
                path.sort_unstable();
                path.dedup();
                for v in path.into_iter().filter(|&v| v != s && v != t) {
                    through[v] += 1;
                }
            }
        }
        let bc = betweenness(&g);
        for v in 0..n {
            assert_eq!(bc.get(v).unwrap(), through[v] as f64, "tree node {v}");
        }
    }
}

#[test]
fn betweenness_total_equals_interior_path_length() {
    for seed in 0..20 {
        let g = random_graph(25, 0.15, seed);
        let n = g.node_count();
        let mut expected = 0.0;
        for s in 0..n {
            let (dist, _) = bfs_counts(&g, s);
            for t in s + 1..n {
                if let Some(d) = dist[t] {
                    expected += (d - 1) as f64;
                }
            }
        }
        let total: f64 = betweenness(&g).iter().map(|(_, s)| s).sum();
        assert!(close(total, expected), "{total} vs {expected}");
    }
}

/// Highest score, ties within floating slack going to the lowest id.
fn argmax(scores: &[(usize, f64)]) -> usize {
    let best = scores.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    scores
        .iter()
        .filter(|s| close(s.1, best))
        .map(|s| s.0)
        .min()
        .unwrap()
}

#[test]
fn global_plans_match_stepwise_rescoring() {
    let mut rng = rng_from_seed(99);
    for case in 0..25 {
        let n = rng.gen_range(5..=30);
        let g = random_graph(n, rng.gen_range(0.08..0.3), 500 + case);
        let fraction = rng.gen_range(0.1..0.8);
        let size = quota(fraction, n);
        for kind in [StrategyKind::GlobalBetweenness, StrategyKind::GlobalDegree] {
            let mut residual = g.clone();
            let mut expected = Vec::new();
            for _ in 0..size {
                let scores: Vec<(usize, f64)> = match kind {
                    StrategyKind::GlobalBetweenness => {
                        let bc = all_pairs_betweenness(&residual);
                        residual.active_nodes().map(|v| (v, bc[v])).collect()
                    }
                    _ => residual
                        .active_nodes()
                        .map(|v| (v, residual.neighbors(v).len() as f64))
                        .collect(),
                };
                let pick = argmax(&scores);
                expected.push(pick);
                residual = residual.remove_nodes(&[pick]).unwrap();
            }
            let planned = plan_global(&g, kind, fraction).unwrap();
            assert_eq!(planned.order, expected, "case {case} {kind}");
        }
    }
}

#[test]
fn quota_arithmetic() {
    let sizes = |s: &[usize]| {
        let labels: Vec<usize> = s
            .iter()
            .enumerate()
            .flat_map(|(c, &k)| std::iter::repeat_n(c, k))
            .collect();
        Partition::from_assignment(&labels)
    };
    let q = allocate_quota(&sizes(&[100, 50, 50]), 0.1).unwrap();
    assert_eq!((q.get(0), q.get(1), q.get(2)), (10, 5, 5));
    let q = allocate_quota(&sizes(&[7, 3]), 0.3).unwrap();
    assert_eq!((q.get(0), q.get(1)), (2, 1));
    let q = allocate_quota(&sizes(&[7, 3]), 0.0).unwrap();
    assert_eq!(q.total(), 0);
}

#[test]
fn community_plans_match_per_community_sorting() {
    let net = generate(&LfrParams {
        n: 1000,
        max_degree: 60,
        c_max: 100,
        seed: 5,
        ..LfrParams::default()
    })
    .unwrap();
    let kinds = [
        (StrategyKind::IndegNodes, ScoreKind::InDegree),
        (StrategyKind::OutdegNodes, ScoreKind::OutDegree),
        (StrategyKind::InOutDiffNodes, ScoreKind::InOutDiff),
        (StrategyKind::OutInDiffNodes, ScoreKind::OutInDiff),
    ];
    for fraction in [0.05, 0.2, 0.45] {
        let quotas = allocate_quota(&net.partition, fraction).unwrap();
        assert_eq!(quotas.total(), quota(fraction, 1000));
        for (kind, score) in kinds {
            let scores = community_scores(&net.graph, &net.partition, score).unwrap();
            let mut expected = Vec::new();
            for (c, members) in net.partition.communities() {
                let mut ranked: Vec<(usize, f64)> = members
                    .iter()
                    .map(|&v| (v, scores.get(v).unwrap()))
                    .collect();
                ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
                assert!(quotas.get(c) <= members.len());
                expected.extend(ranked[..quotas.get(c)].iter().map(|r| r.0));
            }
            expected.sort_unstable();
            let mut got = plan_community(&net.graph, &net.partition, kind, fraction)
                .unwrap()
                .order;
            got.sort_unstable();
            assert_eq!(got, expected, "{kind} at {fraction}");
        }
    }
}

#[test]
fn degree_split_recount_on_generated_graphs() {
    for (seed, mu) in [(1, 0.3), (2, 0.5), (3, 0.7)] {
        let net = generate(&LfrParams {
            n: 2000,
            mu,
            seed,
            ..LfrParams::default()
        })
        .unwrap();
        for v in 0..net.graph.node_count() {
            let own = net.partition.community_of(v).unwrap();
            let inside = net
                .graph
                .neighbors(v)
                .iter()
                .filter(|&&w| net.partition.community_of(w).unwrap() == own)
                .count();
            let split = split_degree(&net.graph, &net.partition, v).unwrap();
            assert_eq!(split.k_in, inside);
            assert_eq!(split.k_in + split.k_out, net.graph.neighbors(v).len());
        }
    }
}

#[test]
fn configuration_model_realizes_requested_degrees() {
    let params = LfrParams {
        n: 3000,
        ..LfrParams::default()
    };
    let mut rng = rng_from_seed(17);
    let degrees = sample_degrees(&params, &mut rng).unwrap();
    let g = wire_configuration_model(&degrees, &mut rng).unwrap();
    g.check_invariants().unwrap();
    assert_eq!(g.degrees(), degrees);

    let small = wire_configuration_model(&[2, 2, 2], &mut rng).unwrap();
    assert_eq!(
        small.edges().collect::<Vec<_>>(),
        vec![(0, 1), (0, 2), (1, 2)]
    );
    let pair = wire_configuration_model(&[1, 1], &mut rng).unwrap();
    assert_eq!(pair.edges().collect::<Vec<_>>(), vec![(0, 1)]);
}

#[test]
fn small_assignment_respects_every_constraint() {
    let params = LfrParams {
        n: 30,
        avg_degree: 4.0,
        max_degree: 8,
        c_min: 5,
        c_max: 15,
        mu: 0.3,
        ..LfrParams::default()
    };
    for seed in 0..30 {
        let mut rng = rng_from_seed(seed);
        let degrees = sample_degrees(&params, &mut rng).unwrap();
        let sizes = sample_community_sizes(&params, &mut rng).unwrap();
        let neediest = degrees.iter().map(|&k| internal_degree(k, params.mu)).max();
        if sizes.iter().max() <= neediest.as_ref() {
            // No community can host the neediest node.
            assert!(assign_communities(&degrees, &sizes, params.mu, &mut rng).is_err());
            continue;
        }
        let p = assign_communities(&degrees, &sizes, params.mu, &mut rng).unwrap();
        let mut got = p.sizes();
        let mut want = sizes.clone();
        got.sort_unstable();
        want.sort_unstable();
        assert_eq!(got, want);
        assert_eq!(p.covered_count(), 30);
        for (v, &k) in degrees.iter().enumerate() {
            let c = p.community_of(v).unwrap();
            assert!(p.members(c).unwrap().len() > internal_degree(k, params.mu));
        }
    }
}

#[test]
fn rewiring_keeps_degrees_and_simplicity_on_small_graphs() {
    let params = LfrParams {
        n: 50,
        avg_degree: 6.0,
        max_degree: 12,
        c_min: 10,
        c_max: 25,
        mixing_tolerance: 0.05,
        ..LfrParams::default()
    };
    for seed in 0..10 {
        let mut rng = rng_from_seed(seed);
        let degrees = sample_degrees(&params, &mut rng).unwrap();
        let sizes = sample_community_sizes(&params, &mut rng).unwrap();
        let p = assign_communities(&degrees, &sizes, params.mu, &mut rng).unwrap();
        let g = wire_configuration_model(&degrees, &mut rng).unwrap();
        if let Ok(out) = rewire_to_mixing(&g, &p, params.mu, &params, &mut rng) {
            out.check_invariants().unwrap();
            assert_eq!(out.degrees(), degrees);
            let mix = inter_community_fraction(&out, &p).unwrap();
            assert!((mix - params.mu).abs() <= params.mixing_tolerance);
        }
    }
}

#[test]
fn generation_is_deterministic() {
    let params = LfrParams {
        n: 800,
        max_degree: 50,
        c_max: 80,
        seed: 12,
        ..LfrParams::default()
    };
    assert_eq!(generate(&params).unwrap(), generate(&params).unwrap());
}
