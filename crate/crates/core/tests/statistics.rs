//! Monte-Carlo checks against reference samplers and closed-form rates, at 3σ.

use commimmune::graph::Graph;
use commimmune::lfr::{sample_community_sizes, sample_degrees, LfrParams};
use commimmune::sir::{self, seed_infection, EpidemicState, NodeState, SirParams};
use commimmune::strategy::{plan_cbf, plan_global, plan_random, StrategyKind};
use commimmune::util::rng_from_seed;
use rand::Rng;

/// Discrete truncated power law `k^-exp` on `[floor(x), max]`, lowest value weighted by
/// `1 - frac(x)`. Returns (values, probabilities).
fn reference_law(x: f64, max: usize, exp: f64) -> (Vec<usize>, Vec<f64>) {
    let low = x.floor() as usize;
    let mut values = Vec::new();
    let mut probs = Vec::new();
    for k in low..=max {
        let mut w = (k as f64).powf(-exp);
        if k == low {
            w *= 1.0 - (x - low as f64);
        }
        values.push(k);
        probs.push(w);
    }
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    (values, probs)
}

fn mean_of(law: &(Vec<usize>, Vec<f64>)) -> f64 {
    law.0.iter().zip(&law.1).map(|(&k, &p)| k as f64 * p).sum()
}

/// Inverse-CDF draw from a reference law.
fn draw(law: &(Vec<usize>, Vec<f64>), u: f64) -> usize {
    let mut acc = 0.0;
    for (&k, &p) in law.0.iter().zip(&law.1) {
        acc += p;
        if u < acc {
            return k;
        }
    }
    *law.0.last().unwrap()
}

fn within_3_sigma(observed: f64, p: f64, trials: f64) -> bool {
    (observed - p).abs() <= 3.0 * (p * (1.0 - p) / trials).sqrt()
}

/// Pearson statistic of `counts` against a common expectation, checked against the
/// chi-square mean `k - 1` plus three standard deviations `sqrt(2(k - 1))`. One
/// omnibus check instead of one 3σ test per cell, which over many cells would fail
/// by chance most of the time.
fn uniform_within_3_sigma(counts: &[usize], expected: f64) -> bool {
    let chi2: f64 = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    let dof = (counts.len() - 1) as f64;
    chi2 <= dof + 3.0 * (2.0 * dof).sqrt()
}

#[test]
fn degree_tail_matches_reference_sampler() {
    // Cutoff solved here by plain bisection on the reference mean.
    let (mut lo, mut hi) = (1.0, 180.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if mean_of(&reference_law(mid, 180, 3.0)) < 10.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let law = reference_law(lo, 180, 3.0);
    let p_tail: f64 = law
        .0
        .iter()
        .zip(&law.1)
        .filter(|(&k, _)| k >= 40)
        .map(|(_, &p)| p)
        .sum();

    let trials = 100_000;
    let params = LfrParams {
        n: trials,
        ..LfrParams::default()
    };
    let mut rng = rng_from_seed(31);
    let degrees = sample_degrees(&params, &mut rng).unwrap();
    let observed = degrees.iter().filter(|&&k| k >= 40).count() as f64 / trials as f64;
    assert!(
        within_3_sigma(observed, p_tail, trials as f64),
        "tail {observed} vs {p_tail}"
    );

    let mut ref_rng = rng_from_seed(32);
    let reference = (0..trials)
        .filter(|_| draw(&law, ref_rng.gen()) >= 40)
        .count() as f64
        / trials as f64;
    let spread = 3.0 * (2.0 * p_tail * (1.0 - p_tail) / trials as f64).sqrt();
    assert!((observed - reference).abs() <= spread);
    assert!(degrees.iter().all(|&k| (1..=180).contains(&k)));
    assert_eq!(degrees.iter().sum::<usize>() % 2, 0);
}

#[test]
fn community_size_histogram_matches_reference() {
    let law = reference_law(5.0, 180, 2.0);
    let bins = [(5, 5), (6, 10), (11, 20), (21, 50), (51, 180)];
    let expected: Vec<f64> = bins
        .iter()
        .map(|&(a, b)| {
            law.0
                .iter()
                .zip(&law.1)
                .filter(|(&k, _)| (a..=b).contains(&k))
                .map(|(_, &p)| p)
                .sum()
        })
        .collect();

    let params = LfrParams::default();
    let mut rng = rng_from_seed(8);
    let mut sizes = Vec::new();
    while sizes.len() < 10_000 {
        let drawn = sample_community_sizes(&params, &mut rng).unwrap();
        assert_eq!(drawn.iter().sum::<usize>(), 7500);
        sizes.extend(drawn);
    }
    let total = sizes.len() as f64;
    for (&(a, b), &p) in bins.iter().zip(&expected) {
        let got = sizes.iter().filter(|&&s| (a..=b).contains(&s)).count() as f64 / total;
        assert!(within_3_sigma(got, p, total), "bin {a}-{b}: {got} vs {p}");
    }
}

#[test]
fn degenerate_size_bounds() {
    let params = LfrParams {
        n: 600,
        c_min: 20,
        c_max: 20,
        ..LfrParams::default()
    };
    let sizes = sample_community_sizes(&params, &mut rng_from_seed(0)).unwrap();
    assert_eq!(sizes, vec![20; 30]);
}

fn two_cliques_with_bridge() -> Graph {
    let mut edges = Vec::new();
    for base in [0, 10] {
        for a in base..base + 10 {
            for b in a + 1..base + 10 {
                edges.push((a, b));
            }
        }
    }
    edges.push((9, 10));
    Graph::from_edges(20, &edges).unwrap()
}

#[test]
fn cbf_favours_bridge_endpoints() {
    let g = two_cliques_with_bridge();
    let mut rng = rng_from_seed(4);
    let trials = 1000;
    let hits = (0..trials)
        .filter(|_| {
            let plan = plan_cbf(&g, 0.05, &mut rng).unwrap();
            assert_eq!(plan.len(), 1);
            matches!(plan.order[0], 9 | 10)
        })
        .count() as f64;
    let uniform = 2.0 / 20.0;
    let sd = (uniform * (1.0 - uniform) / trials as f64).sqrt();
    assert!(
        hits / trials as f64 > uniform + 3.0 * sd,
        "bridge share {}",
        hits / 1000.0
    );
}

#[test]
fn random_plans_are_uniform() {
    let g = two_cliques_with_bridge();
    let mut rng = rng_from_seed(6);
    let trials = 10_000;
    let mut counts = [0usize; 20];
    for _ in 0..trials {
        for v in plan_random(&g, 0.1, &mut rng).unwrap().order {
            counts[v] += 1;
        }
    }
    // Each node is picked with probability 2/20 per plan.
    assert!(
        uniform_within_3_sigma(&counts, 0.1 * trials as f64),
        "{counts:?}"
    );
}

#[test]
fn seeds_are_uniform_over_active_nodes() {
    let edges: Vec<_> = (0..100).map(|i| (i, (i + 1) % 100)).collect();
    let g = Graph::from_edges(100, &edges)
        .unwrap()
        .remove_nodes(&[0, 1, 2, 3, 4])
        .unwrap();
    let params = SirParams {
        initial_infected_fraction: 0.02,
        ..SirParams::default()
    };
    let mut rng = rng_from_seed(12);
    let trials = 10_000;
    let mut counts = [0usize; 100];
    for _ in 0..trials {
        let st = seed_infection(&g, &params, &mut rng).unwrap();
        for (v, s) in st.states.iter().enumerate() {
            if *s == NodeState::Infected {
                counts[v] += 1;
            }
        }
    }
    assert!(counts[..5].iter().all(|&c| c == 0));
    // round(0.02 * 95) = 2 seeds among 95 active nodes.
    let expected = 2.0 / 95.0 * trials as f64;
    assert!(uniform_within_3_sigma(&counts[5..], expected), "{counts:?}");
}

#[test]
fn two_infected_neighbours_infect_at_019() {
    let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
    let params = SirParams {
        lambda: 0.1,
        sigma: 0.0,
        ..SirParams::default()
    };
    let start = EpidemicState {
        states: vec![
            NodeState::Infected,
            NodeState::Susceptible,
            NodeState::Infected,
        ],
        step: 0,
    };
    let mut rng = rng_from_seed(3);
    let trials = 100_000;
    let infected = (0..trials)
        .filter(|_| sir::step(&g, &start, &params, &mut rng).states[1] == NodeState::Infected)
        .count() as f64;
    let p = 1.0 - 0.9f64.powi(2);
    assert!(within_3_sigma(infected / trials as f64, p, trials as f64));
}

#[test]
fn certain_recovery_empties_the_infected_set() {
    let g = two_cliques_with_bridge();
    let params = SirParams {
        lambda: 0.5,
        sigma: 1.0,
        initial_infected_fraction: 0.2,
        ..SirParams::default()
    };
    let mut rng = rng_from_seed(1);
    let st = seed_infection(&g, &params, &mut rng).unwrap();
    let next = sir::step(&g, &st, &params, &mut rng);
    for (before, after) in st.states.iter().zip(&next.states) {
        if *before == NodeState::Infected {
            assert_eq!(*after, NodeState::Resistant);
        }
    }
}

#[test]
fn more_immunization_means_fewer_infections_on_average() {
    let net = commimmune::lfr::generate(&LfrParams {
        n: 1500,
        max_degree: 80,
        c_max: 100,
        seed: 21,
        ..LfrParams::default()
    })
    .unwrap();
    let params = SirParams::default();
    let runs = 40;
    let mut previous: Option<(f64, f64)> = None;
    for fraction in [0.0, 0.1, 0.2, 0.3] {
        let plan = plan_global(&net.graph, StrategyKind::GlobalDegree, fraction).unwrap();
        let residual = net.graph.remove_nodes(&plan.order).unwrap();
        let mut rng = rng_from_seed(77);
        let totals: Vec<f64> = (0..runs)
            .map(|_| {
                sir::run(&residual, &params, &mut rng)
                    .unwrap()
                    .total_ever_infected as f64
            })
            .collect();
        let mean = totals.iter().sum::<f64>() / runs as f64;
        let var = totals.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / runs as f64;
        let se = (var / runs as f64).sqrt();
        if let Some((m, s)) = previous {
            assert!(
                mean <= m + 3.0 * (s * s + se * se).sqrt(),
                "{fraction}: {mean} after {m}"
            );
        }
        previous = Some((mean, se));
    }
}
