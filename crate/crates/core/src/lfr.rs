//! LFR benchmark networks: power-law degrees, power-law community sizes and a
//! target fraction `mu` of inter-community links.
//!
//! The pipeline is: sample degrees, wire them with the configuration model, sample
//! community sizes, place nodes into communities large enough for their internal
//! degree, then rewire with degree-preserving double-edge swaps until the share of
//! inter-community links matches `mu`.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{inter_community_fraction, Graph, NodeId, Partition};
use crate::util::{derive_seed, fnv1a, rng_from_seed, round_half_up};

/// Attempts `generate` makes (with derived sub-seeds) before reporting failure.
pub const RETRY_BUDGET: usize = 5;

const DEGREE_MEAN_SLACK: f64 = 0.05;
const DEGREE_RESAMPLE_LIMIT: usize = 1000;

#[derive(Clone, Debug, PartialEq)]
pub struct LfrParams {
    pub n: usize,
    pub avg_degree: f64,
    pub max_degree: usize,
    pub mu: f64,
    pub gamma: f64,
    pub beta: f64,
    pub c_min: usize,
    pub c_max: usize,
    pub mixing_tolerance: f64,
    pub max_rewire_sweeps: usize,
    pub seed: u64,
}

impl Default for LfrParams {
    fn default() -> Self {
        LfrParams {
            n: 7500,
            avg_degree: 10.0,
            max_degree: 180,
            mu: 0.3,
            gamma: 3.0,
            beta: 2.0,
            c_min: 5,
            c_max: 180,
            mixing_tolerance: 0.02,
            max_rewire_sweeps: 100,
            seed: 0,
        }
    }
}

impl LfrParams {
    // Negated comparisons so that NaN fails every range check.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.n == 0 {
            return fail("n must be positive".into());
        }
        if !(self.mu > 0.0 && self.mu < 1.0) {
            return fail(format!("mu must lie in (0, 1), got {}", self.mu));
        }
        if !(self.gamma > 1.0) || !(self.beta > 1.0) {
            return fail(format!(
                "exponents must exceed 1 (gamma {}, beta {})",
                self.gamma, self.beta
            ));
        }
        if self.c_min == 0 || self.c_min > self.c_max {
            return fail(format!(
                "community bounds must satisfy 0 < c_min <= c_max (got {} and {})",
                self.c_min, self.c_max
            ));
        }
        if self.c_min > self.n {
            return fail(format!("c_min {} exceeds n {}", self.c_min, self.n));
        }
        if self.max_degree == 0 || self.max_degree >= self.n {
            return fail(format!(
                "max_degree must lie in [1, n - 1], got {}",
                self.max_degree
            ));
        }
        if !(self.avg_degree >= 1.0) || self.avg_degree > self.max_degree as f64 {
            return fail(format!(
                "avg_degree {} must lie in [1, max_degree]",
                self.avg_degree
            ));
        }
        if !(self.mixing_tolerance > 0.0) {
            return fail("mixing_tolerance must be positive".into());
        }
        if self.max_rewire_sweeps == 0 {
            return fail("max_rewire_sweeps must be positive".into());
        }
        Ok(())
    }

    /// `key=value` lines, one per field, in a fixed order.
    pub fn to_key_values(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "n={}", self.n);
        let _ = writeln!(out, "avg_degree={}", self.avg_degree);
        let _ = writeln!(out, "max_degree={}", self.max_degree);
        let _ = writeln!(out, "mu={}", self.mu);
        let _ = writeln!(out, "gamma={}", self.gamma);
        let _ = writeln!(out, "beta={}", self.beta);
        let _ = writeln!(out, "c_min={}", self.c_min);
        let _ = writeln!(out, "c_max={}", self.c_max);
        let _ = writeln!(out, "mixing_tolerance={}", self.mixing_tolerance);
        let _ = writeln!(out, "max_rewire_sweeps={}", self.max_rewire_sweeps);
        let _ = writeln!(out, "seed={}", self.seed);
        out
    }

    /// Sets one field from its textual value. Returns `Ok(false)` for unknown keys.
    pub fn set(&mut self, key: &str, value: &str) -> Result<bool> {
        fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("invalid value {value:?} for {key}")))
        }
        match key {
            "n" => self.n = parse(key, value)?,
            "avg_degree" => self.avg_degree = parse(key, value)?,
            "max_degree" => self.max_degree = parse(key, value)?,
            "mu" => self.mu = parse(key, value)?,
            "gamma" => self.gamma = parse(key, value)?,
            "beta" => self.beta = parse(key, value)?,
            "c_min" => self.c_min = parse(key, value)?,
            "c_max" => self.c_max = parse(key, value)?,
            "mixing_tolerance" => self.mixing_tolerance = parse(key, value)?,
            "max_rewire_sweeps" => self.max_rewire_sweeps = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            _ => return Ok(false),
        }
        Ok(true)
    }

    /// Stable key for caching networks built from these parameters.
    pub fn cache_key(&self) -> u64 {
        fnv1a(&self.to_key_values())
    }
}

/// A generated benchmark network.
#[derive(Clone, Debug, PartialEq)]
pub struct LfrNetwork {
    pub graph: Graph,
    pub partition: Partition,
    pub achieved_mu: f64,
}

impl LfrNetwork {
    /// Sidecar record: every parameter plus what was achieved.
    pub fn metadata(&self, params: &LfrParams) -> String {
        let mut out = params.to_key_values();
        let _ = writeln!(out, "achieved_mu={}", self.achieved_mu);
        let _ = writeln!(out, "node_count={}", self.graph.node_count());
        let _ = writeln!(out, "edge_count={}", self.graph.edge_count());
        let _ = writeln!(out, "community_count={}", self.partition.community_count());
        out
    }
}

/// Unnormalized weights of the truncated discrete power law `k^-exponent` on
/// `[ceil(cutoff), max]`, where the lowest value is down-weighted by the fractional
/// part of `cutoff` so that moments vary continuously with it.
pub fn power_law_weights(cutoff: f64, max: usize, exponent: f64) -> Vec<(usize, f64)> {
    let low = cutoff.floor().max(1.0) as usize;
    let frac = cutoff - low as f64;
    (low..=max)
        .map(|k| {
            let w = (k as f64).powf(-exponent);
            if k == low {
                (k, w * (1.0 - frac))
            } else {
                (k, w)
            }
        })
        .filter(|&(_, w)| w > 0.0)
        .collect()
}

fn weights_mean(weights: &[(usize, f64)]) -> f64 {
    let total: f64 = weights.iter().map(|w| w.1).sum();
    weights.iter().map(|&(k, w)| k as f64 * w).sum::<f64>() / total
}

/// Real-valued lower cutoff at which the degree distribution's mean equals `avg_degree`.
pub fn solve_degree_cutoff(avg_degree: f64, max_degree: usize, gamma: f64) -> Result<f64> {
    let mean_at = |x: f64| weights_mean(&power_law_weights(x, max_degree, gamma));
    let (mut lo, mut hi) = (1.0, max_degree as f64);
    if avg_degree < mean_at(lo) - 1e-12 || avg_degree > max_degree as f64 {
        return Err(Error::Config(format!(
            "mean degree {avg_degree} unreachable with max degree {max_degree} and exponent {gamma}"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mean_at(mid) < avg_degree {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Inverse-CDF sampler over a discrete weight table.
struct DiscreteSampler {
    values: Vec<usize>,
    cumulative: Vec<f64>,
}

impl DiscreteSampler {
    fn new(weights: &[(usize, f64)]) -> Self {
        let mut acc = 0.0;
        let mut cumulative = Vec::with_capacity(weights.len());
        for &(_, w) in weights {
            acc += w;
            cumulative.push(acc);
        }
        DiscreteSampler {
            values: weights.iter().map(|w| w.0).collect(),
            cumulative,
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().expect("non-empty table");
        let u = rng.gen::<f64>() * total;
        let idx = self.cumulative.partition_point(|&c| c <= u);
        self.values[idx.min(self.values.len() - 1)]
    }
}

/// Draws `n` degrees in `[1, max_degree]` whose mean lies within 5% of `avg_degree`
/// and whose sum is even.
pub fn sample_degrees<R: Rng + ?Sized>(params: &LfrParams, rng: &mut R) -> Result<Vec<usize>> {
    params.validate()?;
    let cutoff = solve_degree_cutoff(params.avg_degree, params.max_degree, params.gamma)?;
    let sampler = DiscreteSampler::new(&power_law_weights(cutoff, params.max_degree, params.gamma));
    for _ in 0..DEGREE_RESAMPLE_LIMIT {
        let mut degrees: Vec<usize> = (0..params.n).map(|_| sampler.sample(rng)).collect();
        let sum: usize = degrees.iter().sum();
        if sum % 2 == 1 {
            let start = rng.gen_range(0..degrees.len());
            let pick = (0..degrees.len())
                .map(|off| (start + off) % degrees.len())
                .find(|&i| degrees[i] < params.max_degree);
            match pick {
                Some(i) => degrees[i] += 1,
                None => {
                    return Err(Error::Config(
                        "odd degree sum with every node at max_degree".into(),
                    ))
                }
            }
        }
        let mean = degrees.iter().sum::<usize>() as f64 / params.n as f64;
        if (mean - params.avg_degree).abs() <= DEGREE_MEAN_SLACK * params.avg_degree {
            return Ok(degrees);
        }
    }
    Err(Error::GenerationFailure(format!(
        "no degree sample within 5% of mean {} after {DEGREE_RESAMPLE_LIMIT} draws",
        params.avg_degree
    )))
}

/// Draws community sizes in `[c_min, c_max]` that sum exactly to `n`.
pub fn sample_community_sizes<R: Rng + ?Sized>(
    params: &LfrParams,
    rng: &mut R,
) -> Result<Vec<usize>> {
    params.validate()?;
    let (n, lo, hi) = (params.n, params.c_min, params.c_max.min(params.n));
    let sampler = DiscreteSampler::new(&power_law_weights(lo as f64, hi, params.beta));
    let mut sizes = Vec::new();
    let mut total = 0;
    while total < n {
        let s = sampler.sample(rng);
        sizes.push(s);
        total += s;
    }
    // Trim the overshoot, starting from the last community drawn.
    while total > n {
        match (0..sizes.len()).rev().find(|&i| sizes[i] > lo) {
            Some(i) => {
                let cut = (sizes[i] - lo).min(total - n);
                sizes[i] -= cut;
                total -= cut;
            }
            None => {
                let dropped = sizes.pop().expect("total > n > 0");
                total -= dropped;
            }
        }
    }
    // Dropping a community may leave a deficit; grow others within bounds.
    while total < n {
        match (0..sizes.len()).rev().find(|&i| sizes[i] < hi) {
            Some(i) => {
                let add = (hi - sizes[i]).min(n - total);
                sizes[i] += add;
                total += add;
            }
            None => {
                return Err(Error::Config(format!(
                    "community sizes in [{lo}, {hi}] cannot sum to {n}"
                )))
            }
        }
    }
    Ok(sizes)
}

/// Internal degree a node of total degree `k` should keep under mixing `mu`.
pub fn internal_degree(k: usize, mu: f64) -> usize {
    round_half_up((1.0 - mu) * k as f64)
}

/// Places every node in a community whose size exceeds its internal degree (so the
/// node can have that many distinct neighbors inside it). Nodes go to a random
/// eligible community chosen proportionally to size; a full community evicts a random
/// earlier member, which is queued for placement again.
pub fn assign_communities<R: Rng + ?Sized>(
    degrees: &[usize],
    sizes: &[usize],
    mu: f64,
    rng: &mut R,
) -> Result<Partition> {
    let n = degrees.len();
    if sizes.iter().sum::<usize>() != n {
        return Err(Error::Config(format!(
            "community sizes sum to {} but there are {n} nodes",
            sizes.iter().sum::<usize>()
        )));
    }
    let internal: Vec<usize> = degrees.iter().map(|&k| internal_degree(k, mu)).collect();

    // Communities by ascending size; eligibility for internal degree d is a suffix.
    let mut by_size: Vec<usize> = (0..sizes.len()).collect();
    by_size.sort_by_key(|&c| (sizes[c], c));
    let mut prefix = Vec::with_capacity(by_size.len() + 1);
    prefix.push(0usize);
    for &c in &by_size {
        prefix.push(prefix.last().unwrap() + sizes[c]);
    }

    let mut queue: VecDeque<NodeId> = {
        let mut order: Vec<NodeId> = (0..n).collect();
        order.shuffle(rng);
        order.into()
    };
    let mut members: Vec<Vec<NodeId>> = sizes.iter().map(|&s| Vec::with_capacity(s)).collect();
    let mut community_of = vec![usize::MAX; n];
    let budget = 200 * n + 1000;
    let mut placements = 0;

    while let Some(node) = queue.pop_front() {
        placements += 1;
        if placements > budget {
            return Err(Error::GenerationFailure(format!(
                "community assignment did not settle within {budget} placements"
            )));
        }
        let first = by_size.partition_point(|&c| sizes[c] <= internal[node]);
        if first == by_size.len() {
            return Err(Error::GenerationFailure(format!(
                "node {node} needs a community larger than {} but the largest has {}",
                internal[node],
                sizes.iter().max().copied().unwrap_or(0)
            )));
        }
        let r = rng.gen_range(prefix[first]..prefix[by_size.len()]);
        let slot = prefix.partition_point(|&p| p <= r) - 1;
        let c = by_size[slot];
        members[c].push(node);
        community_of[node] = c;
        if members[c].len() > sizes[c] {
            let victim_idx = rng.gen_range(0..members[c].len() - 1);
            let victim = members[c].swap_remove(victim_idx);
            community_of[victim] = usize::MAX;
            queue.push_back(victim);
        }
    }
    Ok(Partition::from_assignment(&community_of))
}

/// Erdős–Gallai test for a simple-graph-realizable degree sequence.
pub fn is_graphical(degrees: &[usize]) -> bool {
    let mut d: Vec<usize> = degrees.to_vec();
    d.sort_unstable_by(|a, b| b.cmp(a));
    let n = d.len();
    if d.iter().sum::<usize>() % 2 == 1 {
        return false;
    }
    let mut suffix = vec![0usize; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] + d[i];
    }
    let mut left = 0usize;
    for k in 1..=n {
        left += d[k - 1];
        // indices >= k whose degree is at least k form a prefix of the tail
        let big_end = k + d[k..].partition_point(|&x| x >= k);
        let right = k * (k - 1) + (big_end - k) * k + suffix[big_end];
        if left > right {
            return false;
        }
    }
    true
}

/// Multiset of edges that tracks self-loops and multi-edges as "badness".
struct EdgeMultiset {
    edges: Vec<(NodeId, NodeId)>,
    count: HashMap<(NodeId, NodeId), u32>,
}

fn key(a: NodeId, b: NodeId) -> (NodeId, NodeId) {
    (a.min(b), a.max(b))
}

impl EdgeMultiset {
    fn new(edges: Vec<(NodeId, NodeId)>) -> Self {
        let mut count = HashMap::with_capacity(edges.len());
        for &(a, b) in &edges {
            *count.entry(key(a, b)).or_insert(0) += 1;
        }
        EdgeMultiset { edges, count }
    }

    fn is_bad(&self, idx: usize) -> bool {
        let (a, b) = self.edges[idx];
        a == b || self.count[&key(a, b)] > 1
    }

    /// Change in badness from adding (+1) or removing (-1) one copy of `(a, b)`.
    fn adjust(&mut self, a: NodeId, b: NodeId, add: bool) -> i64 {
        let entry = self.count.entry(key(a, b)).or_insert(0);
        let before = *entry;
        if add {
            *entry += 1;
        } else {
            *entry -= 1;
        }
        let after = *entry;
        if after == 0 {
            self.count.remove(&key(a, b));
        }
        let badness = |c: u32| -> i64 {
            if a == b {
                i64::from(c)
            } else {
                i64::from(c.saturating_sub(1))
            }
        };
        badness(after) - badness(before)
    }

    /// Replaces edges `i = (a, b)` and `j = (c, d)` with `(a, c)` and `(b, d)` if that
    /// does not increase badness.
    fn try_swap(&mut self, i: usize, j: usize, flip: bool) -> bool {
        let (a, b) = self.edges[i];
        let (c, d) = if flip {
            (self.edges[j].1, self.edges[j].0)
        } else {
            self.edges[j]
        };
        let mut delta = self.adjust(a, b, false) + self.adjust(c, d, false);
        delta += self.adjust(a, c, true) + self.adjust(b, d, true);
        if delta <= 0 {
            self.edges[i] = (a, c);
            self.edges[j] = (b, d);
            true
        } else {
            self.adjust(a, c, false);
            self.adjust(b, d, false);
            self.adjust(a, b, true);
            self.adjust(c, d, true);
            false
        }
    }
}

/// Stub matching followed by random double-edge swaps that remove self-loops and
/// multi-edges. Every node keeps exactly its requested degree.
pub fn wire_configuration_model<R: Rng + ?Sized>(degrees: &[usize], rng: &mut R) -> Result<Graph> {
    let stub_total: usize = degrees.iter().sum();
    if stub_total % 2 == 1 {
        return Err(Error::Config("degree sum is odd".into()));
    }
    if !is_graphical(degrees) {
        return Err(Error::Config(
            "degree sequence is not realizable as a simple graph".into(),
        ));
    }
    let mut stubs: Vec<NodeId> = degrees
        .iter()
        .enumerate()
        .flat_map(|(i, &k)| std::iter::repeat_n(i, k))
        .collect();
    stubs.shuffle(rng);
    let edges: Vec<(NodeId, NodeId)> = stubs.chunks_exact(2).map(|p| (p[0], p[1])).collect();
    let m = edges.len();
    let mut multiset = EdgeMultiset::new(edges);

    let budget = 1000 * (m + 10);
    let mut attempts = 0;
    loop {
        let bad: Vec<usize> = (0..m).filter(|&i| multiset.is_bad(i)).collect();
        if bad.is_empty() {
            break;
        }
        for i in bad {
            while multiset.is_bad(i) {
                attempts += 1;
                if attempts > budget {
                    return Err(Error::GenerationFailure(
                        "could not remove self-loops and multi-edges".into(),
                    ));
                }
                let j = rng.gen_range(0..m);
                if j != i {
                    let flip = rng.gen_bool(0.5);
                    multiset.try_swap(i, j, flip);
                }
            }
        }
    }

    let mut adjacency = vec![Vec::new(); degrees.len()];
    for &(a, b) in &multiset.edges {
        adjacency[a].push(b);
        adjacency[b].push(a);
    }
    Ok(Graph::from_adjacency(adjacency))
}

/// Mutable working copy used while rewiring.
struct Rewirer<'a> {
    adjacency: Vec<Vec<NodeId>>,
    community: &'a [usize],
    members: &'a [Vec<NodeId>],
    target: Vec<i64>,
    internal: Vec<i64>,
}

impl Rewirer<'_> {
    fn same(&self, a: NodeId, b: NodeId) -> bool {
        self.community[a] == self.community[b]
    }

    fn adjacent(&self, a: NodeId, b: NodeId) -> bool {
        let (x, y) = if self.adjacency[a].len() <= self.adjacency[b].len() {
            (a, b)
        } else {
            (b, a)
        };
        self.adjacency[x].contains(&y)
    }

    fn excess(&self, i: NodeId) -> i64 {
        self.internal[i] - self.target[i]
    }

    fn energy(&self) -> i64 {
        (0..self.adjacency.len())
            .map(|i| self.excess(i).abs())
            .sum()
    }

    fn internal_stubs(&self) -> i64 {
        self.internal.iter().sum()
    }

    fn random_neighbor<R: Rng + ?Sized>(
        &self,
        v: NodeId,
        internal: bool,
        rng: &mut R,
    ) -> Option<NodeId> {
        let list = &self.adjacency[v];
        if list.is_empty() {
            return None;
        }
        (0..8)
            .map(|_| list[rng.gen_range(0..list.len())])
            .find(|&u| self.same(u, v) == internal)
    }

    /// Energy change of replacing `(a, b), (c, d)` with `(a, c), (b, d)`.
    fn swap_delta(&self, a: NodeId, b: NodeId, c: NodeId, d: NodeId) -> (i64, [(NodeId, i64); 4]) {
        let s = |x, y| i64::from(self.same(x, y));
        let changes = [
            (a, s(a, c) - s(a, b)),
            (b, s(b, d) - s(a, b)),
            (c, s(a, c) - s(c, d)),
            (d, s(b, d) - s(c, d)),
        ];
        let delta = changes
            .iter()
            .map(|&(v, dv)| (self.excess(v) + dv).abs() - self.excess(v).abs())
            .sum();
        (delta, changes)
    }

    fn apply(&mut self, a: NodeId, b: NodeId, c: NodeId, d: NodeId, changes: [(NodeId, i64); 4]) {
        let unlink = |list: &mut Vec<NodeId>, x: NodeId| {
            let pos = list.iter().position(|&y| y == x).expect("edge present");
            list.swap_remove(pos);
        };
        unlink(&mut self.adjacency[a], b);
        unlink(&mut self.adjacency[b], a);
        unlink(&mut self.adjacency[c], d);
        unlink(&mut self.adjacency[d], c);
        self.adjacency[a].push(c);
        self.adjacency[c].push(a);
        self.adjacency[b].push(d);
        self.adjacency[d].push(b);
        for (v, dv) in changes {
            self.internal[v] += dv;
        }
    }

    /// Node `a` wants more internal links: trade an external edge `(a, b)` and an edge
    /// `(c, d)` of a community peer `c` for `(a, c)` and `(b, d)`.
    fn pull_inside<R: Rng + ?Sized>(&mut self, a: NodeId, rng: &mut R) -> bool {
        let Some(b) = self.random_neighbor(a, false, rng) else {
            return false;
        };
        let peers = &self.members[self.community[a]];
        let mut chosen = None;
        for _ in 0..6 {
            let c = peers[rng.gen_range(0..peers.len())];
            if c == a || self.adjacent(a, c) {
                continue;
            }
            chosen = Some(c);
            if self.excess(c) < 0 {
                break;
            }
        }
        let Some(c) = chosen else { return false };
        let prefer_external = rng.gen_bool(0.5);
        let Some(d) = self
            .random_neighbor(c, !prefer_external, rng)
            .or_else(|| self.random_neighbor(c, prefer_external, rng))
        else {
            return false;
        };
        if d == b || d == a || self.adjacent(b, d) {
            return false;
        }
        self.try_apply(a, b, c, d)
    }

    /// Node `a` has too many internal links: trade an internal edge `(a, c)` and an
    /// internal edge `(x, y)` of another community for `(a, x)` and `(c, y)`.
    fn push_outside<R: Rng + ?Sized>(&mut self, a: NodeId, rng: &mut R) -> bool {
        let Some(c) = self.random_neighbor(a, true, rng) else {
            return false;
        };
        let n = self.adjacency.len();
        let mut chosen = None;
        for _ in 0..6 {
            let x = rng.gen_range(0..n);
            if self.same(a, x) || self.adjacent(a, x) {
                continue;
            }
            chosen = Some(x);
            if self.excess(x) > 0 {
                break;
            }
        }
        let Some(x) = chosen else { return false };
        let Some(y) = self
            .random_neighbor(x, true, rng)
            .or_else(|| self.random_neighbor(x, false, rng))
        else {
            return false;
        };
        if y == c || y == a || self.adjacent(c, y) {
            return false;
        }
        // (a, c), (x, y) -> (a, x), (c, y)
        self.try_apply(a, c, x, y)
    }

    fn try_apply(&mut self, a: NodeId, b: NodeId, c: NodeId, d: NodeId) -> bool {
        let (delta, changes) = self.swap_delta(a, b, c, d);
        if delta <= 0 {
            self.apply(a, b, c, d, changes);
            true
        } else {
            false
        }
    }
}

/// Degree-preserving double-edge swaps that move the graph towards per-node internal
/// degrees of `(1 - mu) * k`, until the inter-community fraction is within
/// `params.mixing_tolerance` of `mu`.
///
/// Per-node targets use randomized rounding so that their sum tracks `(1 - mu) * 2m`
/// without bias, and are capped by the community size.
pub fn rewire_to_mixing<R: Rng + ?Sized>(
    g: &Graph,
    p: &Partition,
    mu: f64,
    params: &LfrParams,
    rng: &mut R,
) -> Result<Graph> {
    let n = g.node_count();
    let community = p.dense_assignment(n)?;
    let slots = community.iter().max().map_or(0, |&c| c + 1);
    let mut members = vec![Vec::new(); slots];
    for (i, &c) in community.iter().enumerate() {
        members[c].push(i);
    }
    let target: Vec<i64> = (0..n)
        .map(|i| {
            let exact = (1.0 - mu) * g.neighbors(i).len() as f64;
            let mut t = exact.floor();
            if rng.gen::<f64>() < exact - t {
                t += 1.0;
            }
            (t as i64).min(members[community[i]].len() as i64 - 1)
        })
        .collect();
    let adjacency: Vec<Vec<NodeId>> = (0..n).map(|i| g.neighbors(i).to_vec()).collect();
    let internal: Vec<i64> = (0..n)
        .map(|i| {
            adjacency[i]
                .iter()
                .filter(|&&j| community[j] == community[i])
                .count() as i64
        })
        .collect();
    let mut state = Rewirer {
        adjacency,
        community: &community,
        members: &members,
        target,
        internal,
    };

    let stubs = 2.0 * g.edge_count() as f64;
    let fraction = |s: &Rewirer| 1.0 - s.internal_stubs() as f64 / stubs;
    let mut order: Vec<NodeId> = (0..n).collect();
    let mut energy = state.energy();
    for _ in 0..params.max_rewire_sweeps {
        if energy == 0 {
            break;
        }
        order.shuffle(rng);
        for &a in &order {
            for _ in 0..4 {
                let moved = match state.excess(a) {
                    e if e < 0 => state.pull_inside(a, rng),
                    e if e > 0 => state.push_outside(a, rng),
                    _ => break,
                };
                if moved {
                    break;
                }
            }
        }
        let next = state.energy();
        let settled = next as f64 > 0.995 * energy as f64;
        energy = next;
        if settled && (fraction(&state) - mu).abs() <= params.mixing_tolerance {
            break;
        }
    }

    let out = Graph::from_adjacency(state.adjacency);
    if stubs == 0.0 {
        return Ok(out);
    }
    let achieved = inter_community_fraction(&out, p)?;
    if (achieved - mu).abs() > params.mixing_tolerance {
        return Err(Error::GenerationFailure(format!(
            "mixing fraction {achieved:.4} not within {} of {mu} after {} sweeps",
            params.mixing_tolerance, params.max_rewire_sweeps
        )));
    }
    Ok(out)
}

fn generate_once(params: &LfrParams, seed: u64) -> Result<LfrNetwork> {
    let mut rng = rng_from_seed(seed);
    let degrees = sample_degrees(params, &mut rng)?;
    let wired = wire_configuration_model(&degrees, &mut rng)?;
    let sizes = sample_community_sizes(params, &mut rng)?;
    let partition = assign_communities(&degrees, &sizes, params.mu, &mut rng)?;
    let graph = rewire_to_mixing(&wired, &partition, params.mu, params, &mut rng)?;
    let achieved_mu = inter_community_fraction(&graph, &partition)?;
    Ok(LfrNetwork {
        graph,
        partition,
        achieved_mu,
    })
}

/// Generates one benchmark network. Generation failures are retried with sub-seeds
/// derived from `params.seed`, up to [`RETRY_BUDGET`] attempts.
pub fn generate(params: &LfrParams) -> Result<LfrNetwork> {
    params.validate()?;
    let mut last = None;
    for attempt in 0..RETRY_BUDGET {
        match generate_once(params, derive_seed(params.seed, &[attempt as u64])) {
            Ok(net) => return Ok(net),
            Err(e @ Error::GenerationFailure(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}
