//! Immunization planners.
//!
//! Global planners rank every node and recompute scores after each removal. Community
//! planners rank nodes inside each community once, on the intact graph, and take a
//! quota proportional to community size. CBF and random selection are stochastic.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::centrality::{community_scores, compare_desc, ResidualBetweenness, ScoreKind};
use crate::error::{Error, Result};
use crate::graph::{CommunityId, Graph, NodeId, Partition};
use crate::util::{floor_slack, quota};

/// Steps a CBF walk may take before falling back to its last unmarked node.
pub const CBF_STEP_CAP: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StrategyKind {
    GlobalDegree,
    GlobalBetweenness,
    IndegNodes,
    OutdegNodes,
    InOutDiffNodes,
    OutInDiffNodes,
    Cbf,
    Random,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 8] = [
        StrategyKind::GlobalDegree,
        StrategyKind::GlobalBetweenness,
        StrategyKind::IndegNodes,
        StrategyKind::OutdegNodes,
        StrategyKind::InOutDiffNodes,
        StrategyKind::OutInDiffNodes,
        StrategyKind::Cbf,
        StrategyKind::Random,
    ];

    /// The seven strategies compared in the experiments (everything but `Random`).
    pub const COMPARED: [StrategyKind; 7] = [
        StrategyKind::GlobalDegree,
        StrategyKind::GlobalBetweenness,
        StrategyKind::IndegNodes,
        StrategyKind::OutdegNodes,
        StrategyKind::InOutDiffNodes,
        StrategyKind::OutInDiffNodes,
        StrategyKind::Cbf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::GlobalDegree => "global_deg",
            StrategyKind::GlobalBetweenness => "global_bet_cent",
            StrategyKind::IndegNodes => "indeg_nodes",
            StrategyKind::OutdegNodes => "outdeg_nodes",
            StrategyKind::InOutDiffNodes => "inout_diff_nodes",
            StrategyKind::OutInDiffNodes => "outin_diff_nodes",
            StrategyKind::Cbf => "cbf",
            StrategyKind::Random => "random",
        }
    }

    pub fn is_global(self) -> bool {
        matches!(
            self,
            StrategyKind::GlobalDegree | StrategyKind::GlobalBetweenness
        )
    }

    pub fn is_stochastic(self) -> bool {
        matches!(self, StrategyKind::Cbf | StrategyKind::Random)
    }

    pub fn needs_partition(self) -> bool {
        self.community_score().is_some()
    }

    fn community_score(self) -> Option<ScoreKind> {
        match self {
            StrategyKind::IndegNodes => Some(ScoreKind::InDegree),
            StrategyKind::OutdegNodes => Some(ScoreKind::OutDegree),
            StrategyKind::InOutDiffNodes => Some(ScoreKind::InOutDiff),
            StrategyKind::OutInDiffNodes => Some(ScoreKind::OutInDiff),
            _ => None,
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StrategyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown strategy {s:?}")))
    }
}

/// Nodes to immunize, in removal order.
#[derive(Clone, Debug, PartialEq)]
pub struct ImmunizationPlan {
    pub order: Vec<NodeId>,
    pub strategy: StrategyKind,
    pub fraction: f64,
}

impl ImmunizationPlan {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Leading part of a greedy plan, sized for a smaller fraction of `node_count`.
    /// Greedy global plans are prefix-closed, so this equals planning that fraction
    /// directly.
    pub fn prefix(&self, fraction: f64, node_count: usize) -> ImmunizationPlan {
        let take = quota(fraction, node_count).min(self.order.len());
        ImmunizationPlan {
            order: self.order[..take].to_vec(),
            strategy: self.strategy,
            fraction,
        }
    }

    /// CSV with header `rank,node_id,strategy,fraction`; ranks start at 1.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rank,node_id,strategy,fraction\n");
        for (rank, node) in self.order.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{node},{},{}",
                rank + 1,
                self.strategy,
                self.fraction
            );
        }
        out
    }
}

fn check_fraction(fraction: f64) -> Result<()> {
    if (0.0..=1.0).contains(&fraction) {
        Ok(())
    } else {
        Err(Error::Config(format!("fraction {fraction} outside [0, 1]")))
    }
}

fn plan_size(g: &Graph, fraction: f64) -> Result<usize> {
    check_fraction(fraction)?;
    let size = quota(fraction, g.node_count());
    if size > g.active_count() {
        return Err(Error::Capacity(format!(
            "plan needs {size} nodes but only {} are active",
            g.active_count()
        )));
    }
    Ok(size)
}

/// Repeatedly removes the top-ranked active node and rescores the residual graph.
pub fn plan_global(g: &Graph, kind: StrategyKind, fraction: f64) -> Result<ImmunizationPlan> {
    plan_global_batched(g, kind, fraction, 1)
}

/// Like [`plan_global`], but betweenness is recomputed only after every `batch`
/// removals; between recomputations the next nodes come from the stale ranking.
/// `batch = 1` is exact recalculation. Degree plans are always exact, since their
/// update is cheap.
pub fn plan_global_batched(
    g: &Graph,
    kind: StrategyKind,
    fraction: f64,
    batch: usize,
) -> Result<ImmunizationPlan> {
    if batch == 0 {
        return Err(Error::Config("recalculation batch must be positive".into()));
    }
    let size = plan_size(g, fraction)?;
    let order = match kind {
        StrategyKind::GlobalDegree => greedy_degree(g, size),
        StrategyKind::GlobalBetweenness => greedy_betweenness(g, size, batch),
        other => {
            return Err(Error::Config(format!("{other} is not a global strategy")));
        }
    };
    Ok(ImmunizationPlan {
        order,
        strategy: kind,
        fraction,
    })
}

fn greedy_degree(g: &Graph, size: usize) -> Vec<NodeId> {
    let mut degree = g.degrees();
    // Largest element = highest degree, then lowest id.
    let mut queue: BTreeSet<(usize, Reverse<NodeId>)> =
        g.active_nodes().map(|i| (degree[i], Reverse(i))).collect();
    let mut residual = g.clone();
    let mut order = Vec::with_capacity(size);
    while order.len() < size {
        let (_, Reverse(v)) = queue.pop_last().expect("size <= active count");
        order.push(v);
        for &u in residual.neighbors(v) {
            queue.remove(&(degree[u], Reverse(u)));
            degree[u] -= 1;
            queue.insert((degree[u], Reverse(u)));
        }
        residual.isolate(v);
    }
    order
}

fn greedy_betweenness(g: &Graph, size: usize, batch: usize) -> Vec<NodeId> {
    let mut order = Vec::with_capacity(size);
    if size == 0 {
        return order;
    }
    let mut residual = ResidualBetweenness::new(g);
    while order.len() < size {
        let take = batch.min(size - order.len());
        let chosen = if take == 1 {
            residual.best().into_iter().collect()
        } else {
            residual.top(take)
        };
        assert_eq!(chosen.len(), take, "size <= active count");
        residual.remove_batch(&chosen);
        order.extend(chosen);
    }
    order
}

/// Per-community removal counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotaTable(pub BTreeMap<CommunityId, usize>);

impl QuotaTable {
    pub fn get(&self, c: CommunityId) -> usize {
        self.0.get(&c).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.0.values().sum()
    }
}

/// Largest-remainder apportionment of `round(fraction * n)` removals across
/// communities in proportion to their size. Ties in remainder go to the lower id.
pub fn allocate_quota(p: &Partition, fraction: f64) -> Result<QuotaTable> {
    check_fraction(fraction)?;
    let total = quota(fraction, p.covered_count());
    let mut table = BTreeMap::new();
    let mut remainders = Vec::new();
    for (c, members) in p.communities() {
        let exact = fraction * members.len() as f64;
        let base = floor_slack(exact).min(members.len());
        table.insert(c, base);
        remainders.push((c, exact - base as f64, members.len()));
    }
    let assigned: usize = table.values().sum();
    let mut left = total.saturating_sub(assigned);
    remainders.sort_by(|a, b| compare_desc(a.1, b.1).then(a.0.cmp(&b.0)));
    for (c, _, size) in remainders {
        if left == 0 {
            break;
        }
        let slot = table.get_mut(&c).expect("inserted above");
        if *slot < size {
            *slot += 1;
            left -= 1;
        }
    }
    Ok(QuotaTable(table))
}

/// Takes the top-scoring nodes of each community up to its quota. Scores are
/// computed once on the intact graph. The emitted order interleaves communities
/// round-robin, larger communities first.
pub fn plan_community(
    g: &Graph,
    p: &Partition,
    kind: StrategyKind,
    fraction: f64,
) -> Result<ImmunizationPlan> {
    let score_kind = kind
        .community_score()
        .ok_or_else(|| Error::Config(format!("{kind} is not a community strategy")))?;
    check_fraction(fraction)?;
    p.check_covers(g)?;
    let scores = community_scores(g, p, score_kind)?;
    let quotas = allocate_quota(p, fraction)?;

    let mut picks: Vec<(usize, CommunityId, Vec<NodeId>)> = Vec::new();
    for (c, members) in p.communities() {
        let want = quotas.get(c);
        if want == 0 {
            continue;
        }
        let mut ranked: Vec<(NodeId, f64)> = members
            .iter()
            .filter_map(|&i| scores.get(i).map(|s| (i, s)))
            .collect();
        if ranked.len() < want {
            return Err(Error::Capacity(format!(
                "community {c} has {} active members but a quota of {want}",
                ranked.len()
            )));
        }
        ranked.sort_by(|a, b| compare_desc(a.1, b.1).then(a.0.cmp(&b.0)));
        picks.push((
            members.len(),
            c,
            ranked.into_iter().take(want).map(|(i, _)| i).collect(),
        ));
    }
    picks.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));

    let mut order = Vec::with_capacity(quotas.total());
    let rounds = picks.iter().map(|p| p.2.len()).max().unwrap_or(0);
    for r in 0..rounds {
        order.extend(picks.iter().filter_map(|p| p.2.get(r).copied()));
    }
    Ok(ImmunizationPlan {
        order,
        strategy: kind,
        fraction,
    })
}

/// Community bridge finder. Each selection starts a random walk (no immediate
/// backtracking) at a random unmarked node. From the walk's third node on, the first
/// newly visited, unmarked node with at most one link into the earlier part of the
/// walk is selected. A walk that gets stuck or exceeds [`CBF_STEP_CAP`] steps selects
/// its most recent unmarked node instead.
pub fn plan_cbf<R: Rng + ?Sized>(
    g: &Graph,
    fraction: f64,
    rng: &mut R,
) -> Result<ImmunizationPlan> {
    let size = plan_size(g, fraction)?;
    let n = g.node_count();
    let mut marked = vec![false; n];
    let mut pool: Vec<NodeId> = g.active_nodes().collect();
    let mut pool_pos = vec![usize::MAX; n];
    for (idx, &v) in pool.iter().enumerate() {
        pool_pos[v] = idx;
    }
    // Visit stamps: stamp[v] == walk_id iff v is on the current walk.
    let mut stamp = vec![0u32; n];
    let mut walk_id = 0u32;
    let mut walk: Vec<NodeId> = Vec::with_capacity(CBF_STEP_CAP + 1);
    let mut order = Vec::with_capacity(size);

    while order.len() < size {
        walk_id += 1;
        walk.clear();
        let start = pool[rng.gen_range(0..pool.len())];
        walk.push(start);
        stamp[start] = walk_id;
        let mut prev: Option<NodeId> = None;
        let mut current = start;
        let mut chosen = None;

        for _ in 0..CBF_STEP_CAP {
            let options: Vec<NodeId> = g
                .neighbors(current)
                .iter()
                .copied()
                .filter(|&u| Some(u) != prev)
                .collect();
            let Some(&next) = options.choose(rng) else {
                break;
            };
            let fresh = stamp[next] != walk_id;
            if fresh && walk.len() >= 2 && !marked[next] {
                let links = g
                    .neighbors(next)
                    .iter()
                    .filter(|&&u| stamp[u] == walk_id)
                    .count();
                if links <= 1 {
                    chosen = Some(next);
                    break;
                }
            }
            walk.push(next);
            stamp[next] = walk_id;
            prev = Some(current);
            current = next;
        }

        let pick = chosen.unwrap_or_else(|| {
            *walk
                .iter()
                .rev()
                .find(|&&v| !marked[v])
                .expect("walk start is unmarked")
        });
        marked[pick] = true;
        order.push(pick);
        let idx = pool_pos[pick];
        let last = *pool.last().expect("pool non-empty");
        pool.swap_remove(idx);
        if idx < pool.len() {
            pool_pos[last] = idx;
        }
    }
    Ok(ImmunizationPlan {
        order,
        strategy: StrategyKind::Cbf,
        fraction,
    })
}

/// Uniform sample of active nodes without replacement.
pub fn plan_random<R: Rng + ?Sized>(
    g: &Graph,
    fraction: f64,
    rng: &mut R,
) -> Result<ImmunizationPlan> {
    let size = plan_size(g, fraction)?;
    let mut active: Vec<NodeId> = g.active_nodes().collect();
    let (picked, _) = active.partial_shuffle(rng, size);
    Ok(ImmunizationPlan {
        order: picked.to_vec(),
        strategy: StrategyKind::Random,
        fraction,
    })
}

/// Dispatches to the planner for `kind`. `p` is required by community strategies.
pub fn plan<R: Rng + ?Sized>(
    g: &Graph,
    p: Option<&Partition>,
    kind: StrategyKind,
    fraction: f64,
    rng: &mut R,
) -> Result<ImmunizationPlan> {
    match kind {
        StrategyKind::GlobalDegree | StrategyKind::GlobalBetweenness => {
            plan_global(g, kind, fraction)
        }
        StrategyKind::Cbf => plan_cbf(g, fraction, rng),
        StrategyKind::Random => plan_random(g, fraction, rng),
        _ => {
            let p =
                p.ok_or_else(|| Error::Config(format!("{kind} needs a community partition")))?;
            plan_community(g, p, kind, fraction)
        }
    }
}
