//! Node influence scores: total degree, shortest-path betweenness and the
//! community-level in/out degree measures.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{split_degree, Graph, NodeId, Partition};

/// Relative slack under which two floating-point scores count as tied.
pub const TIE_EPSILON: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScoreKind {
    Degree,
    Betweenness,
    InDegree,
    OutDegree,
    InOutDiff,
    OutInDiff,
}

impl ScoreKind {
    pub fn name(self) -> &'static str {
        match self {
            ScoreKind::Degree => "degree",
            ScoreKind::Betweenness => "betweenness",
            ScoreKind::InDegree => "in_degree",
            ScoreKind::OutDegree => "out_degree",
            ScoreKind::InOutDiff => "in_out_diff",
            ScoreKind::OutInDiff => "out_in_diff",
        }
    }

    fn is_community(self) -> bool {
        matches!(
            self,
            ScoreKind::InDegree
                | ScoreKind::OutDegree
                | ScoreKind::InOutDiff
                | ScoreKind::OutInDiff
        )
    }
}

impl fmt::Display for ScoreKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScoreKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            ScoreKind::Degree,
            ScoreKind::Betweenness,
            ScoreKind::InDegree,
            ScoreKind::OutDegree,
            ScoreKind::InOutDiff,
            ScoreKind::OutInDiff,
        ]
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| Error::Config(format!("unknown score kind {s:?}")))
    }
}

/// One score per active node, in ascending node order.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreTable {
    kind: ScoreKind,
    entries: Vec<(NodeId, f64)>,
}

impl ScoreTable {
    fn from_dense(g: &Graph, kind: ScoreKind, dense: &[f64]) -> Self {
        ScoreTable {
            kind,
            entries: g.active_nodes().map(|i| (i, dense[i])).collect(),
        }
    }

    pub fn kind(&self) -> ScoreKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, node: NodeId) -> Option<f64> {
        self.entries
            .binary_search_by_key(&node, |&(n, _)| n)
            .ok()
            .map(|idx| self.entries[idx].1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        self.entries.iter().copied()
    }

    /// Nodes by descending score, ties by ascending id.
    pub fn ranking(&self) -> Vec<NodeId> {
        let mut order: Vec<(NodeId, f64)> = self.entries.clone();
        order.sort_by(|a, b| compare_desc(a.1, b.1).then(a.0.cmp(&b.0)));
        order.into_iter().map(|(n, _)| n).collect()
    }

    /// CSV with header `node_id,score,kind`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("node_id,score,kind\n");
        for &(n, s) in &self.entries {
            let _ = writeln!(out, "{n},{s},{}", self.kind);
        }
        out
    }
}

/// Descending order that treats values within [`TIE_EPSILON`] as equal.
pub(crate) fn compare_desc(a: f64, b: f64) -> std::cmp::Ordering {
    if nearly_equal(a, b) {
        std::cmp::Ordering::Equal
    } else {
        b.partial_cmp(&a).unwrap_or(std::cmp::Ordering::Equal)
    }
}

pub(crate) fn nearly_equal(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_EPSILON * a.abs().max(b.abs()).max(1.0)
}

pub fn degree_scores(g: &Graph) -> ScoreTable {
    let dense: Vec<f64> = g.degrees().into_iter().map(|d| d as f64).collect();
    ScoreTable::from_dense(g, ScoreKind::Degree, &dense)
}

pub fn community_scores(g: &Graph, p: &Partition, kind: ScoreKind) -> Result<ScoreTable> {
    if !kind.is_community() {
        return Err(Error::Config(format!("{kind} is not a community score")));
    }
    let mut entries = Vec::with_capacity(g.active_count());
    for i in g.active_nodes() {
        let split = split_degree(g, p, i)?;
        let (k_in, k_out) = (split.k_in as f64, split.k_out as f64);
        let score = match kind {
            ScoreKind::InDegree => k_in,
            ScoreKind::OutDegree => k_out,
            ScoreKind::InOutDiff => k_in - k_out,
            ScoreKind::OutInDiff => k_out - k_in,
            _ => unreachable!(),
        };
        entries.push((i, score));
    }
    Ok(ScoreTable { kind, entries })
}

/// Unnormalized shortest-path betweenness; each unordered pair counted once.
pub fn betweenness(g: &Graph) -> ScoreTable {
    let n = g.node_count();
    let csr = Csr::from_lists((0..n).map(|i| g.neighbors(i)));
    let mut raw = vec![0.0; n];
    let mut ws = Brandes::new(n);
    for s in 0..n {
        ws.accumulate(s, &csr, &mut raw);
    }
    let dense: Vec<f64> = raw.iter().map(|v| v / 2.0).collect();
    ScoreTable::from_dense(g, ScoreKind::Betweenness, &dense)
}

/// Compressed adjacency with 32-bit ids, rebuilt whenever the graph changes.
pub(crate) struct Csr {
    offsets: Vec<u32>,
    targets: Vec<u32>,
}

impl Csr {
    pub(crate) fn from_lists<'a, I>(lists: I) -> Self
    where
        I: Iterator<Item = &'a [NodeId]>,
    {
        let mut offsets = vec![0u32];
        let mut targets = Vec::new();
        for list in lists {
            targets.extend(list.iter().map(|&v| v as u32));
            offsets.push(targets.len() as u32);
        }
        Csr { offsets, targets }
    }

    #[inline]
    fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v] as usize..self.offsets[v + 1] as usize]
    }
}

const UNSEEN: u32 = u32::MAX;

/// Reusable single-source buffers for Brandes dependency accumulation. Only the nodes
/// reached from a source are touched, so per-source cost is bounded by its component.
pub(crate) struct Brandes {
    dist: Vec<u32>,
    sigma: Vec<f64>,
    delta: Vec<f64>,
    order: Vec<u32>,
}

impl Brandes {
    pub(crate) fn new(n: usize) -> Self {
        Brandes {
            dist: vec![UNSEEN; n],
            sigma: vec![0.0; n],
            delta: vec![0.0; n],
            order: Vec::with_capacity(n),
        }
    }

    /// Adds the dependencies of `source` onto `raw`. Summing over every source counts
    /// each unordered pair twice.
    pub(crate) fn accumulate(&mut self, source: NodeId, csr: &Csr, raw: &mut [f64]) {
        let (dist, sigma, delta, order) = (
            &mut self.dist,
            &mut self.sigma,
            &mut self.delta,
            &mut self.order,
        );
        order.clear();
        dist[source] = 0;
        sigma[source] = 1.0;
        order.push(source as u32);
        let mut head = 0;
        while head < order.len() {
            let v = order[head] as usize;
            head += 1;
            let next = dist[v] + 1;
            let sv = sigma[v];
            for &w in csr.neighbors(v) {
                let w = w as usize;
                if dist[w] == UNSEEN {
                    dist[w] = next;
                    order.push(w as u32);
                }
                if dist[w] == next {
                    sigma[w] += sv;
                }
            }
        }
        for idx in (1..order.len()).rev() {
            let w = order[idx] as usize;
            let parent = dist[w] - 1;
            let coeff = (1.0 + delta[w]) / sigma[w];
            for &v in csr.neighbors(w) {
                let v = v as usize;
                if dist[v] == parent {
                    delta[v] += sigma[v] * coeff;
                }
            }
            raw[w] += delta[w];
        }
        for &v in order.iter() {
            let v = v as usize;
            dist[v] = UNSEEN;
            sigma[v] = 0.0;
            delta[v] = 0.0;
        }
    }
}

/// Betweenness that follows a sequence of node removals. After a removal only the
/// component that contained the removed node is recomputed; every other component's
/// scores are unaffected by it.
pub(crate) struct ResidualBetweenness {
    adjacency: Vec<Vec<NodeId>>,
    active: Vec<bool>,
    raw: Vec<f64>,
    ws: Brandes,
    seen: Vec<bool>,
}

impl ResidualBetweenness {
    pub(crate) fn new(g: &Graph) -> Self {
        let n = g.node_count();
        let adjacency: Vec<Vec<NodeId>> = (0..n).map(|i| g.neighbors(i).to_vec()).collect();
        let csr = Csr::from_lists(adjacency.iter().map(Vec::as_slice));
        let mut raw = vec![0.0; n];
        let mut ws = Brandes::new(n);
        for s in 0..n {
            ws.accumulate(s, &csr, &mut raw);
        }
        ResidualBetweenness {
            active: (0..n).map(|i| g.is_active(i)).collect(),
            adjacency,
            raw,
            ws,
            seen: vec![false; n],
        }
    }

    /// Highest-scoring active node, ties by ascending id.
    pub(crate) fn best(&self) -> Option<NodeId> {
        self.top(1).first().copied()
    }

    /// The `k` highest-scoring active nodes, ties by ascending id.
    pub(crate) fn top(&self, k: usize) -> Vec<NodeId> {
        let mut ranked: Vec<(NodeId, f64)> = (0..self.raw.len())
            .filter(|&i| self.active[i])
            .map(|i| (i, self.raw[i]))
            .collect();
        if k == 1 {
            let mut best: Option<(NodeId, f64)> = None;
            for (i, score) in ranked {
                match best {
                    Some((_, b)) if compare_desc(score, b) != std::cmp::Ordering::Less => {}
                    _ => best = Some((i, score)),
                }
            }
            return best.map(|(i, _)| i).into_iter().collect();
        }
        ranked.sort_by(|a, b| compare_desc(a.1, b.1).then(a.0.cmp(&b.0)));
        ranked.into_iter().take(k).map(|(i, _)| i).collect()
    }

    /// Removes several nodes, then recomputes the components they belonged to.
    pub(crate) fn remove_batch(&mut self, victims: &[NodeId]) {
        let mut former = Vec::new();
        for &v in victims {
            let list = std::mem::take(&mut self.adjacency[v]);
            for &u in &list {
                self.adjacency[u].retain(|&x| x != v);
            }
            former.extend(list);
            self.active[v] = false;
            self.raw[v] = 0.0;
        }

        // The old components, minus the victims, are the union of the components of
        // the victims' former neighbors.
        let mut affected = Vec::new();
        for &start in &former {
            if self.seen[start] || !self.active[start] {
                continue;
            }
            self.seen[start] = true;
            let mut head = affected.len();
            affected.push(start);
            while head < affected.len() {
                let x = affected[head];
                head += 1;
                for &y in &self.adjacency[x] {
                    if !self.seen[y] {
                        self.seen[y] = true;
                        affected.push(y);
                    }
                }
            }
        }
        affected.sort_unstable();
        for &x in &affected {
            self.seen[x] = false;
            self.raw[x] = 0.0;
        }
        if affected.is_empty() {
            return;
        }
        let csr = Csr::from_lists(self.adjacency.iter().map(Vec::as_slice));
        for &s in &affected {
            self.ws.accumulate(s, &csr, &mut self.raw);
        }
    }

    #[cfg(test)]
    pub(crate) fn scores(&self) -> Vec<f64> {
        self.raw.iter().map(|v| v / 2.0).collect()
    }
}
