//! Undirected simple graphs, community partitions and the intra/inter degree split.
//!
//! Removing a node deletes its incident edges but keeps the id: the node stays in the
//! graph as an isolated, inactive entity so ids are stable across removal steps.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

pub type NodeId = usize;
pub type CommunityId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    neighbors: Vec<Vec<NodeId>>,
    removed: Vec<bool>,
    edge_count: usize,
}

impl Graph {
    pub fn empty(node_count: usize) -> Self {
        Graph {
            neighbors: vec![Vec::new(); node_count],
            removed: vec![false; node_count],
            edge_count: 0,
        }
    }

    /// Builds a graph whose node count is one past the largest id in `edges`.
    pub fn build_from_edges(edges: &[(NodeId, NodeId)]) -> Result<Self> {
        let node_count = edges.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0);
        Self::from_edges(node_count, edges)
    }

    /// Builds a graph with at least `node_count` nodes. Duplicate edges (in either
    /// orientation) and self-loops are rejected.
    pub fn from_edges(node_count: usize, edges: &[(NodeId, NodeId)]) -> Result<Self> {
        let node_count = edges
            .iter()
            .map(|&(a, b)| a.max(b) + 1)
            .max()
            .unwrap_or(0)
            .max(node_count);
        let mut neighbors = vec![Vec::new(); node_count];
        for &(a, b) in edges {
            if a == b {
                return Err(Error::Structural(format!("self-loop on node {a}")));
            }
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
        for (i, list) in neighbors.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::Structural(format!(
                    "duplicate edge ({}, {})",
                    i.min(w[0]),
                    i.max(w[0])
                )));
            }
        }
        Ok(Graph {
            removed: vec![false; node_count],
            edge_count: edges.len(),
            neighbors,
        })
    }

    /// Adjacency lists that are already known to be symmetric and simple.
    pub(crate) fn from_adjacency(mut neighbors: Vec<Vec<NodeId>>) -> Self {
        let mut stubs = 0;
        for list in &mut neighbors {
            list.sort_unstable();
            stubs += list.len();
        }
        debug_assert!(stubs % 2 == 0);
        Graph {
            removed: vec![false; neighbors.len()],
            neighbors,
            edge_count: stubs / 2,
        }
    }

    pub fn node_count(&self) -> usize {
        self.neighbors.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Sorted neighbor list. Panics on an out-of-range id.
    pub fn neighbors(&self, i: NodeId) -> &[NodeId] {
        &self.neighbors[i]
    }

    pub fn degree(&self, i: NodeId) -> Result<usize> {
        self.check_node(i)?;
        Ok(self.neighbors[i].len())
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        a < self.node_count() && self.neighbors[a].binary_search(&b).is_ok()
    }

    /// A node is active until it has been removed (immunized).
    pub fn is_active(&self, i: NodeId) -> bool {
        !self.removed[i]
    }

    pub fn active_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.node_count()).filter(|&i| !self.removed[i])
    }

    pub fn active_count(&self) -> usize {
        self.removed.iter().filter(|r| !**r).count()
    }

    pub fn removed_count(&self) -> usize {
        self.node_count() - self.active_count()
    }

    /// Every edge once, as `(low, high)` in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.neighbors.iter().enumerate().flat_map(|(i, list)| {
            list.iter()
                .copied()
                .filter(move |&j| j > i)
                .map(move |j| (i, j))
        })
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.neighbors.iter().map(Vec::len).collect()
    }

    pub fn mean_degree(&self) -> f64 {
        if self.node_count() == 0 {
            return 0.0;
        }
        2.0 * self.edge_count as f64 / self.node_count() as f64
    }

    /// Returns a copy with every victim isolated and marked inactive.
    pub fn remove_nodes(&self, victims: &[NodeId]) -> Result<Graph> {
        for &v in victims {
            self.check_node(v)?;
        }
        let mut out = self.clone();
        for &v in victims {
            out.isolate(v);
        }
        Ok(out)
    }

    pub(crate) fn isolate(&mut self, v: NodeId) {
        let list = std::mem::take(&mut self.neighbors[v]);
        for &u in &list {
            if let Ok(pos) = self.neighbors[u].binary_search(&v) {
                self.neighbors[u].remove(pos);
            }
        }
        self.edge_count -= list.len();
        self.removed[v] = true;
    }

    pub(crate) fn check_node(&self, i: NodeId) -> Result<()> {
        if i < self.node_count() {
            Ok(())
        } else {
            Err(Error::NodeOutOfBounds {
                node: i,
                node_count: self.node_count(),
            })
        }
    }

    /// Re-verifies symmetry, absence of self-loops and duplicates, and the edge count.
    pub fn check_invariants(&self) -> Result<()> {
        let mut stubs = 0;
        for (i, list) in self.neighbors.iter().enumerate() {
            stubs += list.len();
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Structural(format!(
                    "neighbor list of {i} is unsorted or has duplicates"
                )));
            }
            for &j in list {
                if j == i {
                    return Err(Error::Structural(format!("self-loop on node {i}")));
                }
                if j >= self.node_count() || self.neighbors[j].binary_search(&i).is_err() {
                    return Err(Error::Structural(format!("asymmetric edge ({i}, {j})")));
                }
            }
            if self.removed[i] && !list.is_empty() {
                return Err(Error::Structural(format!("removed node {i} has edges")));
            }
        }
        if stubs != 2 * self.edge_count {
            return Err(Error::Structural(format!(
                "edge count {} disagrees with {} stubs",
                self.edge_count, stubs
            )));
        }
        Ok(())
    }
}

/// Non-overlapping assignment of nodes to communities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    community_of: Vec<Option<CommunityId>>,
    members: BTreeMap<CommunityId, Vec<NodeId>>,
}

impl Partition {
    /// `assignment[i]` is the community of node `i`.
    pub fn from_assignment(assignment: &[CommunityId]) -> Self {
        let mut members: BTreeMap<CommunityId, Vec<NodeId>> = BTreeMap::new();
        for (node, &c) in assignment.iter().enumerate() {
            members.entry(c).or_default().push(node);
        }
        Partition {
            community_of: assignment.iter().map(|&c| Some(c)).collect(),
            members,
        }
    }

    /// Builds from `(node, community)` pairs; nodes may be listed in any order and
    /// need not be contiguous, but each may appear only once.
    pub fn from_pairs(pairs: &[(NodeId, CommunityId)]) -> Result<Self> {
        let len = pairs.iter().map(|&(n, _)| n + 1).max().unwrap_or(0);
        let mut community_of = vec![None; len];
        let mut members: BTreeMap<CommunityId, Vec<NodeId>> = BTreeMap::new();
        for &(node, c) in pairs {
            if community_of[node].replace(c).is_some() {
                return Err(Error::Structural(format!(
                    "node {node} assigned to more than one community"
                )));
            }
            members.entry(c).or_default().push(node);
        }
        for list in members.values_mut() {
            list.sort_unstable();
        }
        Ok(Partition {
            community_of,
            members,
        })
    }

    pub fn community_of(&self, node: NodeId) -> Result<CommunityId> {
        self.community_of
            .get(node)
            .copied()
            .flatten()
            .ok_or(Error::PartitionCoverage { node })
    }

    /// Sorted member list of community `c`.
    pub fn members(&self, c: CommunityId) -> Option<&[NodeId]> {
        self.members.get(&c).map(Vec::as_slice)
    }

    /// Communities in ascending id order.
    pub fn communities(&self) -> impl Iterator<Item = (CommunityId, &[NodeId])> {
        self.members.iter().map(|(&c, m)| (c, m.as_slice()))
    }

    pub fn community_count(&self) -> usize {
        self.members.len()
    }

    pub fn covered_count(&self) -> usize {
        self.community_of.iter().filter(|c| c.is_some()).count()
    }

    pub fn largest_size(&self) -> usize {
        self.members.values().map(Vec::len).max().unwrap_or(0)
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.members.values().map(Vec::len).collect()
    }

    /// Errors with the first uncovered node of `g`, if any.
    pub fn check_covers(&self, g: &Graph) -> Result<()> {
        (0..g.node_count()).try_for_each(|i| self.community_of(i).map(|_| ()))
    }

    /// Dense `node -> community` lookup for a partition known to cover `0..n`.
    pub(crate) fn dense_assignment(&self, n: usize) -> Result<Vec<CommunityId>> {
        (0..n).map(|i| self.community_of(i)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DegreeSplit {
    pub k_in: usize,
    pub k_out: usize,
}

impl DegreeSplit {
    pub fn total(&self) -> usize {
        self.k_in + self.k_out
    }
}

/// Splits the degree of `i` into links inside and outside its community.
pub fn split_degree(g: &Graph, p: &Partition, i: NodeId) -> Result<DegreeSplit> {
    g.check_node(i)?;
    let own = p.community_of(i)?;
    let mut split = DegreeSplit { k_in: 0, k_out: 0 };
    for &j in g.neighbors(i) {
        if p.community_of(j)? == own {
            split.k_in += 1;
        } else {
            split.k_out += 1;
        }
    }
    Ok(split)
}

/// Number of edges whose endpoints lie in different communities.
pub fn inter_community_edges(g: &Graph, p: &Partition) -> Result<usize> {
    let mut count = 0;
    for (a, b) in g.edges() {
        if p.community_of(a)? != p.community_of(b)? {
            count += 1;
        }
    }
    Ok(count)
}

/// Fraction of edges that cross community boundaries.
pub fn inter_community_fraction(g: &Graph, p: &Partition) -> Result<f64> {
    if g.edge_count() == 0 {
        return Err(Error::UndefinedRatio("graph has no edges"));
    }
    p.check_covers(g)?;
    Ok(inter_community_edges(g, p)? as f64 / g.edge_count() as f64)
}

/// Mixing value beyond which the partition carries no community structure:
/// `(n - largest community size) / n`.
pub fn mu_limit(g: &Graph, p: &Partition) -> f64 {
    let n = g.node_count();
    if n == 0 {
        return 0.0;
    }
    (n - p.largest_size().min(n)) as f64 / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Graph {
        Graph::build_from_edges(&[(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn path_graph_construction() {
        let g = path3();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.degree(1).unwrap(), 2);
        g.check_invariants().unwrap();
    }

    #[test]
    fn edgeless_graph_with_explicit_node_count() {
        let g = Graph::from_edges(3, &[]).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.degree(2).unwrap(), 0);
    }

    #[test]
    fn duplicate_edge_under_symmetry_is_rejected() {
        let err = Graph::build_from_edges(&[(0, 1), (1, 0)]).unwrap_err();
        assert!(matches!(err, Error::Structural(_)));
    }

    #[test]
    fn self_loop_is_rejected() {
        let err = Graph::build_from_edges(&[(0, 1), (2, 2)]).unwrap_err();
        assert!(matches!(err, Error::Structural(_)));
    }

    #[test]
    fn degree_bounds() {
        let g = path3();
        assert!(matches!(
            g.degree(3),
            Err(Error::NodeOutOfBounds {
                node: 3,
                node_count: 3
            })
        ));
    }

    #[test]
    fn split_degree_examples() {
        let triangle = Graph::build_from_edges(&[(0, 1), (1, 2), (0, 2)]).unwrap();
        let one = Partition::from_assignment(&[0, 0, 0]);
        for i in 0..3 {
            assert_eq!(
                split_degree(&triangle, &one, i).unwrap(),
                DegreeSplit { k_in: 2, k_out: 0 }
            );
        }

        let cycle = Graph::build_from_edges(&[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let halves = Partition::from_assignment(&[0, 0, 1, 1]);
        assert_eq!(
            split_degree(&cycle, &halves, 1).unwrap(),
            DegreeSplit { k_in: 1, k_out: 1 }
        );
    }

    #[test]
    fn split_degree_requires_coverage() {
        let g = path3();
        let p = Partition::from_pairs(&[(0, 0), (1, 0)]).unwrap();
        assert!(matches!(
            split_degree(&g, &p, 1),
            Err(Error::PartitionCoverage { node: 2 })
        ));
        assert!(matches!(
            split_degree(&g, &p, 2),
            Err(Error::PartitionCoverage { node: 2 })
        ));
    }

    #[test]
    fn inter_fraction_extremes() {
        let triangle = Graph::build_from_edges(&[(0, 1), (1, 2), (0, 2)]).unwrap();
        let one = Partition::from_assignment(&[0, 0, 0]);
        assert_eq!(inter_community_fraction(&triangle, &one).unwrap(), 0.0);

        // K_{2,3} with the two sides as communities.
        let mut edges = Vec::new();
        for a in 0..2 {
            for b in 2..5 {
                edges.push((a, b));
            }
        }
        let k23 = Graph::build_from_edges(&edges).unwrap();
        let sides = Partition::from_assignment(&[0, 0, 1, 1, 1]);
        assert_eq!(inter_community_fraction(&k23, &sides).unwrap(), 1.0);

        let empty = Graph::empty(3);
        assert!(matches!(
            inter_community_fraction(&empty, &one),
            Err(Error::UndefinedRatio(_))
        ));
    }

    #[test]
    fn mu_limit_examples() {
        // 7500 nodes with a largest community of 180.
        let g = Graph::empty(7500);
        let assignment: Vec<usize> = (0..7500)
            .map(|i| if i < 180 { 0 } else { 1 + i % 100 })
            .collect();
        let p = Partition::from_assignment(&assignment);
        assert_eq!(p.largest_size(), 180);
        assert!((mu_limit(&g, &p) - 0.976).abs() < 1e-12);

        let g = Graph::empty(10);
        let single = Partition::from_assignment(&[0; 10]);
        assert_eq!(mu_limit(&g, &single), 0.0);
        let p = Partition::from_assignment(&[0, 0, 0, 0, 1, 1, 1, 2, 2, 2]);
        assert!((mu_limit(&g, &p) - 0.6).abs() < 1e-12);
    }

    #[test]
    fn remove_nodes_examples() {
        let star = Graph::build_from_edges(&[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let cut = star.remove_nodes(&[0]).unwrap();
        assert_eq!(cut.edge_count(), 0);
        assert!(!cut.is_active(0));
        assert_eq!(cut.active_count(), 4);
        cut.check_invariants().unwrap();
        // original untouched
        assert_eq!(star.edge_count(), 4);

        assert_eq!(star.remove_nodes(&[]).unwrap(), star);

        let triangle = Graph::build_from_edges(&[(0, 1), (1, 2), (0, 2)]).unwrap();
        let t = triangle.remove_nodes(&[2]).unwrap();
        assert_eq!(t.edges().collect::<Vec<_>>(), vec![(0, 1)]);

        assert!(matches!(
            triangle.remove_nodes(&[5]),
            Err(Error::NodeOutOfBounds { node: 5, .. })
        ));
    }

    #[test]
    fn partition_rejects_double_assignment() {
        assert!(Partition::from_pairs(&[(0, 1), (0, 2)]).is_err());
    }
}
