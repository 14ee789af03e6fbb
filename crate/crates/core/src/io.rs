//! Plain-text network files.
//!
//! Edge lists hold one `a b` pair per line; community files hold one `node community`
//! pair per line. Lines starting with `#` are comments. Edge lists written here carry a
//! `# nodes N` comment so that trailing isolated nodes survive a round trip.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{CommunityId, Graph, NodeId, Partition};

/// Parsed pairs and the node count from a `# nodes N` comment, if present.
type Pairs = (Vec<(usize, usize)>, Option<usize>);

fn parse_pairs(path: &Path, text: &str) -> Result<Pairs> {
    let mut pairs = Vec::new();
    let mut node_hint = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let mut words = comment.split_whitespace();
            if let (Some("nodes"), Some(n)) = (words.next(), words.next()) {
                node_hint = n.parse().ok();
            }
            continue;
        }
        let mut fields = line.split_whitespace();
        let (a, b) = match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => return Err(Error::parse(path, idx + 1, "expected two integer fields")),
        };
        let a = a
            .parse()
            .map_err(|_| Error::parse(path, idx + 1, format!("invalid integer {a:?}")))?;
        let b = b
            .parse()
            .map_err(|_| Error::parse(path, idx + 1, format!("invalid integer {b:?}")))?;
        pairs.push((a, b));
    }
    Ok((pairs, node_hint))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_edge_list(path: &Path) -> Result<Graph> {
    read_edge_list_with_nodes(path, 0)
}

/// Reads an edge list, padding the graph to at least `min_nodes` nodes.
pub fn read_edge_list_with_nodes(path: &Path, min_nodes: usize) -> Result<Graph> {
    let text = read(path)?;
    let (edges, hint) = parse_pairs(path, &text)?;
    Graph::from_edges(min_nodes.max(hint.unwrap_or(0)), &edges)
}

pub fn format_edge_list(g: &Graph) -> String {
    let mut out = String::with_capacity(g.edge_count() * 12);
    let _ = writeln!(out, "# nodes {}", g.node_count());
    for (a, b) in g.edges() {
        let _ = writeln!(out, "{a} {b}");
    }
    out
}

pub fn write_edge_list(g: &Graph, path: &Path) -> Result<()> {
    write(path, &format_edge_list(g))
}

pub fn read_communities(path: &Path) -> Result<Partition> {
    let text = read(path)?;
    let (pairs, _) = parse_pairs(path, &text)?;
    Partition::from_pairs(&pairs)
}

pub fn format_communities(p: &Partition, node_count: usize) -> String {
    let mut out = String::with_capacity(node_count * 10);
    for node in 0..node_count {
        if let Ok(c) = p.community_of(node) {
            let _ = writeln!(out, "{node} {c}");
        }
    }
    out
}

pub fn write_communities(p: &Partition, node_count: usize, path: &Path) -> Result<()> {
    write(path, &format_communities(p, node_count))
}

/// Parses `node community` lines from an in-memory string.
pub fn parse_communities(text: &str) -> Result<Vec<(NodeId, CommunityId)>> {
    Ok(parse_pairs(Path::new("<memory>"), text)?.0)
}
