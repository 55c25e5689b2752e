//! Height graphs: the simply-laced Coxeter diagrams (A, D, E), their extended
//! versions, and star graphs. Heights of a lattice model live on the nodes of
//! one of these graphs; everything downstream only sees the adjacency
//! structure built here.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which diagram family a graph belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GraphKind {
    A(usize),
    D(usize),
    E6,
    E7,
    E8,
    ExtA(usize),
    ExtD(usize),
    ExtE6,
    ExtE7,
    ExtE8,
    Star(usize),
}

impl GraphKind {
    pub fn is_ade(&self) -> bool {
        matches!(
            self,
            GraphKind::A(_) | GraphKind::D(_) | GraphKind::E6 | GraphKind::E7 | GraphKind::E8
        )
    }

    pub fn is_extended(&self) -> bool {
        matches!(
            self,
            GraphKind::ExtA(_) | GraphKind::ExtD(_) | GraphKind::ExtE6 | GraphKind::ExtE7 | GraphKind::ExtE8
        )
    }

    /// Parse strings like `A3`, `D4`, `E7`, `ExtA6`, `Star4`.
    pub fn parse(s: &str) -> Result<GraphKind> {
        let bad = || Error::UnsupportedGraph(format!("cannot parse graph kind '{s}'"));
        let (prefix, num): (&str, &str) = {
            let idx = s.find(|c: char| c.is_ascii_digit()).unwrap_or(s.len());
            (&s[..idx], &s[idx..])
        };
        let n: Option<usize> = if num.is_empty() { None } else { num.parse().ok() };
        match (prefix, n) {
            ("A" | "a", Some(m)) => Ok(GraphKind::A(m)),
            ("D" | "d", Some(m)) => Ok(GraphKind::D(m)),
            ("E" | "e", Some(6)) => Ok(GraphKind::E6),
            ("E" | "e", Some(7)) => Ok(GraphKind::E7),
            ("E" | "e", Some(8)) => Ok(GraphKind::E8),
            ("ExtA" | "extA" | "exta", Some(m)) => Ok(GraphKind::ExtA(m)),
            ("ExtD" | "extD" | "extd", Some(m)) => Ok(GraphKind::ExtD(m)),
            ("ExtE" | "extE" | "exte", Some(6)) => Ok(GraphKind::ExtE6),
            ("ExtE" | "extE" | "exte", Some(7)) => Ok(GraphKind::ExtE7),
            ("ExtE" | "extE" | "exte", Some(8)) => Ok(GraphKind::ExtE8),
            ("Star" | "star", Some(q)) => Ok(GraphKind::Star(q)),
            _ => Err(bad()),
        }
    }

    pub fn name(&self) -> String {
        match self {
            GraphKind::A(m) => format!("A{m}"),
            GraphKind::D(m) => format!("D{m}"),
            GraphKind::E6 => "E6".into(),
            GraphKind::E7 => "E7".into(),
            GraphKind::E8 => "E8".into(),
            GraphKind::ExtA(m) => format!("ExtA{m}"),
            GraphKind::ExtD(m) => format!("ExtD{m}"),
            GraphKind::ExtE6 => "ExtE6".into(),
            GraphKind::ExtE7 => "ExtE7".into(),
            GraphKind::ExtE8 => "ExtE8".into(),
            GraphKind::Star(q) => format!("Star{q}"),
        }
    }
}

/// A node index into a [`GraphSpec`]. Domain code uses indices throughout;
/// user-facing labels are translated at the boundary (CLI, reports).
pub type Node = usize;

/// A connected height graph with its adjacency structure.
///
/// Node numbering conventions (by label):
/// - `A(m)`: path `1 - 2 - ... - m`.
/// - `D(n)`: path `1 - ... - (n-2)` with `n-1` and `n` both attached to `n-2`.
/// - `E6/E7/E8`: path `1 - ... - (n-1)` with node `n` attached to node `n-3`.
/// - `ExtA(m)`: ring `1 - 2 - ... - m - 1`.
/// - `ExtD(n)`: `D(n)` plus node `0` attached to node `2`.
/// - `ExtE6/7/8`: the E diagram with one arm extended by a single node.
/// - `Star(q)`: center `0` attached to leaves `1..q`.
///
/// Labels map to internal indices in listed order (`label_of`, `node_by_label`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphSpec {
    pub kind: GraphKind,
    pub node_count: usize,
    /// Symmetric 0/1 adjacency, zero diagonal.
    pub adjacency: Vec<Vec<u8>>,
    /// User-facing node labels, index-aligned.
    pub labels: Vec<u32>,
    /// Two-coloring classes when the graph is bipartite.
    pub node_parity: Option<Vec<u8>>,
    /// Neighbor lists, index-aligned.
    #[serde(skip)]
    pub neighbors: Vec<Vec<Node>>,
    /// Bitmask of neighbors per node (node_count <= 32 everywhere we care).
    #[serde(skip)]
    pub neighbor_mask: Vec<u32>,
}

impl GraphSpec {
    /// Build the canonical graph for `kind`. Sizes outside the supported
    /// range are rejected with an explanation.
    pub fn build(kind: GraphKind) -> Result<GraphSpec> {
        let (labels, edges): (Vec<u32>, Vec<(u32, u32)>) = match kind {
            GraphKind::A(m) => {
                if m < 2 {
                    return Err(Error::UnsupportedGraph(format!(
                        "A requires m >= 2, got m = {m}"
                    )));
                }
                let labels = (1..=m as u32).collect();
                let edges = (1..m as u32).map(|a| (a, a + 1)).collect();
                (labels, edges)
            }
            GraphKind::D(n) => {
                if n < 4 {
                    return Err(Error::UnsupportedGraph(format!(
                        "D requires n >= 4, got n = {n}"
                    )));
                }
                let n = n as u32;
                let labels = (1..=n).collect();
                let mut edges: Vec<_> = (1..n - 2).map(|a| (a, a + 1)).collect();
                edges.push((n - 2, n - 1));
                edges.push((n - 2, n));
                (labels, edges)
            }
            GraphKind::E6 | GraphKind::E7 | GraphKind::E8 => {
                let n: u32 = match kind {
                    GraphKind::E6 => 6,
                    GraphKind::E7 => 7,
                    _ => 8,
                };
                let labels = (1..=n).collect();
                let mut edges: Vec<_> = (1..n - 1).map(|a| (a, a + 1)).collect();
                edges.push((n - 3, n));
                (labels, edges)
            }
            GraphKind::ExtA(m) => {
                if m < 4 {
                    return Err(Error::UnsupportedGraph(format!(
                        "ExtA requires m >= 4 (shorter rings contain a 3-cycle), got m = {m}"
                    )));
                }
                let m = m as u32;
                let labels = (1..=m).collect();
                let mut edges: Vec<_> = (1..m).map(|a| (a, a + 1)).collect();
                edges.push((m, 1));
                (labels, edges)
            }
            GraphKind::ExtD(n) => {
                if n < 4 {
                    return Err(Error::UnsupportedGraph(format!(
                        "ExtD requires n >= 4, got n = {n}"
                    )));
                }
                let n = n as u32;
                let labels = (0..=n).collect();
                let mut edges: Vec<_> = (1..n - 2).map(|a| (a, a + 1)).collect();
                edges.push((n - 2, n - 1));
                edges.push((n - 2, n));
                edges.push((0, 2));
                (labels, edges)
            }
            GraphKind::ExtE6 => {
                // E6 with the short arm extended: 1-2-3-4-5, 6 at 3, 7 at 6.
                let labels = (1..=7).collect();
                let edges = vec![(1, 2), (2, 3), (3, 4), (4, 5), (3, 6), (6, 7)];
                (labels, edges)
            }
            GraphKind::ExtE7 => {
                // E7 with the two-node arm extended: arms (3,3,1) around node 4.
                let labels = (1..=8).collect();
                let edges = vec![(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (4, 7), (6, 8)];
                (labels, edges)
            }
            GraphKind::ExtE8 => {
                // E8 with the long arm extended: arms (5,2,1) around node 5.
                let labels = (0..=8).collect();
                let edges = vec![
                    (0, 1),
                    (1, 2),
                    (2, 3),
                    (3, 4),
                    (4, 5),
                    (5, 6),
                    (6, 7),
                    (5, 8),
                ];
                (labels, edges)
            }
            GraphKind::Star(q) => {
                if q < 1 {
                    return Err(Error::UnsupportedGraph("Star requires q >= 1".into()));
                }
                let labels = (0..=q as u32).collect();
                let edges = (1..=q as u32).map(|leaf| (0, leaf)).collect();
                (labels, edges)
            }
        };
        Self::from_labeled_edges(kind, labels, &edges)
    }

    fn from_labeled_edges(kind: GraphKind, labels: Vec<u32>, edges: &[(u32, u32)]) -> Result<GraphSpec> {
        let n = labels.len();
        assert!(n <= 32, "graphs are expected to stay small");
        let index_of = |label: u32| labels.iter().position(|&l| l == label).unwrap();
        let mut adjacency = vec![vec![0u8; n]; n];
        for &(a, b) in edges {
            let (i, j) = (index_of(a), index_of(b));
            adjacency[i][j] = 1;
            adjacency[j][i] = 1;
        }
        let neighbors: Vec<Vec<Node>> = (0..n)
            .map(|i| (0..n).filter(|&j| adjacency[i][j] == 1).collect())
            .collect();
        let neighbor_mask: Vec<u32> = neighbors
            .iter()
            .map(|ns| ns.iter().fold(0u32, |m, &j| m | (1 << j)))
            .collect();
        let node_parity = two_coloring(&neighbors);
        let g = GraphSpec {
            kind,
            node_count: n,
            adjacency,
            labels,
            node_parity,
            neighbors,
            neighbor_mask,
        };
        debug_assert!(g.is_connected());
        Ok(g)
    }

    /// Rebuild the derived neighbor tables (used after deserialization).
    pub fn rebuild_caches(&mut self) {
        self.neighbors = (0..self.node_count)
            .map(|i| {
                (0..self.node_count)
                    .filter(|&j| self.adjacency[i][j] == 1)
                    .collect()
            })
            .collect();
        self.neighbor_mask = self
            .neighbors
            .iter()
            .map(|ns| ns.iter().fold(0u32, |m, &j| m | (1 << j)))
            .collect();
    }

    pub fn node_by_label(&self, label: u32) -> Result<Node> {
        self.labels
            .iter()
            .position(|&l| l == label)
            .ok_or_else(|| {
                Error::Parameter(format!(
                    "graph {} has no node labeled {label} (labels {:?})",
                    self.kind.name(),
                    self.labels
                ))
            })
    }

    pub fn label_of(&self, node: Node) -> u32 {
        self.labels[node]
    }

    pub fn adjacent(&self, a: Node, b: Node) -> bool {
        self.adjacency[a][b] == 1
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.node_count];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &self.neighbors[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|b| b)
    }

    /// Length of the shortest cycle, or `None` for trees.
    pub fn girth(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for start in 0..self.node_count {
            // BFS from start, tracking parents; a non-parent revisit closes a cycle.
            let mut dist = vec![usize::MAX; self.node_count];
            let mut parent = vec![usize::MAX; self.node_count];
            dist[start] = 0;
            let mut queue = std::collections::VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &w in &self.neighbors[v] {
                    if dist[w] == usize::MAX {
                        dist[w] = dist[v] + 1;
                        parent[w] = v;
                        queue.push_back(w);
                    } else if parent[v] != w {
                        let len = dist[v] + dist[w] + 1;
                        best = Some(best.map_or(len, |b| b.min(len)));
                    }
                }
            }
        }
        best
    }

    pub fn is_bipartite(&self) -> bool {
        self.node_parity.is_some()
    }

    /// Nodes adjacent to `a`, as a bitmask.
    pub fn mask_of(&self, a: Node) -> u32 {
        self.neighbor_mask[a]
    }
}

fn two_coloring(neighbors: &[Vec<Node>]) -> Option<Vec<u8>> {
    let n = neighbors.len();
    let mut color = vec![u8::MAX; n];
    color[0] = 0;
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        for &w in &neighbors[v] {
            if color[w] == u8::MAX {
                color[w] = 1 - color[v];
                queue.push_back(w);
            } else if color[w] == color[v] {
                return None;
            }
        }
    }
    Some(color)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a3_is_a_path() {
        let g = GraphSpec::build(GraphKind::A(3)).unwrap();
        assert_eq!(g.node_count, 3);
        assert_eq!(g.adjacency, vec![vec![0, 1, 0], vec![1, 0, 1], vec![0, 1, 0]]);
    }

    #[test]
    fn star4_has_center_and_four_leaves() {
        let g = GraphSpec::build(GraphKind::Star(4)).unwrap();
        assert_eq!(g.node_count, 5);
        assert_eq!(g.neighbors[0].len(), 4);
        for leaf in 1..5 {
            assert_eq!(g.neighbors[leaf], vec![0]);
        }
    }

    #[test]
    fn d4_has_a_trivalent_center() {
        let g = GraphSpec::build(GraphKind::D(4)).unwrap();
        assert_eq!(g.node_count, 4);
        let center = g.node_by_label(2).unwrap();
        assert_eq!(g.neighbors[center].len(), 3);
    }

    #[test]
    fn ade_kinds_are_trees_and_ext_a_is_a_ring() {
        for kind in [
            GraphKind::A(5),
            GraphKind::D(6),
            GraphKind::E6,
            GraphKind::E7,
            GraphKind::E8,
        ] {
            let g = GraphSpec::build(kind).unwrap();
            assert_eq!(g.girth(), None, "{} should be a tree", kind.name());
        }
        let ring = GraphSpec::build(GraphKind::ExtA(6)).unwrap();
        assert_eq!(ring.girth(), Some(6));
    }

    #[test]
    fn rejects_undersized_graphs() {
        assert!(GraphSpec::build(GraphKind::A(1)).is_err());
        assert!(GraphSpec::build(GraphKind::D(3)).is_err());
        assert!(GraphSpec::build(GraphKind::ExtA(3)).is_err());
        assert!(GraphSpec::build(GraphKind::Star(0)).is_err());
    }

    #[test]
    fn parity_exists_for_trees_but_not_odd_rings() {
        assert!(GraphSpec::build(GraphKind::E7).unwrap().is_bipartite());
        assert!(GraphSpec::build(GraphKind::ExtA(6)).unwrap().is_bipartite());
        assert!(!GraphSpec::build(GraphKind::ExtA(5)).unwrap().is_bipartite());
    }

    #[test]
    fn kind_parsing_round_trips() {
        for s in ["A3", "D4", "E8", "ExtA6", "ExtD5", "ExtE7", "Star3"] {
            let kind = GraphKind::parse(s).unwrap();
            assert_eq!(kind.name(), s);
        }
        assert!(GraphKind::parse("Q7").is_err());
    }
}
