//! Triangular-lattice patches and their dual honeycomb structure.
//!
//! A patch is a `rows x cols` parallelogram of rhombic cells, each split into
//! an up- and a down-pointing triangle. Site `(i, j)` sits at Cartesian
//! position `(j + i/2, i * sqrt(3)/2)`. The dual honeycomb has one vertex per
//! triangle; dual edges are in bijection with lattice edges (the dual edge
//! crosses its lattice edge). Lattice edges on the patch boundary have a
//! single incident triangle and act as dual-lattice stubs where open curves
//! may end.
//!
//! An optional rectangular hole (in cell coordinates) turns the patch into an
//! annulus; the hole's perimeter sites stay in the patch and carry the inner
//! boundary condition.

use serde::Serialize;

use super::Pt;
use crate::error::{Error, Result};
use crate::graph::{GraphSpec, Node};

pub const SQRT3_HALF: f64 = 0.866_025_403_784_438_6;

/// A rectangle of cells, used for annular holes.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CellRect {
    pub row0: usize,
    pub col0: usize,
    pub rows: usize,
    pub cols: usize,
}

impl CellRect {
    fn contains_cell(&self, r: usize, c: usize) -> bool {
        r >= self.row0 && r < self.row0 + self.rows && c >= self.col0 && c < self.col0 + self.cols
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Triangle {
    pub cell: (usize, usize),
    pub up: bool,
    /// Vertex site ids in counterclockwise order.
    pub verts: [usize; 3],
    /// `edges[k]` is the edge opposite `verts[k]`.
    pub edges: [usize; 3],
    pub centroid: Pt,
}

#[derive(Debug, Clone, Serialize)]
pub struct LatticeEdge {
    pub a: usize,
    pub b: usize,
    /// Incident triangles; boundary edges have exactly one.
    pub tris: [Option<usize>; 2],
    pub mid: Pt,
}

impl LatticeEdge {
    pub fn is_boundary(&self) -> bool {
        self.tris[1].is_none()
    }

    pub fn other_tri(&self, t: usize) -> Option<usize> {
        match self.tris {
            [Some(x), second] if x == t => second,
            [first, Some(y)] if y == t => first,
            _ => None,
        }
    }
}

/// Parameters for an annular patch: a rectangular hole strictly inside the
/// outer parallelogram.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AnnulusSpec {
    pub hole: CellRect,
}

#[derive(Debug, Clone)]
pub struct TriPatch {
    pub rows: usize,
    pub cols: usize,
    pub hole: Option<CellRect>,
    /// Grid slot -> site id (hole-interior slots are empty).
    site_grid: Vec<Option<usize>>,
    /// Site id -> (row, col).
    pub site_coords: Vec<(usize, usize)>,
    pub site_pos: Vec<Pt>,
    pub tris: Vec<Triangle>,
    pub edges: Vec<LatticeEdge>,
    /// Per site: (neighbor site, connecting edge).
    pub site_neighbors: Vec<Vec<(usize, usize)>>,
    pub site_tris: Vec<Vec<usize>>,
    /// Outer boundary sites in counterclockwise order.
    pub outer_cycle: Vec<usize>,
    /// Hole-perimeter sites (counterclockwise around the hole), if any.
    pub inner_cycle: Option<Vec<usize>>,
    /// Geometric center of the hole.
    pub hole_center: Option<Pt>,
}

impl TriPatch {
    pub fn build(rows: usize, cols: usize) -> Result<TriPatch> {
        Self::build_with_hole(rows, cols, None)
    }

    pub fn build_annulus(rows: usize, cols: usize, hole: CellRect) -> Result<TriPatch> {
        if hole.rows == 0 || hole.cols == 0 {
            return Err(Error::Parameter("hole must have positive extent".into()));
        }
        if hole.row0 == 0
            || hole.col0 == 0
            || hole.row0 + hole.rows >= rows
            || hole.col0 + hole.cols >= cols
        {
            return Err(Error::Parameter(format!(
                "hole {hole:?} must be strictly inside a {rows}x{cols} patch"
            )));
        }
        Self::build_with_hole(rows, cols, Some(hole))
    }

    fn build_with_hole(rows: usize, cols: usize, hole: Option<CellRect>) -> Result<TriPatch> {
        if rows < 1 || cols < 1 {
            return Err(Error::Parameter("patch needs rows, cols >= 1".into()));
        }
        let gw = cols + 1;
        let slot = |i: usize, j: usize| i * gw + j;
        let mut site_grid = vec![None; (rows + 1) * gw];
        let mut site_coords = Vec::new();
        let mut site_pos = Vec::new();
        for i in 0..=rows {
            for j in 0..=cols {
                // Skip sites strictly inside the hole.
                if let Some(h) = hole {
                    if i > h.row0 && i < h.row0 + h.rows && j > h.col0 && j < h.col0 + h.cols {
                        continue;
                    }
                }
                site_grid[slot(i, j)] = Some(site_coords.len());
                site_coords.push((i, j));
                site_pos.push(Pt::new(j as f64 + i as f64 * 0.5, i as f64 * SQRT3_HALF));
            }
        }
        let site = |i: usize, j: usize| site_grid[slot(i, j)].expect("site must exist");

        let mut tris: Vec<Triangle> = Vec::new();
        let mut edges: Vec<LatticeEdge> = Vec::new();
        let mut edge_index = std::collections::HashMap::new();
        let mut intern_edge = |a: usize, b: usize, pos: &[Pt], edges: &mut Vec<LatticeEdge>| {
            let key = (a.min(b), a.max(b));
            *edge_index.entry(key).or_insert_with(|| {
                edges.push(LatticeEdge {
                    a: key.0,
                    b: key.1,
                    tris: [None, None],
                    mid: pos[key.0].mid(pos[key.1]),
                });
                edges.len() - 1
            })
        };

        for i in 0..rows {
            for j in 0..cols {
                if hole.map_or(false, |h| h.contains_cell(i, j)) {
                    continue;
                }
                for up in [true, false] {
                    let verts = if up {
                        [site(i, j), site(i, j + 1), site(i + 1, j)]
                    } else {
                        [site(i, j + 1), site(i + 1, j + 1), site(i + 1, j)]
                    };
                    let centroid = Pt::new(
                        (site_pos[verts[0]].x + site_pos[verts[1]].x + site_pos[verts[2]].x) / 3.0,
                        (site_pos[verts[0]].y + site_pos[verts[1]].y + site_pos[verts[2]].y) / 3.0,
                    );
                    let t_id = tris.len();
                    let mut edge_ids = [0usize; 3];
                    for k in 0..3 {
                        let (a, b) = (verts[(k + 1) % 3], verts[(k + 2) % 3]);
                        let e = intern_edge(a, b, &site_pos, &mut edges);
                        edge_ids[k] = e;
                        if edges[e].tris[0].is_none() {
                            edges[e].tris[0] = Some(t_id);
                        } else {
                            edges[e].tris[1] = Some(t_id);
                        }
                    }
                    tris.push(Triangle {
                        cell: (i, j),
                        up,
                        verts,
                        edges: edge_ids,
                        centroid,
                    });
                }
            }
        }

        let mut site_neighbors = vec![Vec::new(); site_coords.len()];
        for (e_id, e) in edges.iter().enumerate() {
            site_neighbors[e.a].push((e.b, e_id));
            site_neighbors[e.b].push((e.a, e_id));
        }
        let mut site_tris = vec![Vec::new(); site_coords.len()];
        for (t_id, t) in tris.iter().enumerate() {
            for &v in &t.verts {
                site_tris[v].push(t_id);
            }
        }

        let mut outer_cycle = Vec::new();
        for j in 0..=cols {
            outer_cycle.push(site(0, j));
        }
        for i in 1..=rows {
            outer_cycle.push(site(i, cols));
        }
        for j in (0..cols).rev() {
            outer_cycle.push(site(rows, j));
        }
        for i in (1..rows).rev() {
            outer_cycle.push(site(i, 0));
        }

        let (inner_cycle, hole_center) = match hole {
            None => (None, None),
            Some(h) => {
                let mut cyc = Vec::new();
                for j in h.col0..=h.col0 + h.cols {
                    cyc.push(site(h.row0, j));
                }
                for i in h.row0 + 1..=h.row0 + h.rows {
                    cyc.push(site(i, h.col0 + h.cols));
                }
                for j in (h.col0..h.col0 + h.cols).rev() {
                    cyc.push(site(h.row0 + h.rows, j));
                }
                for i in (h.row0 + 1..h.row0 + h.rows).rev() {
                    cyc.push(site(i, h.col0));
                }
                let i_mid = h.row0 as f64 + h.rows as f64 / 2.0;
                let j_mid = h.col0 as f64 + h.cols as f64 / 2.0;
                let center = Pt::new(j_mid + i_mid * 0.5, i_mid * SQRT3_HALF);
                (Some(cyc), Some(center))
            }
        };

        Ok(TriPatch {
            rows,
            cols,
            hole,
            site_grid,
            site_coords,
            site_pos,
            tris,
            edges,
            site_neighbors,
            site_tris,
            outer_cycle,
            inner_cycle,
            hole_center,
        })
    }

    pub fn site_count(&self) -> usize {
        self.site_coords.len()
    }

    pub fn site_at(&self, i: usize, j: usize) -> Option<usize> {
        self.site_grid.get(i * (self.cols + 1) + j).copied().flatten()
    }

    /// Boundary edge between consecutive outer-cycle positions `k`, `k+1`.
    pub fn outer_edge(&self, k: usize) -> usize {
        let n = self.outer_cycle.len();
        let a = self.outer_cycle[k % n];
        let b = self.outer_cycle[(k + 1) % n];
        self.edge_between(a, b).expect("outer cycle edge")
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.site_neighbors[a]
            .iter()
            .find(|(s, _)| *s == b)
            .map(|(_, e)| *e)
    }

    pub fn is_boundary_site(&self, s: usize) -> bool {
        self.outer_cycle.contains(&s)
            || self
                .inner_cycle
                .as_ref()
                .map_or(false, |c| c.contains(&s))
    }

    /// Sites not fixed by any boundary condition.
    pub fn interior_sites(&self) -> Vec<usize> {
        (0..self.site_count())
            .filter(|&s| !self.is_boundary_site(s))
            .collect()
    }

    /// For a triangle and its unmarked edge (local index), the "tip" vertex.
    pub fn tip_of(&self, tri: usize, unmarked_local: usize) -> usize {
        self.tris[tri].verts[unmarked_local]
    }
}

/// Boundary conditions for the triangular-lattice model. Heights are graph
/// node indices.
#[derive(Debug, Clone, Serialize)]
pub enum TriBc {
    /// All boundary sites fixed to one height; loops only.
    Homogeneous { a: Node },
    /// Two outer arcs at adjacent heights; forces a single open curve between
    /// the cut edges. `cuts` are positions in the outer boundary cycle
    /// (defaults: bottom middle and top middle).
    Chordal {
        a: Node,
        b: Node,
        cuts: Option<(usize, usize)>,
    },
    /// General multi-arc outer boundary: `heights[k]` fills the arc that
    /// starts after `cuts[k]` and runs through `cuts[k+1]`.
    Segments { heights: Vec<Node>, cuts: Vec<usize> },
    /// Annulus with a uniform outer and uniform inner boundary height.
    AnnulusClosed { outer: Node, inner: Node },
    /// Annulus with a chordal pair on the outer boundary and a uniform inner
    /// height.
    AnnulusChordal {
        a: Node,
        b: Node,
        inner: Node,
        cuts: Option<(usize, usize)>,
    },
}

/// A boundary condition resolved against a concrete patch.
#[derive(Debug, Clone)]
pub struct ResolvedTriBc {
    /// Per-site fixed heights (`None` = free).
    pub fixed: Vec<Option<Node>>,
    /// Boundary edges forced to carry a curve end, ordered (z1, z2, ...).
    pub stubs: Vec<usize>,
    /// Chordal data when applicable: heights to the left/right of the curve.
    pub chordal_pair: Option<(Node, Node)>,
    pub inner_height: Option<Node>,
}

impl TriBc {
    pub fn default_cuts(patch: &TriPatch) -> (usize, usize) {
        let mid = patch.cols / 2;
        let k1 = mid;
        let k2 = 2 * patch.cols + patch.rows - mid - 1;
        (k1, k2)
    }

    /// Check the boundary condition against a patch and graph, reporting every
    /// violated requirement.
    pub fn validate(&self, patch: &TriPatch, graph: &GraphSpec) -> Result<()> {
        let mut errs: Vec<String> = Vec::new();
        let check_node = |n: Node, errs: &mut Vec<String>| {
            if n >= graph.node_count {
                errs.push(format!("height index {n} out of range"));
            }
        };
        match self {
            TriBc::Homogeneous { a } => check_node(*a, &mut errs),
            TriBc::Chordal { a, b, cuts } => {
                check_node(*a, &mut errs);
                check_node(*b, &mut errs);
                if *a < graph.node_count && *b < graph.node_count && !graph.adjacent(*a, *b) {
                    errs.push(format!(
                        "chordal heights {} and {} are not adjacent on {}; several curves would start between them",
                        graph.label_of(*a),
                        graph.label_of(*b),
                        graph.kind.name()
                    ));
                }
                if let Some((k1, k2)) = cuts {
                    let n = patch.outer_cycle.len();
                    if k1 >= &n || k2 >= &n || k1 == k2 {
                        errs.push("cut positions out of range".into());
                    }
                }
            }
            TriBc::Segments { heights, cuts } => {
                if heights.len() != cuts.len() || heights.len() < 2 {
                    errs.push("need matching heights/cuts lists with >= 2 arcs".into());
                }
                for &h in heights {
                    check_node(h, &mut errs);
                }
                let n = patch.outer_cycle.len();
                if cuts.windows(2).any(|w| w[0] >= w[1]) || cuts.iter().any(|&k| k >= n) {
                    errs.push("cuts must be strictly increasing positions on the outer cycle".into());
                }
                for k in 0..heights.len() {
                    let h1 = heights[k];
                    let h2 = heights[(k + 1) % heights.len()];
                    if h1 < graph.node_count && h2 < graph.node_count && !graph.adjacent(h1, h2) {
                        errs.push(format!(
                            "consecutive arc heights {} and {} not adjacent on the graph",
                            graph.label_of(h1),
                            graph.label_of(h2)
                        ));
                    }
                }
            }
            TriBc::AnnulusClosed { outer, inner } => {
                check_node(*outer, &mut errs);
                check_node(*inner, &mut errs);
                if patch.inner_cycle.is_none() {
                    errs.push("annulus boundary condition on a patch without a hole".into());
                }
            }
            TriBc::AnnulusChordal { a, b, inner, cuts } => {
                TriBc::Chordal {
                    a: *a,
                    b: *b,
                    cuts: *cuts,
                }
                .validate(patch, graph)
                .map_err(|e| errs.push(e.to_string()))
                .ok();
                check_node(*inner, &mut errs);
                if inner == a || inner == b {
                    errs.push("inner height must differ from both outer heights".into());
                }
                if patch.inner_cycle.is_none() {
                    errs.push("annulus boundary condition on a patch without a hole".into());
                }
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::BoundaryCondition(errs))
        }
    }

    pub fn resolve(&self, patch: &TriPatch, graph: &GraphSpec) -> Result<ResolvedTriBc> {
        self.validate(patch, graph)?;
        let mut fixed = vec![None; patch.site_count()];
        let mut stubs = Vec::new();
        let mut chordal_pair = None;
        let mut inner_height = None;

        let fill_segments = |heights: &[Node], cuts: &[usize], fixed: &mut Vec<Option<Node>>, stubs: &mut Vec<usize>| {
            let n = patch.outer_cycle.len();
            for (k, &cut) in cuts.iter().enumerate() {
                stubs.push(patch.outer_edge(cut));
                let end = cuts[(k + 1) % cuts.len()];
                let mut pos = (cut + 1) % n;
                loop {
                    fixed[patch.outer_cycle[pos]] = Some(heights[k]);
                    if pos == end {
                        break;
                    }
                    pos = (pos + 1) % n;
                }
            }
        };

        match self {
            TriBc::Homogeneous { a } => {
                for &s in &patch.outer_cycle {
                    fixed[s] = Some(*a);
                }
                if let Some(inner) = &patch.inner_cycle {
                    for &s in inner {
                        fixed[s] = Some(*a);
                    }
                }
            }
            TriBc::Chordal { a, b, cuts } => {
                let (k1, k2) = cuts.unwrap_or_else(|| TriBc::default_cuts(patch));
                fill_segments(&[*b, *a], &[k1, k2], &mut fixed, &mut stubs);
                chordal_pair = Some((*a, *b));
            }
            TriBc::Segments { heights, cuts } => {
                fill_segments(heights, cuts, &mut fixed, &mut stubs);
            }
            TriBc::AnnulusClosed { outer, inner } => {
                for &s in &patch.outer_cycle {
                    fixed[s] = Some(*outer);
                }
                for &s in patch.inner_cycle.as_ref().unwrap() {
                    fixed[s] = Some(*inner);
                }
                inner_height = Some(*inner);
            }
            TriBc::AnnulusChordal { a, b, inner, cuts } => {
                let (k1, k2) = cuts.unwrap_or_else(|| TriBc::default_cuts(patch));
                fill_segments(&[*b, *a], &[k1, k2], &mut fixed, &mut stubs);
                for &s in patch.inner_cycle.as_ref().unwrap() {
                    fixed[s] = Some(*inner);
                }
                chordal_pair = Some((*a, *b));
                inner_height = Some(*inner);
            }
        }
        Ok(ResolvedTriBc {
            fixed,
            stubs,
            chordal_pair,
            inner_height,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{GraphKind, GraphSpec};

    #[test]
    fn smallest_patch_counts() {
        let p = TriPatch::build(1, 1).unwrap();
        assert_eq!(p.site_count(), 4);
        assert_eq!(p.tris.len(), 2);
        let p = TriPatch::build(2, 2).unwrap();
        assert_eq!(p.tris.len(), 8);
        let p = TriPatch::build(3, 3).unwrap();
        assert_eq!(p.tris.len(), 18);
    }

    #[test]
    fn euler_relation_disc_and_annulus() {
        let p = TriPatch::build(4, 5).unwrap();
        let euler = p.site_count() as i64 - p.edges.len() as i64 + p.tris.len() as i64;
        assert_eq!(euler, 1);

        let hole = CellRect { row0: 1, col0: 1, rows: 1, cols: 1 };
        let a = TriPatch::build_annulus(4, 4, hole).unwrap();
        let euler = a.site_count() as i64 - a.edges.len() as i64 + a.tris.len() as i64;
        assert_eq!(euler, 0);
        assert_eq!(a.inner_cycle.as_ref().unwrap().len(), 4);
    }

    #[test]
    fn dual_degrees_are_at_most_three() {
        let p = TriPatch::build(3, 4).unwrap();
        for (t_id, t) in p.tris.iter().enumerate() {
            let nbrs = t
                .edges
                .iter()
                .filter(|&&e| p.edges[e].other_tri(t_id).is_some())
                .count();
            assert!(nbrs <= 3);
        }
        // Interior triangles have all three continuations.
        let interior = p
            .tris
            .iter()
            .enumerate()
            .filter(|(t_id, t)| {
                t.edges
                    .iter()
                    .all(|&e| p.edges[e].other_tri(*t_id).is_some())
            })
            .count();
        assert!(interior > 0);
    }

    #[test]
    fn boundary_cycle_is_closed_and_counterclockwise() {
        let p = TriPatch::build(3, 3).unwrap();
        assert_eq!(p.outer_cycle.len(), 12);
        for k in 0..p.outer_cycle.len() {
            assert!(p.edge_between(
                p.outer_cycle[k],
                p.outer_cycle[(k + 1) % p.outer_cycle.len()]
            )
            .is_some());
        }
        let poly: Vec<Pt> = p.outer_cycle.iter().map(|&s| p.site_pos[s]).collect();
        assert!(super::super::signed_area(&poly) > 0.0);
    }

    #[test]
    fn chordal_bc_needs_adjacent_heights() {
        let p = TriPatch::build(3, 3).unwrap();
        let g = GraphSpec::build(GraphKind::A(3)).unwrap();
        assert!(TriBc::Chordal { a: 0, b: 1, cuts: None }.validate(&p, &g).is_ok());
        let err = TriBc::Chordal { a: 0, b: 2, cuts: None }.validate(&p, &g);
        assert!(err.is_err());
    }

    #[test]
    fn chordal_resolution_splits_the_boundary() {
        let p = TriPatch::build(2, 4).unwrap();
        let g = GraphSpec::build(GraphKind::A(3)).unwrap();
        let r = TriBc::Chordal { a: 0, b: 1, cuts: None }.resolve(&p, &g).unwrap();
        assert_eq!(r.stubs.len(), 2);
        // Every boundary site is fixed, interior free.
        for &s in &p.outer_cycle {
            assert!(r.fixed[s].is_some());
        }
        let n_a = r.fixed.iter().filter(|f| **f == Some(0)).count();
        let n_b = r.fixed.iter().filter(|f| **f == Some(1)).count();
        assert_eq!(n_a + n_b, p.outer_cycle.len());
        assert!(n_a > 0 && n_b > 0);
        // The two stub edges have endpoints with different fixed heights.
        for &e in &r.stubs {
            let edge = &p.edges[e];
            assert_ne!(r.fixed[edge.a], r.fixed[edge.b]);
        }
    }

    #[test]
    fn hole_must_be_strictly_interior() {
        let hole = CellRect { row0: 0, col0: 1, rows: 1, cols: 1 };
        assert!(TriPatch::build_annulus(4, 4, hole).is_err());
        let hole = CellRect { row0: 1, col0: 1, rows: 0, cols: 1 };
        assert!(TriPatch::build_annulus(4, 4, hole).is_err());
    }
}
