//! Loop structure on the dual honeycomb of a triangular patch.
//!
//! A height configuration marks every lattice edge whose endpoint heights
//! differ; inside each triangle the marked edges (0 or 2 of them) concatenate
//! into dual-lattice strands. `trace_marked` turns a marked-edge set into
//! closed loops plus at most open curves ending at designated boundary stubs.
//! `enumerate_loop_configs` walks all consistent marked-edge sets directly,
//! one triangle state at a time, without reference to heights.

use crate::domain::{point_in_polygon, signed_area, Pt, TriPatch};
use crate::graph::Node;

/// One traced strand: the lattice edges it crosses and the triangles it
/// passes through, in walk order.
#[derive(Debug, Clone)]
pub struct Strand {
    pub edges: Vec<usize>,
    pub tris: Vec<usize>,
    pub closed: bool,
}

impl Strand {
    /// Dual-vertex polyline (triangle centroids) of this strand.
    pub fn centroid_path(&self, patch: &TriPatch) -> Vec<Pt> {
        self.tris.iter().map(|&t| patch.tris[t].centroid).collect()
    }

    /// For each triangle along the strand: (tip site, pair height side).
    /// `tip_local` is the vertex opposite the unmarked edge.
    pub fn tips(&self, patch: &TriPatch, marked: &[bool]) -> Vec<usize> {
        self.tris
            .iter()
            .map(|&t| {
                let tri = &patch.tris[t];
                let unmarked = (0..3)
                    .find(|&k| !marked[tri.edges[k]])
                    .expect("pass-through triangle has one unmarked edge");
                tri.verts[unmarked]
            })
            .collect()
    }

    /// Signed tip sides: +1 when the tip lies left of the local travel
    /// direction, -1 when right. Entry/exit edge midpoints define travel.
    pub fn tip_sides(&self, patch: &TriPatch, marked: &[bool]) -> Vec<i8> {
        let tips = self.tips(patch, marked);
        (0..self.tris.len())
            .map(|k| {
                let (e_in, e_out) = self.tri_crossings(k);
                let m_in = patch.edges[e_in].mid;
                let m_out = patch.edges[e_out].mid;
                let d = m_out.sub(m_in);
                let tip = patch.site_pos[tips[k]].sub(m_in);
                if d.cross(tip) > 0.0 {
                    1
                } else {
                    -1
                }
            })
            .collect()
    }

    /// (entry edge, exit edge) for the k-th triangle of the strand.
    fn tri_crossings(&self, k: usize) -> (usize, usize) {
        let e_in = self.edges[k];
        let e_out = if k + 1 < self.edges.len() {
            self.edges[k + 1]
        } else {
            // Closed strand wraps around.
            self.edges[0]
        };
        (e_in, e_out)
    }

    /// Left minus right turns along the strand. The strand turns by 60
    /// degrees inside every triangle it passes (between the entry-edge
    /// midpoint and the exit-edge midpoint) and runs straight across edge
    /// midpoints, so the sum over triangles is the full turning.
    pub fn turn_balance(&self, patch: &TriPatch) -> i32 {
        let mut balance = 0;
        for k in 0..self.tris.len() {
            let (e_in, e_out) = self.tri_crossings(k);
            let c = patch.tris[self.tris[k]].centroid;
            let d_in = c.sub(patch.edges[e_in].mid);
            let d_out = patch.edges[e_out].mid.sub(c);
            balance += if d_in.cross(d_out) > 0.0 { 1 } else { -1 };
        }
        balance
    }
}

/// All strands of a marked-edge set.
#[derive(Debug, Clone)]
pub struct Strands {
    pub loops: Vec<Strand>,
    pub open: Vec<Strand>,
    pub marked_triangles: usize,
}

/// Walk the dual honeycomb along marked edges. `stubs` are the boundary
/// edges where open strands are allowed to end; any other marked boundary
/// edge is an invariant violation, as is a triangle with one or three marked
/// edges.
pub fn trace_marked(patch: &TriPatch, marked: &[bool], stubs: &[usize]) -> Strands {
    for (t_id, tri) in patch.tris.iter().enumerate() {
        let m = tri.edges.iter().filter(|&&e| marked[e]).count();
        assert!(
            m == 0 || m == 2,
            "triangle {t_id} has {m} marked edges; strands cannot continue"
        );
    }
    let mut visited = vec![false; patch.edges.len()];
    let mut open = Vec::new();
    let mut loops = Vec::new();
    let mut marked_triangles = 0;

    let next_in_tri = |t: usize, entry: usize| -> usize {
        *patch.tris[t]
            .edges
            .iter()
            .find(|&&e| e != entry && marked[e])
            .expect("second marked edge")
    };

    for &stub in stubs {
        if !marked[stub] || visited[stub] {
            continue;
        }
        let mut edges = vec![stub];
        let mut tris = Vec::new();
        visited[stub] = true;
        let mut tri = patch.edges[stub].tris[0].expect("stub triangle");
        let mut entry = stub;
        loop {
            tris.push(tri);
            let exit = next_in_tri(tri, entry);
            edges.push(exit);
            visited[exit] = true;
            match patch.edges[exit].other_tri(tri) {
                Some(t_next) => {
                    tri = t_next;
                    entry = exit;
                }
                None => break, // reached the other stub
            }
        }
        marked_triangles += tris.len();
        open.push(Strand {
            edges,
            tris,
            closed: false,
        });
    }

    for e0 in 0..patch.edges.len() {
        if !marked[e0] || visited[e0] {
            continue;
        }
        assert!(
            !patch.edges[e0].is_boundary(),
            "marked boundary edge {e0} is not a designated stub"
        );
        let mut edges = vec![e0];
        let mut tris = Vec::new();
        visited[e0] = true;
        let mut tri = patch.edges[e0].tris[0].unwrap();
        let mut entry = e0;
        loop {
            tris.push(tri);
            let exit = next_in_tri(tri, entry);
            if exit == e0 {
                break;
            }
            edges.push(exit);
            visited[exit] = true;
            tri = patch.edges[exit]
                .other_tri(tri)
                .expect("interior loop cannot reach the boundary");
            entry = exit;
        }
        marked_triangles += tris.len();
        loops.push(Strand {
            edges,
            tris,
            closed: true,
        });
    }

    Strands {
        loops,
        open,
        marked_triangles,
    }
}

/// A closed loop with its height assignment interpreted: which height sits
/// strictly inside, which outside, and how deeply the loop is nested.
#[derive(Debug, Clone)]
pub struct LoopRun {
    pub strand: Strand,
    pub inner_height: Node,
    pub outer_height: Node,
    pub depth: usize,
}

/// Loop decomposition of a valid height configuration.
#[derive(Debug, Clone)]
pub struct LoopConfig {
    pub loops: Vec<LoopRun>,
    pub curve: Option<Strand>,
    pub marked_triangles: usize,
}

/// Decompose a height configuration into its nested loops and (under chordal
/// boundary conditions) single open curve.
pub fn decompose(patch: &TriPatch, heights: &[Node], stubs: &[usize]) -> LoopConfig {
    let marked: Vec<bool> = patch
        .edges
        .iter()
        .map(|e| heights[e.a] != heights[e.b])
        .collect();
    let strands = trace_marked(patch, &marked, stubs);
    assert!(strands.open.len() <= 1, "at most one open curve expected");

    let mut loops: Vec<LoopRun> = Vec::new();
    for strand in strands.loops {
        let (inner, outer) = classify_loop_heights(patch, &strand, &marked, heights);
        loops.push(LoopRun {
            strand,
            inner_height: inner,
            outer_height: outer,
            depth: 0,
        });
    }
    // Nesting depth by containment of centroid paths.
    let paths: Vec<Vec<Pt>> = loops
        .iter()
        .map(|l| l.strand.centroid_path(patch))
        .collect();
    for i in 0..loops.len() {
        let probe = paths[i][0];
        let depth = (0..loops.len())
            .filter(|&j| j != i && point_in_polygon(probe, &paths[j]))
            .count();
        loops[i].depth = depth;
    }

    LoopConfig {
        loops,
        curve: strands.open.into_iter().next(),
        marked_triangles: strands.marked_triangles,
    }
}

/// Determine (inner height, outer height) of a closed strand, asserting that
/// every pass-through triangle tells the same story.
fn classify_loop_heights(
    patch: &TriPatch,
    strand: &Strand,
    marked: &[bool],
    heights: &[Node],
) -> (Node, Node) {
    let path = strand.centroid_path(patch);
    let ccw = signed_area(&path) > 0.0;
    let tips = strand.tips(patch, marked);
    let sides = strand.tip_sides(patch, marked);
    let mut inner: Option<Node> = None;
    let mut outer: Option<Node> = None;
    for (k, (&tip, &side)) in tips.iter().zip(&sides).enumerate() {
        let tri = &patch.tris[strand.tris[k]];
        let pair_height = tri
            .verts
            .iter()
            .find(|&&v| heights[v] != heights[tip])
            .map(|&v| heights[v])
            .expect("pair height");
        // For a counterclockwise walk the interior lies to the left.
        let tip_is_inner = (side > 0) == ccw;
        let (h_in, h_out) = if tip_is_inner {
            (heights[tip], pair_height)
        } else {
            (pair_height, heights[tip])
        };
        match (inner, outer) {
            (None, None) => {
                inner = Some(h_in);
                outer = Some(h_out);
            }
            (Some(i), Some(o)) => {
                assert!(
                    i == h_in && o == h_out,
                    "loop separates inconsistent heights"
                );
            }
            _ => unreachable!(),
        }
    }
    (inner.unwrap(), outer.unwrap())
}

/// Product of per-triangle weight factors around a closed strand, for a given
/// node-weight vector: each pass-through triangle contributes
/// `(S_tip / S_pair)^(1/6)`.
pub fn loop_height_ratio(
    patch: &TriPatch,
    strand: &Strand,
    marked: &[bool],
    heights: &[Node],
    weights: &[f64],
) -> f64 {
    let tips = strand.tips(patch, marked);
    let mut acc = 1.0;
    for (k, &tip) in tips.iter().enumerate() {
        let tri = &patch.tris[strand.tris[k]];
        let pair = tri
            .verts
            .iter()
            .find(|&&v| heights[v] != heights[tip])
            .copied()
            .expect("pair site");
        acc *= (weights[heights[tip]] / weights[heights[pair]]).powf(1.0 / 6.0);
    }
    acc
}

/// Enumerate every marked-edge set consistent with the patch: each triangle
/// is either empty or passed through (two of its three edges marked), every
/// interior edge agrees between its two triangles, and boundary edges are
/// marked exactly at the designated stubs. The visitor receives the complete
/// marked-edge set.
pub fn enumerate_loop_configs(patch: &TriPatch, stubs: &[usize], visit: &mut dyn FnMut(&[bool])) {
    const UNKNOWN: u8 = 0;
    const MARKED: u8 = 1;
    const UNMARKED: u8 = 2;

    let mut state = vec![UNKNOWN; patch.edges.len()];
    for (e_id, e) in patch.edges.iter().enumerate() {
        if e.is_boundary() {
            state[e_id] = UNMARKED;
        }
    }
    for &s in stubs {
        state[s] = MARKED;
    }

    // Triangle states: 0 = empty; 1..=3 = pass-through with unmarked local
    // edge `state - 1`.
    fn descend(
        patch: &TriPatch,
        t: usize,
        state: &mut Vec<u8>,
        visit: &mut dyn FnMut(&[bool]),
    ) {
        if t == patch.tris.len() {
            let marked: Vec<bool> = state.iter().map(|&s| s == MARKED).collect();
            visit(&marked);
            return;
        }
        let tri_edges = patch.tris[t].edges;
        'candidates: for cand in 0..=3u8 {
            let mut touched: [Option<usize>; 3] = [None; 3];
            for k in 0..3 {
                let want = if cand == 0 || cand == k as u8 + 1 {
                    UNMARKED
                } else {
                    MARKED
                };
                let e = tri_edges[k];
                match state[e] {
                    UNKNOWN => {
                        state[e] = want;
                        touched[k] = Some(e);
                    }
                    s if s == want => {}
                    _ => {
                        for e in touched.iter().flatten() {
                            state[*e] = UNKNOWN;
                        }
                        continue 'candidates;
                    }
                }
            }
            descend(patch, t + 1, state, visit);
            for e in touched.iter().flatten() {
                state[*e] = UNKNOWN;
            }
        }
    }

    descend(patch, 0, &mut state, visit);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::TriPatch;

    #[test]
    fn lone_flipped_site_makes_one_hexagon_loop() {
        let p = TriPatch::build(2, 2).unwrap();
        let center = p.site_at(1, 1).unwrap();
        let mut heights = vec![0usize; p.site_count()];
        heights[center] = 1;
        let cfg = decompose(&p, &heights, &[]);
        assert_eq!(cfg.loops.len(), 1);
        assert!(cfg.curve.is_none());
        let l = &cfg.loops[0];
        assert_eq!(l.strand.tris.len(), 6);
        assert_eq!(l.strand.edges.len(), 6);
        assert_eq!(l.inner_height, 1);
        assert_eq!(l.outer_height, 0);
        assert_eq!(l.depth, 0);
        assert_eq!(cfg.marked_triangles, 6);
        // Turn balance of a simple closed loop is +-6.
        assert_eq!(l.strand.turn_balance(&p).abs(), 6);
    }

    #[test]
    fn homogeneous_config_has_no_loops() {
        let p = TriPatch::build(3, 3).unwrap();
        let heights = vec![2usize; p.site_count()];
        let cfg = decompose(&p, &heights, &[]);
        assert!(cfg.loops.is_empty() && cfg.curve.is_none());
        assert_eq!(cfg.marked_triangles, 0);
    }

    #[test]
    fn nested_loops_get_depths() {
        // 4x4 patch: ring of height 1 around center of height 0, outer 0.
        let p = TriPatch::build(4, 4).unwrap();
        let mut heights = vec![0usize; p.site_count()];
        for (i, j) in [
            (1usize, 1usize),
            (1, 2),
            (1, 3),
            (2, 1),
            (2, 3),
            (3, 1),
            (3, 2),
            (3, 3),
        ] {
            heights[p.site_at(i, j).unwrap()] = 1;
        }
        // Center stays 0: the ring has an inner and an outer boundary loop.
        let cfg = decompose(&p, &heights, &[]);
        assert_eq!(cfg.loops.len(), 2);
        let mut depths: Vec<usize> = cfg.loops.iter().map(|l| l.depth).collect();
        depths.sort();
        assert_eq!(depths, vec![0, 1]);
        for l in &cfg.loops {
            if l.depth == 1 {
                assert_eq!((l.inner_height, l.outer_height), (0, 1));
            } else {
                assert_eq!((l.inner_height, l.outer_height), (1, 0));
            }
        }
    }

    #[test]
    fn loop_ratio_is_shape_independent() {
        let s2 = 2f64.sqrt();
        let weights = vec![1.0, s2, 1.0];
        // Hexagon loop.
        let p = TriPatch::build(2, 2).unwrap();
        let mut heights = vec![1usize; p.site_count()];
        heights[p.site_at(1, 1).unwrap()] = 0;
        let marked: Vec<bool> = p
            .edges
            .iter()
            .map(|e| heights[e.a] != heights[e.b])
            .collect();
        let cfg = decompose(&p, &heights, &[]);
        let r = loop_height_ratio(&p, &cfg.loops[0].strand, &marked, &heights, &weights);
        assert!((r - 1.0 / s2).abs() < 1e-12);

        // Bigger, bent cluster of height 0 inside height 1: same ratio.
        let p = TriPatch::build(4, 5).unwrap();
        let mut heights = vec![1usize; p.site_count()];
        for (i, j) in [(1usize, 1usize), (1, 2), (2, 1), (2, 3), (2, 2), (3, 3)] {
            heights[p.site_at(i, j).unwrap()] = 0;
        }
        let marked: Vec<bool> = p
            .edges
            .iter()
            .map(|e| heights[e.a] != heights[e.b])
            .collect();
        let cfg = decompose(&p, &heights, &[]);
        assert_eq!(cfg.loops.len(), 1);
        let r = loop_height_ratio(&p, &cfg.loops[0].strand, &marked, &heights, &weights);
        assert!((r - 1.0 / s2).abs() < 1e-12);
        assert!(
            (r - weights[cfg.loops[0].inner_height] / weights[cfg.loops[0].outer_height]).abs()
                < 1e-12
        );
    }

    #[test]
    fn face_state_enumeration_counts_single_cell() {
        // One interior hexagonal cell: empty config + one loop.
        let p = TriPatch::build(2, 2).unwrap();
        let mut count = 0usize;
        let mut loop_configs = 0usize;
        enumerate_loop_configs(&p, &[], &mut |marked| {
            count += 1;
            if marked.iter().any(|&m| m) {
                loop_configs += 1;
                let strands = trace_marked(&p, marked, &[]);
                assert_eq!(strands.loops.len(), 1);
                assert_eq!(strands.marked_triangles, 6);
            }
        });
        assert_eq!(count, 2);
        assert_eq!(loop_configs, 1);
    }
}
