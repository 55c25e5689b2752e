//! The dilute height model on the triangular lattice.
//!
//! Neighboring heights are equal or adjacent on the height graph. Each
//! elementary triangle weighs 1 when its three heights agree and
//! `x * (S_tip / S_pair)^(1/6)` when exactly one site (the tip) differs from
//! the other two. Summing heights reproduces a gas of non-intersecting loops
//! on the dual honeycomb with fugacity `lambda` per loop and `x` per visited
//! triangle, provided `S` is an eigenvector of the height-graph adjacency
//! with eigenvalue `lambda`. Both sides of that identity are implemented
//! here, with independent state spaces (site heights vs. triangle states).

pub mod loops;

use std::collections::BTreeMap;

use crate::domain::{ResolvedTriBc, TriPatch};
use crate::error::{Error, Result};
use crate::graph::{GraphSpec, Node};
use crate::spectra::SpectralData;

const UNSET: usize = usize::MAX;

/// How invalid local configurations are treated by weight evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strictness {
    /// Invalid neighbor pairs or triangles give weight zero.
    Zero,
    /// Invalid local configurations are reported as errors.
    Strict,
}

/// Classification of one elementary triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TriangleClass {
    AllEqual,
    /// `tip` differs from the `pair` height; both heights adjacent on the graph.
    Marked { tip: Node, pair: Node },
    Invalid,
}

pub fn classify_triangle(graph: &GraphSpec, h: [Node; 3]) -> TriangleClass {
    let [a, b, c] = h;
    if a == b && b == c {
        TriangleClass::AllEqual
    } else if a == b {
        tip_or_invalid(graph, c, a)
    } else if a == c {
        tip_or_invalid(graph, b, a)
    } else if b == c {
        tip_or_invalid(graph, a, b)
    } else {
        TriangleClass::Invalid
    }
}

fn tip_or_invalid(graph: &GraphSpec, tip: Node, pair: Node) -> TriangleClass {
    if graph.adjacent(tip, pair) {
        TriangleClass::Marked { tip, pair }
    } else {
        TriangleClass::Invalid
    }
}

/// Weight of a full configuration: product over all triangles of the local
/// weights. Positive node weights only.
pub fn config_weight(
    patch: &TriPatch,
    graph: &GraphSpec,
    weights: &[f64],
    x: f64,
    heights: &[Node],
    strictness: Strictness,
) -> Result<f64> {
    let ratio = ratio_table(weights);
    let mut acc = 1.0;
    for (t_id, tri) in patch.tris.iter().enumerate() {
        match classify_triangle(graph, tri.verts.map(|v| heights[v])) {
            TriangleClass::AllEqual => {}
            TriangleClass::Marked { tip, pair } => {
                acc *= x * ratio[tip][pair];
            }
            TriangleClass::Invalid => {
                if strictness == Strictness::Strict {
                    return Err(Error::InvalidConfig(format!(
                        "triangle {t_id} carries heights {:?} with a non-adjacent unequal pair",
                        tri.verts.map(|v| heights[v])
                    )));
                }
                return Ok(0.0);
            }
        }
    }
    Ok(acc)
}

/// Signed configuration weight for a general (possibly sign-changing)
/// eigenvector: the product over closed loops of `S_inner / S_outer`, times
/// `x` per marked triangle, evaluated through the cluster nesting forest.
/// Returns an error when a needed component of `weights` vanishes.
pub fn config_weight_signed(
    patch: &TriPatch,
    weights: &[f64],
    x: f64,
    heights: &[Node],
) -> Result<f64> {
    // Each pass-through triangle crosses two marked edges and every marked
    // edge lies on a strand, so marked triangles = marked edges.
    let marked: u32 = patch
        .edges
        .iter()
        .map(|e| (heights[e.a] != heights[e.b]) as u32)
        .sum::<u32>();
    let forest = cluster_forest_ratio(patch, weights, heights)?;
    Ok(forest * x.powi(marked as i32))
}

/// Product over (child cluster, parent cluster) pairs of `S_child/S_parent`,
/// rooted at the cluster containing site 0 (a boundary site in all our
/// boundary conditions).
fn cluster_forest_ratio(patch: &TriPatch, weights: &[f64], heights: &[Node]) -> Result<f64> {
    let n = patch.site_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    for e in &patch.edges {
        if heights[e.a] == heights[e.b] {
            let (ra, rb) = (find(&mut parent, e.a), find(&mut parent, e.b));
            if ra != rb {
                parent[ra] = rb;
            }
        }
    }
    // Cluster adjacency = nesting forest edges (each separating loop joins
    // exactly two clusters).
    let mut links: std::collections::HashSet<(usize, usize)> = std::collections::HashSet::new();
    for e in &patch.edges {
        if heights[e.a] != heights[e.b] {
            let (ra, rb) = (find(&mut parent, e.a), find(&mut parent, e.b));
            links.insert((ra.min(rb), ra.max(rb)));
        }
    }
    let root = find(&mut parent, 0);
    let mut adj: std::collections::HashMap<usize, Vec<usize>> = std::collections::HashMap::new();
    for &(a, b) in &links {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    let mut acc = 1.0;
    let mut seen = std::collections::HashSet::from([root]);
    let mut queue = std::collections::VecDeque::from([root]);
    let mut visited_links = 0usize;
    while let Some(c) = queue.pop_front() {
        if let Some(children) = adj.get(&c) {
            for &child in children {
                if seen.insert(child) {
                    visited_links += 1;
                    let (h_child, h_parent) = (heights[child], heights[c]);
                    if weights[h_parent].abs() < 1e-12 {
                        return Err(Error::InvalidConfig(
                            "zero node weight in a nesting ratio; weight undefined".into(),
                        ));
                    }
                    acc *= weights[h_child] / weights[h_parent];
                    queue.push_back(child);
                }
            }
        }
    }
    assert_eq!(
        visited_links,
        links.len(),
        "cluster adjacency must form a tree rooted at the boundary"
    );
    Ok(acc)
}

fn ratio_table(weights: &[f64]) -> Vec<Vec<f64>> {
    let n = weights.len();
    (0..n)
        .map(|a| {
            (0..n)
                .map(|b| (weights[a] / weights[b]).powf(1.0 / 6.0))
                .collect()
        })
        .collect()
}

/// Exact sum over all admissible height configurations, organized as a
/// polynomial in the triangle fugacity: `z(x) = sum_m coeff[m] x^m` where `m`
/// counts marked triangles.
#[derive(Debug, Clone)]
pub struct HeightTally {
    pub marked_coeffs: Vec<f64>,
    pub config_count: u64,
}

impl HeightTally {
    pub fn z_at(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        let mut xp = 1.0;
        for &c in &self.marked_coeffs {
            acc += c * xp;
            xp *= x;
        }
        acc
    }
}

/// Plan shared by the height-enumeration entry points: free sites in
/// deterministic (row-major) order, per-site constraint lists, and triangles
/// grouped by the site that completes them.
struct EnumPlan {
    free_sites: Vec<usize>,
    /// Per free site: already-assigned neighbor sites at descend time.
    known_neighbors: Vec<Vec<usize>>,
    /// Per free site: triangles completed by assigning it.
    completes: Vec<Vec<usize>>,
    /// Triangles whose three sites are all fixed by the boundary condition.
    prefixed_tris: Vec<usize>,
}

fn plan(patch: &TriPatch, bc: &ResolvedTriBc, cap: usize) -> Result<EnumPlan> {
    let free_sites: Vec<usize> = (0..patch.site_count())
        .filter(|&s| bc.fixed[s].is_none())
        .collect();
    if free_sites.len() > cap {
        return Err(Error::CapExceeded {
            free_sites: free_sites.len(),
            cap,
            estimate: 4f64.powi(free_sites.len() as i32),
        });
    }
    let mut order = vec![UNSET; patch.site_count()];
    for (k, &s) in free_sites.iter().enumerate() {
        order[s] = k;
    }
    let known_neighbors = free_sites
        .iter()
        .map(|&s| {
            patch.site_neighbors[s]
                .iter()
                .map(|&(nb, _)| nb)
                .filter(|&nb| bc.fixed[nb].is_some() || order[nb] < order[s])
                .collect()
        })
        .collect();
    let mut completes = vec![Vec::new(); free_sites.len()];
    let mut prefixed_tris = Vec::new();
    for (t_id, tri) in patch.tris.iter().enumerate() {
        let last = tri
            .verts
            .iter()
            .filter(|&&v| bc.fixed[v].is_none())
            .map(|&v| order[v])
            .max();
        match last {
            Some(k) => completes[k].push(t_id),
            None => prefixed_tris.push(t_id),
        }
    }
    Ok(EnumPlan {
        free_sites,
        known_neighbors,
        completes,
        prefixed_tris,
    })
}

fn allowed_mask(graph: &GraphSpec, h: Node) -> u32 {
    graph.neighbor_mask[h] | (1 << h)
}

/// Exact height enumeration with positive node weights, tallied by marked
/// count. `threads > 1` partitions on the first free site; branch subtotals
/// are reduced in a fixed order, so results are identical for any thread
/// count.
pub fn enumerate_heights(
    patch: &TriPatch,
    bc: &ResolvedTriBc,
    graph: &GraphSpec,
    spectral_weights: &[f64],
    cap: usize,
    threads: usize,
) -> Result<HeightTally> {
    let plan = plan(patch, bc, cap)?;
    let ratio = ratio_table(spectral_weights);
    let max_marked = patch.tris.len() + 1;

    let mut heights = vec![UNSET; patch.site_count()];
    for (s, f) in bc.fixed.iter().enumerate() {
        if let Some(h) = f {
            heights[s] = *h;
        }
    }
    // Triangles fully fixed by the boundary contribute a constant factor.
    let mut base_w = 1.0;
    let mut base_m = 0u32;
    for &t in &plan.prefixed_tris {
        match classify_triangle(graph, patch.tris[t].verts.map(|v| heights[v])) {
            TriangleClass::AllEqual => {}
            TriangleClass::Marked { tip, pair } => {
                base_w *= ratio[tip][pair];
                base_m += 1;
            }
            TriangleClass::Invalid => {
                return Err(Error::BoundaryCondition(vec![
                    "boundary heights violate the adjacency constraint".into(),
                ]))
            }
        }
    }

    if plan.free_sites.is_empty() {
        let mut marked_coeffs = vec![0.0; max_marked];
        marked_coeffs[base_m as usize] = base_w;
        return Ok(HeightTally {
            marked_coeffs,
            config_count: 1,
        });
    }

    // Partition on the first free site's admissible heights.
    let first = plan.free_sites[0];
    let mut first_mask = (1u32 << graph.node_count) - 1;
    for &nb in &plan.known_neighbors[0] {
        first_mask &= allowed_mask(graph, heights[nb]);
    }
    let branches: Vec<Node> = (0..graph.node_count)
        .filter(|&h| first_mask & (1 << h) != 0)
        .collect();

    let run_branch = |h0: Node| -> (Vec<f64>, u64) {
        let mut local = heights.clone();
        local[first] = h0;
        let mut coeffs = vec![0.0; max_marked];
        let mut count = 0u64;
        let mut w0 = base_w;
        let mut m0 = base_m;
        let mut ok = true;
        for &t in &plan.completes[0] {
            match classify_triangle(graph, patch.tris[t].verts.map(|v| local[v])) {
                TriangleClass::AllEqual => {}
                TriangleClass::Marked { tip, pair } => {
                    w0 *= ratio[tip][pair];
                    m0 += 1;
                }
                TriangleClass::Invalid => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            dfs_weighted(
                patch, graph, &plan, &ratio, 1, &mut local, w0, m0, &mut coeffs, &mut count,
            );
        }
        (coeffs, count)
    };

    let branch_results: Vec<(Vec<f64>, u64)> = if threads <= 1 || branches.len() <= 1 {
        branches.iter().map(|&h| run_branch(h)).collect()
    } else {
        let workers = threads.min(branches.len());
        let mut merged: Vec<Option<(Vec<f64>, u64)>> = vec![None; branches.len()];
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let branches = &branches;
                    let run_branch = &run_branch;
                    scope.spawn(move || {
                        let mut out = Vec::new();
                        let mut idx = w;
                        while idx < branches.len() {
                            out.push((idx, run_branch(branches[idx])));
                            idx += workers;
                        }
                        out
                    })
                })
                .collect();
            for h in handles {
                for (idx, res) in h.join().expect("worker panicked") {
                    merged[idx] = Some(res);
                }
            }
        });
        merged.into_iter().map(|r| r.unwrap()).collect()
    };

    let mut marked_coeffs = vec![0.0; max_marked];
    let mut config_count = 0u64;
    for (coeffs, count) in branch_results {
        for (a, b) in marked_coeffs.iter_mut().zip(coeffs) {
            *a += b;
        }
        config_count += count;
    }
    Ok(HeightTally {
        marked_coeffs,
        config_count,
    })
}

#[allow(clippy::too_many_arguments)]
fn dfs_weighted(
    patch: &TriPatch,
    graph: &GraphSpec,
    plan: &EnumPlan,
    ratio: &[Vec<f64>],
    k: usize,
    heights: &mut Vec<usize>,
    w: f64,
    m: u32,
    coeffs: &mut [f64],
    count: &mut u64,
) {
    if k == plan.free_sites.len() {
        coeffs[m as usize] += w;
        *count += 1;
        return;
    }
    let site = plan.free_sites[k];
    let mut mask = (1u32 << graph.node_count) - 1;
    for &nb in &plan.known_neighbors[k] {
        mask &= allowed_mask(graph, heights[nb]);
    }
    let mut candidates = mask;
    while candidates != 0 {
        let h = candidates.trailing_zeros() as usize;
        candidates &= candidates - 1;
        heights[site] = h;
        let mut w2 = w;
        let mut m2 = m;
        let mut ok = true;
        for &t in &plan.completes[k] {
            match classify_triangle(graph, patch.tris[t].verts.map(|v| heights[v])) {
                TriangleClass::AllEqual => {}
                TriangleClass::Marked { tip, pair } => {
                    w2 *= ratio[tip][pair];
                    m2 += 1;
                }
                TriangleClass::Invalid => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            dfs_weighted(
                patch, graph, plan, ratio, k + 1, heights, w2, m2, coeffs, count,
            );
        }
    }
    heights[site] = UNSET;
}

/// Serial visitor over all admissible configurations (the full heights array
/// is passed to the callback). Used by streaming output, the signed-weight
/// enumeration, and the exact chordal law.
pub fn visit_heights(
    patch: &TriPatch,
    bc: &ResolvedTriBc,
    graph: &GraphSpec,
    cap: usize,
    visit: &mut dyn FnMut(&[usize]),
) -> Result<u64> {
    let plan = plan(patch, bc, cap)?;
    let mut heights = vec![UNSET; patch.site_count()];
    for (s, f) in bc.fixed.iter().enumerate() {
        if let Some(h) = f {
            heights[s] = *h;
        }
    }
    for &t in &plan.prefixed_tris {
        if classify_triangle(graph, patch.tris[t].verts.map(|v| heights[v])) == TriangleClass::Invalid
        {
            return Err(Error::BoundaryCondition(vec![
                "boundary heights violate the adjacency constraint".into(),
            ]));
        }
    }
    let mut count = 0u64;
    #[allow(clippy::too_many_arguments)]
    fn rec(
        graph: &GraphSpec,
        plan: &EnumPlan,
        k: usize,
        heights: &mut Vec<usize>,
        count: &mut u64,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if k == plan.free_sites.len() {
            *count += 1;
            visit(heights);
            return;
        }
        let site = plan.free_sites[k];
        let mut mask = (1u32 << graph.node_count) - 1;
        for &nb in &plan.known_neighbors[k] {
            mask &= graph.neighbor_mask[heights[nb]] | (1 << heights[nb]);
        }
        let mut candidates = mask;
        while candidates != 0 {
            let h = candidates.trailing_zeros() as usize;
            candidates &= candidates - 1;
            heights[site] = h;
            rec(graph, plan, k + 1, heights, count, visit);
        }
        heights[site] = UNSET;
    }
    rec(graph, &plan, 0, &mut heights, &mut count, visit);
    Ok(count)
}

/// Exact partition function with a general eigenvector: per-configuration
/// weights go through the loop/cluster ratio product, so sign-changing
/// vectors are handled exactly.
pub fn enumerate_heights_signed(
    patch: &TriPatch,
    bc: &ResolvedTriBc,
    spectral: &SpectralData,
    graph: &GraphSpec,
    x: f64,
    cap: usize,
) -> Result<f64> {
    if !spectral.weights_nonzero() {
        return Err(Error::Spectral(
            "eigenvector has (numerically) zero components; per-configuration weights are singular"
                .into(),
        ));
    }
    let mut z = 0.0;
    let mut err = None;
    visit_heights(patch, bc, graph, cap, &mut |heights| {
        match config_weight_signed(patch, &spectral.weights, x, heights) {
            Ok(w) => z += w,
            Err(e) => err = Some(e),
        }
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok(z),
    }
}

/// Loop-gas tally: how many marked-edge configurations realize each
/// (closed-loop count, marked-triangle count) pair.
#[derive(Debug, Clone)]
pub struct LoopTally {
    pub hist: BTreeMap<(u32, u32), u64>,
}

impl LoopTally {
    pub fn z_at(&self, lambda: f64, x: f64) -> f64 {
        self.hist
            .iter()
            .map(|(&(l, m), &c)| c as f64 * lambda.powi(l as i32) * x.powi(m as i32))
            .sum()
    }

    /// Distribution of the closed-loop count under `(lambda, x)` weights.
    pub fn loop_count_distribution(&self, lambda: f64, x: f64) -> BTreeMap<u32, f64> {
        let mut out: BTreeMap<u32, f64> = BTreeMap::new();
        let z = self.z_at(lambda, x);
        for (&(l, m), &c) in &self.hist {
            *out.entry(l).or_insert(0.0) += c as f64 * lambda.powi(l as i32) * x.powi(m as i32) / z;
        }
        out
    }
}

/// Enumerate the loop gas directly over triangle states (no heights), with
/// open curves forced at the boundary-condition stubs.
pub fn enumerate_loops(patch: &TriPatch, bc: &ResolvedTriBc, cap: usize) -> Result<LoopTally> {
    // The cap guards the same patches as height enumeration.
    let free = patch.site_count() - bc.fixed.iter().filter(|f| f.is_some()).count();
    if free > cap {
        return Err(Error::CapExceeded {
            free_sites: free,
            cap,
            estimate: 4f64.powi(patch.tris.len() as i32),
        });
    }
    let mut hist: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    loops::enumerate_loop_configs(patch, &bc.stubs, &mut |marked| {
        let strands = loops::trace_marked(patch, marked, &bc.stubs);
        *hist
            .entry((strands.loops.len() as u32, strands.marked_triangles as u32))
            .or_insert(0) += 1;
    });
    Ok(LoopTally { hist })
}

/// Exact law of the chordal curve: probability per curve, keyed by the
/// ordered lattice-edge id sequence from the first stub to the second.
#[derive(Debug, Clone)]
pub struct CurveLaw {
    pub probs: BTreeMap<Vec<u32>, f64>,
    pub z: f64,
    /// Left-minus-right turn balance, common to every curve.
    pub turn_balance: i32,
}

pub fn chordal_curve_law(
    patch: &TriPatch,
    bc: &ResolvedTriBc,
    graph: &GraphSpec,
    spectral_weights: &[f64],
    x: f64,
    cap: usize,
) -> Result<CurveLaw> {
    if bc.stubs.len() != 2 {
        return Err(Error::BoundaryCondition(vec![format!(
            "chordal law needs exactly two boundary stubs, found {}",
            bc.stubs.len()
        )]));
    }
    let ratio = ratio_table(spectral_weights);
    let mut weights_by_curve: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
    let mut turn_balance: Option<i32> = None;
    let mut z = 0.0;
    visit_heights(patch, bc, graph, cap, &mut |heights| {
        let mut w = 1.0;
        for tri in &patch.tris {
            match classify_triangle(graph, tri.verts.map(|v| heights[v])) {
                TriangleClass::AllEqual => {}
                TriangleClass::Marked { tip, pair } => w *= x * ratio[tip][pair],
                TriangleClass::Invalid => unreachable!("pairwise masks prevent invalid triangles"),
            }
        }
        let marked: Vec<bool> = patch
            .edges
            .iter()
            .map(|e| heights[e.a] != heights[e.b])
            .collect();
        let strands = loops::trace_marked(patch, &marked, &bc.stubs);
        let curve = strands.open.first().expect("chordal stubs force a curve");
        let key: Vec<u32> = curve.edges.iter().map(|&e| e as u32).collect();
        if !weights_by_curve.contains_key(&key) {
            let tb = curve.turn_balance(patch);
            match turn_balance {
                None => turn_balance = Some(tb),
                Some(prev) => assert_eq!(
                    prev, tb,
                    "turn balance must be constant across chordal curves"
                ),
            }
        }
        *weights_by_curve.entry(key).or_insert(0.0) += w;
        z += w;
    })?;
    let probs = weights_by_curve
        .into_iter()
        .map(|(k, w)| (k, w / z))
        .collect();
    Ok(CurveLaw {
        probs,
        z,
        turn_balance: turn_balance.unwrap_or(0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{TriBc, TriPatch};
    use crate::graph::{GraphKind, GraphSpec};
    use crate::spectra::spectrum;

    fn a3() -> (GraphSpec, Vec<f64>) {
        let g = GraphSpec::build(GraphKind::A(3)).unwrap();
        let s = spectrum(&g, 0).unwrap();
        (g, s.weights)
    }

    #[test]
    fn homogeneous_config_weight_is_one() {
        let (g, s) = a3();
        let p = TriPatch::build(2, 2).unwrap();
        let heights = vec![1usize; p.site_count()];
        let w = config_weight(&p, &g, &s, 0.5, &heights, Strictness::Strict).unwrap();
        assert!((w - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_marked_triangle_value() {
        let (g, s) = a3();
        let p = TriPatch::build(1, 1).unwrap();
        let mut heights = vec![1usize; p.site_count()];
        let tip_site = p.tris[0].verts[0];
        assert!(!p.tris[1].verts.contains(&tip_site));
        heights[tip_site] = 0;
        let w = config_weight(&p, &g, &s, 0.5, &heights, Strictness::Zero).unwrap();
        let expect = 0.5 * (s[0] / s[1]).powf(1.0 / 6.0);
        assert!((w - expect).abs() < 1e-14);
        assert!((expect - 0.5 * (1.0 / 2f64.sqrt()).powf(1.0 / 6.0)).abs() < 1e-7);
    }

    #[test]
    fn invalid_pair_gives_zero_or_error() {
        let (g, s) = a3();
        let p = TriPatch::build(1, 1).unwrap();
        let mut heights = vec![0usize; p.site_count()];
        heights[p.tris[0].verts[0]] = 2; // labels 1 and 3: not adjacent on A3
        let w = config_weight(&p, &g, &s, 0.5, &heights, Strictness::Zero).unwrap();
        assert_eq!(w, 0.0);
        assert!(config_weight(&p, &g, &s, 0.5, &heights, Strictness::Strict).is_err());
    }

    #[test]
    fn no_free_sites_means_z_is_one_for_homogeneous_bc() {
        let (g, s) = a3();
        let p = TriPatch::build(1, 1).unwrap();
        let bc = TriBc::Homogeneous { a: 1 }.resolve(&p, &g).unwrap();
        let tally = enumerate_heights(&p, &bc, &g, &s, 14, 1).unwrap();
        assert_eq!(tally.config_count, 1);
        assert!((tally.z_at(0.7) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_free_site_sum_matches_hand_count() {
        // 2x2 patch, homogeneous center height (label 2): the free center can
        // be 1, 2, or 3; flipping marks the six surrounding triangles:
        // z = 1 + 2 x^6 (S_1/S_2).
        let (g, s) = a3();
        let p = TriPatch::build(2, 2).unwrap();
        let bc = TriBc::Homogeneous { a: 1 }.resolve(&p, &g).unwrap();
        let tally = enumerate_heights(&p, &bc, &g, &s, 14, 1).unwrap();
        assert_eq!(tally.config_count, 3);
        let x: f64 = 0.6;
        let expect = 1.0 + 2.0 * x.powi(6) * (s[0] / s[1]);
        assert!((tally.z_at(x) - expect).abs() < 1e-12);

        // Loop side agrees at lambda = sqrt(2).
        let tally_l = enumerate_loops(&p, &bc, 14).unwrap();
        let z_loop = tally_l.z_at(2f64.sqrt(), x);
        assert!((tally.z_at(x) - z_loop).abs() / z_loop < 1e-12);
    }

    #[test]
    fn threading_is_bit_identical() {
        let g = GraphSpec::build(GraphKind::A(4)).unwrap();
        let s = spectrum(&g, 0).unwrap().weights;
        let p = TriPatch::build(3, 4).unwrap();
        let bc = TriBc::Homogeneous { a: 1 }.resolve(&p, &g).unwrap();
        let t1 = enumerate_heights(&p, &bc, &g, &s, 14, 1).unwrap();
        let t4 = enumerate_heights(&p, &bc, &g, &s, 14, 4).unwrap();
        assert_eq!(t1.config_count, t4.config_count);
        for (a, b) in t1.marked_coeffs.iter().zip(&t4.marked_coeffs) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn signed_weight_agrees_with_product_form_for_positive_vectors() {
        let (g, s) = a3();
        let p = TriPatch::build(3, 3).unwrap();
        let bc = TriBc::Homogeneous { a: 0 }.resolve(&p, &g).unwrap();
        let x = 0.45;
        let mut max_err = 0.0f64;
        visit_heights(&p, &bc, &g, 14, &mut |heights| {
            let w1 = config_weight(&p, &g, &s, x, heights, Strictness::Strict).unwrap();
            let w2 = config_weight_signed(&p, &s, x, heights).unwrap();
            max_err = max_err.max((w1 - w2).abs() / w1.max(1e-300));
        })
        .unwrap();
        assert!(max_err < 1e-11, "max relative error {max_err:.2e}");
    }

    #[test]
    fn cap_is_enforced() {
        let (g, s) = a3();
        let p = TriPatch::build(6, 6).unwrap();
        let bc = TriBc::Homogeneous { a: 1 }.resolve(&p, &g).unwrap();
        assert!(matches!(
            enumerate_heights(&p, &bc, &g, &s, 14, 1),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn smallest_chordal_patch_has_a_forced_curve() {
        let (g, s) = a3();
        let p = TriPatch::build(2, 2).unwrap();
        let bc = TriBc::Chordal { a: 0, b: 1, cuts: None }
            .resolve(&p, &g)
            .unwrap();
        let law = chordal_curve_law(&p, &bc, &g, &s, 0.5, 14).unwrap();
        let total: f64 = law.probs.values().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(!law.probs.is_empty());
        for key in law.probs.keys() {
            assert_eq!(key.first(), Some(&(bc.stubs[0] as u32)));
            assert_eq!(key.last(), Some(&(bc.stubs[1] as u32)));
        }
    }
}
