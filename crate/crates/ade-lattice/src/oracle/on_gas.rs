//! Loop-gas enumeration on the dual honeycomb by direct edge-subset search.
//!
//! State space: subsets of lattice edges (equivalently, dual edges crossing
//! them). A subset is admissible when every triangle is crossed by zero or
//! two selected edges and boundary edges are selected exactly at the
//! designated stubs. This is deliberately not the per-face state walk the
//! dilute module uses.

use std::collections::BTreeMap;

use crate::domain::TriPatch;
use crate::error::{Error, Result};

/// Histogram over (closed loops, crossed triangles).
#[derive(Debug, Clone)]
pub struct OnGasTally {
    pub hist: BTreeMap<(u32, u32), u64>,
    pub config_count: u64,
}

impl OnGasTally {
    pub fn z_at(&self, n: f64, x: f64) -> f64 {
        self.hist
            .iter()
            .map(|(&(l, m), &c)| c as f64 * n.powi(l as i32) * x.powi(m as i32))
            .sum()
    }
}

struct EdgeSearch<'p> {
    patch: &'p TriPatch,
    stubs: Vec<usize>,
    /// Degree of each triangle in the selected subgraph.
    deg: Vec<u8>,
    /// Undecided edges remaining per triangle.
    remaining: Vec<u8>,
    selected: Vec<bool>,
}

impl<'p> EdgeSearch<'p> {
    fn new(patch: &'p TriPatch, stubs: &[usize]) -> EdgeSearch<'p> {
        let remaining = vec![3u8; patch.tris.len()];
        EdgeSearch {
            patch,
            stubs: stubs.to_vec(),
            deg: vec![0; patch.tris.len()],
            remaining,
            selected: vec![false; patch.edges.len()],
        }
    }

    fn run(&mut self, visit: &mut dyn FnMut(&[bool], &[u8])) {
        self.descend(0, visit);
    }

    fn descend(&mut self, e: usize, visit: &mut dyn FnMut(&[bool], &[u8])) {
        if e == self.patch.edges.len() {
            visit(&self.selected, &self.deg);
            return;
        }
        let tris: Vec<usize> = self.patch.edges[e].tris.iter().flatten().copied().collect();
        let forced_in = self.stubs.contains(&e);
        let forced_out = self.patch.edges[e].is_boundary() && !forced_in;

        // Branch: exclude the edge.
        if !forced_in {
            let mut dead = false;
            for &t in &tris {
                if self.deg[t] == 1 && self.remaining[t] == 1 {
                    dead = true;
                }
            }
            if !dead {
                for &t in &tris {
                    self.remaining[t] -= 1;
                }
                self.descend(e + 1, visit);
                for &t in &tris {
                    self.remaining[t] += 1;
                }
            }
        }
        // Branch: include the edge.
        if !forced_out && tris.iter().all(|&t| self.deg[t] < 2) {
            // A triangle at degree 1 with no undecided edges left cannot be
            // completed; a triangle reaching degree 2 is done.
            let mut dead = false;
            for &t in &tris {
                if self.deg[t] == 0 && self.remaining[t] == 1 {
                    // This edge is its last chance and leaves it at degree 1.
                    dead = true;
                }
            }
            if !dead {
                self.selected[e] = true;
                for &t in &tris {
                    self.deg[t] += 1;
                    self.remaining[t] -= 1;
                }
                self.descend(e + 1, visit);
                for &t in &tris {
                    self.deg[t] -= 1;
                    self.remaining[t] += 1;
                }
                self.selected[e] = false;
            }
        }
    }
}

fn component_stats(patch: &TriPatch, selected: &[bool], deg: &[u8]) -> (u32, u32, usize) {
    // Union-find over triangles through selected interior edges.
    let mut parent: Vec<usize> = (0..patch.tris.len()).collect();
    fn find(parent: &mut Vec<usize>, mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    for (e_id, e) in patch.edges.iter().enumerate() {
        if selected[e_id] {
            if let [Some(t1), Some(t2)] = e.tris {
                let (r1, r2) = (find(&mut parent, t1), find(&mut parent, t2));
                if r1 != r2 {
                    parent[r1] = r2;
                }
            }
        }
    }
    let mut roots = std::collections::HashSet::new();
    let mut visited = 0u32;
    for t in 0..patch.tris.len() {
        if deg[t] > 0 {
            visited += 1;
            let r = find(&mut parent, t);
            roots.insert(r);
        }
    }
    let arcs = patch
        .edges
        .iter()
        .enumerate()
        .filter(|(e_id, e)| selected[*e_id] && e.is_boundary())
        .count()
        / 2;
    let loops = roots.len() - arcs;
    (loops as u32, visited, arcs)
}

/// Exact loop-gas tally with closed boundary (or stub-terminated arcs).
/// `max_triangles` caps the search.
pub fn on_partition(patch: &TriPatch, stubs: &[usize], max_triangles: usize) -> Result<OnGasTally> {
    if patch.tris.len() > max_triangles {
        return Err(Error::CapExceeded {
            free_sites: patch.tris.len(),
            cap: max_triangles,
            estimate: 2f64.powi(patch.edges.len() as i32),
        });
    }
    let mut hist: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    let mut config_count = 0u64;
    EdgeSearch::new(patch, stubs).run(&mut |selected, deg| {
        let (loops, visited, _) = component_stats(patch, selected, deg);
        *hist.entry((loops, visited)).or_insert(0) += 1;
        config_count += 1;
    });
    Ok(OnGasTally { hist, config_count })
}

/// Law of the open arc under loop weight `n` and step fugacity `x`,
/// normalized, keyed by the ordered crossed-edge sequence from the first
/// stub.
pub fn on_arc_law(
    patch: &TriPatch,
    stubs: &[usize],
    n: f64,
    x: f64,
    max_triangles: usize,
) -> Result<BTreeMap<Vec<u32>, f64>> {
    if stubs.len() != 2 {
        return Err(Error::BoundaryCondition(vec![
            "arc law needs exactly two stubs".into(),
        ]));
    }
    if patch.tris.len() > max_triangles {
        return Err(Error::CapExceeded {
            free_sites: patch.tris.len(),
            cap: max_triangles,
            estimate: 2f64.powi(patch.edges.len() as i32),
        });
    }
    let mut law: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
    let mut z = 0.0;
    EdgeSearch::new(patch, stubs).run(&mut |selected, deg| {
        let (loops, visited, arcs) = component_stats(patch, selected, deg);
        assert_eq!(arcs, 1, "stubs force exactly one arc");
        let w = n.powi(loops as i32) * x.powi(visited as i32);
        let key = walk_arc(patch, selected, stubs[0]);
        *law.entry(key).or_insert(0.0) += w;
        z += w;
    });
    for v in law.values_mut() {
        *v /= z;
    }
    Ok(law)
}

fn walk_arc(patch: &TriPatch, selected: &[bool], start_stub: usize) -> Vec<u32> {
    let mut key = vec![start_stub as u32];
    let mut tri = patch.edges[start_stub].tris[0].expect("stub triangle");
    let mut entry = start_stub;
    loop {
        let exit = *patch.tris[tri]
            .edges
            .iter()
            .find(|&&e| e != entry && selected[e])
            .expect("arc continues");
        key.push(exit as u32);
        match patch.edges[exit].other_tri(tri) {
            Some(next) => {
                tri = next;
                entry = exit;
            }
            None => break,
        }
    }
    key
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{TriBc, TriPatch};
    use crate::graph::{GraphKind, GraphSpec};

    #[test]
    fn empty_patch_partition_is_one() {
        let p = TriPatch::build(1, 2).unwrap();
        let tally = on_partition(&p, &[], 60).unwrap();
        assert_eq!(tally.config_count, 1);
        assert!((tally.z_at(1.3, 0.7) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn one_hexagon_gives_one_plus_n_x6() {
        let p = TriPatch::build(2, 2).unwrap();
        let tally = on_partition(&p, &[], 60).unwrap();
        assert_eq!(tally.config_count, 2);
        let (n, x): (f64, f64) = (1.37, 0.62);
        assert!((tally.z_at(n, x) - (1.0 + n * x.powi(6))).abs() < 1e-13);
    }

    #[test]
    fn matches_face_state_enumeration() {
        for (rows, cols) in [(2usize, 3usize), (3, 3), (3, 4)] {
            let p = TriPatch::build(rows, cols).unwrap();
            let g = GraphSpec::build(GraphKind::A(3)).unwrap();
            let bc = TriBc::Homogeneous { a: 0 }.resolve(&p, &g).unwrap();
            let module = crate::dilute::enumerate_loops(&p, &bc, 20).unwrap();
            let oracle = on_partition(&p, &[], 60).unwrap();
            let module_hist: Vec<((u32, u32), u64)> =
                module.hist.iter().map(|(&k, &v)| (k, v)).collect();
            let oracle_hist: Vec<((u32, u32), u64)> =
                oracle.hist.iter().map(|(&k, &v)| (k, v)).collect();
            assert_eq!(module_hist, oracle_hist, "{rows}x{cols}");
        }
    }

    #[test]
    fn arc_law_normalizes_and_matches_keys() {
        let p = TriPatch::build(2, 3).unwrap();
        let g = GraphSpec::build(GraphKind::A(2)).unwrap();
        let bc = TriBc::Chordal { a: 0, b: 1, cuts: None }.resolve(&p, &g).unwrap();
        let law = on_arc_law(&p, &bc.stubs, 1.0, 0.5, 60).unwrap();
        let total: f64 = law.values().sum();
        assert!((total - 1.0).abs() < 1e-12);
        for key in law.keys() {
            assert_eq!(key.first(), Some(&(bc.stubs[0] as u32)));
            assert_eq!(key.last(), Some(&(bc.stubs[1] as u32)));
        }
    }
}
