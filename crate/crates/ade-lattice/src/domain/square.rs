//! Square-lattice domains for the dense model.
//!
//! Two flavors:
//!
//! - [`SquarePatch`]: a plain `rows x cols` grid of plaquettes with vertices
//!   of both sublattice parities on the boundary. Used with fully fixed
//!   boundary heights (plaquette-weight checks, same-height cluster
//!   boundaries, Monte Carlo).
//! - [`DiamondPatch`]: a staircase domain built from an `m x n` grid of
//!   "primal" sites (one sublattice) with the other sublattice strictly
//!   interior. Its boundary consists of primal sites only, which is what
//!   wired and mixed-wired boundary conditions need: boundary plaquettes are
//!   half-plaquettes whose forced term either joins consecutive boundary
//!   sites (wired) or joins the interior dual site to the outer region
//!   (dual-wired). Curves and loops live on the medial graph built here.
//!
//! Medial structure of a diamond: one node per plaquette (the primal-edge
//! midpoint) plus one "outer" node per boundary site of a dual-wired arc.
//! Medial edges join nodes across unit (primal-dual) lattice edges and across
//! the virtual boundary contacts; every strand step is axis-aligned and every
//! strand turn is a quarter turn.

use serde::Serialize;

use super::Pt;
use crate::error::{Error, Result};
use crate::graph::{GraphSpec, Node};

/// Step directions of a medial strand, in units of 90 degrees: 0 = +x,
/// 1 = +y, 2 = -x, 3 = -y.
pub const MEDIAL_DIRECTIONS: [(f64, f64); 4] = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)];

// ---------------------------------------------------------------------------
// Plain rectangle
// ---------------------------------------------------------------------------

/// Axis-aligned grid: `(rows+1) x (cols+1)` vertices, `rows x cols`
/// plaquettes with corners listed cyclically `(a, b, c, d)` so that `a`/`c`
/// and `b`/`d` are the two diagonals.
#[derive(Debug, Clone)]
pub struct SquarePatch {
    pub rows: usize,
    pub cols: usize,
    pub site_pos: Vec<Pt>,
    pub coords: Vec<(usize, usize)>,
    pub parity: Vec<u8>,
    pub plaquettes: Vec<[usize; 4]>,
    pub neighbors: Vec<Vec<usize>>,
    pub site_plaqs: Vec<Vec<usize>>,
    pub boundary: Vec<usize>,
}

impl SquarePatch {
    pub fn build(rows: usize, cols: usize) -> Result<SquarePatch> {
        if rows < 1 || cols < 1 {
            return Err(Error::Parameter("square patch needs rows, cols >= 1".into()));
        }
        let gw = cols + 1;
        let id = |i: usize, j: usize| i * gw + j;
        let mut site_pos = Vec::new();
        let mut coords = Vec::new();
        let mut parity = Vec::new();
        for i in 0..=rows {
            for j in 0..=cols {
                site_pos.push(Pt::new(j as f64, i as f64));
                coords.push((i, j));
                parity.push(((i + j) % 2) as u8);
            }
        }
        let mut plaquettes = Vec::new();
        for i in 0..rows {
            for j in 0..cols {
                plaquettes.push([id(i, j), id(i, j + 1), id(i + 1, j + 1), id(i + 1, j)]);
            }
        }
        let mut neighbors = vec![Vec::new(); site_pos.len()];
        for i in 0..=rows {
            for j in 0..=cols {
                if j + 1 <= cols {
                    neighbors[id(i, j)].push(id(i, j + 1));
                    neighbors[id(i, j + 1)].push(id(i, j));
                }
                if i + 1 <= rows {
                    neighbors[id(i, j)].push(id(i + 1, j));
                    neighbors[id(i + 1, j)].push(id(i, j));
                }
            }
        }
        let mut site_plaqs = vec![Vec::new(); site_pos.len()];
        for (p_id, p) in plaquettes.iter().enumerate() {
            for &v in p {
                site_plaqs[v].push(p_id);
            }
        }
        let mut boundary = Vec::new();
        for j in 0..=cols {
            boundary.push(id(0, j));
        }
        for i in 1..=rows {
            boundary.push(id(i, cols));
        }
        for j in (0..cols).rev() {
            boundary.push(id(rows, j));
        }
        for i in (1..rows).rev() {
            boundary.push(id(i, 0));
        }
        Ok(SquarePatch {
            rows,
            cols,
            site_pos,
            coords,
            parity,
            plaquettes,
            neighbors,
            site_plaqs,
            boundary,
        })
    }

    pub fn site_count(&self) -> usize {
        self.site_pos.len()
    }

    pub fn site_at(&self, i: usize, j: usize) -> usize {
        i * (self.cols + 1) + j
    }

    pub fn is_boundary(&self, s: usize) -> bool {
        let (i, j) = self.coords[s];
        i == 0 || i == self.rows || j == 0 || j == self.cols
    }
}

/// Boundary conditions on a plain rectangle: heights fixed on every boundary
/// site, either by sublattice parity or explicitly.
#[derive(Debug, Clone, Serialize)]
pub enum RectBc {
    /// Boundary sites of even parity get `even`, odd parity get `odd`.
    Alternating { even: Node, odd: Node },
    /// Explicit per-site assignment (site id, height); must cover the boundary.
    Explicit(Vec<(usize, Node)>),
}

impl RectBc {
    pub fn validate(&self, patch: &SquarePatch, graph: &GraphSpec) -> Result<()> {
        let mut errs = Vec::new();
        if !graph.is_bipartite() {
            errs.push(format!(
                "graph {} is not bipartite; the dense model needs a two-coloring",
                graph.kind.name()
            ));
        }
        match self {
            RectBc::Alternating { even, odd } => {
                if *even >= graph.node_count || *odd >= graph.node_count {
                    errs.push("height index out of range".into());
                } else if !graph.adjacent(*even, *odd) {
                    errs.push("alternating boundary heights must be adjacent on the graph".into());
                }
            }
            RectBc::Explicit(assign) => {
                for &(s, h) in assign {
                    if s >= patch.site_count() || h >= graph.node_count {
                        errs.push(format!("bad explicit assignment ({s}, {h})"));
                    }
                }
                let covered: std::collections::HashSet<usize> =
                    assign.iter().map(|&(s, _)| s).collect();
                if patch.boundary.iter().any(|s| !covered.contains(s)) {
                    errs.push("explicit assignment must cover every boundary site".into());
                }
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::BoundaryCondition(errs))
        }
    }

    pub fn resolve(&self, patch: &SquarePatch, graph: &GraphSpec) -> Result<Vec<Option<Node>>> {
        self.validate(patch, graph)?;
        let mut fixed = vec![None; patch.site_count()];
        match self {
            RectBc::Alternating { even, odd } => {
                for &s in &patch.boundary {
                    fixed[s] = Some(if patch.parity[s] == 0 { *even } else { *odd });
                }
            }
            RectBc::Explicit(assign) => {
                for &(s, h) in assign {
                    fixed[s] = Some(h);
                }
            }
        }
        Ok(fixed)
    }
}

// ---------------------------------------------------------------------------
// Staircase diamond
// ---------------------------------------------------------------------------

/// Which term of the plaquette weight is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Term {
    /// The primal diagonal is drawn (the two even corners are joined).
    Even,
    /// The dual diagonal is drawn (the two odd corners are joined).
    Odd,
}

/// One plaquette of a diamond patch: the slot of a single primal edge.
#[derive(Debug, Clone, Serialize)]
pub struct Plaquette {
    /// The two primal (even) corners.
    pub even: [usize; 2],
    /// Flanking dual (odd) corners; `None` for the outer side of a boundary
    /// plaquette. Order is fixed so that walking `even[0] -> odd[0] ->
    /// even[1] -> odd[1]` goes counterclockwise around the plaquette center.
    pub odd: [Option<usize>; 2],
    pub center: Pt,
    /// Index into the boundary edge cycle when this is a boundary plaquette.
    pub boundary_pos: Option<usize>,
}

impl Plaquette {
    pub fn is_boundary(&self) -> bool {
        self.boundary_pos.is_some()
    }
}

/// Staircase domain around an `m x n` primal grid.
///
/// Primal site `(I, J)` is embedded at `(I + J, J - I + m - 1)`; the interior
/// dual site of the grid face `(I, J)` sits at `(I + J + 1, J - I + m - 1)`.
/// Site ids: primal first (`I * n + J`), then duals.
#[derive(Debug, Clone)]
pub struct DiamondPatch {
    pub m: usize,
    pub n: usize,
    pub site_pos: Vec<Pt>,
    /// 0 = primal/even sublattice, 1 = dual/odd.
    pub parity: Vec<u8>,
    /// Lattice adjacency (unit edges between primal and dual sites).
    pub neighbors: Vec<Vec<usize>>,
    pub plaquettes: Vec<Plaquette>,
    /// For each site, the plaquettes having it as a corner.
    pub site_plaqs: Vec<Vec<usize>>,
    /// Boundary edge cycle: plaquette ids of boundary plaquettes in
    /// counterclockwise order starting from the west corner going south.
    pub boundary_cycle: Vec<usize>,
    /// Boundary vertex cycle, one entry per boundary edge: the primal site at
    /// which edge `k` starts (so edge `k` joins `boundary_sites[k]` to
    /// `boundary_sites[k+1]`).
    pub boundary_sites: Vec<usize>,
}

impl DiamondPatch {
    pub fn primal_id(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }

    pub fn dual_id(&self, i: usize, j: usize) -> usize {
        self.m * self.n + i * (self.n - 1) + j
    }

    pub fn site_count(&self) -> usize {
        self.site_pos.len()
    }

    pub fn build(m: usize, n: usize) -> Result<DiamondPatch> {
        if m < 2 || n < 2 {
            return Err(Error::Parameter("diamond patch needs m, n >= 2".into()));
        }
        let primal_count = m * n;
        let dual_count = (m - 1) * (n - 1);
        let mut site_pos = Vec::with_capacity(primal_count + dual_count);
        let mut parity = Vec::with_capacity(primal_count + dual_count);
        for i in 0..m {
            for j in 0..n {
                site_pos.push(Pt::new(
                    (i + j) as f64,
                    j as f64 - i as f64 + (m - 1) as f64,
                ));
                parity.push(0);
            }
        }
        for i in 0..m - 1 {
            for j in 0..n - 1 {
                site_pos.push(Pt::new(
                    (i + j + 1) as f64,
                    j as f64 - i as f64 + (m - 1) as f64,
                ));
                parity.push(1);
            }
        }

        let patch_stub = DiamondPatch {
            m,
            n,
            site_pos: site_pos.clone(),
            parity: parity.clone(),
            neighbors: vec![],
            plaquettes: vec![],
            site_plaqs: vec![],
            boundary_cycle: vec![],
            boundary_sites: vec![],
        };
        let primal = |i: usize, j: usize| patch_stub.primal_id(i, j);
        let dual = |i: usize, j: usize| patch_stub.dual_id(i, j);

        // One plaquette per primal edge. Row edges go from (I,J) to (I+1,J),
        // column edges from (I,J) to (I,J+1). The counterclockwise corner
        // order even[0] -> odd[0] -> even[1] -> odd[1] is fixed from the
        // embedding.
        let mut plaquettes = Vec::new();
        for i in 0..m - 1 {
            for j in 0..n {
                // Row edge (I,J)-(I+1,J): direction (1,-1) in the plane.
                // Left face while walking it is (I,J-1)... in the embedding,
                // counterclockwise around the midpoint: e0=(I,J), then the
                // face at lower y is o(I,J-1)? Midpoint M = (i+j+.5, j-i-.5+m-1).
                // o(I,J) sits at (i+j+1, j-i+m-1) = M + (.5,.5);
                // o(I,J-1) at (i+j, j-i-1+m-1) = M + (-.5,-.5).
                // Walking e0 (M+(-.5,+.5)) -> o(I,J-1) (M+(-.5,-.5)) ->
                // e1 (M+(+.5,-.5)) -> o(I,J) (M+(+.5,+.5)) is counterclockwise.
                let o_lo = if j >= 1 { Some(dual(i, j - 1)) } else { None };
                let o_hi = if j <= n - 2 { Some(dual(i, j)) } else { None };
                plaquettes.push(Plaquette {
                    even: [primal(i, j), primal(i + 1, j)],
                    odd: [o_lo, o_hi],
                    center: site_pos[primal(i, j)].mid(site_pos[primal(i + 1, j)]),
                    boundary_pos: None,
                });
            }
        }
        for i in 0..m {
            for j in 0..n - 1 {
                // Column edge (I,J)-(I,J+1): M = (i+j+.5, j-i+.5+m-1);
                // o(I,J) = M + (.5,-.5); o(I-1,J) = M + (-.5,+.5).
                // Counterclockwise: e0=(I,J) (M+(-.5,-.5)) -> o(I,J) ->
                // e1=(I,J+1) (M+(.5,.5)) -> o(I-1,J).
                let o_lo = if i <= m - 2 { Some(dual(i, j)) } else { None };
                let o_hi = if i >= 1 { Some(dual(i - 1, j)) } else { None };
                plaquettes.push(Plaquette {
                    even: [primal(i, j), primal(i, j + 1)],
                    odd: [o_lo, o_hi],
                    center: site_pos[primal(i, j)].mid(site_pos[primal(i, j + 1)]),
                    boundary_pos: None,
                });
            }
        }

        let row_plaq = |i: usize, j: usize| i * n + j;
        let col_plaq = |i: usize, j: usize| (m - 1) * n + i * (n - 1) + j;

        // Boundary edge cycle, counterclockwise in the embedding: west corner
        // p(0,0) -> south corner p(m-1,0) (row edges at J=0), -> east corner
        // p(m-1,n-1) (column edges at I=m-1), -> north corner p(0,n-1)
        // (row edges at J=n-1, reversed), -> back west (column edges at I=0,
        // reversed).
        let mut boundary_cycle = Vec::new();
        let mut boundary_sites = Vec::new();
        for i in 0..m - 1 {
            boundary_cycle.push(row_plaq(i, 0));
            boundary_sites.push(primal(i, 0));
        }
        for j in 0..n - 1 {
            boundary_cycle.push(col_plaq(m - 1, j));
            boundary_sites.push(primal(m - 1, j));
        }
        for i in (0..m - 1).rev() {
            boundary_cycle.push(row_plaq(i, n - 1));
            boundary_sites.push(primal(i + 1, n - 1));
        }
        for j in (0..n - 1).rev() {
            boundary_cycle.push(col_plaq(0, j));
            boundary_sites.push(primal(0, j + 1));
        }
        for (pos, &p) in boundary_cycle.iter().enumerate() {
            plaquettes[p].boundary_pos = Some(pos);
        }

        let mut neighbors = vec![Vec::new(); site_pos.len()];
        for i in 0..m - 1 {
            for j in 0..n - 1 {
                let o = dual(i, j);
                for p in [
                    primal(i, j),
                    primal(i + 1, j),
                    primal(i, j + 1),
                    primal(i + 1, j + 1),
                ] {
                    neighbors[o].push(p);
                    neighbors[p].push(o);
                }
            }
        }
        let mut site_plaqs = vec![Vec::new(); site_pos.len()];
        for (p_id, p) in plaquettes.iter().enumerate() {
            for &e in &p.even {
                site_plaqs[e].push(p_id);
            }
            for o in p.odd.into_iter().flatten() {
                site_plaqs[o].push(p_id);
            }
        }

        Ok(DiamondPatch {
            m,
            n,
            site_pos,
            parity,
            neighbors,
            plaquettes,
            site_plaqs,
            boundary_cycle,
            boundary_sites,
        })
    }

    pub fn interior_plaquettes(&self) -> Vec<usize> {
        (0..self.plaquettes.len())
            .filter(|&p| !self.plaquettes[p].is_boundary())
            .collect()
    }
}

/// Boundary conditions on a diamond patch. Arcs are runs of boundary edges;
/// an arc whose height lies on the primal sublattice class is wired (its
/// edges are forced present), an arc on the dual class is dual-wired (its
/// edges are forced absent and the adjacent dual sites are pinned).
#[derive(Debug, Clone, Serialize)]
pub enum DiamondBc {
    /// Every boundary edge wired at one height.
    Wired { a: Node },
    /// Two arcs: wired at `a` on boundary-edge positions `[cuts.0, cuts.1)`,
    /// dual-wired at `b` on the complement. Defaults split the cycle in half
    /// at the west and east corners.
    Dobrushin {
        a: Node,
        b: Node,
        cuts: Option<(usize, usize)>,
    },
    /// `heights[k]` rules the arc of boundary-edge positions
    /// `[cuts[k], cuts[k+1])` (cyclically).
    MultiArc { heights: Vec<Node>, cuts: Vec<usize> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MedialNodeKind {
    Plaq(usize),
    /// Outer contact at a boundary primal site of a dual-wired arc.
    Outer(usize),
}

#[derive(Debug, Clone, Serialize)]
pub struct MedialEdge {
    pub nodes: [MedialNodeKind; 2],
    pub pos: Pt,
}

/// Medial graph of a resolved diamond boundary condition.
#[derive(Debug, Clone)]
pub struct MedialTable {
    pub edges: Vec<MedialEdge>,
    /// Per plaquette: the medial edges in slots
    /// `[e0-o0, o0-e1, e1-o1, o1-e0]`. Missing sides of wired boundary
    /// plaquettes are `None`.
    pub plaq_slots: Vec<[Option<usize>; 4]>,
    /// Pairings fixed independent of term choices (at outer nodes).
    pub fixed_pairs: Vec<(usize, usize)>,
    /// Medial edges where strands end, in boundary-cycle order.
    pub stubs: Vec<usize>,
    /// Positions of outer nodes, for turn bookkeeping (indexed by site id).
    pub outer_pos: Vec<Option<Pt>>,
}

impl MedialTable {
    /// The two strand pairs through a plaquette for a given term, as slot
    /// index pairs: the even term hugs the odd corners, the odd term hugs the
    /// even corners.
    pub fn term_pairs(term: Term) -> [(usize, usize); 2] {
        match term {
            Term::Even => [(0, 1), (2, 3)],
            Term::Odd => [(3, 0), (1, 2)],
        }
    }

    /// Node position used for strand geometry.
    pub fn node_pos(&self, patch: &DiamondPatch, node: MedialNodeKind) -> Pt {
        match node {
            MedialNodeKind::Plaq(p) => patch.plaquettes[p].center,
            MedialNodeKind::Outer(s) => self.outer_pos[s].expect("outer node position"),
        }
    }
}

/// A diamond boundary condition resolved against its patch.
#[derive(Debug, Clone)]
pub struct ResolvedDiamondBc {
    /// Fixed heights per site.
    pub fixed: Vec<Option<Node>>,
    /// Forced term per plaquette (`None` for free interior plaquettes).
    pub forced: Vec<Option<Term>>,
    /// For dual-wired boundary plaquettes, the pinned outer height.
    pub outer_height: Vec<Option<Node>>,
    /// Extra fixed-height constraints on boundary primal sites from the
    /// virtual outer contact: (site, required-adjacent height).
    pub virtual_constraints: Vec<(usize, Node)>,
    pub medial: MedialTable,
    /// Heights per arc in cycle order, annotated primal/dual.
    pub arcs: Vec<(Node, bool)>,
}

impl DiamondBc {
    fn arcs_and_cuts(&self, patch: &DiamondPatch) -> (Vec<Node>, Vec<usize>) {
        let b_len = patch.boundary_cycle.len();
        match self {
            DiamondBc::Wired { a } => (vec![*a], vec![0]),
            DiamondBc::Dobrushin { a, b, cuts } => {
                let (c1, c2) = cuts.unwrap_or((0, (patch.m - 1) + (patch.n - 1)));
                assert!(c1 < b_len && c2 < b_len);
                (vec![*a, *b], vec![c1, c2])
            }
            DiamondBc::MultiArc { heights, cuts } => (heights.clone(), cuts.clone()),
        }
    }

    pub fn validate(&self, patch: &DiamondPatch, graph: &GraphSpec) -> Result<()> {
        let mut errs = Vec::new();
        let Some(coloring) = graph.node_parity.clone() else {
            return Err(Error::BoundaryCondition(vec![format!(
                "graph {} is not bipartite; the dense model needs a two-coloring",
                graph.kind.name()
            )]));
        };
        let (heights, cuts) = self.arcs_and_cuts(patch);
        for &h in &heights {
            if h >= graph.node_count {
                errs.push(format!("height index {h} out of range"));
            }
        }
        if heights.iter().any(|&h| h >= graph.node_count) {
            return Err(Error::BoundaryCondition(errs));
        }
        if heights.len() != cuts.len() {
            errs.push("need one cut per arc".into());
        }
        if heights.len() > 1 {
            if cuts.windows(2).any(|w| w[0] >= w[1])
                || cuts.iter().any(|&c| c >= patch.boundary_cycle.len())
            {
                errs.push("cuts must be strictly increasing boundary-edge positions".into());
            }
            for k in 0..heights.len() {
                let (h1, h2) = (heights[k], heights[(k + 1) % heights.len()]);
                if !graph.adjacent(h1, h2) {
                    errs.push(format!(
                        "consecutive arc heights {} and {} not adjacent on the graph",
                        graph.label_of(h1),
                        graph.label_of(h2)
                    ));
                }
            }
            // All boundary sites of any wired arc live on the primal
            // sublattice by construction; what can go wrong is two arcs of
            // the same coloring class meeting, which adjacency already rules
            // out for bipartite graphs.
            let primal_class = coloring[heights[0]];
            for (k, &h) in heights.iter().enumerate() {
                let is_primal = coloring[h] == primal_class;
                if is_primal != (k % 2 == 0) {
                    errs.push("arcs must alternate between the two height classes".into());
                }
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::BoundaryCondition(errs))
        }
    }

    /// Resolve fixed heights, forced plaquette terms, and the medial graph.
    pub fn resolve(&self, patch: &DiamondPatch, graph: &GraphSpec) -> Result<ResolvedDiamondBc> {
        self.validate(patch, graph)?;
        let (heights, cuts) = self.arcs_and_cuts(patch);
        let coloring = graph.node_parity.clone().unwrap();
        let primal_class = coloring[heights[0]];
        let b_len = patch.boundary_cycle.len();

        // Arc index per boundary-edge position.
        let mut arc_of = vec![0usize; b_len];
        if cuts.len() > 1 {
            for k in 0..cuts.len() {
                let start = cuts[k];
                let end = cuts[(k + 1) % cuts.len()];
                let mut pos = start;
                loop {
                    arc_of[pos] = k;
                    pos = (pos + 1) % b_len;
                    if pos == end {
                        break;
                    }
                }
            }
        }

        let arcs: Vec<(Node, bool)> = heights
            .iter()
            .map(|&h| (h, coloring[h] == primal_class))
            .collect();

        let mut fixed = vec![None; patch.site_count()];
        let mut forced = vec![None; patch.plaquettes.len()];
        let mut outer_height = vec![None; patch.plaquettes.len()];
        let mut virtual_constraints = Vec::new();

        for pos in 0..b_len {
            let plaq_id = patch.boundary_cycle[pos];
            let (h, is_primal) = arcs[arc_of[pos]];
            let plaq = &patch.plaquettes[plaq_id];
            if is_primal {
                forced[plaq_id] = Some(Term::Even);
                for &e in &plaq.even {
                    fixed[e] = Some(h);
                }
            } else {
                forced[plaq_id] = Some(Term::Odd);
                outer_height[plaq_id] = Some(h);
                let o_in = plaq.odd.iter().flatten().next().copied().expect("inner dual");
                fixed[o_in] = Some(h);
                for &e in &plaq.even {
                    virtual_constraints.push((e, h));
                }
            }
        }

        let medial = build_medial(patch, &forced);
        Ok(ResolvedDiamondBc {
            fixed,
            forced,
            outer_height,
            virtual_constraints,
            medial,
            arcs,
        })
    }
}

fn build_medial(patch: &DiamondPatch, forced: &[Option<Term>]) -> MedialTable {
    let mut edges: Vec<MedialEdge> = Vec::new();
    let mut edge_plaqs: Vec<Vec<usize>> = Vec::new();
    let mut unit_index: std::collections::HashMap<(usize, usize), usize> =
        std::collections::HashMap::new();
    let mut plaq_slots: Vec<[Option<usize>; 4]> = vec![[None; 4]; patch.plaquettes.len()];
    let mut outer_pos: Vec<Option<Pt>> = vec![None; patch.site_count()];
    let mut outer_edges: Vec<Vec<usize>> = vec![Vec::new(); patch.site_count()];

    // Center of the diamond, for outward normals at outer contacts.
    let half_span = (patch.m + patch.n) as f64 / 2.0 - 1.0;
    let center = Pt::new(half_span, half_span);

    for (p_id, plaq) in patch.plaquettes.iter().enumerate() {
        let dual_wired = forced[p_id] == Some(Term::Odd);
        // Slot order [e0-o0, o0-e1, e1-o1, o1-e0].
        let corners = [
            (plaq.even[0], plaq.odd[0]),
            (plaq.even[1], plaq.odd[0]),
            (plaq.even[1], plaq.odd[1]),
            (plaq.even[0], plaq.odd[1]),
        ];
        for (slot, &(e_site, o_site)) in corners.iter().enumerate() {
            match o_site {
                Some(o) => {
                    let key = (e_site, o);
                    let edge_id = *unit_index.entry(key).or_insert_with(|| {
                        edges.push(MedialEdge {
                            nodes: [MedialNodeKind::Plaq(p_id), MedialNodeKind::Plaq(p_id)],
                            pos: patch.site_pos[e_site].mid(patch.site_pos[o]),
                        });
                        edge_plaqs.push(Vec::new());
                        edges.len() - 1
                    });
                    edge_plaqs[edge_id].push(p_id);
                    plaq_slots[p_id][slot] = Some(edge_id);
                }
                None if dual_wired => {
                    // Virtual contact at the even corner.
                    let out = match outer_pos[e_site] {
                        Some(p) => p,
                        None => {
                            let sp = patch.site_pos[e_site];
                            let d = sp.sub(center);
                            let norm = (d.x * d.x + d.y * d.y).sqrt().max(1e-9);
                            let p = Pt::new(sp.x + 0.5 * d.x / norm, sp.y + 0.5 * d.y / norm);
                            outer_pos[e_site] = Some(p);
                            p
                        }
                    };
                    let edge_id = edges.len();
                    edges.push(MedialEdge {
                        nodes: [MedialNodeKind::Plaq(p_id), MedialNodeKind::Outer(e_site)],
                        pos: patch.site_pos[e_site].mid(out),
                    });
                    edge_plaqs.push(vec![p_id]);
                    outer_edges[e_site].push(edge_id);
                    plaq_slots[p_id][slot] = Some(edge_id);
                }
                None => {
                    // Wired boundary plaquette: no medial edge on this side.
                }
            }
        }
    }

    // Fill in the definitive node pairs for unit edges.
    for (edge_id, plaqs) in edge_plaqs.iter().enumerate() {
        match (plaqs.len(), &edges[edge_id].nodes[1]) {
            (2, _) => {
                edges[edge_id].nodes = [
                    MedialNodeKind::Plaq(plaqs[0]),
                    MedialNodeKind::Plaq(plaqs[1]),
                ];
            }
            (1, MedialNodeKind::Outer(_)) => {}
            (k, _) => panic!("unit medial edge {edge_id} registered by {k} plaquettes"),
        }
    }

    // Outer nodes pass strands straight through; a single contact is a stub.
    let mut fixed_pairs = Vec::new();
    let mut stub_sites: Vec<(usize, usize)> = Vec::new();
    for (site, touching) in outer_edges.iter().enumerate() {
        match touching.len() {
            0 => {}
            1 => stub_sites.push((site, touching[0])),
            2 => fixed_pairs.push((touching[0], touching[1])),
            k => panic!("outer node at site {site} with {k} contacts"),
        }
    }
    // Order stubs along the boundary cycle.
    let site_order: std::collections::HashMap<usize, usize> = patch
        .boundary_sites
        .iter()
        .enumerate()
        .map(|(k, &s)| (s, k))
        .collect();
    stub_sites.sort_by_key(|(site, _)| site_order.get(site).copied().unwrap_or(usize::MAX));
    let stubs = stub_sites.into_iter().map(|(_, e)| e).collect();

    MedialTable {
        edges,
        plaq_slots,
        fixed_pairs,
        stubs,
        outer_pos,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{GraphKind, GraphSpec};

    #[test]
    fn rectangle_counts() {
        let p = SquarePatch::build(2, 2).unwrap();
        assert_eq!(p.plaquettes.len(), 4);
        assert_eq!(p.site_count(), 9);
        let p = SquarePatch::build(1, 1).unwrap();
        assert_eq!(p.plaquettes.len(), 1);
        // Vertex parities alternate.
        let p = SquarePatch::build(3, 4).unwrap();
        for (s, &(i, j)) in p.coords.iter().enumerate() {
            assert_eq!(p.parity[s], ((i + j) % 2) as u8);
        }
    }

    #[test]
    fn alternating_bc_requires_adjacency() {
        let p = SquarePatch::build(2, 2).unwrap();
        let g = GraphSpec::build(GraphKind::A(3)).unwrap();
        assert!(RectBc::Alternating { even: 1, odd: 0 }.validate(&p, &g).is_ok());
        assert!(RectBc::Alternating { even: 0, odd: 2 }.validate(&p, &g).is_err());
    }

    #[test]
    fn diamond_counts_and_medial_degrees() {
        let p = DiamondPatch::build(3, 4).unwrap();
        assert_eq!(p.site_count(), 12 + 6);
        // Plaquettes = primal edges of a 3x4 grid.
        assert_eq!(p.plaquettes.len(), 2 * 4 + 3 * 3);
        assert_eq!(p.boundary_cycle.len(), 2 * (3 - 1) + 2 * (4 - 1));
        // Boundary plaquettes have one odd corner, interior have two.
        for plaq in &p.plaquettes {
            let odd_count = plaq.odd.iter().flatten().count();
            if plaq.is_boundary() {
                assert_eq!(odd_count, 1);
            } else {
                assert_eq!(odd_count, 2);
            }
        }
        // Every dual site has four primal neighbors.
        for s in 0..p.site_count() {
            if p.parity[s] == 1 {
                assert_eq!(p.neighbors[s].len(), 4);
            }
        }
    }

    #[test]
    fn wired_bc_fixes_every_boundary_site() {
        let p = DiamondPatch::build(3, 3).unwrap();
        let g = GraphSpec::build(GraphKind::A(3)).unwrap();
        let r = DiamondBc::Wired { a: 0 }.resolve(&p, &g).unwrap();
        for &s in &p.boundary_sites {
            assert_eq!(r.fixed[s], Some(0));
        }
        assert!(r.medial.stubs.is_empty());
        // All boundary plaquettes forced even, interior free.
        for (p_id, plaq) in p.plaquettes.iter().enumerate() {
            assert_eq!(r.forced[p_id].is_some(), plaq.is_boundary());
        }
        // Medial slots: interior plaquettes have all four, wired boundary two.
        for (p_id, plaq) in p.plaquettes.iter().enumerate() {
            let slots = r.medial.plaq_slots[p_id].iter().flatten().count();
            assert_eq!(slots, if plaq.is_boundary() { 2 } else { 4 });
        }
        // Every unit medial edge is shared by exactly two plaquettes.
        let mut counts = vec![0usize; r.medial.edges.len()];
        for slots in &r.medial.plaq_slots {
            for e in slots.iter().flatten() {
                counts[*e] += 1;
            }
        }
        assert!(counts.iter().all(|&c| c == 2));
    }

    #[test]
    fn dobrushin_bc_has_two_stubs() {
        let p = DiamondPatch::build(4, 3).unwrap();
        let g = GraphSpec::build(GraphKind::A(3)).unwrap();
        let r = DiamondBc::Dobrushin { a: 0, b: 1, cuts: None }.resolve(&p, &g).unwrap();
        assert_eq!(r.medial.stubs.len(), 2);
        // Dual-wired side pins interior dual sites to b.
        let pinned = r.fixed.iter().filter(|f| **f == Some(1)).count();
        assert!(pinned > 0);
        // Heights bookkeeping: wired sites a, none of them dual.
        for (s, f) in r.fixed.iter().enumerate() {
            if *f == Some(0) {
                assert_eq!(p.parity[s], 0);
            }
            if *f == Some(1) {
                assert_eq!(p.parity[s], 1);
            }
        }
    }

    #[test]
    fn multi_arc_validation() {
        let p = DiamondPatch::build(4, 4).unwrap();
        let g = GraphSpec::build(GraphKind::A(3)).unwrap();
        let b_len = p.boundary_cycle.len();
        let quarters = vec![0, b_len / 4, b_len / 2, 3 * b_len / 4];
        // (1,2,1,2) by label = (0,1,0,1) by index: valid four-arc walk.
        assert!(DiamondBc::MultiArc {
            heights: vec![0, 1, 0, 1],
            cuts: quarters.clone()
        }
        .validate(&p, &g)
        .is_ok());
        // (1,2,3,2): also a valid walk.
        assert!(DiamondBc::MultiArc {
            heights: vec![0, 1, 2, 1],
            cuts: quarters.clone()
        }
        .validate(&p, &g)
        .is_ok());
        // Non-adjacent consecutive arcs rejected.
        assert!(DiamondBc::MultiArc {
            heights: vec![0, 2, 0, 2],
            cuts: quarters
        }
        .validate(&p, &g)
        .is_err());

        let four_arcs = DiamondBc::MultiArc {
            heights: vec![0, 1, 0, 1],
            cuts: vec![0, b_len / 4, b_len / 2, 3 * b_len / 4],
        };
        let r = four_arcs.resolve(&p, &g).unwrap();
        assert_eq!(r.medial.stubs.len(), 4);
    }

    #[test]
    fn non_bipartite_graphs_are_rejected() {
        let p = DiamondPatch::build(3, 3).unwrap();
        let g = GraphSpec::build(GraphKind::ExtA(5)).unwrap();
        assert!(DiamondBc::Wired { a: 0 }.validate(&p, &g).is_err());
    }
}
