//! Finite lattice domains and boundary conditions.
//!
//! Patches are small axis-aligned regions chosen so that exact enumeration is
//! feasible; all scaling statements live elsewhere. The triangular patch
//! carries its dual honeycomb structure explicitly (one dual vertex per
//! elementary triangle), the square-lattice domains carry their medial
//! structure. Everything here is immutable after construction and freely
//! shareable across threads.

mod square;
mod triangular;

pub use square::{
    DiamondBc, DiamondPatch, Plaquette, RectBc, SquarePatch, MEDIAL_DIRECTIONS,
};
pub use triangular::{
    AnnulusSpec, CellRect, LatticeEdge, ResolvedTriBc, TriBc, TriPatch, Triangle,
};

use serde::Serialize;

/// A planar point used for turn counting, winding classification, and
/// half-plane embedding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Pt {
    pub x: f64,
    pub y: f64,
}

impl Pt {
    pub fn new(x: f64, y: f64) -> Pt {
        Pt { x, y }
    }

    pub fn sub(self, o: Pt) -> Pt {
        Pt::new(self.x - o.x, self.y - o.y)
    }

    pub fn cross(self, o: Pt) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn mid(self, o: Pt) -> Pt {
        Pt::new(0.5 * (self.x + o.x), 0.5 * (self.y + o.y))
    }
}

/// Signed area of a polygon (positive = counterclockwise).
pub fn signed_area(poly: &[Pt]) -> f64 {
    let mut acc = 0.0;
    for k in 0..poly.len() {
        let p = poly[k];
        let q = poly[(k + 1) % poly.len()];
        acc += p.cross(q);
    }
    0.5 * acc
}

/// Ray-cast point-in-polygon test (polygon vertices in order, any turning).
pub fn point_in_polygon(p: Pt, poly: &[Pt]) -> bool {
    let mut inside = false;
    for k in 0..poly.len() {
        let a = poly[k];
        let b = poly[(k + 1) % poly.len()];
        if (a.y > p.y) != (b.y > p.y) {
            let x_at = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if x_at > p.x {
                inside = !inside;
            }
        }
    }
    inside
}
