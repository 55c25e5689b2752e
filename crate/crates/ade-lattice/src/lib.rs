//! Height models on ADE-type graphs, their loop-gas representations, and the
//! measurement tools needed to compare both descriptions exactly on small
//! lattices.
//!
//! The crate is organized around a handful of subsystems:
//!
//! - [`graph`] / [`spectra`]: height graphs (A, D, E, extended, star), their
//!   adjacency spectra, and the closed-form relations (`lambda`, `S`, Coxeter
//!   data, `kappa`, fugacities, minimal-model tables).
//! - [`domain`]: finite triangular and square patches, staircase ("diamond")
//!   domains for the dense model, annular domains, and boundary conditions.
//! - [`dilute`]: the triangular-lattice model where neighboring heights may be
//!   equal or adjacent; exact enumeration of heights and of the equivalent
//!   dual-honeycomb loop gas, plus exact chordal-curve laws.
//! - [`dense`]: the square-lattice model where neighboring heights must be
//!   adjacent; plaquette weights, cluster/medial-loop expansion, wired and
//!   mixed boundary conditions, and same-height cluster boundaries.
//! - [`oracle`]: independently coded loop-gas and random-cluster enumerators
//!   used as cross-checks against the model modules.
//! - [`sampler`]: seed-deterministic heat-bath Monte Carlo for both models,
//!   with observable streams and chordal-curve ensembles.
//! - [`curve`]: half-plane embedding, Loewner driving-function extraction
//!   (vertical-slit zipper), diffusivity estimation, winding-angle phases.
//! - [`topology`]: annular experiments (non-contractible loop statistics,
//!   walk-weighted partition functions, model-dependence comparisons) and
//!   multi-curve arch experiments.
//!
//! Run `cargo run -p ade-lattice -- selftest` for a quick end-to-end check, or
//! see the crate examples for guided tours of each subsystem.

pub mod config;
pub mod curve;
pub mod dense;
pub mod dilute;
pub mod domain;
pub mod error;
pub mod graph;
pub mod oracle;
pub mod report;
pub mod sampler;
pub mod spectra;
pub mod topology;

pub use error::{Error, Result};
pub use graph::{GraphKind, GraphSpec, Node};
pub use spectra::{spectrum, Phase, SpectralData};

/// Free-site cap for exact enumeration unless a caller overrides it.
pub const DEFAULT_ENUMERATION_CAP: usize = 14;
