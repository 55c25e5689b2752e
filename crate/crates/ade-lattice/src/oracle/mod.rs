//! Independently coded enumerators used as cross-checks.
//!
//! The model modules sum over height configurations or per-face pass-through
//! states; the oracles here work on entirely different state spaces (edge
//! subsets, cluster counts) so that agreement between the two is meaningful.
//! Nothing in this module touches the weight code of `dilute` or `dense`.

mod on_gas;
mod random_cluster;

pub use on_gas::{on_arc_law, on_partition, OnGasTally};
pub use random_cluster::{rc_interface_law, rc_partition, RcTally};
