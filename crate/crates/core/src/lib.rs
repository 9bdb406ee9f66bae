//! Order-preserving representations of finite metric spaces.
//!
//! A finite metric space with pairwise distinct distances is identified with
//! the linear order its distances induce on point pairs. This crate measures
//! how well a point configuration preserves that order, optimizes it, builds
//! representations with guarantees, and refutes plane representability of
//! some orders by exact reasoning about angles.

pub mod accuracy;
pub mod cluster;
pub mod error;
pub mod experiments;
pub mod io;
pub mod neighbours;
pub mod prover;
pub mod represent;
pub mod rubberband;
pub mod space;

pub use accuracy::{config_accuracy, kendall_tau, order_accuracy};
pub use error::{Error, Result};
pub use represent::{check_representation, RepresentationKind};
pub use space::{neighbour_maps, EdgeOrder, Metric, MetricSpace, NeighbourMaps, PointConfig, TiePolicy};
