//! Topology control for non-uniformly distributed wireless ad hoc networks.
//!
//! The pipeline turns a random node deployment into a directed small-world
//! overlay in four stages:
//!
//! 1. [`topology`] — uniform placement, Bettstetter thinning, unit-disk graph;
//! 2. [`selforg`] — lateral-inhibition region formation, virtual-coordinate
//!    consensus and centroid election, bounded centroid broadcast;
//! 3. [`beamform`] — flocking-rule peripheral selection, sector sweep and
//!    directional beam commitment (sector or ULA antenna model);
//! 4. [`harness`] — seeded experiment replication, metrics and CSV emission.
//!
//! [`graph`] holds the shared mixed directed/undirected graph and its global
//! metrics (APL, clustering coefficient, components, GSCC/GIN); [`centrality`]
//! the closeness and betweenness measures used for centroid validation.
//!
//! Everything is deterministic: identical seeds reproduce identical outputs
//! byte for byte.

pub mod beamform;
pub mod centrality;
pub mod graph;
pub mod harness;
pub mod seeding;
pub mod selforg;
pub mod topology;

pub use beamform::{AntennaConfig, AntennaModel, Beam, BeamDecision, BeamOutcome};
pub use graph::MixedGraph;
pub use harness::{ExperimentConfig, MetricsRecord};
pub use selforg::{CentroidTable, ConsensusState, RegionState, Role};
pub use topology::{Placement, ThinningParams};
