//! Online travel-time estimation for mobile-robot route planning.
//!
//! The crate models a warehouse floor as a topology graph, simulates how
//! edge travel times drift with battery discharge and floor roughness, and
//! estimates those travel times online with two Kalman filters:
//!
//! * a scalar random-walk filter fed from a pre-collected observation table
//!   ([`estimators::StaticKfProvider`]), and
//! * a bilinear state-space filter fed from runtime observations
//!   ([`estimators::DynamicKfProvider`]).
//!
//! Estimates are consumed by a Dijkstra variant ([`planner::plan`]) that asks
//! the cost provider for each edge at node-settling time, passing the
//! traversal depth of the node being expanded. The [`experiments`] module
//! runs repetition sweeps and path comparisons against the Euclidean
//! heuristic and writes CSV reports.
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability.

pub mod cli;
pub mod error;
pub mod estimators;
pub mod experiments;
pub mod planner;
pub mod seeds;
pub mod topo_map;
pub mod world_sim;

pub use error::{Error, Result};
pub use estimators::{CostProvider, EdgeCostEstimator, EdgeQuery, ProviderKind};
pub use planner::{brute_force_shortest, path_total_cost, plan, PathResult};
pub use topo_map::{EdgeId, MapFamily, NodeId, TopologyMap};
pub use world_sim::{Snr, WorldConfig, WorldState};
