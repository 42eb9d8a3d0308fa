//! Edge-cost providers: the Euclidean heuristic, a scalar random-walk
//! Kalman filter over a pre-collected table, and a bilinear state-space
//! Kalman filter over runtime observations.

pub mod bilinear;
mod provider;
pub mod scalar;

pub use bilinear::{
    bilinear_kf_step, build_transition, innovation_selector, observation_selector, psi_terms, BilinearKfState,
    BilinearParams, BilinearStep,
};
pub use provider::{
    estimate_edge_cost, write_trace_csv, CostProvider, Diagnostics, DynamicKfConfig, DynamicKfProvider,
    EdgeCostEstimator, EdgeQuery, FrozenCosts, HeuristicProvider, ProviderKind, StaticKfConfig, StaticKfProvider,
    TraceRow,
};
pub use scalar::{scalar_kf_init, ScalarKfState, ScalarStep};
