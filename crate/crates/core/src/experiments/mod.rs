//! Closed-loop experiments: repeated planning calls against a degrading
//! world, sweeps over filter order and observation SNR, three-way path
//! comparisons, and CSV reports.
//!
//! Averages are taken over every planning call of every source/destination
//! pair in a run, then over seeds. Savings are always computed on executed
//! true travel times: `(heuristic - candidate) / heuristic`.

mod compare;
mod config;
mod report;
mod runner;
mod scenario;
mod stats;

pub use compare::{compare_paths, corrected_total, edges_in_zone, real_cost_delta, ComparisonReport, ProviderPath};
pub use config::{ExperimentConfig, FloorEvent, MapSelector, Scenario, REGRESSION_RANGE, REPETITION_SET};
pub use report::{
    write_comparison, write_comparison_csv, write_experiment, write_records_csv, write_summary_csv,
};
pub use runner::{
    build_provider, execute_and_observe, legacy_table, non_increasing_seed_count, prepare_seed, run_repetitions,
    run_repetitions_on, run_schedule, schedule, seeded_run, sweep_regression, sweep_snr, CallOutcome, CellSummary,
    Executed,
    ExperimentSummary, RunRecord, SeedSetup,
};
pub use scenario::{corridor_traffic, hop_distances, sample_od_pairs, ScenarioPlan, MIN_OD_HOPS};
pub use stats::{saving_pct, ExactMean};
