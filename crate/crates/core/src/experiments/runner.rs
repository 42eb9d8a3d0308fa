use rayon::prelude::*;
use serde::Serialize;

use super::config::ExperimentConfig;
use super::scenario::{sample_od_pairs, ScenarioPlan};
use super::stats::{saving_pct, ExactMean};
use crate::error::{Error, Result};
use crate::estimators::{CostProvider, Diagnostics, DynamicKfProvider, EdgeCostEstimator, ProviderKind, StaticKfProvider};
use crate::planner::{plan, PathResult};
use crate::seeds;
use crate::topo_map::{EdgeId, NodeId, TopologyMap};
use crate::world_sim::{generate_observation_table, ObservationLog, Snr, WorldState};

/// One planning call and its execution.
#[derive(Clone, Debug, PartialEq)]
pub struct CallOutcome {
    pub call_index: usize,
    pub source: NodeId,
    pub dest: NodeId,
    pub path: PathResult,
    pub true_total: f64,
    /// The battery ran empty during this call and was swapped.
    pub depleted: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Executed {
    /// True travel time per edge, in path order.
    pub true_costs: Vec<f64>,
    /// The battery ran empty and was swapped at least once.
    pub depleted: bool,
}

impl Executed {
    pub fn true_total(&self) -> f64 {
        self.true_costs.iter().sum()
    }
}

/// Executes `edges`, swapping the battery whenever it runs empty, and
/// feeds every observation to `provider`.
pub fn execute_and_observe(
    map: &TopologyMap,
    world: &mut WorldState,
    provider: &mut impl EdgeCostEstimator,
    edges: &[EdgeId],
) -> Result<Executed> {
    let mut rest = edges;
    let mut out = Executed::default();
    while !rest.is_empty() {
        let report = world.execute_edges(map, rest)?;
        for step in &report.steps {
            provider.observe(step.edge, step.observed);
            out.true_costs.push(step.true_time);
        }
        rest = &rest[report.steps.len()..];
        if report.depleted {
            out.depleted = true;
            world.recharge();
        }
    }
    Ok(out)
}

/// Closed loop: plan, execute, feed observations back, for calls
/// `first_call ..= last_call` over the round-robin schedule `od`.
pub fn run_schedule(
    map: &TopologyMap,
    world: &mut WorldState,
    provider: &mut CostProvider,
    scenario: &ScenarioPlan,
    od: &[(NodeId, NodeId)],
    calls: std::ops::RangeInclusive<usize>,
) -> Result<Vec<CallOutcome>> {
    if od.is_empty() {
        return Err(Error::InvalidConfig("empty source/destination schedule".into()));
    }
    let mut out = Vec::new();
    for call in calls {
        scenario.apply_before_call(world, call);
        let (source, dest) = od[(call - 1) % od.len()];
        let path = plan(map, provider, source, dest)?;
        let executed = execute_and_observe(map, world, provider, &path.edges)?;
        out.push(CallOutcome {
            call_index: call,
            source,
            dest,
            path,
            true_total: executed.true_total(),
            depleted: executed.depleted,
        });
    }
    Ok(out)
}

/// The configured source/destination list, or `od_pairs` sampled port
/// pairs for `seed`.
pub fn schedule(map: &TopologyMap, cfg: &ExperimentConfig, seed: u64) -> Vec<(NodeId, NodeId)> {
    match &cfg.od_list {
        Some(list) => list.clone(),
        None => sample_od_pairs(map, cfg.od_pairs, seed),
    }
}

/// Legacy travel-time table for a seed: collected under the scenario's
/// initial floor without sensor noise, deep enough for any planner depth.
pub fn legacy_table(map: &TopologyMap, cfg: &ExperimentConfig, scenario: &ScenarioPlan, seed: u64) -> Result<ObservationLog> {
    let mut world = scenario.world(map, &cfg.world, seeds::sub_seed(seed, "legacy"))?;
    world.set_snr(Snr::INFINITE);
    generate_observation_table(map, &world, map.node_count(), false)
}

/// Everything a seed fixes before any provider runs.
#[derive(Clone, Debug)]
pub struct SeedSetup {
    pub od: Vec<(NodeId, NodeId)>,
    pub scenario: ScenarioPlan,
    pub table: ObservationLog,
}

pub fn prepare_seed(map: &TopologyMap, cfg: &ExperimentConfig, seed: u64) -> Result<SeedSetup> {
    let od = schedule(map, cfg, seed);
    let scenario = ScenarioPlan::resolve(&cfg.scenario, map, &od, seeds::sub_seed(seed, "scenario"));
    let table = legacy_table(map, cfg, &scenario, seed)?;
    Ok(SeedSetup { od, scenario, table })
}

/// A provider and a world for `seed`, both in their state before call 1.
pub fn seeded_run(
    kind: ProviderKind,
    map: &TopologyMap,
    cfg: &ExperimentConfig,
    setup: &SeedSetup,
    seed: u64,
) -> Result<(CostProvider, WorldState)> {
    let mut world = setup.scenario.world(map, &cfg.world, seed)?;
    world.set_snr(cfg.snr_db);
    let provider = build_provider(kind, map, cfg, &setup.table, seed)?;
    Ok((provider, world))
}

pub fn build_provider(
    kind: ProviderKind,
    map: &TopologyMap,
    cfg: &ExperimentConfig,
    table: &ObservationLog,
    seed: u64,
) -> Result<CostProvider> {
    let speed = cfg.world.nominal_speed;
    Ok(match kind {
        ProviderKind::Heuristic => CostProvider::heuristic(speed),
        ProviderKind::Static => {
            CostProvider::Static(StaticKfProvider::new(table.clone(), cfg.static_kf.clone(), speed))
        }
        ProviderKind::Dynamic => CostProvider::Dynamic(
            DynamicKfProvider::new(
                map.edge_count(),
                cfg.regression_no,
                cfg.dynamic_kf.clone(),
                speed,
                seeds::sub_seed(seed, "provider"),
            )?
            .with_legacy(table),
        ),
    })
}

/// One row of `records.csv`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRecord {
    pub map: String,
    pub provider: ProviderKind,
    pub repetitions: usize,
    pub regression_no: usize,
    pub snr_db: Snr,
    pub seed: u64,
    pub call_index: usize,
    pub source: NodeId,
    pub dest: NodeId,
    pub nodes: Vec<NodeId>,
    pub total_est_cost: f64,
    pub total_true_cost: f64,
    pub depleted: bool,
}

/// One row of `summary.csv`, plus diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellSummary {
    pub map: String,
    pub provider: ProviderKind,
    pub repetitions: usize,
    pub regression_no: usize,
    pub snr_db: Snr,
    pub seed: u64,
    pub mean_est_cost: f64,
    pub mean_true_cost: f64,
    pub saving_pct_vs_heuristic: f64,
    pub depletions: usize,
    pub diagnostics: Diagnostics,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExperimentSummary {
    /// Ordered by provider, then by seed in configuration order.
    pub cells: Vec<CellSummary>,
    /// Ordered like `cells`, then by call index.
    pub records: Vec<RunRecord>,
}

impl ExperimentSummary {
    pub fn cells_for(&self, kind: ProviderKind) -> impl Iterator<Item = &CellSummary> + '_ {
        self.cells.iter().filter(move |c| c.provider == kind)
    }

    /// Mean over seeds of the per-seed mean true cost.
    pub fn mean_true_cost(&self, kind: ProviderKind) -> f64 {
        self.cells_for(kind).map(|c| c.mean_true_cost).collect::<ExactMean>().mean()
    }

    pub fn mean_est_cost(&self, kind: ProviderKind) -> f64 {
        self.cells_for(kind).map(|c| c.mean_est_cost).collect::<ExactMean>().mean()
    }

    /// Saving of the seed-averaged true cost against the heuristic's.
    pub fn mean_saving_pct(&self, kind: ProviderKind) -> f64 {
        saving_pct(self.mean_true_cost(ProviderKind::Heuristic), self.mean_true_cost(kind))
    }

    pub fn seed_true_cost(&self, kind: ProviderKind, seed: u64) -> Option<f64> {
        self.cells_for(kind).find(|c| c.seed == seed).map(|c| c.mean_true_cost)
    }
}

struct Cell {
    kind: ProviderKind,
    seed: u64,
}

/// Every configured provider plus the heuristic baseline, for every seed,
/// in the shared closed loop. Cells run in parallel; each owns its world
/// and provider, and worlds of the same seed start identical.
pub fn run_repetitions(cfg: &ExperimentConfig) -> Result<ExperimentSummary> {
    cfg.validate()?;
    let map = cfg.map.load()?;
    run_repetitions_on(&map, cfg)
}

pub fn run_repetitions_on(map: &TopologyMap, cfg: &ExperimentConfig) -> Result<ExperimentSummary> {
    cfg.validate()?;
    let kinds: Vec<ProviderKind> = ProviderKind::ALL
        .into_iter()
        .filter(|k| *k == ProviderKind::Heuristic || cfg.providers.contains(k))
        .collect();

    log::info!(
        "{}: {} calls, r={}, snr {} dB, {} seeds, providers {:?}",
        map.meta().name,
        cfg.repetitions,
        cfg.regression_no,
        cfg.snr_db,
        cfg.seeds.len(),
        kinds
    );
    let per_seed: Vec<SeedSetup> = cfg
        .seeds
        .par_iter()
        .map(|&seed| prepare_seed(map, cfg, seed))
        .collect::<Result<_>>()?;

    let cells: Vec<Cell> = kinds
        .iter()
        .flat_map(|&kind| cfg.seeds.iter().map(move |&seed| Cell { kind, seed }))
        .collect();
    let map_name = map.meta().name.clone();
    let results: Vec<(CellSummary, Vec<RunRecord>)> = cells
        .par_iter()
        .map(|cell| {
            let i = cfg.seeds.iter().position(|&s| s == cell.seed).expect("seed listed");
            let setup = &per_seed[i];
            let (mut provider, mut world) = seeded_run(cell.kind, map, cfg, setup, cell.seed)?;
            let calls = run_schedule(map, &mut world, &mut provider, &setup.scenario, &setup.od, 1..=cfg.repetitions)?;
            let records: Vec<RunRecord> = calls
                .iter()
                .map(|c| RunRecord {
                    map: map_name.clone(),
                    provider: cell.kind,
                    repetitions: cfg.repetitions,
                    regression_no: cfg.regression_no,
                    snr_db: cfg.snr_db,
                    seed: cell.seed,
                    call_index: c.call_index,
                    source: c.source,
                    dest: c.dest,
                    nodes: c.path.nodes.clone(),
                    total_est_cost: c.path.total_est_cost,
                    total_true_cost: c.true_total,
                    depleted: c.depleted,
                })
                .collect();
            let summary = CellSummary {
                map: map_name.clone(),
                provider: cell.kind,
                repetitions: cfg.repetitions,
                regression_no: cfg.regression_no,
                snr_db: cfg.snr_db,
                seed: cell.seed,
                mean_est_cost: records.iter().map(|r| r.total_est_cost).collect::<ExactMean>().mean(),
                mean_true_cost: records.iter().map(|r| r.total_true_cost).collect::<ExactMean>().mean(),
                saving_pct_vs_heuristic: 0.0,
                depletions: calls.iter().filter(|c| c.depleted).count(),
                diagnostics: provider.diagnostics(),
            };
            log::debug!(
                "{} seed {}: mean true cost {:.3}s, {:?}",
                cell.kind,
                cell.seed,
                summary.mean_true_cost,
                summary.diagnostics
            );
            Ok((summary, records))
        })
        .collect::<Result<_>>()?;

    let mut out = ExperimentSummary::default();
    for (cell, records) in results {
        out.cells.push(cell);
        out.records.extend(records);
    }
    let baseline: Vec<(u64, f64)> = out
        .cells_for(ProviderKind::Heuristic)
        .map(|c| (c.seed, c.mean_true_cost))
        .collect();
    for cell in &mut out.cells {
        let base = baseline.iter().find(|b| b.0 == cell.seed).expect("baseline per seed").1;
        cell.saving_pct_vs_heuristic = saving_pct(base, cell.mean_true_cost);
    }
    Ok(out)
}

fn require_dynamic(base: &ExperimentConfig) -> Result<()> {
    if base.providers.contains(&ProviderKind::Dynamic) {
        Ok(())
    } else {
        Err(Error::InvalidConfig("sweeps need the dynamic provider".into()))
    }
}

/// One dynamic-provider run per regression order.
pub fn sweep_regression(base: &ExperimentConfig, r_values: &[usize]) -> Result<Vec<ExperimentSummary>> {
    require_dynamic(base)?;
    let map = base.map.load()?;
    r_values
        .iter()
        .map(|&r| {
            let cfg = ExperimentConfig {
                providers: vec![ProviderKind::Dynamic],
                regression_no: r,
                ..base.clone()
            };
            run_repetitions_on(&map, &cfg)
        })
        .collect()
}

/// One dynamic-provider run per observation SNR.
pub fn sweep_snr(base: &ExperimentConfig, snr_values: &[Snr]) -> Result<Vec<ExperimentSummary>> {
    require_dynamic(base)?;
    let map = base.map.load()?;
    snr_values
        .iter()
        .map(|&snr| {
            let cfg = ExperimentConfig {
                providers: vec![ProviderKind::Dynamic],
                snr_db: snr,
                ..base.clone()
            };
            run_repetitions_on(&map, &cfg)
        })
        .collect()
}

/// Seeds whose mean true cost for `kind` never increases along
/// `summaries` (ties count as non-increasing).
pub fn non_increasing_seed_count(summaries: &[ExperimentSummary], kind: ProviderKind, seeds: &[u64]) -> usize {
    seeds
        .iter()
        .filter(|&&seed| {
            let costs: Vec<Option<f64>> = summaries.iter().map(|s| s.seed_true_cost(kind, seed)).collect();
            costs.iter().all(Option::is_some) && costs.windows(2).all(|w| w[1].unwrap() <= w[0].unwrap())
        })
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::config::Scenario;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            repetitions: 4,
            seeds: vec![1, 2],
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn baseline_always_present() {
        let cfg = ExperimentConfig {
            providers: vec![ProviderKind::Static],
            ..small()
        };
        let s = run_repetitions(&cfg).unwrap();
        assert_eq!(s.cells.len(), 4);
        assert_eq!(s.records.len(), 16);
        for c in s.cells_for(ProviderKind::Heuristic) {
            assert_eq!(c.saving_pct_vs_heuristic, 0.0);
        }
    }

    #[test]
    fn single_call_summary_is_that_call() {
        let cfg = ExperimentConfig {
            repetitions: 1,
            seeds: vec![3],
            od_list: Some(vec![(NodeId(0), NodeId(10))]),
            ..ExperimentConfig::default()
        };
        let s = run_repetitions(&cfg).unwrap();
        for (cell, rec) in s.cells.iter().zip(&s.records) {
            assert_eq!(cell.mean_est_cost, rec.total_est_cost);
            assert_eq!(cell.mean_true_cost, rec.total_true_cost);
        }
    }

    #[test]
    fn flat_world_heuristic_costs_repeat() {
        let cfg = ExperimentConfig {
            providers: vec![ProviderKind::Heuristic],
            scenario: Scenario::Flat,
            od_list: Some(vec![(NodeId(0), NodeId(12))]),
            ..small()
        };
        let s = run_repetitions(&cfg).unwrap();
        let first = &s.records[0];
        assert!(s.records.iter().all(|r| r.nodes == first.nodes));
    }

    #[test]
    fn sweeps_need_dynamic() {
        let cfg = ExperimentConfig {
            providers: vec![ProviderKind::Static],
            ..small()
        };
        assert!(sweep_regression(&cfg, &[2]).is_err());
        let one = sweep_regression(&small(), &[3]).unwrap();
        assert_eq!(one.len(), 1);
        assert!(one[0].cells.iter().all(|c| c.regression_no == 3));
    }
}
