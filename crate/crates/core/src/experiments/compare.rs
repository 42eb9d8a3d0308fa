use std::collections::BTreeSet;

use serde::Serialize;

use super::config::ExperimentConfig;
use super::runner::{execute_and_observe, prepare_seed, run_schedule, seeded_run};
use super::stats::saving_pct;
use crate::error::{Error, Result};
use crate::estimators::{CostProvider, ProviderKind};
use crate::planner::{plan, PathResult};
use crate::topo_map::{EdgeId, NodeId, TopologyMap};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProviderPath {
    pub provider: ProviderKind,
    pub path: PathResult,
    /// True travel time of each edge on the reference world.
    pub true_costs: Vec<f64>,
    pub true_total: f64,
    pub saving_pct_vs_heuristic: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub map: String,
    pub source: NodeId,
    pub dest: NodeId,
    /// Heuristic, static, dynamic.
    pub paths: Vec<ProviderPath>,
    /// Edges on every provider's path.
    pub shared_edges: Vec<EdgeId>,
}

impl ComparisonReport {
    pub fn get(&self, kind: ProviderKind) -> &ProviderPath {
        self.paths.iter().find(|p| p.provider == kind).expect("all providers compared")
    }

    /// Edges of `kind`'s path that are not on every path.
    pub fn distinct_edges(&self, kind: ProviderKind) -> Vec<EdgeId> {
        let shared: BTreeSet<EdgeId> = self.shared_edges.iter().copied().collect();
        self.get(kind)
            .path
            .edges
            .iter()
            .copied()
            .filter(|e| !shared.contains(e))
            .collect()
    }
}

/// Runs `cfg.repetitions` closed-loop calls per provider on identically
/// seeded worlds, then plans `od` with each provider. The three final
/// paths are executed on copies of one reference world (the heuristic
/// run's final state), so their true costs see the same conditions and
/// the same noise draws.
pub fn compare_paths(
    map: &TopologyMap,
    od: (NodeId, NodeId),
    cfg: &ExperimentConfig,
    seed: u64,
) -> Result<ComparisonReport> {
    map.node(od.0)?;
    map.node(od.1)?;
    let setup = prepare_seed(map, cfg, seed)?;

    let mut finals: Vec<(ProviderKind, CostProvider, crate::world_sim::WorldState)> = Vec::new();
    for kind in ProviderKind::ALL {
        let (mut provider, mut world) = seeded_run(kind, map, cfg, &setup, seed)?;
        run_schedule(map, &mut world, &mut provider, &setup.scenario, &setup.od, 1..=cfg.repetitions)?;
        setup.scenario.apply_before_call(&mut world, cfg.repetitions + 1);
        finals.push((kind, provider, world));
    }
    let reference = finals[0].2.clone();

    let mut paths = Vec::new();
    for (kind, provider, _) in &mut finals {
        let path = plan(map, provider, od.0, od.1).map_err(|e| match e {
            Error::Unreachable { .. } => Error::Unreachable { from: od.0, to: od.1 },
            other => other,
        })?;
        let mut world = reference.clone();
        let mut sink = CostProvider::heuristic(cfg.world.nominal_speed);
        let executed = execute_and_observe(map, &mut world, &mut sink, &path.edges)?;
        paths.push(ProviderPath {
            provider: *kind,
            path,
            true_total: executed.true_total(),
            true_costs: executed.true_costs,
            saving_pct_vs_heuristic: 0.0,
        });
    }
    let base = paths[0].true_total;
    for p in &mut paths {
        p.saving_pct_vs_heuristic = if base > 0.0 { saving_pct(base, p.true_total) } else { 0.0 };
    }
    let mut shared: BTreeSet<EdgeId> = paths[0].path.edges.iter().copied().collect();
    for p in &paths[1..] {
        let these: BTreeSet<EdgeId> = p.path.edges.iter().copied().collect();
        shared = shared.intersection(&these).copied().collect();
    }
    Ok(ComparisonReport {
        map: map.meta().name.clone(),
        source: od.0,
        dest: od.1,
        paths,
        shared_edges: shared.into_iter().collect(),
    })
}

/// Number of path edges lying in floor zone `zone`.
pub fn edges_in_zone(map: &TopologyMap, path: &PathResult, zone: u32) -> usize {
    path.edges.iter().filter(|e| map.edge(**e).zone_id == zone).count()
}

/// Heuristic path total corrected by an unmodeled extra `delta` seconds on
/// each of `rough_edges` degraded edges.
pub fn corrected_total(total: f64, rough_edges: usize, delta: f64) -> f64 {
    total + rough_edges as f64 * delta
}

/// [`corrected_total`] on a planned path's estimated total.
pub fn real_cost_delta(path: &PathResult, rough_edges: usize, delta: f64) -> Result<f64> {
    if rough_edges > path.edges.len() {
        return Err(Error::InvalidParams(format!(
            "{rough_edges} rough edges on a path of {} edges",
            path.edges.len()
        )));
    }
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParams(format!("delta must be non-negative, got {delta}")));
    }
    Ok(corrected_total(path.total_est_cost, rough_edges, delta))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_correction() {
        assert_eq!(corrected_total(98.21, 12, 0.0), 98.21);
        assert_eq!(corrected_total(98.21, 0, 3.0), 98.21);
        assert_eq!(corrected_total(10.0, 4, 0.5), 12.0);
        let path = PathResult {
            edges: vec![EdgeId(0); 3],
            total_est_cost: 5.0,
            ..PathResult::default()
        };
        assert_eq!(real_cost_delta(&path, 2, 1.0).unwrap(), 7.0);
        assert!(real_cost_delta(&path, 4, 1.0).is_err());
        assert!(real_cost_delta(&path, 1, -1.0).is_err());
    }
}
