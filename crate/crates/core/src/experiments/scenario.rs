use std::collections::VecDeque;

use rand::seq::IndexedRandom;
use rand::Rng;

use super::config::{FloorEvent, Scenario};
use crate::error::Result;
use crate::seeds;
use crate::topo_map::{NodeId, TopologyMap};
use crate::world_sim::{FloorCondition, RoughnessLevel, WorldConfig, WorldState};

/// A scenario resolved against a map and a seed.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioPlan {
    pub initial: FloorCondition,
    /// Sorted by `after_call`.
    pub events: Vec<FloorEvent>,
    pub battery: bool,
}

impl ScenarioPlan {
    /// `od` is the call schedule; wear follows it.
    pub fn resolve(scenario: &Scenario, map: &TopologyMap, od: &[(NodeId, NodeId)], seed: u64) -> Self {
        let mut initial = FloorCondition::smooth(map);
        let mut events = Vec::new();
        let battery = match scenario {
            Scenario::Flat => false,
            Scenario::Battery => true,
            Scenario::BatteryFloor {
                light_fraction,
                change_after,
                worn_zones,
            } => {
                let mut rng = seeds::rng_for(seed, "scenario.floor");
                for z in map.zone_ids() {
                    if rng.random_bool(*light_fraction) {
                        initial.set(z, RoughnessLevel::Light);
                    }
                }
                let traffic = corridor_traffic(map, od);
                let mut worn: Vec<u32> = traffic.iter().take(*worn_zones).map(|t| t.0).collect();
                worn.sort_unstable();
                for zone in worn {
                    events.push(FloorEvent {
                        after_call: *change_after,
                        zone,
                        level: RoughnessLevel::Heavy,
                    });
                }
                true
            }
            Scenario::Custom {
                initial: levels,
                events: ev,
                battery,
            } => {
                for &(z, level) in levels {
                    initial.set(z, level);
                }
                events = ev.clone();
                *battery
            }
        };
        events.sort_by_key(|e| e.after_call);
        ScenarioPlan {
            initial,
            events,
            battery,
        }
    }

    /// World configuration with battery drain switched off when the
    /// scenario has none.
    pub fn world_config(&self, base: &WorldConfig) -> WorldConfig {
        let mut cfg = base.clone();
        if !self.battery {
            cfg.discharge_per_second = 0.0;
        }
        cfg
    }

    /// Fresh world at the scenario's initial floor.
    pub fn world(&self, map: &TopologyMap, base: &WorldConfig, seed: u64) -> Result<WorldState> {
        let mut world = WorldState::new(map, self.world_config(base), seeds::sub_seed(seed, "world"))?;
        world.floor = self.initial.clone();
        Ok(world)
    }

    /// Applies the events due before call `call` (1-based).
    pub fn apply_before_call(&self, world: &mut WorldState, call: usize) {
        for e in self.events.iter().filter(|e| e.after_call + 1 == call) {
            log::debug!("call {call}: zone {} -> {:?}", e.zone, e.level);
            world.floor.set(e.zone, e.level);
        }
    }
}

/// Zones ranked by how much of the straight lines between scheduled
/// endpoints lies over them, busiest first, ties by zone id. A point of a
/// line is attributed to the zone of the edge whose midpoint is nearest.
/// Depends on the schedule only, never on a planner's route choice.
pub fn corridor_traffic(map: &TopologyMap, od: &[(NodeId, NodeId)]) -> Vec<(u32, usize)> {
    const SAMPLES: usize = 32;
    let mids: Vec<(f64, f64, u32)> = map
        .edges()
        .iter()
        .map(|e| {
            let a = &map.nodes()[e.from.0];
            let b = &map.nodes()[e.to.0];
            (0.5 * (a.x + b.x), 0.5 * (a.y + b.y), e.zone_id)
        })
        .collect();
    let mut counts: std::collections::BTreeMap<u32, usize> = map.zone_ids().into_iter().map(|z| (z, 0)).collect();
    for &(s, d) in od {
        let a = &map.nodes()[s.0];
        let b = &map.nodes()[d.0];
        for i in 0..=SAMPLES {
            let t = i as f64 / SAMPLES as f64;
            let (x, y) = (a.x + t * (b.x - a.x), a.y + t * (b.y - a.y));
            let nearest = mids
                .iter()
                .min_by(|p, q| (p.0 - x).hypot(p.1 - y).total_cmp(&(q.0 - x).hypot(q.1 - y)))
                .expect("maps have edges");
            *counts.entry(nearest.2).or_default() += 1;
        }
    }
    let mut ranked: Vec<(u32, usize)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked
}

/// Hop distances from `source`.
pub fn hop_distances(map: &TopologyMap, source: NodeId) -> Vec<usize> {
    let mut dist = vec![usize::MAX; map.node_count()];
    let mut queue = VecDeque::from([source]);
    dist[source.0] = 0;
    while let Some(u) = queue.pop_front() {
        for &(v, _) in map.neighbors(u) {
            if dist[v.0] == usize::MAX {
                dist[v.0] = dist[u.0] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

pub const MIN_OD_HOPS: usize = 3;

/// `count` distinct port pairs at least `MIN_OD_HOPS` hops apart, drawn
/// with a seeded generator. Falls back to all nodes when the map has
/// fewer than two ports, and to shorter pairs when no far pair exists.
pub fn sample_od_pairs(map: &TopologyMap, count: usize, seed: u64) -> Vec<(NodeId, NodeId)> {
    let mut candidates: Vec<NodeId> = map.ports().collect();
    if candidates.len() < 2 {
        candidates = (0..map.node_count()).map(NodeId).collect();
    }
    let hops: Vec<Vec<usize>> = candidates.iter().map(|&s| hop_distances(map, s)).collect();
    let mut pairs = Vec::new();
    for i in 0..candidates.len() {
        for j in 0..candidates.len() {
            if i != j && hops[i][candidates[j].0] >= MIN_OD_HOPS {
                pairs.push((candidates[i], candidates[j]));
            }
        }
    }
    if pairs.is_empty() {
        for &a in &candidates {
            for &b in &candidates {
                if a != b {
                    pairs.push((a, b));
                }
            }
        }
    }
    let mut rng = seeds::rng_for(seed, "od_pairs");
    let mut out: Vec<(NodeId, NodeId)> = pairs.choose_multiple(&mut rng, count).copied().collect();
    // cycle if the map has fewer pairs than requested
    let base = out.clone();
    while out.len() < count && !base.is_empty() {
        out.push(base[out.len() % base.len()]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topo_map::numbered_map;

    #[test]
    fn od_pairs_are_far_and_deterministic() {
        let map = numbered_map(1).unwrap();
        let a = sample_od_pairs(&map, 10, 5);
        assert_eq!(a, sample_od_pairs(&map, 10, 5));
        assert_eq!(a.len(), 10);
        for (s, t) in &a {
            assert!(hop_distances(&map, *s)[t.0] >= MIN_OD_HOPS);
        }
        assert_ne!(a, sample_od_pairs(&map, 10, 6));
    }

    #[test]
    fn battery_floor_wears_busiest_zones() {
        let map = numbered_map(2).unwrap();
        let od = sample_od_pairs(&map, 10, 3);
        let plan = ScenarioPlan::resolve(&Scenario::default(), &map, &od, 3);
        assert_eq!(plan.events.len(), 4);
        let traffic = corridor_traffic(&map, &od);
        let busiest: Vec<u32> = traffic.iter().take(4).map(|t| t.0).collect();
        for e in &plan.events {
            assert_eq!(e.after_call, 20);
            assert_eq!(e.level, RoughnessLevel::Heavy);
            assert!(busiest.contains(&e.zone));
        }
        assert!(plan.battery);
    }

    #[test]
    fn corridor_traffic_follows_the_line() {
        let map = numbered_map(1).unwrap();
        // bottom aisle, end to end
        let od = [(NodeId(0), NodeId(9))];
        let traffic = corridor_traffic(&map, &od);
        let total: usize = traffic.iter().map(|t| t.1).sum();
        assert_eq!(total, 33);
        for (zone, count) in traffic {
            if count > 0 {
                assert!(zone < 4, "zone {zone} is off the bottom band");
            }
        }
    }

    #[test]
    fn flat_has_no_drain() {
        let map = numbered_map(1).unwrap();
        let plan = ScenarioPlan::resolve(&Scenario::Flat, &map, &[], 0);
        let cfg = plan.world_config(&WorldConfig::default());
        assert_eq!(cfg.discharge_per_second, 0.0);
        assert!(plan.events.is_empty());
    }

    #[test]
    fn events_fire_once_at_their_call() {
        let map = numbered_map(1).unwrap();
        let plan = ScenarioPlan::resolve(
            &Scenario::Custom {
                initial: vec![],
                events: vec![FloorEvent {
                    after_call: 2,
                    zone: 4,
                    level: RoughnessLevel::Heavy,
                }],
                battery: true,
            },
            &map,
            &[],
            0,
        );
        let mut w = plan.world(&map, &WorldConfig::default(), 0).unwrap();
        plan.apply_before_call(&mut w, 2);
        assert_eq!(w.floor.level(4), RoughnessLevel::Smooth);
        plan.apply_before_call(&mut w, 3);
        assert_eq!(w.floor.level(4), RoughnessLevel::Heavy);
    }
}
