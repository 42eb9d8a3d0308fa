//! Simulated ground truth for edge travel times.
//!
//! A traversal of edge `e` takes
//! `length / nominal_speed * battery_factor(soc) * roughness(zone) * (1 + cv * z)`
//! seconds, where `z` is standard normal. Sensor observations of that time
//! optionally carry additive Gaussian noise at a configured SNR. All noise is
//! counter-based: it is a pure function of the world seed, the traversal
//! counter and the edge, so cloned worlds that execute the same edges see
//! identical draws.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::planner::PathResult;
use crate::seeds;
use crate::topo_map::{EdgeId, NodeId, TopologyMap};

/// Shape of the travel-time multiplier as a function of state of charge:
/// `1 + beta * (1 - soc)^power + hump(soc) - hump(1)` where
/// `hump(s) = height * exp(-((s - center) / width)^2)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BatteryModel {
    pub beta: f64,
    pub power: f64,
    pub hump_enabled: bool,
    pub hump_height: f64,
    pub hump_center: f64,
    pub hump_width: f64,
}

impl Default for BatteryModel {
    fn default() -> Self {
        BatteryModel {
            beta: 0.5,
            power: 3.0,
            hump_enabled: true,
            hump_height: 0.08,
            hump_center: 0.9,
            hump_width: 0.05,
        }
    }
}

impl BatteryModel {
    pub fn without_hump() -> Self {
        BatteryModel {
            hump_enabled: false,
            ..Default::default()
        }
    }

    fn hump(&self, soc: f64) -> f64 {
        let z = (soc - self.hump_center) / self.hump_width;
        self.hump_height * (-z * z).exp()
    }
}

/// Travel-time multiplier for a state of charge. Input is clamped to
/// `[0, 1]`; `battery_factor(1.0) == 1.0` exactly.
pub fn battery_factor(model: &BatteryModel, soc: f64) -> f64 {
    let soc = if soc.is_nan() { 0.0 } else { soc.clamp(0.0, 1.0) };
    let mut f = 1.0 + model.beta * (1.0 - soc).powf(model.power);
    if model.hump_enabled {
        f += model.hump(soc) - model.hump(1.0);
    }
    f
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RoughnessLevel {
    Smooth,
    Light,
    Moderate,
    Heavy,
}

impl RoughnessLevel {
    pub const ALL: [RoughnessLevel; 4] = [
        RoughnessLevel::Smooth,
        RoughnessLevel::Light,
        RoughnessLevel::Moderate,
        RoughnessLevel::Heavy,
    ];
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RoughnessMultipliers {
    pub smooth: f64,
    pub light: f64,
    pub moderate: f64,
    pub heavy: f64,
}

impl Default for RoughnessMultipliers {
    fn default() -> Self {
        RoughnessMultipliers {
            smooth: 1.0,
            light: 1.15,
            moderate: 1.35,
            heavy: 1.6,
        }
    }
}

impl RoughnessMultipliers {
    pub fn get(&self, level: RoughnessLevel) -> f64 {
        match level {
            RoughnessLevel::Smooth => self.smooth,
            RoughnessLevel::Light => self.light,
            RoughnessLevel::Moderate => self.moderate,
            RoughnessLevel::Heavy => self.heavy,
        }
    }
}

/// Signal-to-noise ratio of sensor observations in dB. Infinite means the
/// observation equals the true travel time.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Snr(f64);

impl Snr {
    pub const INFINITE: Snr = Snr(f64::INFINITY);

    pub fn db(db: f64) -> Result<Snr> {
        if db.is_nan() || db == f64::NEG_INFINITY {
            return Err(Error::InvalidConfig(format!("invalid SNR {db}")));
        }
        Ok(Snr(db))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0 == f64::INFINITY
    }

    /// Noise standard deviation relative to the signal RMS.
    pub fn noise_ratio(self) -> f64 {
        if self.is_infinite() {
            0.0
        } else {
            10f64.powf(-self.0 / 20.0)
        }
    }
}

impl Default for Snr {
    fn default() -> Self {
        Snr::INFINITE
    }
}

impl fmt::Display for Snr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl std::str::FromStr for Snr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Snr> {
        match s.trim() {
            "inf" | "Inf" | "infinity" | "∞" => Ok(Snr::INFINITE),
            t => t
                .parse::<f64>()
                .map_err(|_| Error::InvalidConfig(format!("bad SNR '{s}'")))
                .and_then(Snr::db),
        }
    }
}

impl Serialize for Snr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Snr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Snr, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Snr::db(v).map_err(serde::de::Error::custom),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WorldConfig {
    /// Cruise speed in m/s on a smooth floor with a full battery.
    pub nominal_speed: f64,
    pub battery: BatteryModel,
    /// State-of-charge drop per second of travel.
    pub discharge_per_second: f64,
    pub roughness: RoughnessMultipliers,
    /// Coefficient of variation of the multiplicative travel-time noise.
    pub noise_cv: f64,
    pub snr_db: Snr,
}

impl Default for WorldConfig {
    fn default() -> Self {
        WorldConfig {
            nominal_speed: 0.4,
            battery: BatteryModel::default(),
            discharge_per_second: 8e-5,
            roughness: RoughnessMultipliers::default(),
            noise_cv: 0.02,
            snr_db: Snr::INFINITE,
        }
    }
}

impl WorldConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.nominal_speed > 0.0 && self.nominal_speed.is_finite()) {
            return Err(Error::InvalidConfig("nominal_speed must be positive".into()));
        }
        if !(self.discharge_per_second >= 0.0 && self.discharge_per_second.is_finite()) {
            return Err(Error::InvalidConfig("discharge_per_second must be non-negative".into()));
        }
        if !(0.0..0.5).contains(&self.noise_cv) {
            return Err(Error::InvalidConfig("noise_cv must be in [0, 0.5)".into()));
        }
        let r = &self.roughness;
        if !(r.smooth > 0.0 && r.smooth <= r.light && r.light <= r.moderate && r.moderate <= r.heavy) {
            return Err(Error::InvalidConfig(
                "roughness multipliers must be positive and ordered smooth <= light <= moderate <= heavy".into(),
            ));
        }
        Ok(())
    }

    pub fn base_time(&self, map: &TopologyMap, edge: EdgeId) -> f64 {
        map.edge(edge).length / self.nominal_speed
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BatteryState {
    soc: f64,
    pub discharge_per_second: f64,
}

impl BatteryState {
    pub fn full(discharge_per_second: f64) -> Self {
        BatteryState {
            soc: 1.0,
            discharge_per_second,
        }
    }

    pub fn soc(&self) -> f64 {
        self.soc
    }

    /// Drains for `seconds` of travel; returns true once empty.
    pub fn drain(&mut self, seconds: f64) -> bool {
        self.soc = (self.soc - self.discharge_per_second * seconds).max(0.0);
        self.soc <= 0.0
    }

    pub fn is_depleted(&self) -> bool {
        self.soc <= 0.0
    }
}

/// Roughness level per floor zone. Zones not listed are smooth.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FloorCondition {
    pub zone_levels: BTreeMap<u32, RoughnessLevel>,
}

impl FloorCondition {
    /// Every zone of `map` set to smooth.
    pub fn smooth(map: &TopologyMap) -> Self {
        FloorCondition {
            zone_levels: map
                .zone_ids()
                .into_iter()
                .map(|z| (z, RoughnessLevel::Smooth))
                .collect(),
        }
    }

    pub fn level(&self, zone: u32) -> RoughnessLevel {
        self.zone_levels
            .get(&zone)
            .copied()
            .unwrap_or(RoughnessLevel::Smooth)
    }

    pub fn set(&mut self, zone: u32, level: RoughnessLevel) {
        self.zone_levels.insert(zone, level);
    }
}

/// Per-edge observed travel times in traversal order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ObservationLog {
    per_edge: Vec<Vec<(usize, f64)>>,
}

impl ObservationLog {
    pub fn new(edge_count: usize) -> Self {
        ObservationLog {
            per_edge: vec![Vec::new(); edge_count],
        }
    }

    /// Appends an observation; `k` must exceed the edge's last index.
    pub fn push(&mut self, edge: EdgeId, k: usize, observed: f64) {
        let list = &mut self.per_edge[edge.0];
        debug_assert!(list.last().is_none_or(|&(last, _)| last < k));
        debug_assert!(observed > 0.0);
        list.push((k, observed));
    }

    pub fn edge(&self, edge: EdgeId) -> &[(usize, f64)] {
        &self.per_edge[edge.0]
    }

    pub fn latest(&self, edge: EdgeId) -> Option<f64> {
        self.per_edge[edge.0].last().map(|&(_, y)| y)
    }

    /// Observation stored at position `k` (1-based) of the edge's sequence.
    pub fn at(&self, edge: EdgeId, k: usize) -> Option<f64> {
        k.checked_sub(1)
            .and_then(|i| self.per_edge[edge.0].get(i))
            .map(|&(_, y)| y)
    }

    pub fn mean(&self, edge: EdgeId) -> Option<f64> {
        let list = &self.per_edge[edge.0];
        if list.is_empty() {
            None
        } else {
            Some(list.iter().map(|&(_, y)| y).sum::<f64>() / list.len() as f64)
        }
    }

    pub fn edge_count(&self) -> usize {
        self.per_edge.len()
    }

    pub fn total(&self) -> usize {
        self.per_edge.iter().map(Vec::len).sum()
    }

    /// CSV with columns `edge_from,edge_to,k,observed_tt_seconds`, ordered
    /// by edge then k.
    pub fn write_csv<W: Write>(&self, map: &TopologyMap, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["edge_from", "edge_to", "k", "observed_tt_seconds"])?;
        for (i, list) in self.per_edge.iter().enumerate() {
            let e = map.edge(EdgeId(i));
            for &(k, y) in list {
                w.write_record([e.from.to_string(), e.to.to_string(), k.to_string(), y.to_string()])?;
            }
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExecutedEdge {
    pub edge: EdgeId,
    pub true_time: f64,
    pub observed: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExecutionReport {
    pub steps: Vec<ExecutedEdge>,
    /// The battery ran empty during this execution.
    pub depleted: bool,
    /// Every edge of the path was traversed.
    pub completed: bool,
}

impl ExecutionReport {
    pub fn true_total(&self) -> f64 {
        self.steps.iter().map(|s| s.true_time).sum()
    }
}

#[derive(Clone, Debug)]
pub struct WorldState {
    config: WorldConfig,
    pub battery: BatteryState,
    pub floor: FloorCondition,
    traversal_count: usize,
    rng_seed: u64,
    /// Running sum of squared true travel times, per edge.
    signal_energy: Vec<(f64, usize)>,
    log: ObservationLog,
}

impl WorldState {
    pub fn new(map: &TopologyMap, config: WorldConfig, rng_seed: u64) -> Result<Self> {
        config.validate()?;
        Ok(WorldState {
            battery: BatteryState::full(config.discharge_per_second),
            floor: FloorCondition::smooth(map),
            traversal_count: 0,
            rng_seed,
            signal_energy: vec![(0.0, 0); map.edge_count()],
            log: ObservationLog::new(map.edge_count()),
            config,
        })
    }

    pub fn config(&self) -> &WorldConfig {
        &self.config
    }

    pub fn traversal_count(&self) -> usize {
        self.traversal_count
    }

    pub fn rng_seed(&self) -> u64 {
        self.rng_seed
    }

    pub fn snr(&self) -> Snr {
        self.config.snr_db
    }

    pub fn set_snr(&mut self, snr: Snr) {
        self.config.snr_db = snr;
    }

    pub fn log(&self) -> &ObservationLog {
        &self.log
    }

    /// Refills the battery. Counters and logs are kept.
    pub fn recharge(&mut self) {
        self.battery = BatteryState::full(self.config.discharge_per_second);
    }

    /// Travel time the next traversal of `edge` would take in the current
    /// state. Does not mutate the world.
    pub fn true_travel_time(&self, map: &TopologyMap, edge: EdgeId) -> Result<f64> {
        if edge.0 >= map.edge_count() {
            return Err(Error::InvalidMap(format!("unknown edge index {}", edge.0)));
        }
        let z = self.normal_draw("process", self.traversal_count + 1, edge);
        Ok(self.travel_time_with(map, edge, self.battery.soc(), z))
    }

    fn travel_time_with(&self, map: &TopologyMap, edge: EdgeId, soc: f64, z: f64) -> f64 {
        let base = self.config.base_time(map, edge);
        let battery = battery_factor(&self.config.battery, soc);
        let rough = self
            .config
            .roughness
            .get(self.floor.level(map.edge(edge).zone_id));
        // keep the noise factor well away from zero
        let noise = (1.0 + self.config.noise_cv * z).max(0.5);
        base * battery * rough * noise
    }

    fn normal_draw(&self, stream: &str, k: usize, edge: EdgeId) -> f64 {
        let seed = seeds::sub_seed(self.rng_seed ^ ((k as u64) << 20) ^ edge.0 as u64, stream);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        StandardNormal.sample(&mut rng)
    }

    fn observe(&mut self, edge: EdgeId, k: usize, true_time: f64) -> f64 {
        let acc = &mut self.signal_energy[edge.0];
        acc.0 += true_time * true_time;
        acc.1 += 1;
        let rms = (acc.0 / acc.1 as f64).sqrt();
        let z = self.normal_draw("observation", k, edge);
        noisy_observation(true_time, self.config.snr_db, rms, z)
    }

    /// Drives the path edge by edge, draining the battery by the travel
    /// time of each traversal and logging observations. Stops early once
    /// the battery is empty.
    pub fn execute_path(&mut self, map: &TopologyMap, path: &PathResult) -> Result<ExecutionReport> {
        for (i, (&e, pair)) in path.edges.iter().zip(path.nodes.windows(2)).enumerate() {
            let edge = map.edges().get(e.0).ok_or(Error::BrokenPath(i))?;
            if !(edge.touches(pair[0]) && edge.other(pair[0]) == pair[1]) {
                return Err(Error::BrokenPath(i));
            }
        }
        if path.edges.len() + 1 != path.nodes.len() && !path.edges.is_empty() {
            return Err(Error::BrokenPath(path.edges.len()));
        }
        self.execute_edges(map, &path.edges)
    }

    pub fn execute_edges(&mut self, map: &TopologyMap, edges: &[EdgeId]) -> Result<ExecutionReport> {
        let mut report = ExecutionReport {
            steps: Vec::with_capacity(edges.len()),
            depleted: false,
            completed: true,
        };
        if edges.is_empty() {
            return Ok(report);
        }
        if self.battery.is_depleted() {
            report.depleted = true;
            report.completed = false;
            return Ok(report);
        }
        for (i, &edge) in edges.iter().enumerate() {
            let true_time = self.true_travel_time(map, edge)?;
            self.traversal_count += 1;
            let k = self.traversal_count;
            let observed = self.observe(edge, k, true_time);
            self.log.push(edge, k, observed);
            report.steps.push(ExecutedEdge {
                edge,
                true_time,
                observed,
            });
            if self.battery.drain(true_time) {
                report.depleted = true;
                report.completed = i + 1 == edges.len();
                break;
            }
        }
        Ok(report)
    }
}

/// `true_value` plus Gaussian noise of standard deviation
/// `signal_rms * 10^(-snr_db / 20)`, drawn from `rng`. The result is kept
/// strictly positive.
pub fn observe_with_snr<R: rand::Rng + ?Sized>(true_value: f64, snr: Snr, signal_rms: f64, rng: &mut R) -> f64 {
    if snr.is_infinite() {
        return true_value;
    }
    let z: f64 = StandardNormal.sample(rng);
    noisy_observation(true_value, snr, signal_rms, z)
}

fn noisy_observation(true_value: f64, snr: Snr, signal_rms: f64, z: f64) -> f64 {
    if snr.is_infinite() {
        return true_value;
    }
    let sigma = signal_rms * snr.noise_ratio();
    (true_value + sigma * z).max(1e-3 * true_value)
}

/// Pre-collected travel-time table: for every edge, a fresh battery
/// lifecycle in which the robot traverses that edge `repeats` times under
/// the template's floor and noise settings. With `stop_at_depletion`
/// the sequence ends once the battery is empty, otherwise the battery is
/// swapped for a fresh one and collection continues.
pub fn generate_observation_table(
    map: &TopologyMap,
    template: &WorldState,
    repeats: usize,
    stop_at_depletion: bool,
) -> Result<ObservationLog> {
    if repeats == 0 {
        return Err(Error::InvalidConfig("repeats must be at least 1".into()));
    }
    let mut table = ObservationLog::new(map.edge_count());
    for i in 0..map.edge_count() {
        let edge = EdgeId(i);
        let mut world = template.clone();
        world.rng_seed = seeds::sub_seed(template.rng_seed, "observation_table");
        world.recharge();
        world.traversal_count = 0;
        world.signal_energy = vec![(0.0, 0); map.edge_count()];
        world.log = ObservationLog::new(map.edge_count());
        for k in 1..=repeats {
            let report = world.execute_edges(map, &[edge])?;
            let step = &report.steps[0];
            table.push(edge, k, step.observed);
            if report.depleted {
                if stop_at_depletion {
                    break;
                }
                world.recharge();
            }
        }
    }
    Ok(table)
}

/// Node pair of an edge, for reports.
pub fn edge_endpoints(map: &TopologyMap, edge: EdgeId) -> (NodeId, NodeId) {
    let e = map.edge(edge);
    (e.from, e.to)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topo_map::numbered_map;

    fn world(map: &TopologyMap) -> WorldState {
        WorldState::new(map, WorldConfig::default(), 11).unwrap()
    }

    #[test]
    fn factor_is_one_at_full_charge() {
        assert_eq!(battery_factor(&BatteryModel::default(), 1.0), 1.0);
        assert_eq!(battery_factor(&BatteryModel::without_hump(), 1.0), 1.0);
    }

    #[test]
    fn factor_tail_is_monotone() {
        let m = BatteryModel::without_hump();
        assert!(battery_factor(&m, 0.1) > battery_factor(&m, 0.5));
        let mut prev = battery_factor(&m, 1.0);
        for i in (0..100).rev() {
            let f = battery_factor(&m, i as f64 / 100.0);
            assert!(f > prev);
            prev = f;
        }
    }

    #[test]
    fn factor_clamps_input() {
        let m = BatteryModel::default();
        assert_eq!(battery_factor(&m, 1.7), 1.0);
        assert_eq!(battery_factor(&m, -3.0), battery_factor(&m, 0.0));
    }

    #[test]
    fn noise_free_smooth_full_battery_is_base_time() {
        let map = numbered_map(1).unwrap();
        let cfg = WorldConfig {
            noise_cv: 0.0,
            ..WorldConfig::default()
        };
        let w = WorldState::new(&map, cfg, 3).unwrap();
        for i in 0..map.edge_count() {
            let e = EdgeId(i);
            assert_eq!(w.true_travel_time(&map, e).unwrap(), map.edge(e).length / 0.4);
        }
    }

    #[test]
    fn rougher_zone_is_slower() {
        let map = numbered_map(2).unwrap();
        let mut w = world(&map);
        let e = EdgeId(0);
        let zone = map.edge(e).zone_id;
        let mut prev = 0.0;
        for level in RoughnessLevel::ALL {
            w.floor.set(zone, level);
            let t = w.true_travel_time(&map, e).unwrap();
            assert!(t > prev);
            prev = t;
        }
    }

    #[test]
    fn true_time_is_pure() {
        let map = numbered_map(3).unwrap();
        let w = world(&map);
        let a = w.true_travel_time(&map, EdgeId(4)).unwrap();
        let b = w.true_travel_time(&map, EdgeId(4)).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
        assert!(w.true_travel_time(&map, EdgeId(10_000)).is_err());
    }

    #[test]
    fn empty_path_changes_nothing() {
        let map = numbered_map(1).unwrap();
        let mut w = world(&map);
        let r = w.execute_edges(&map, &[]).unwrap();
        assert!(r.steps.is_empty() && r.completed && !r.depleted);
        assert_eq!(w.traversal_count(), 0);
        assert_eq!(w.battery.soc(), 1.0);
    }

    #[test]
    fn execution_bookkeeping() {
        let map = numbered_map(1).unwrap();
        let mut w = world(&map);
        let edges = [EdgeId(0), EdgeId(1), EdgeId(2)];
        let r = w.execute_edges(&map, &edges).unwrap();
        assert_eq!(r.steps.len(), 3);
        assert_eq!(w.traversal_count(), 3);
        let expected = 1.0 - w.config().discharge_per_second * r.true_total();
        assert!((w.battery.soc() - expected).abs() < 1e-12);
        assert!(w.battery.soc() < 1.0);
        assert_eq!(w.log().total(), 3);
        assert_eq!(w.log().edge(EdgeId(1)), &[(2, r.steps[1].observed)]);
    }

    #[test]
    fn depletion_stops_mid_path() {
        let map = numbered_map(1).unwrap();
        // empty after ~10 s of travel
        let cfg = WorldConfig {
            discharge_per_second: 0.1,
            ..WorldConfig::default()
        };
        let mut w = WorldState::new(&map, cfg, 1).unwrap();
        let edges: Vec<EdgeId> = (0..6).map(EdgeId).collect();
        let r = w.execute_edges(&map, &edges).unwrap();
        assert!(r.depleted);
        assert!(!r.completed);
        assert!(r.steps.len() < edges.len());
        assert_eq!(w.battery.soc(), 0.0);
        let again = w.execute_edges(&map, &edges).unwrap();
        assert!(again.steps.is_empty() && again.depleted);
    }

    #[test]
    fn infinite_snr_is_exact() {
        let mut rng = seeds::rng_for(1, "t");
        assert_eq!(observe_with_snr(3.25, Snr::INFINITE, 3.0, &mut rng), 3.25);
    }

    #[test]
    fn low_snr_stays_positive() {
        let mut rng = seeds::rng_for(2, "t");
        let snr = Snr::db(10.0).unwrap();
        for _ in 0..20_000 {
            assert!(observe_with_snr(2.0, snr, 2.0, &mut rng) > 0.0);
        }
        // a signal far below its RMS forces the clamp to engage
        let mut hits = 0;
        for _ in 0..2_000 {
            let y = observe_with_snr(0.1, Snr::db(0.0).unwrap(), 10.0, &mut rng);
            assert!(y > 0.0);
            hits += usize::from(y == 1e-4);
        }
        assert!(hits > 0);
    }

    #[test]
    fn snr_parsing() {
        assert!("inf".parse::<Snr>().unwrap().is_infinite());
        assert_eq!("25".parse::<Snr>().unwrap().value(), 25.0);
        assert!("loud".parse::<Snr>().is_err());
        let s: Snr = serde_json::from_str("\"inf\"").unwrap();
        assert!(s.is_infinite());
        let s: Snr = serde_json::from_str("10").unwrap();
        assert_eq!(s.value(), 10.0);
        assert_eq!(serde_json::to_string(&Snr::INFINITE).unwrap(), "\"inf\"");
    }

    #[test]
    fn table_one_repeat() {
        let map = numbered_map(3).unwrap();
        let t = generate_observation_table(&map, &world(&map), 1, false).unwrap();
        for i in 0..map.edge_count() {
            assert_eq!(t.edge(EdgeId(i)).len(), 1);
        }
        assert!(generate_observation_table(&map, &world(&map), 0, false).is_err());
    }

    #[test]
    fn table_is_reproducible() {
        let map = numbered_map(2).unwrap();
        let w = world(&map);
        let a = generate_observation_table(&map, &w, 100, false).unwrap();
        let b = generate_observation_table(&map, &w, 100, false).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn config_validation() {
        let c = WorldConfig {
            nominal_speed: 0.0,
            ..WorldConfig::default()
        };
        assert!(c.validate().is_err());
        let mut c = WorldConfig::default();
        c.roughness.light = 2.0;
        assert!(c.validate().is_err());
    }
}
