use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::estimators::{DynamicKfConfig, ProviderKind, StaticKfConfig};
use crate::topo_map::{load_map, numbered_map, NodeId, TopologyMap};
use crate::world_sim::{RoughnessLevel, Snr, WorldConfig};

pub const REPETITION_SET: [usize; 4] = [20, 40, 60, 80];
pub const REGRESSION_RANGE: std::ops::RangeInclusive<usize> = 2..=9;

/// Built-in map number or a path to a map file. Serialized as `1`, `"2"`
/// or `"maps/floor.json"`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MapSelector {
    Builtin(u8),
    File(PathBuf),
}

impl MapSelector {
    pub fn load(&self) -> Result<TopologyMap> {
        match self {
            MapSelector::Builtin(n) => numbered_map(*n),
            MapSelector::File(p) => load_map(p),
        }
    }

    /// Resolves relative file paths against `base`.
    pub fn relative_to(&self, base: &Path) -> MapSelector {
        match self {
            MapSelector::File(p) if p.is_relative() => MapSelector::File(base.join(p)),
            other => other.clone(),
        }
    }
}

impl std::str::FromStr for MapSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" | "2" | "3" => Ok(MapSelector::Builtin(s.parse().expect("digit"))),
            "" => Err(Error::InvalidConfig("empty map selector".into())),
            path => Ok(MapSelector::File(PathBuf::from(path))),
        }
    }
}

impl std::fmt::Display for MapSelector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MapSelector::Builtin(n) => write!(f, "{n}"),
            MapSelector::File(p) => write!(f, "{}", p.display()),
        }
    }
}

impl Serialize for MapSelector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            MapSelector::Builtin(n) => s.serialize_u8(*n),
            MapSelector::File(_) => s.serialize_str(&self.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for MapSelector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u8),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(n) => format!("{n}").parse().map_err(serde::de::Error::custom),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// A floor change applied just before planning call `after_call + 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FloorEvent {
    pub after_call: usize,
    pub zone: u32,
    pub level: RoughnessLevel,
}

/// How the world degrades over a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scenario {
    /// No battery drain, smooth floor.
    Flat,
    /// Battery drain on a smooth floor.
    Battery,
    /// Battery drain; each zone starts light with probability
    /// `light_fraction`, otherwise smooth. After `change_after` calls the
    /// `worn_zones` zones lying most under the straight lines between
    /// scheduled endpoints turn heavily rough.
    BatteryFloor {
        light_fraction: f64,
        change_after: usize,
        worn_zones: usize,
    },
    /// Explicit initial levels and events.
    Custom {
        #[serde(default)]
        initial: Vec<(u32, RoughnessLevel)>,
        #[serde(default)]
        events: Vec<FloorEvent>,
        #[serde(default = "yes")]
        battery: bool,
    },
}

fn yes() -> bool {
    true
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario::BatteryFloor {
            light_fraction: 0.3,
            change_after: 20,
            worn_zones: 4,
        }
    }
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Flat => "flat",
            Scenario::Battery => "battery",
            Scenario::BatteryFloor { .. } => "battery_floor",
            Scenario::Custom { .. } => "custom",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "flat" => Ok(Scenario::Flat),
            "battery" => Ok(Scenario::Battery),
            "battery_floor" | "default" => Ok(Scenario::default()),
            other => Err(Error::InvalidConfig(format!("unknown scenario '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub map: MapSelector,
    pub providers: Vec<ProviderKind>,
    pub repetitions: usize,
    pub regression_no: usize,
    pub snr_db: Snr,
    pub seeds: Vec<u64>,
    /// Explicit source/destination schedule, cycled round-robin. When
    /// absent, `od_pairs` port pairs are sampled per seed.
    pub od_list: Option<Vec<(NodeId, NodeId)>>,
    pub od_pairs: usize,
    pub world: WorldConfig,
    pub scenario: Scenario,
    pub static_kf: StaticKfConfig,
    pub dynamic_kf: DynamicKfConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            map: MapSelector::Builtin(1),
            providers: ProviderKind::ALL.to_vec(),
            repetitions: 80,
            regression_no: 2,
            snr_db: Snr::INFINITE,
            seeds: (0..10).collect(),
            od_list: None,
            od_pairs: 10,
            world: WorldConfig::default(),
            scenario: Scenario::default(),
            static_kf: StaticKfConfig::default(),
            dynamic_kf: DynamicKfConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = ExperimentConfig::from_json_str(&text)?;
        if let Some(dir) = path.parent() {
            cfg.map = cfg.map.relative_to(dir);
        }
        Ok(cfg)
    }

    /// Structural checks. Repetition counts outside `REPETITION_SET` are
    /// accepted here so that short runs stay possible from code.
    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::InvalidConfig("repetitions must be at least 1".into()));
        }
        if !REGRESSION_RANGE.contains(&self.regression_no) {
            return Err(Error::InvalidConfig(format!(
                "regression_no must be in 2..=9, got {}",
                self.regression_no
            )));
        }
        if self.seeds.is_empty() {
            return Err(Error::InvalidConfig("at least one seed is required".into()));
        }
        if self.providers.is_empty() {
            return Err(Error::InvalidConfig("at least one provider is required".into()));
        }
        match &self.od_list {
            Some(list) if list.is_empty() => return Err(Error::InvalidConfig("od_list is empty".into())),
            None if self.od_pairs == 0 => return Err(Error::InvalidConfig("od_pairs must be at least 1".into())),
            _ => {}
        }
        if let Scenario::BatteryFloor { light_fraction, .. } = self.scenario {
            if !(0.0..=1.0).contains(&light_fraction) {
                return Err(Error::InvalidConfig("light_fraction must be in [0, 1]".into()));
            }
        }
        self.world.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = ExperimentConfig::default();
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(ExperimentConfig::from_json_str(&text).unwrap(), cfg);
    }

    #[test]
    fn partial_json_fills_defaults() {
        let cfg = ExperimentConfig::from_json_str(
            r#"{"map": "maps/x.json", "providers": ["dynamic_kf"], "snr_db": "inf",
                "od_list": [[0, 5]], "scenario": {"kind": "battery"}}"#,
        )
        .unwrap();
        assert_eq!(cfg.map, MapSelector::File("maps/x.json".into()));
        assert_eq!(cfg.providers, vec![ProviderKind::Dynamic]);
        assert_eq!(cfg.od_list, Some(vec![(NodeId(0), NodeId(5))]));
        assert_eq!(cfg.scenario, Scenario::Battery);
        assert_eq!(cfg.repetitions, 80);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(ExperimentConfig::from_json_str(r#"{"regression_no": 1}"#).is_err());
        assert!(ExperimentConfig::from_json_str(r#"{"regression_no": 10}"#).is_err());
        assert!(ExperimentConfig::from_json_str(r#"{"od_list": []}"#).is_err());
        assert!(ExperimentConfig::from_json_str(r#"{"seeds": []}"#).is_err());
        assert!(ExperimentConfig::from_json_str(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn map_selector_parsing() {
        assert_eq!("2".parse::<MapSelector>().unwrap(), MapSelector::Builtin(2));
        assert_eq!(
            "4".parse::<MapSelector>().unwrap(),
            MapSelector::File(PathBuf::from("4"))
        );
        let m: MapSelector = serde_json::from_str("3").unwrap();
        assert_eq!(m, MapSelector::Builtin(3));
    }
}
