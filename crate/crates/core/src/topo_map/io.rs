use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Edge, MapMeta, Node, TopologyMap};
use crate::error::{Error, Result};

/// On-disk layout: `{"nodes": [...], "edges": [...], "meta": {...}}`.
#[derive(Serialize, Deserialize)]
struct MapFile {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    #[serde(default)]
    meta: MapMeta,
}

impl TopologyMap {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: MapFile = serde_json::from_str(text)?;
        TopologyMap::new(file.nodes, file.edges, file.meta)
    }

    pub fn to_json_string(&self) -> String {
        let file = MapFile {
            nodes: self.nodes.clone(),
            edges: self.edges.clone(),
            meta: self.meta.clone(),
        };
        serde_json::to_string_pretty(&file).expect("map serialization is infallible")
    }
}

pub fn load_map(path: impl AsRef<Path>) -> Result<TopologyMap> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    TopologyMap::from_json_str(&text)
}

pub fn save_map(map: &TopologyMap, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, map.to_json_string()).map_err(|e| Error::io(path, e))
}
