//! Warehouse floors as undirected topology graphs.
//!
//! Nodes are ports (pick/drop spots) and bifurcations, edges are physical
//! links with a traversable length and a floor-zone tag. The physical
//! length may exceed the straight-line distance between the endpoints
//! (links winding around racks); the Euclidean heuristic only ever sees
//! the straight-line distance.

mod generators;
mod io;

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use generators::{builtin_map, numbered_map, LayoutParams, MapFamily};
pub use io::{load_map, save_map};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Index into [`TopologyMap::edges`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Port,
    Bifurcation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub x: f64,
    pub y: f64,
    pub kind: NodeKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub from: NodeId,
    pub to: NodeId,
    /// Traversable length in meters.
    pub length: f64,
    pub zone_id: u32,
}

impl Edge {
    /// The endpoint opposite to `n`.
    pub fn other(&self, n: NodeId) -> NodeId {
        if self.from == n {
            self.to
        } else {
            self.from
        }
    }

    pub fn touches(&self, n: NodeId) -> bool {
        self.from == n || self.to == n
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MapMeta {
    pub name: String,
    pub seed: Option<u64>,
}

/// Validated, immutable floor graph.
#[derive(Clone, Debug, PartialEq)]
pub struct TopologyMap {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(NodeId, EdgeId)>>,
    meta: MapMeta,
}

impl TopologyMap {
    /// Builds a map and checks every structural invariant: dense node ids,
    /// finite coordinates, positive edge lengths, no self loops or
    /// duplicate links, and connectivity.
    pub fn new(nodes: Vec<Node>, edges: Vec<Edge>, meta: MapMeta) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidMap("map has no nodes".into()));
        }
        for (i, n) in nodes.iter().enumerate() {
            if n.id.0 != i {
                return Err(Error::InvalidMap(format!(
                    "node ids must be dense and ordered: position {i} holds id {}",
                    n.id
                )));
            }
            if !n.x.is_finite() || !n.y.is_finite() {
                return Err(Error::InvalidMap(format!("node {i} has non-finite coordinates")));
            }
        }

        let mut adjacency = vec![Vec::new(); nodes.len()];
        for (i, e) in edges.iter().enumerate() {
            if e.from.0 >= nodes.len() || e.to.0 >= nodes.len() {
                return Err(Error::InvalidMap(format!(
                    "edge {}-{} references a missing node",
                    e.from, e.to
                )));
            }
            if e.from == e.to {
                return Err(Error::InvalidMap(format!("self loop at node {}", e.from)));
            }
            if !(e.length.is_finite() && e.length > 0.0) {
                return Err(Error::InvalidMap(format!(
                    "edge {}-{} has non-positive length {}",
                    e.from, e.to, e.length
                )));
            }
            if adjacency[e.from.0].iter().any(|&(n, _)| n == e.to) {
                return Err(Error::InvalidMap(format!("duplicate edge {}-{}", e.from, e.to)));
            }
            adjacency[e.from.0].push((e.to, EdgeId(i)));
            adjacency[e.to.0].push((e.from, EdgeId(i)));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }

        let map = TopologyMap {
            nodes,
            edges,
            adjacency,
            meta,
        };
        if !map.is_connected() {
            return Err(Error::InvalidMap("graph is disconnected".into()));
        }
        Ok(map)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn meta(&self) -> &MapMeta {
        &self.meta
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node(&self, id: NodeId) -> Result<&Node> {
        self.nodes.get(id.0).ok_or(Error::UnknownNode(id))
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id.0]
    }

    /// Neighbors of `n` with the connecting edge, sorted by neighbor id.
    pub fn neighbors(&self, n: NodeId) -> &[(NodeId, EdgeId)] {
        &self.adjacency[n.0]
    }

    pub fn degree(&self, n: NodeId) -> usize {
        self.adjacency[n.0].len()
    }

    pub fn edge_between(&self, u: NodeId, v: NodeId) -> Option<EdgeId> {
        self.adjacency
            .get(u.0)?
            .iter()
            .find(|&&(n, _)| n == v)
            .map(|&(_, e)| e)
    }

    pub fn euclidean(&self, u: NodeId, v: NodeId) -> Result<f64> {
        let a = self.node(u)?;
        let b = self.node(v)?;
        Ok((a.x - b.x).hypot(a.y - b.y))
    }

    pub fn ports(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes
            .iter()
            .filter(|n| n.kind == NodeKind::Port)
            .map(|n| n.id)
    }

    /// Distinct zone ids carried by edges, ascending.
    pub fn zone_ids(&self) -> Vec<u32> {
        let mut z: Vec<u32> = self.edges.iter().map(|e| e.zone_id).collect();
        z.sort_unstable();
        z.dedup();
        z
    }

    pub fn edges_in_zone(&self, zone: u32) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.zone_id == zone)
            .map(|(i, _)| EdgeId(i))
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.nodes.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &self.adjacency[u] {
                if !seen[v.0] {
                    seen[v.0] = true;
                    count += 1;
                    queue.push_back(v.0);
                }
            }
        }
        count == self.nodes.len()
    }

    /// Returns a copy with zones reassigned by binning edge midpoints on a
    /// `cols` x `rows` grid over the bounding box. Zone id is
    /// `row * cols + col`.
    pub fn with_grid_zones(&self, cols: usize, rows: usize) -> Self {
        let mut out = self.clone();
        let zones = grid_zones(&self.nodes, &self.edges, cols, rows);
        for (e, z) in out.edges.iter_mut().zip(zones) {
            e.zone_id = z;
        }
        out
    }
}

pub(crate) fn grid_zones(nodes: &[Node], edges: &[Edge], cols: usize, rows: usize) -> Vec<u32> {
    let cols = cols.max(1);
    let rows = rows.max(1);
    let (min_x, max_x) = bounds(nodes.iter().map(|n| n.x));
    let (min_y, max_y) = bounds(nodes.iter().map(|n| n.y));
    let bin = |v: f64, lo: f64, hi: f64, n: usize| -> usize {
        if hi - lo <= f64::EPSILON {
            return 0;
        }
        (((v - lo) / (hi - lo) * n as f64) as usize).min(n - 1)
    };
    edges
        .iter()
        .map(|e| {
            let a = &nodes[e.from.0];
            let b = &nodes[e.to.0];
            let mx = 0.5 * (a.x + b.x);
            let my = 0.5 * (a.y + b.y);
            (bin(my, min_y, max_y, rows) * cols + bin(mx, min_x, max_x, cols)) as u32
        })
        .collect()
}

fn bounds(it: impl Iterator<Item = f64>) -> (f64, f64) {
    it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    })
}

/// Straight-line travel time of the link `u`-`v` at `nominal_speed`.
///
/// This is the classical Euclidean edge weight: it ignores the link's
/// physical length and never changes over time.
pub fn heuristic_cost(map: &TopologyMap, u: NodeId, v: NodeId, nominal_speed: f64) -> Result<f64> {
    if !(nominal_speed > 0.0 && nominal_speed.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "nominal speed must be positive, got {nominal_speed}"
        )));
    }
    map.edge_between(u, v).ok_or(Error::MissingEdge(u, v))?;
    Ok(map.euclidean(u, v)? / nominal_speed)
}
