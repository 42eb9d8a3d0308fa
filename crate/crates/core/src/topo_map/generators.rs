//! Parametric generators for the three representative floor layouts:
//! winding racks, randomly placed racks, and racks organized around a hub.

use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{grid_zones, Edge, MapMeta, Node, NodeId, NodeKind, TopologyMap};
use crate::error::{Error, Result};
use crate::seeds;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapFamily {
    WindingRacks,
    RandomRacks,
    Hub,
}

impl MapFamily {
    pub fn name(self) -> &'static str {
        match self {
            MapFamily::WindingRacks => "winding_racks",
            MapFamily::RandomRacks => "random_racks",
            MapFamily::Hub => "hub",
        }
    }
}

impl std::str::FromStr for MapFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "winding_racks" | "winding" => Ok(MapFamily::WindingRacks),
            "random_racks" | "random" => Ok(MapFamily::RandomRacks),
            "hub" => Ok(MapFamily::Hub),
            other => Err(Error::InvalidParams(format!("unknown map family '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum LayoutParams {
    /// Parallel straight aisles joined at every slot by connectors that
    /// wind between rack heads. Each connector's physical length is its
    /// chord times a seeded factor in `[1, winding_max]`.
    WindingRacks {
        aisles: usize,
        slots: usize,
        aisle_gap: f64,
        slot_gap: f64,
        winding_max: f64,
    },
    /// A jittered lattice from which `racks` nodes are removed; links
    /// touching a node next to a rack swing around the rack corner, with a
    /// seeded length factor in `[1, winding]`.
    RandomRacks {
        rows: usize,
        cols: usize,
        spacing: f64,
        racks: usize,
        jitter: f64,
        winding: f64,
    },
    /// Radial spokes around a central hub joined by ring corridors, plus
    /// docking ports on the hub. Spoke segments beyond the first ring bend
    /// around rack blocks, with a seeded length factor in `[1, winding_max]`.
    Hub {
        spokes: usize,
        rings: usize,
        ring_gap: f64,
        docks: usize,
        winding_max: f64,
    },
}

impl LayoutParams {
    pub fn family(&self) -> MapFamily {
        match self {
            LayoutParams::WindingRacks { .. } => MapFamily::WindingRacks,
            LayoutParams::RandomRacks { .. } => MapFamily::RandomRacks,
            LayoutParams::Hub { .. } => MapFamily::Hub,
        }
    }

    pub fn default_for(family: MapFamily) -> Self {
        match family {
            MapFamily::WindingRacks => LayoutParams::WindingRacks {
                aisles: 5,
                slots: 10,
                aisle_gap: 3.0,
                slot_gap: 3.0,
                winding_max: 2.0,
            },
            MapFamily::RandomRacks => LayoutParams::RandomRacks {
                rows: 7,
                cols: 7,
                spacing: 3.0,
                racks: 5,
                jitter: 0.15,
                winding: 1.8,
            },
            MapFamily::Hub => LayoutParams::Hub {
                spokes: 8,
                rings: 4,
                ring_gap: 3.0,
                docks: 2,
                winding_max: 1.8,
            },
        }
    }

    // negated comparisons so that NaN parameters fail too
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(m.to_string()));
        match *self {
            LayoutParams::WindingRacks {
                aisles,
                slots,
                aisle_gap,
                slot_gap,
                winding_max,
            } => {
                if aisles < 2 {
                    return bad("winding racks need at least 2 aisles");
                }
                if slots < 3 {
                    return bad("winding racks need at least 3 slots per aisle");
                }
                if !(aisle_gap > 0.0 && slot_gap > 0.0) {
                    return bad("gaps must be positive");
                }
                if !(winding_max >= 1.0) {
                    return bad("winding factor must be >= 1");
                }
            }
            LayoutParams::RandomRacks {
                rows,
                cols,
                spacing,
                racks,
                jitter,
                winding,
            } => {
                if rows < 3 || cols < 3 {
                    return bad("random racks need at least a 3x3 lattice");
                }
                if !(spacing > 0.0) {
                    return bad("spacing must be positive");
                }
                if racks * 2 > rows * cols {
                    return bad("racks may occupy at most half of the lattice");
                }
                if !(0.0..spacing / 2.0).contains(&jitter) {
                    return bad("jitter must be in [0, spacing/2)");
                }
                if !(winding >= 1.0) {
                    return bad("winding factor must be >= 1");
                }
            }
            LayoutParams::Hub {
                spokes,
                rings,
                ring_gap,
                winding_max,
                ..
            } => {
                if !(winding_max >= 1.0) {
                    return bad("winding factor must be >= 1");
                }
                if spokes < 3 {
                    return bad("hub needs at least 3 spokes");
                }
                if rings < 1 {
                    return bad("hub needs at least 1 ring");
                }
                if !(ring_gap > 0.0) {
                    return bad("ring gap must be positive");
                }
            }
        }
        Ok(())
    }
}

/// Default zone grid used by the generators.
pub const ZONE_GRID: (usize, usize) = (4, 4);

/// Generates a connected map of the family described by `params`.
/// The result depends only on `params` and `seed`.
pub fn builtin_map(params: &LayoutParams, seed: u64) -> Result<TopologyMap> {
    params.validate()?;
    let mut b = Builder::default();
    match *params {
        LayoutParams::WindingRacks {
            aisles,
            slots,
            aisle_gap,
            slot_gap,
            winding_max,
        } => winding_racks(&mut b, aisles, slots, aisle_gap, slot_gap, winding_max, seed),
        LayoutParams::RandomRacks {
            rows,
            cols,
            spacing,
            racks,
            jitter,
            winding,
        } => random_racks(&mut b, rows, cols, spacing, racks, jitter, winding, seed),
        LayoutParams::Hub {
            spokes,
            rings,
            ring_gap,
            docks,
            winding_max,
        } => hub(&mut b, spokes, rings, ring_gap, docks, winding_max, seed),
    }
    b.finish(
        MapMeta {
            name: params.family().name().to_string(),
            seed: Some(seed),
        },
        params.family() != MapFamily::Hub,
    )
}

/// The three representative maps: 1 = winding racks, 2 = randomly placed
/// racks, 3 = hub. Each uses default parameters and a fixed layout seed.
pub fn numbered_map(n: u8) -> Result<TopologyMap> {
    let family = match n {
        1 => MapFamily::WindingRacks,
        2 => MapFamily::RandomRacks,
        3 => MapFamily::Hub,
        other => return Err(Error::InvalidParams(format!("no builtin map {other}; use 1, 2 or 3"))),
    };
    let mut map = builtin_map(&LayoutParams::default_for(family), u64::from(n))?;
    map.meta.name = format!("map{n}_{}", family.name());
    Ok(map)
}

#[derive(Default)]
struct Builder {
    pts: Vec<(f64, f64)>,
    links: Vec<(usize, usize, f64)>,
    ports: Vec<bool>,
}

impl Builder {
    fn node(&mut self, x: f64, y: f64) -> usize {
        self.pts.push((x, y));
        self.ports.push(false);
        self.pts.len() - 1
    }

    fn link(&mut self, a: usize, b: usize, winding: f64) {
        let (ax, ay) = self.pts[a];
        let (bx, by) = self.pts[b];
        self.links.push((a, b, (ax - bx).hypot(ay - by) * winding));
    }

    fn link_len(&mut self, a: usize, b: usize, length: f64) {
        self.links.push((a, b, length));
    }

    /// Ports are explicitly flagged nodes plus every node of degree <= 2.
    fn finish(self, meta: MapMeta, degree_ports: bool) -> Result<TopologyMap> {
        let mut degree = vec![0usize; self.pts.len()];
        for &(a, b, _) in &self.links {
            degree[a] += 1;
            degree[b] += 1;
        }
        let nodes: Vec<Node> = self
            .pts
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| Node {
                id: NodeId(i),
                x,
                y,
                kind: if self.ports[i] || (degree_ports && degree[i] <= 2) {
                    NodeKind::Port
                } else {
                    NodeKind::Bifurcation
                },
            })
            .collect();
        let mut edges: Vec<Edge> = self
            .links
            .iter()
            .map(|&(a, b, length)| Edge {
                from: NodeId(a),
                to: NodeId(b),
                length,
                zone_id: 0,
            })
            .collect();
        let zones = grid_zones(&nodes, &edges, ZONE_GRID.0, ZONE_GRID.1);
        for (e, z) in edges.iter_mut().zip(zones) {
            e.zone_id = z;
        }
        TopologyMap::new(nodes, edges, meta)
    }
}

fn winding_racks(
    b: &mut Builder,
    aisles: usize,
    slots: usize,
    aisle_gap: f64,
    slot_gap: f64,
    winding_max: f64,
    seed: u64,
) {
    let mut rng = seeds::rng_for(seed, "map.winding_racks");
    let id = |a: usize, s: usize| a * slots + s;
    for a in 0..aisles {
        for s in 0..slots {
            let n = b.node(s as f64 * slot_gap, a as f64 * aisle_gap);
            // pick faces on the floor perimeter
            b.ports[n] = a == 0 || a + 1 == aisles || s == 0 || s + 1 == slots;
        }
    }
    for a in 0..aisles {
        for s in 0..slots - 1 {
            b.link(id(a, s), id(a, s + 1), 1.0);
        }
    }
    for a in 0..aisles - 1 {
        for s in 0..slots {
            let w = if winding_max > 1.0 {
                rng.random_range(1.0..=winding_max)
            } else {
                1.0
            };
            b.link(id(a, s), id(a + 1, s), w);
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn random_racks(
    b: &mut Builder,
    rows: usize,
    cols: usize,
    spacing: f64,
    racks: usize,
    jitter: f64,
    winding: f64,
    seed: u64,
) {
    let mut rng = seeds::rng_for(seed, "map.random_racks");
    let cell = |r: usize, c: usize| r * cols + c;
    let n = rows * cols;
    let mut lattice_links = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                lattice_links.push((cell(r, c), cell(r, c + 1)));
            }
            if r + 1 < rows {
                lattice_links.push((cell(r, c), cell(r + 1, c)));
            }
        }
    }

    let mut alive = vec![true; n];
    let mut placed = 0;
    let mut attempts = 0;
    while placed < racks && attempts < 100 * racks.max(1) {
        attempts += 1;
        let victim = rng.random_range(0..n);
        if !alive[victim] {
            continue;
        }
        alive[victim] = false;
        if lattice_connected(&alive, &lattice_links) {
            placed += 1;
        } else {
            alive[victim] = true;
        }
    }

    let mut new_id = vec![usize::MAX; n];
    for r in 0..rows {
        for c in 0..cols {
            let i = cell(r, c);
            // jitter is drawn for every lattice cell so layouts stay stable
            // under changes in rack placement
            let dx = rng.random_range(-jitter..=jitter);
            let dy = rng.random_range(-jitter..=jitter);
            if alive[i] {
                new_id[i] = b.node(c as f64 * spacing + dx, r as f64 * spacing + dy);
            }
        }
    }
    let near_rack = |i: usize| {
        let (r, c) = (i / cols, i % cols);
        let mut hit = false;
        if r > 0 {
            hit |= !alive[cell(r - 1, c)];
        }
        if r + 1 < rows {
            hit |= !alive[cell(r + 1, c)];
        }
        if c > 0 {
            hit |= !alive[cell(r, c - 1)];
        }
        if c + 1 < cols {
            hit |= !alive[cell(r, c + 1)];
        }
        hit
    };
    for i in 0..n {
        if alive[i] && near_rack(i) {
            b.ports[new_id[i]] = true;
        }
    }
    for &(a, z) in &lattice_links {
        // drawn for every lattice link, see jitter above
        let w = if winding > 1.0 {
            rng.random_range(1.0..=winding)
        } else {
            1.0
        };
        if alive[a] && alive[z] {
            let w = if near_rack(a) || near_rack(z) { w } else { 1.0 };
            b.link(new_id[a], new_id[z], w);
        }
    }
}

fn lattice_connected(alive: &[bool], links: &[(usize, usize)]) -> bool {
    let n = alive.len();
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in links {
        if alive[a] && alive[b] {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    let Some(start) = alive.iter().position(|&a| a) else {
        return false;
    };
    let mut seen = vec![false; n];
    seen[start] = true;
    let mut stack = vec![start];
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    (0..n).all(|i| !alive[i] || seen[i])
}

fn hub(b: &mut Builder, spokes: usize, rings: usize, ring_gap: f64, docks: usize, winding_max: f64, seed: u64) {
    let mut rng = seeds::rng_for(seed, "map.hub");
    let center = b.node(0.0, 0.0);
    let mut spoke_nodes = vec![Vec::with_capacity(rings); spokes];
    let step = TAU / spokes as f64;
    for (s, nodes) in spoke_nodes.iter_mut().enumerate() {
        let theta = s as f64 * step;
        let mut prev = center;
        for r in 1..=rings {
            let radius = r as f64 * ring_gap;
            let id = b.node(radius * theta.cos(), radius * theta.sin());
            let w = if r > 1 && winding_max > 1.0 {
                rng.random_range(1.0..=winding_max)
            } else {
                1.0
            };
            b.link(prev, id, w);
            nodes.push(id);
            prev = id;
        }
        b.ports[prev] = true;
    }
    for r in 1..=rings {
        let arc = r as f64 * ring_gap * step;
        for s in 0..spokes {
            let a = spoke_nodes[s][r - 1];
            let z = spoke_nodes[(s + 1) % spokes][r - 1];
            b.link_len(a, z, arc);
        }
    }
    for d in 0..docks {
        // docks sit between spokes, close to the hub
        let theta = (d as f64 + 0.5) * step;
        let radius = 0.5 * ring_gap;
        let id = b.node(radius * theta.cos(), radius * theta.sin());
        b.link(center, id, 1.0);
        b.ports[id] = true;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn winding(aisles: usize) -> LayoutParams {
        match LayoutParams::default_for(MapFamily::WindingRacks) {
            LayoutParams::WindingRacks {
                slots,
                aisle_gap,
                slot_gap,
                winding_max,
                ..
            } => LayoutParams::WindingRacks {
                aisles,
                slots,
                aisle_gap,
                slot_gap,
                winding_max,
            },
            _ => unreachable!(),
        }
    }

    #[test]
    fn winding_is_deterministic() {
        let a = builtin_map(&winding(2), 7).unwrap();
        let b = builtin_map(&winding(2), 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn random_racks_depend_on_seed() {
        let p = LayoutParams::default_for(MapFamily::RandomRacks);
        let a = builtin_map(&p, 1).unwrap();
        let b = builtin_map(&p, 2).unwrap();
        assert!(a.is_connected() && b.is_connected());
        assert_ne!(a.nodes(), b.nodes());
    }

    #[test]
    fn hub_center_has_max_degree() {
        let p = LayoutParams::Hub {
            spokes: 4,
            rings: 4,
            ring_gap: 3.0,
            docks: 2,
            winding_max: 1.2,
        };
        let m = builtin_map(&p, 0).unwrap();
        let hub_degree = m.degree(NodeId(0));
        for n in m.nodes().iter().skip(1) {
            assert!(m.degree(n.id) < hub_degree, "node {} ties the hub", n.id);
        }
    }

    #[test]
    fn default_sizes_are_moderate() {
        for n in 1..=3 {
            let m = numbered_map(n).unwrap();
            assert!((30..=60).contains(&m.node_count()), "map {n}: {} nodes", m.node_count());
            assert!(m.ports().count() >= 4);
            assert!(m.zone_ids().len() > 1);
        }
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(matches!(builtin_map(&winding(1), 0), Err(Error::InvalidParams(_))));
        let p = LayoutParams::Hub {
            spokes: 2,
            rings: 3,
            ring_gap: 1.0,
            docks: 0,
            winding_max: 1.0,
        };
        assert!(builtin_map(&p, 0).is_err());
        assert!(numbered_map(4).is_err());
    }

    #[test]
    fn lengths_never_shorter_than_chord() {
        for n in 1..=3 {
            let m = numbered_map(n).unwrap();
            for e in m.edges() {
                let d = m.euclidean(e.from, e.to).unwrap();
                assert!(e.length >= d - 1e-12);
            }
        }
    }
}
