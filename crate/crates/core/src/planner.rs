//! Dijkstra with edge costs requested lazily from a provider.
//!
//! When a node `u` is settled, each unsettled neighbor's edge cost is
//! requested once, with traversal depth `k = npred(u) + 1`, the cost of the
//! edge leading into `u`, and the whole chain of estimated costs from the
//! source. Since settled neighbors are skipped, every edge is estimated at
//! most once per planning session.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::{EdgeCostEstimator, EdgeQuery};
use crate::topo_map::{EdgeId, NodeId, TopologyMap};

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct PathResult {
    pub nodes: Vec<NodeId>,
    pub edges: Vec<EdgeId>,
    /// Estimated cost of each edge, as returned by the provider.
    pub est_costs: Vec<f64>,
    /// Depth `k` at which each edge's cost was requested.
    pub depths: Vec<usize>,
    pub total_est_cost: f64,
}

impl PathResult {
    pub fn hop_count(&self) -> usize {
        self.edges.len()
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Entry {
    dist: f64,
    node: NodeId,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dist.total_cmp(&other.dist).then(self.node.cmp(&other.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Copy)]
struct Pred {
    node: NodeId,
    edge: EdgeId,
    cost: f64,
    depth: usize,
}

/// Cheapest path from `source` to `dest` under the provider's estimates.
/// Queue ties are broken towards the smaller node id.
pub fn plan<P: EdgeCostEstimator + ?Sized>(
    map: &TopologyMap,
    provider: &mut P,
    source: NodeId,
    dest: NodeId,
) -> Result<PathResult> {
    map.node(source)?;
    map.node(dest)?;
    let n = map.node_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred: Vec<Option<Pred>> = vec![None; n];
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    let mut prefix = Vec::new();

    dist[source.0] = 0.0;
    heap.push(Reverse(Entry { dist: 0.0, node: source }));
    while let Some(Reverse(Entry { dist: d, node: u })) = heap.pop() {
        if settled[u.0] {
            continue;
        }
        settled[u.0] = true;
        if u == dest {
            break;
        }
        chain_costs(&pred, u, &mut prefix);
        let k = prefix.len() + 1;
        let prev_cost = prefix.last().copied().unwrap_or(0.0);
        for &(v, e) in map.neighbors(u) {
            if settled[v.0] {
                continue;
            }
            let query = EdgeQuery {
                from: u,
                to: v,
                edge: e,
                depth: k,
                prev_cost,
                prefix_costs: &prefix,
            };
            let c = provider.estimate(map, &query)?;
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::BadObservation(c));
            }
            let alt = d + c;
            if alt < dist[v.0] {
                dist[v.0] = alt;
                pred[v.0] = Some(Pred {
                    node: u,
                    edge: e,
                    cost: c,
                    depth: k,
                });
                heap.push(Reverse(Entry { dist: alt, node: v }));
            }
        }
    }

    if !settled[dest.0] {
        return Err(Error::Unreachable { from: source, to: dest });
    }
    let mut result = PathResult {
        nodes: vec![dest],
        total_est_cost: dist[dest.0],
        ..PathResult::default()
    };
    let mut cur = dest;
    while let Some(p) = pred[cur.0] {
        result.nodes.push(p.node);
        result.edges.push(p.edge);
        result.est_costs.push(p.cost);
        result.depths.push(p.depth);
        cur = p.node;
    }
    result.nodes.reverse();
    result.edges.reverse();
    result.est_costs.reverse();
    result.depths.reverse();
    Ok(result)
}

/// Estimated edge costs from the source down to `u`, source first.
fn chain_costs(pred: &[Option<Pred>], u: NodeId, out: &mut Vec<f64>) {
    out.clear();
    let mut cur = u;
    while let Some(p) = pred[cur.0] {
        out.push(p.cost);
        cur = p.node;
    }
    out.reverse();
}

/// Sum of `edge_costs` (indexed by edge id) along a node sequence.
pub fn path_total_cost(map: &TopologyMap, nodes: &[NodeId], edge_costs: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for w in nodes.windows(2) {
        let e = map.edge_between(w[0], w[1]).ok_or(Error::MissingEdge(w[0], w[1]))?;
        total += edge_costs.get(e.0).copied().ok_or(Error::MissingEdge(w[0], w[1]))?;
    }
    Ok(total)
}

/// Exhaustive search over simple paths. Exponential; meant as a reference
/// on small maps. Ties go to the lexicographically smallest node sequence.
pub fn brute_force_shortest(map: &TopologyMap, edge_costs: &[f64], source: NodeId, dest: NodeId) -> Result<PathResult> {
    map.node(source)?;
    map.node(dest)?;
    if edge_costs.len() != map.edge_count() {
        return Err(Error::InvalidParams(format!(
            "expected {} edge costs, got {}",
            map.edge_count(),
            edge_costs.len()
        )));
    }
    struct Search<'a> {
        map: &'a TopologyMap,
        costs: &'a [f64],
        dest: NodeId,
        visited: Vec<bool>,
        stack: Vec<NodeId>,
        best: Option<(f64, Vec<NodeId>)>,
    }
    impl Search<'_> {
        fn go(&mut self, u: NodeId, acc: f64) {
            if u == self.dest {
                let better = match &self.best {
                    None => true,
                    Some((c, seq)) => acc < *c || (acc == *c && self.stack < *seq),
                };
                if better {
                    self.best = Some((acc, self.stack.clone()));
                }
                return;
            }
            for &(v, e) in self.map.neighbors(u) {
                if self.visited[v.0] {
                    continue;
                }
                self.visited[v.0] = true;
                self.stack.push(v);
                self.go(v, acc + self.costs[e.0]);
                self.stack.pop();
                self.visited[v.0] = false;
            }
        }
    }
    let mut s = Search {
        map,
        costs: edge_costs,
        dest,
        visited: vec![false; map.node_count()],
        stack: vec![source],
        best: None,
    };
    s.visited[source.0] = true;
    s.go(source, 0.0);
    let (total, nodes) = s.best.ok_or(Error::Unreachable { from: source, to: dest })?;
    let mut result = PathResult {
        total_est_cost: total,
        ..PathResult::default()
    };
    for (i, w) in nodes.windows(2).enumerate() {
        let e = map.edge_between(w[0], w[1]).expect("walked edge");
        result.edges.push(e);
        result.est_costs.push(edge_costs[e.0]);
        result.depths.push(i + 1);
    }
    result.nodes = nodes;
    Ok(result)
}

/// One executed planning call, as written to `paths.csv`.
#[derive(Clone, Debug, PartialEq)]
pub struct PathRecord {
    pub call_index: usize,
    pub source: NodeId,
    pub dest: NodeId,
    pub nodes: Vec<NodeId>,
    pub total_est_cost: f64,
    pub total_true_cost: f64,
}

pub fn format_node_sequence(nodes: &[NodeId]) -> String {
    nodes.iter().map(|n| n.0.to_string()).collect::<Vec<_>>().join("-")
}

pub fn write_paths_csv<W: Write>(rows: &[PathRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["call_index", "source", "dest", "node_sequence", "total_est_cost", "total_true_cost"])?;
    for r in rows {
        w.write_record([
            r.call_index.to_string(),
            r.source.to_string(),
            r.dest.to_string(),
            format_node_sequence(&r.nodes),
            r.total_est_cost.to_string(),
            r.total_true_cost.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}
