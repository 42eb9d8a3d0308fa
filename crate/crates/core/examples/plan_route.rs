//! Plans between two ports of Map 1 with the Euclidean heuristic, then with
//! frozen costs that make every edge around one node slow.
//!
//! `cargo run --example plan_route`

use ttroute::planner::format_node_sequence;
use ttroute::topo_map::{heuristic_cost, numbered_map};
use ttroute::{plan, CostProvider};

fn main() -> ttroute::Result<()> {
    let map = numbered_map(1)?;
    let ports: Vec<_> = map.ports().collect();
    let (s, t) = (ports[0], ports[ports.len() - 1]);

    let mut heuristic = CostProvider::heuristic(0.4);
    let path = plan(&map, &mut heuristic, s, t)?;
    println!("heuristic: {}  ({:.2}s, depths {:?})", format_node_sequence(&path.nodes), path.total_est_cost, path.depths);

    // every edge touching the heuristic route's middle node is five times slower
    let slow = path.nodes[path.nodes.len() / 2];
    let costs: Vec<f64> = map
        .edges()
        .iter()
        .map(|e| {
            let base = heuristic_cost(&map, e.from, e.to, 0.4).expect("edge endpoints exist");
            if e.touches(slow) { 5.0 * base } else { base }
        })
        .collect();
    let mut frozen = CostProvider::frozen(costs);
    let detour = plan(&map, &mut frozen, s, t)?;
    println!("avoiding node {slow}: {}  ({:.2}s)", format_node_sequence(&detour.nodes), detour.total_est_cost);
    assert!(!detour.nodes.contains(&slow));
    Ok(())
}
