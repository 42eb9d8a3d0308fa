//! How far a heuristic total understates reality when some of its edges
//! cross rough floor: the estimate plus a fixed extra delay per rough edge,
//! next to the executed cost in a world where those zones are heavy.
//!
//! `cargo run --example real_cost_delta`

use ttroute::experiments::{corrected_total, real_cost_delta};
use ttroute::topo_map::numbered_map;
use ttroute::world_sim::RoughnessLevel;
use ttroute::{plan, CostProvider, WorldConfig, WorldState};

fn main() -> ttroute::Result<()> {
    println!("98.210s with 12 rough edges:");
    for delta in [0.0, 0.5, 2.0] {
        println!("  delta {delta:.1}s -> {:.3}s", corrected_total(98.210, 12, delta));
    }

    let map = numbered_map(2)?;
    let ports: Vec<_> = map.ports().collect();
    let path = plan(&map, &mut CostProvider::heuristic(0.4), ports[0], ports[ports.len() - 1])?;
    let mut world = WorldState::new(&map, WorldConfig::default(), 5)?;
    let zones: Vec<u32> = path.edges.iter().map(|e| map.edge(*e).zone_id).take(3).collect();
    for z in &zones {
        world.floor.set(*z, RoughnessLevel::Heavy);
    }
    let rough = path.edges.iter().filter(|e| zones.contains(&map.edge(**e).zone_id)).count();
    let executed = world.execute_path(&map, &path)?.true_total();
    println!("\nheuristic route on map 2: {} edges, {rough} on heavy floor", path.edges.len());
    println!("  estimated {:.2}s, executed {executed:.2}s", path.total_est_cost);
    let per_edge = (executed - path.total_est_cost) / rough as f64;
    println!("  delta that closes the gap: {per_edge:.2}s per rough edge");
    println!("  corrected with that delta: {:.2}s", real_cost_delta(&path, rough, per_edge)?);
    Ok(())
}
