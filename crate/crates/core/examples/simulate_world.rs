//! Drives one robot back and forth along a fixed route of Map 2 and prints
//! how the executed travel time follows the battery, then what a rough zone
//! and a noisy sensor do to the observations.
//!
//! `cargo run --example simulate_world`

use ttroute::topo_map::numbered_map;
use ttroute::world_sim::RoughnessLevel;
use ttroute::{plan, CostProvider, Snr, WorldConfig, WorldState};

fn main() -> ttroute::Result<()> {
    let map = numbered_map(2)?;
    let ports: Vec<_> = map.ports().collect();
    let route = plan(&map, &mut CostProvider::heuristic(0.4), ports[0], ports[ports.len() - 1])?;
    let mut world = WorldState::new(&map, WorldConfig::default(), 42)?;

    println!("trip  soc    executed");
    for trip in 1..=60 {
        let report = world.execute_path(&map, &route)?;
        if trip % 6 == 0 {
            println!("{trip:>4}  {:.3}  {:>7.2}s", world.battery.soc(), report.true_total());
        }
        if report.depleted {
            println!("battery empty after trip {trip}");
            world.recharge();
        }
    }

    let zone = map.edge(route.edges[0]).zone_id;
    world.recharge();
    let smooth = world.execute_path(&map, &route)?.true_total();
    world.recharge();
    world.floor.set(zone, RoughnessLevel::Heavy);
    let rough = world.execute_path(&map, &route)?.true_total();
    println!("\nzone {zone} heavy: {smooth:.2}s -> {rough:.2}s");

    for snr in ["inf", "25", "10"] {
        let snr: Snr = snr.parse()?;
        world.set_snr(snr);
        let report = world.execute_path(&map, &route)?;
        let err: f64 = report.steps.iter().map(|s| (s.observed - s.true_time).abs()).sum::<f64>()
            / report.steps.len() as f64;
        println!("snr {snr:>3} dB: mean |observed - true| per edge {err:.4}s");
    }
    Ok(())
}
