//! Three-way path comparison on Map 2. One floor zone turns moderately
//! rough after 20 calls; after 40 calls each provider plans the same pair
//! and the paths are executed in the same world.
//!
//! `cargo run --example compare_paths`

use ttroute::experiments::{compare_paths, edges_in_zone, ExperimentConfig, FloorEvent, MapSelector, Scenario};
use ttroute::planner::format_node_sequence;
use ttroute::world_sim::RoughnessLevel;
use ttroute::NodeId;

fn main() -> ttroute::Result<()> {
    let map = MapSelector::Builtin(2).load()?;
    let od = (NodeId(0), NodeId(18));
    let zone = 1;
    let cfg = ExperimentConfig {
        map: MapSelector::Builtin(2),
        repetitions: 40,
        od_list: Some(vec![od]),
        scenario: Scenario::Custom {
            initial: vec![],
            events: vec![FloorEvent {
                after_call: 20,
                zone,
                level: RoughnessLevel::Moderate,
            }],
            battery: true,
        },
        ..ExperimentConfig::default()
    };
    let report = compare_paths(&map, od, &cfg, 0)?;
    println!("{} from {} to {}, zone {zone} moderate", report.map, od.0, od.1);
    for p in &report.paths {
        println!(
            "{:<9} {:<32} zone edges {}  true {:.2}s ({:+.2}%)",
            p.provider.name(),
            format_node_sequence(&p.path.nodes),
            edges_in_zone(&map, &p.path, zone),
            p.true_total,
            p.saving_pct_vs_heuristic
        );
    }
    println!("edges shared by all three: {}", report.shared_edges.len());
    Ok(())
}
