//! Builds the three numbered maps and a few reseeded variants, prints their
//! size and zone layout, and optionally writes them as JSON.
//!
//! `cargo run --example generate_maps [out_dir]`

use ttroute::topo_map::{builtin_map, numbered_map, save_map, LayoutParams, MapFamily};

fn main() -> ttroute::Result<()> {
    let out = std::env::args().nth(1).map(std::path::PathBuf::from);
    let mut maps = Vec::new();
    for n in 1..=3 {
        maps.push(numbered_map(n)?);
    }
    for (family, seed) in [(MapFamily::RandomRacks, 11), (MapFamily::Hub, 12)] {
        maps.push(builtin_map(&LayoutParams::default_for(family), seed)?);
    }
    for map in &maps {
        let ports = map.ports().count();
        let total_len: f64 = map.edges().iter().map(|e| e.length).sum();
        println!(
            "{:<22} {:>3} nodes {:>3} edges {:>2} ports {:>2} zones  {:>7.1} m of track",
            map.meta().name,
            map.node_count(),
            map.edge_count(),
            ports,
            map.zone_ids().len(),
            total_len
        );
    }
    if let Some(dir) = out {
        std::fs::create_dir_all(&dir).expect("create output directory");
        for (i, map) in maps.iter().enumerate() {
            save_map(map, dir.join(format!("{i}_{}.json", map.meta().name)))?;
        }
        println!("written to {}", dir.display());
    }
    Ok(())
}
