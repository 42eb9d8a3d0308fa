//! Closed-loop repetition runs on the three built-in maps: mean executed
//! true cost per provider, savings against the heuristic, and how many
//! seeds keep the order dynamic <= static <= heuristic.
//!
//! `cargo run --release --example experiment_repetitions [repetitions]`

use ttroute::experiments::{run_repetitions, ExperimentConfig, MapSelector};
use ttroute::ProviderKind;

fn main() -> ttroute::Result<()> {
    let repetitions = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(80);
    for n in 1..=3 {
        let cfg = ExperimentConfig {
            map: MapSelector::Builtin(n),
            repetitions,
            ..ExperimentConfig::default()
        };
        let s = run_repetitions(&cfg)?;
        let ordered = cfg
            .seeds
            .iter()
            .filter(|&&seed| {
                let h = s.seed_true_cost(ProviderKind::Heuristic, seed).unwrap();
                let st = s.seed_true_cost(ProviderKind::Static, seed).unwrap();
                let d = s.seed_true_cost(ProviderKind::Dynamic, seed).unwrap();
                d <= st && st <= h
            })
            .count();
        println!(
            "map {n}: heuristic {:.2}s  static {:.2}s ({:+.2}%)  dynamic {:.2}s ({:+.2}%)  ordered on {ordered}/{} seeds",
            s.mean_true_cost(ProviderKind::Heuristic),
            s.mean_true_cost(ProviderKind::Static),
            s.mean_saving_pct(ProviderKind::Static),
            s.mean_true_cost(ProviderKind::Dynamic),
            s.mean_saving_pct(ProviderKind::Dynamic),
            cfg.seeds.len(),
        );
        for c in &s.cells {
            print!("{}:{}:{:.1} ", c.provider, c.seed, c.saving_pct_vs_heuristic);
        }
        println!();
    }
    Ok(())
}
