//! Dynamic-provider runs at decreasing observation noise. Prints the mean
//! executed true cost per SNR and how many seeds see it fall monotonically.
//!
//! `cargo run --release --example sweep_snr [map]`

use ttroute::experiments::{non_increasing_seed_count, sweep_snr, ExperimentConfig, MapSelector};
use ttroute::{ProviderKind, Snr};

fn main() -> ttroute::Result<()> {
    let map = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    let cfg = ExperimentConfig {
        map: MapSelector::Builtin(map),
        ..ExperimentConfig::default()
    };
    let levels = [Snr::db(10.0)?, Snr::db(25.0)?, Snr::db(50.0)?];
    let runs = sweep_snr(&cfg, &levels)?;
    for (snr, s) in levels.iter().zip(&runs) {
        println!(
            "snr {:>4} dB: dynamic {:.2}s ({:+.2}% vs heuristic)",
            snr.value(),
            s.mean_true_cost(ProviderKind::Dynamic),
            s.mean_saving_pct(ProviderKind::Dynamic)
        );
    }
    let n = non_increasing_seed_count(&runs, ProviderKind::Dynamic, &cfg.seeds);
    println!("cost non-increasing with SNR on {n}/{} seeds", cfg.seeds.len());
    Ok(())
}
