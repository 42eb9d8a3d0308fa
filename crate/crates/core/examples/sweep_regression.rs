//! Dynamic-provider runs for every regression order 2..=9 on one map.
//!
//! `cargo run --release --example sweep_regression [map] [repetitions]`

use ttroute::experiments::{sweep_regression, ExperimentConfig, MapSelector, REGRESSION_RANGE};
use ttroute::ProviderKind;

fn main() -> ttroute::Result<()> {
    let mut args = std::env::args().skip(1);
    let map = args.next().and_then(|s| s.parse().ok()).unwrap_or(2);
    let repetitions = args.next().and_then(|s| s.parse().ok()).unwrap_or(80);
    let cfg = ExperimentConfig {
        map: MapSelector::Builtin(map),
        repetitions,
        ..ExperimentConfig::default()
    };
    let orders: Vec<usize> = REGRESSION_RANGE.collect();
    let runs = sweep_regression(&cfg, &orders)?;
    println!("  r  mean true cost  saving  fallbacks");
    for (r, s) in orders.iter().zip(&runs) {
        let fallbacks: usize = s.cells_for(ProviderKind::Dynamic).map(|c| c.diagnostics.fallbacks).sum();
        println!(
            "{r:>3} {:>14.3}s {:>+6.2}% {fallbacks:>10}",
            s.mean_true_cost(ProviderKind::Dynamic),
            s.mean_saving_pct(ProviderKind::Dynamic)
        );
    }
    Ok(())
}
