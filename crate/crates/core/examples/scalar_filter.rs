//! The random-walk filter on one edge: a hand-checkable single update, then
//! a noisy series whose level steps up halfway, as a battery-worn edge would.
//!
//! `cargo run --example scalar_filter`

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use ttroute::estimators::ScalarKfState;

fn main() -> ttroute::Result<()> {
    let mut kf = ScalarKfState::new(10.0, 2.0, 0.5, 1.0)?;
    let step = kf.step(12.0)?;
    println!(
        "x=10 p=2 q=0.5 r=1 y=12: gain {:.5}, x' {:.5}, p' {:.5}",
        step.gain, kf.x_hat, kf.p
    );

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let noise = Normal::new(0.0, 0.3).expect("valid sd");
    let mut kf = ScalarKfState::new(8.0, 1.0, 0.05, 0.1)?;
    println!("\n  k  truth  observed  estimate  variance");
    for k in 1..=40 {
        let truth = if k <= 20 { 8.0 } else { 9.5 };
        let y = truth + noise.sample(&mut rng);
        kf.step(y)?;
        if k % 4 == 0 {
            println!("{k:>3} {truth:>6.2} {y:>9.3} {:>9.3} {:>9.4}", kf.x_hat, kf.p);
        }
    }
    Ok(())
}
