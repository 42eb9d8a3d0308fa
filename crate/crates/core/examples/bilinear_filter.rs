//! The bilinear state-space filter tracking a travel time that drifts
//! upward. Shows the psi terms, the last row of the transition matrix and
//! the filter's prior/posterior per step.
//!
//! `cargo run --example bilinear_filter [order]`

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use ttroute::estimators::{bilinear_kf_step, build_transition, psi_terms, BilinearKfState, BilinearParams};

fn main() -> ttroute::Result<()> {
    let r: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut params = BilinearParams::sampled(r, 0.2, 0.1, 0.1, 1.0, 0.1, &mut rng)?;
    params.mu = 10.0;

    let x0 = vec![10.0; r];
    let xi0 = vec![0.1; r];
    println!("psi for a flat window: {:?}", rounded(&psi_terms(&params, &x0)?));
    let f = build_transition(&params, &x0, &xi0)?;
    let last: Vec<f64> = f.row(f.nrows() - 1).iter().copied().collect();
    println!("last row of F ({}x{}): {:?}", f.nrows(), f.ncols(), rounded(&last));

    let mut state = BilinearKfState::new(&xi0, &x0, BilinearKfState::initial_covariance(r, 1.0))?;
    let xi = Normal::new(0.1, 0.1f64.sqrt()).expect("valid sd");
    let noise = Normal::new(0.0, 0.2).expect("valid sd");
    println!("\n  k   truth  observed    prior  posterior  |K|");
    for k in 1..=30 {
        let truth = 10.0 + 0.08 * k as f64;
        let y = truth + noise.sample(&mut rng);
        let step = bilinear_kf_step(&mut state, &params, y, xi.sample(&mut rng))?;
        params.mu += (y - params.mu) / (k as f64 + 1.0);
        if k % 3 == 0 {
            println!(
                "{k:>3} {truth:>7.2} {y:>9.3} {:>8.3} {:>10.3} {:>5.3}",
                step.prior, step.posterior, step.gain_norm
            );
        }
    }
    Ok(())
}

fn rounded(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| (x * 1e4).round() / 1e4).collect()
}
