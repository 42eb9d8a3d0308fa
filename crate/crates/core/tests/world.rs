//! Ground-truth world model: battery curve shape, degradation trend over
//! repeated runs, and observation noise scaling with SNR.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ttroute::topo_map::numbered_map;
use ttroute::world_sim::{battery_factor, observe_with_snr, BatteryModel};
use ttroute::{plan, CostProvider, Snr, WorldConfig, WorldState};

/// Signs of successive differences with runs of equal sign merged.
fn sign_runs(values: &[f64]) -> Vec<i8> {
    let mut runs: Vec<i8> = Vec::new();
    for w in values.windows(2) {
        let d = w[1] - w[0];
        let s = if d > 1e-12 { 1 } else if d < -1e-12 { -1 } else { continue };
        if runs.last() != Some(&s) {
            runs.push(s);
        }
    }
    runs
}

fn soc_grid() -> Vec<f64> {
    (0..=200).map(|i| 1.0 - i as f64 / 200.0).collect()
}

#[test]
fn hump_curve_rises_falls_then_rises() {
    let model = BatteryModel::default();
    let curve: Vec<f64> = soc_grid().iter().map(|&s| battery_factor(&model, s)).collect();
    assert_eq!(sign_runs(&curve), vec![1, -1, 1]);

    let progressive: Vec<f64> = curve
        .iter()
        .scan((0.0, 0usize), |acc, &f| {
            acc.0 += f;
            acc.1 += 1;
            Some(acc.0 / acc.1 as f64)
        })
        .collect();
    assert_eq!(sign_runs(&progressive), vec![1, -1, 1]);
}

#[test]
fn without_hump_the_curve_only_rises() {
    let model = BatteryModel::without_hump();
    let curve: Vec<f64> = soc_grid().iter().map(|&s| battery_factor(&model, s)).collect();
    assert_eq!(sign_runs(&curve), vec![1]);
    assert_eq!(battery_factor(&model, 1.0), 1.0);
    assert!(battery_factor(&model, 0.1) > battery_factor(&model, 0.5));
}

fn slope(ys: &[f64]) -> f64 {
    let n = ys.len() as f64;
    let mx = (n - 1.0) / 2.0;
    let my = ys.iter().sum::<f64>() / n;
    let (mut num, mut den) = (0.0, 0.0);
    for (i, y) in ys.iter().enumerate() {
        num += (i as f64 - mx) * (y - my);
        den += (i as f64 - mx).powi(2);
    }
    num / den
}

#[test]
fn repeated_runs_slow_down_as_the_battery_drains() {
    let map = numbered_map(1).unwrap();
    let mut provider = CostProvider::heuristic(0.4);
    let path = (0..map.node_count())
        .flat_map(|t| plan(&map, &mut provider, ttroute::NodeId(0), ttroute::NodeId(t)).ok())
        .find(|p| p.edges.len() == 5)
        .expect("a five-edge route from node 0");
    for battery in [BatteryModel::default(), BatteryModel::without_hump()] {
        let cfg = WorldConfig {
            discharge_per_second: 4e-4,
            battery,
            ..WorldConfig::default()
        };
        let mut world = WorldState::new(&map, cfg, 9).unwrap();
        let means: Vec<f64> = (0..50)
            .map(|_| {
                let r = world.execute_path(&map, &path).unwrap();
                assert!(r.completed);
                r.true_total() / r.steps.len() as f64
            })
            .collect();
        assert!(slope(&means) > 0.0);
        let early: f64 = means[..10].iter().sum();
        let late: f64 = means[40..].iter().sum();
        assert!(late > early);
    }
}

fn noise_variance(snr: Snr, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 10_000;
    let errs: Vec<f64> = (0..n).map(|_| observe_with_snr(10.0, snr, 10.0, &mut rng) - 10.0).collect();
    let mean = errs.iter().sum::<f64>() / n as f64;
    errs.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1) as f64
}

#[test]
fn noise_variance_scales_with_snr() {
    let ratio = noise_variance(Snr::db(10.0).unwrap(), 1) / noise_variance(Snr::db(50.0).unwrap(), 2);
    assert!((ratio / 1e4 - 1.0).abs() < 0.2, "variance ratio {ratio}");
}

#[test]
fn world_noise_matches_snr_in_closed_loop() {
    let map = numbered_map(2).unwrap();
    let ports: Vec<_> = map.ports().collect();
    let path = plan(&map, &mut CostProvider::heuristic(0.4), ports[0], ports[1]).unwrap();
    let errors = |snr: &str| -> f64 {
        let mut world = WorldState::new(&map, WorldConfig::default(), 4).unwrap();
        world.set_snr(snr.parse().unwrap());
        let mut sum = 0.0;
        let mut n = 0;
        for _ in 0..30 {
            for s in world.execute_path(&map, &path).unwrap().steps {
                sum += (s.observed - s.true_time).abs();
                n += 1;
            }
        }
        sum / n as f64
    };
    let (clean, mid, loud) = (errors("inf"), errors("25"), errors("10"));
    assert_eq!(clean, 0.0);
    assert!(mid > 0.0 && loud > mid);
}
