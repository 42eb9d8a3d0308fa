/// Fixed-point accumulator for means that must not depend on summation
/// order or on how many times a cycle of values repeats.
///
/// Values are scaled by 2^64 and summed as integers, so a sequence repeated
/// `m` times has exactly `m` times the sum and the same mean.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ExactMean {
    sum: i128,
    count: u64,
}

const SCALE: f64 = 18_446_744_073_709_551_616.0; // 2^64

impl ExactMean {
    pub fn push(&mut self, x: f64) {
        debug_assert!(x.is_finite() && x.abs() < 1e15);
        self.sum += (x * SCALE) as i128;
        self.count += 1;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// `NaN` when empty.
    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            return f64::NAN;
        }
        (self.sum / self.count as i128) as f64 / SCALE
    }
}

impl FromIterator<f64> for ExactMean {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut m = ExactMean::default();
        for x in iter {
            m.push(x);
        }
        m
    }
}

/// `(baseline - candidate) / baseline` in percent.
pub fn saving_pct(baseline: f64, candidate: f64) -> f64 {
    100.0 * (baseline - candidate) / baseline
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_is_nan() {
        assert!(ExactMean::default().mean().is_nan());
    }

    #[test]
    fn saving() {
        assert_eq!(saving_pct(200.0, 170.0), 15.0);
    }

    proptest! {
        #[test]
        fn repeated_cycle_keeps_mean(
            cycle in proptest::collection::vec(0.01f64..5000.0, 1..12),
            reps in 1usize..9,
        ) {
            let once: ExactMean = cycle.iter().copied().collect();
            let many: ExactMean = (0..reps).flat_map(|_| cycle.iter().copied()).collect();
            prop_assert_eq!(once.mean().to_bits(), many.mean().to_bits());
        }

        #[test]
        fn close_to_float_mean(xs in proptest::collection::vec(0.01f64..5000.0, 1..50)) {
            let m: ExactMean = xs.iter().copied().collect();
            let naive = xs.iter().sum::<f64>() / xs.len() as f64;
            prop_assert!((m.mean() - naive).abs() < 1e-9);
        }
    }
}
