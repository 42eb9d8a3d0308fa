//! Bilinear state-space travel-time filter.
//!
//! The travel-time series follows a bilinear ARMA-type recursion of order
//! `r`:
//!
//! ```text
//! X(k) = mu + sum_l psi_l * xi(k-l) - sum_i phi_i * X(k-i) + xi(k)
//! psi_l = b_l + sum_{i=1..l} c_{l,i} * X(k-i)
//! ```
//!
//! written in state-space form over
//! `s(k) = (1, xi(k-r+1), ..., xi(k), X(k-r+1), ..., X(k))`, a vector of
//! dimension `2r + 1`. The transition matrix `F` depends on the X window
//! through the `psi` terms; the innovation enters through the selector `V`
//! (newest xi slot and newest X slot) and the observation selects the
//! newest X through `H`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct BilinearParams {
    /// Regression order; the length of both the xi and X windows.
    pub order: usize,
    /// AR constants `phi_1..phi_r`.
    pub phi: Vec<f64>,
    /// Innovation coefficients `b_1..b_r`.
    pub b: Vec<f64>,
    /// Bilinear coefficients; entry `(l-1, i-1)` is `c_{l,i}`.
    pub c: DMatrix<f64>,
    /// Running mean of the travel time.
    pub mu: f64,
    /// Process-noise variance, spread over the innovation slots.
    pub q_scale: f64,
    /// Observation-noise variance.
    pub r_scale: f64,
}

impl BilinearParams {
    pub fn new(order: usize, phi: Vec<f64>, b: Vec<f64>, c: DMatrix<f64>, q_scale: f64, r_scale: f64) -> Result<Self> {
        let p = BilinearParams {
            order,
            phi,
            b,
            c,
            mu: 0.0,
            q_scale,
            r_scale,
        };
        p.validate()?;
        Ok(p)
    }

    /// `phi_i = phi` for all i, `b` and `c` entries drawn from
    /// `N(coef_mean, coef_var)`.
    pub fn sampled<R: Rng + ?Sized>(
        order: usize,
        phi: f64,
        coef_mean: f64,
        coef_var: f64,
        q_scale: f64,
        r_scale: f64,
        rng: &mut R,
    ) -> Result<Self> {
        if order < 2 {
            return Err(Error::InvalidConfig(format!("regression order must be >= 2, got {order}")));
        }
        let dist = Normal::new(coef_mean, coef_var.max(0.0).sqrt())
            .map_err(|e| Error::InvalidConfig(format!("coefficient distribution: {e}")))?;
        let b: Vec<f64> = (0..order).map(|_| dist.sample(rng)).collect();
        let c = DMatrix::from_fn(order, order, |_, _| dist.sample(rng));
        BilinearParams::new(order, vec![phi; order], b, c, q_scale, r_scale)
    }

    pub fn dim(&self) -> usize {
        2 * self.order + 1
    }

    fn validate(&self) -> Result<()> {
        let r = self.order;
        if r < 2 {
            return Err(Error::InvalidConfig(format!("regression order must be >= 2, got {r}")));
        }
        if self.phi.len() != r || self.b.len() != r || self.c.nrows() != r || self.c.ncols() != r {
            return Err(Error::InvalidConfig("coefficient shapes must match the regression order".into()));
        }
        let finite = self.phi.iter().chain(&self.b).chain(self.c.iter()).all(|v| v.is_finite());
        if !finite || !self.mu.is_finite() {
            return Err(Error::InvalidConfig("coefficients must be finite".into()));
        }
        if !(self.q_scale >= 0.0 && self.r_scale >= 0.0) {
            return Err(Error::InvalidConfig("noise scales must be non-negative".into()));
        }
        Ok(())
    }
}

/// `psi_1..psi_r` for an X window ordered oldest to newest.
pub fn psi_terms(params: &BilinearParams, x_history: &[f64]) -> Result<Vec<f64>> {
    let r = params.order;
    if x_history.len() != r {
        return Err(Error::HistoryLength {
            expected: r,
            got: x_history.len(),
        });
    }
    // X(k-i) is x_history[r - i]
    Ok((1..=r)
        .map(|l| {
            params.b[l - 1]
                + (1..=l)
                    .map(|i| params.c[(l - 1, i - 1)] * x_history[r - i])
                    .sum::<f64>()
        })
        .collect())
}

/// State transition matrix for the given windows (both oldest to newest).
pub fn build_transition(params: &BilinearParams, x_history: &[f64], xi_history: &[f64]) -> Result<DMatrix<f64>> {
    let r = params.order;
    if xi_history.len() != r {
        return Err(Error::HistoryLength {
            expected: r,
            got: xi_history.len(),
        });
    }
    let psi = psi_terms(params, x_history)?;
    let n = params.dim();
    let last = n - 1;
    let mut f = DMatrix::zeros(n, n);
    f[(0, 0)] = 1.0;
    // shift registers; the newest xi slot is refilled through V
    for i in 1..r {
        f[(i, i + 1)] = 1.0;
    }
    for j in r + 1..last {
        f[(j, j + 1)] = 1.0;
    }
    f[(last, 0)] = params.mu;
    for l in 1..=r {
        f[(last, 1 + r - l)] = psi[l - 1];
        f[(last, r + 1 + r - l)] = -params.phi[l - 1];
    }
    Ok(f)
}

/// Innovation input `V`: ones at the newest xi slot and the newest X slot.
pub fn innovation_selector(order: usize) -> DVector<f64> {
    let mut v = DVector::zeros(2 * order + 1);
    v[order] = 1.0;
    v[2 * order] = 1.0;
    v
}

/// Observation row `H` as a column vector: selects the newest X.
pub fn observation_selector(order: usize) -> DVector<f64> {
    let mut h = DVector::zeros(2 * order + 1);
    h[2 * order] = 1.0;
    h
}

#[derive(Clone, Debug, PartialEq)]
pub struct BilinearKfState {
    pub s: DVector<f64>,
    pub p: DMatrix<f64>,
}

impl BilinearKfState {
    /// Assembles `s = (1, xi window, X window)`.
    pub fn new(xi_history: &[f64], x_history: &[f64], p: DMatrix<f64>) -> Result<Self> {
        let r = xi_history.len();
        if x_history.len() != r {
            return Err(Error::HistoryLength {
                expected: r,
                got: x_history.len(),
            });
        }
        let n = 2 * r + 1;
        if p.nrows() != n || p.ncols() != n {
            return Err(Error::InvalidConfig(format!("covariance must be {n}x{n}")));
        }
        let s = DVector::from_iterator(
            n,
            std::iter::once(1.0).chain(xi_history.iter().copied()).chain(x_history.iter().copied()),
        );
        Ok(BilinearKfState { s, p })
    }

    /// Diagonal initial covariance with zero variance on the constant slot.
    pub fn initial_covariance(order: usize, p0: f64) -> DMatrix<f64> {
        let mut p = DMatrix::identity(2 * order + 1, 2 * order + 1) * p0;
        p[(0, 0)] = 0.0;
        p
    }

    pub fn order(&self) -> usize {
        (self.s.len() - 1) / 2
    }

    pub fn xi_history(&self) -> &[f64] {
        let r = self.order();
        &self.s.as_slice()[1..=r]
    }

    pub fn x_history(&self) -> &[f64] {
        let r = self.order();
        &self.s.as_slice()[r + 1..]
    }

    /// Newest travel-time component.
    pub fn estimate(&self) -> f64 {
        self.s[self.s.len() - 1]
    }
}

/// Intermediate quantities of one update.
#[derive(Clone, Debug, PartialEq)]
pub struct BilinearStep {
    pub prior: f64,
    /// Euclidean norm of the gain vector.
    pub gain_norm: f64,
    pub posterior: f64,
    /// The update produced a non-finite state and the window was reset to
    /// the running mean.
    pub recovered: bool,
}

/// One predict/correct cycle with observation `y` and innovation draw
/// `xi_k`. The process-noise term enters the prior through its zero mean
/// and the covariance through `Q = q_scale * V V^T`.
pub fn bilinear_kf_step(
    state: &mut BilinearKfState,
    params: &BilinearParams,
    y: f64,
    xi_k: f64,
) -> Result<BilinearStep> {
    if !(y > 0.0 && y.is_finite()) {
        return Err(Error::BadObservation(y));
    }
    let r = params.order;
    let n = params.dim();
    if state.s.len() != n || state.p.nrows() != n {
        return Err(Error::HistoryLength {
            expected: r,
            got: state.order(),
        });
    }
    let last = n - 1;
    let f = build_transition(params, state.x_history(), state.xi_history())?;
    let v = innovation_selector(r);

    let s_prior = &f * &state.s + &v * xi_k;
    let p_prior = &f * &state.p * f.transpose() + (&v * v.transpose()) * params.q_scale;

    let denom = p_prior[(last, last)] + params.r_scale;
    let gain: DVector<f64> = if denom > 0.0 {
        p_prior.column(last) / denom
    } else {
        DVector::zeros(n)
    };
    let prior = s_prior[last];
    let s_post = &s_prior + &gain * (y - prior);
    // (I - K H) P-
    let mut p_post = &p_prior - &gain * p_prior.row(last);
    p_post = (&p_post + p_post.transpose()) * 0.5;

    let finite = s_post.iter().chain(p_post.iter()).all(|v| v.is_finite());
    if !finite {
        let mu = params.mu;
        let xi: Vec<f64> = state.xi_history().to_vec();
        *state = BilinearKfState::new(&xi, &vec![mu; r], BilinearKfState::initial_covariance(r, params.q_scale.max(1.0)))?;
        return Ok(BilinearStep {
            prior,
            gain_norm: f64::NAN,
            posterior: mu,
            recovered: true,
        });
    }

    state.s = s_post;
    state.p = p_post;
    Ok(BilinearStep {
        prior,
        gain_norm: gain.norm(),
        posterior: state.estimate(),
        recovered: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params_r2(c: f64) -> BilinearParams {
        BilinearParams::new(2, vec![0.2, 0.2], vec![0.1, 0.1], DMatrix::from_element(2, 2, c), 0.5, 0.1).unwrap()
    }

    #[test]
    fn r2_is_five_by_five() {
        let f = build_transition(&params_r2(0.1), &[2.0, 3.0], &[0.1, 0.1]).unwrap();
        assert_eq!(f.shape(), (5, 5));
        let st = BilinearKfState::new(&[0.3, 0.4], &[2.0, 3.0], BilinearKfState::initial_covariance(2, 1.0)).unwrap();
        assert_eq!(st.s.as_slice(), &[1.0, 0.3, 0.4, 2.0, 3.0]);
    }

    #[test]
    fn psi_direct_evaluation() {
        // psi_1 = b_1 + c_11 X(k-1) = 0.1 + 0.1*3
        // psi_2 = b_2 + c_21 X(k-1) + c_22 X(k-2) = 0.1 + 0.1*3 + 0.1*2
        let psi = psi_terms(&params_r2(0.1), &[2.0, 3.0]).unwrap();
        assert!((psi[0] - 0.4).abs() < 1e-15);
        assert!((psi[1] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn last_row_layout() {
        let mut p = params_r2(0.1);
        p.mu = 4.5;
        let f = build_transition(&p, &[2.0, 3.0], &[0.0, 0.0]).unwrap();
        let row: Vec<f64> = f.row(4).iter().copied().collect();
        let expected = [4.5, 0.6, 0.4, -0.2, -0.2];
        for (a, b) in row.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15, "{row:?}");
        }
        // shift rows
        assert_eq!(f[(0, 0)], 1.0);
        assert_eq!(f[(1, 2)], 1.0);
        assert_eq!(f.row(2).sum(), 0.0);
        assert_eq!(f[(3, 4)], 1.0);
    }

    #[test]
    fn zero_coefficients_zero_psi() {
        let p = BilinearParams::new(3, vec![0.2; 3], vec![0.0; 3], DMatrix::zeros(3, 3), 1.0, 1.0).unwrap();
        let f = build_transition(&p, &[5.0, 6.0, 7.0], &[1.0, 1.0, 1.0]).unwrap();
        for col in 1..=3 {
            assert_eq!(f[(6, col)], 0.0);
        }
    }

    #[test]
    fn history_mismatch_is_error() {
        let p = params_r2(0.1);
        assert!(matches!(
            build_transition(&p, &[1.0], &[0.0, 0.0]),
            Err(Error::HistoryLength { expected: 2, got: 1 })
        ));
        assert!(build_transition(&p, &[1.0, 2.0], &[0.0]).is_err());
    }

    #[test]
    fn tiny_observation_noise_pins_estimate() {
        let mut p = params_r2(0.1);
        p.r_scale = 1e-12;
        p.mu = 3.0;
        let mut st = BilinearKfState::new(&[0.1, 0.1], &[2.0, 3.0], BilinearKfState::initial_covariance(2, 1.0)).unwrap();
        let step = bilinear_kf_step(&mut st, &p, 4.25, 0.1).unwrap();
        assert!((step.posterior - 4.25).abs() < 1e-9);
        assert_eq!(st.s[0], 1.0);
    }

    #[test]
    fn huge_observation_noise_keeps_prior() {
        let mut p = params_r2(0.1);
        p.q_scale = 0.0;
        p.r_scale = 1e18;
        p.mu = 3.0;
        let mut st = BilinearKfState::new(&[0.1, 0.1], &[2.0, 3.0], BilinearKfState::initial_covariance(2, 1.0)).unwrap();
        let f = build_transition(&p, &[2.0, 3.0], &[0.1, 0.1]).unwrap();
        let prior = &f * &st.s + innovation_selector(2) * 0.1;
        bilinear_kf_step(&mut st, &p, 100.0, 0.1).unwrap();
        for (a, b) in st.s.iter().zip(prior.iter()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn covariance_stays_symmetric() {
        let mut p = params_r2(0.3);
        p.mu = 5.0;
        let mut st = BilinearKfState::new(&[0.1, 0.2], &[4.0, 6.0], BilinearKfState::initial_covariance(2, 2.0)).unwrap();
        for k in 0..50 {
            bilinear_kf_step(&mut st, &p, 5.0 + (k % 3) as f64, 0.1).unwrap();
            let asym = (&st.p - st.p.transpose()).abs().max();
            assert!(asym < 1e-9);
            assert_eq!(st.s.len(), 5);
            assert_eq!(st.s[0], 1.0);
        }
    }

    #[test]
    fn rejects_bad_observation() {
        let p = params_r2(0.1);
        let mut st = BilinearKfState::new(&[0.1, 0.1], &[2.0, 3.0], BilinearKfState::initial_covariance(2, 1.0)).unwrap();
        assert!(bilinear_kf_step(&mut st, &p, 0.0, 0.1).is_err());
        assert!(bilinear_kf_step(&mut st, &p, f64::INFINITY, 0.1).is_err());
    }

    #[test]
    fn non_finite_state_recovers_to_mean() {
        let mut p = params_r2(0.1);
        p.mu = 2.5;
        let mut cov = BilinearKfState::initial_covariance(2, 1.0);
        cov[(3, 3)] = f64::INFINITY;
        let mut st = BilinearKfState::new(&[0.1, 0.1], &[2.0, 3.0], cov).unwrap();
        let step = bilinear_kf_step(&mut st, &p, 3.0, 0.1).unwrap();
        assert!(step.recovered);
        assert_eq!(step.posterior, 2.5);
        assert!(st.p.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn order_below_two_rejected() {
        let mut rng = crate::seeds::rng_for(0, "t");
        assert!(BilinearParams::sampled(1, 0.2, 0.1, 0.1, 1.0, 0.1, &mut rng).is_err());
        let p = BilinearParams::sampled(9, 0.2, 0.1, 0.1, 1.0, 0.1, &mut rng).unwrap();
        assert_eq!(p.dim(), 19);
    }
}
