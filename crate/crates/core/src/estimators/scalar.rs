//! Random-walk travel-time filter.
//!
//! Model: `X(k) = X(k-1) + w(k)`, `Y(k) = X(k) + v(k)` with
//! `w ~ N(0, sigma2_omega)` and `v ~ N(0, sigma2_eta)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarKfState {
    /// Current estimate, seconds.
    pub x_hat: f64,
    /// Estimate variance.
    pub p: f64,
    /// Process-noise variance.
    pub sigma2_omega: f64,
    /// Observation-noise variance.
    pub sigma2_eta: f64,
}

/// Intermediate quantities of one update.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalarStep {
    pub prior: f64,
    pub prior_var: f64,
    pub gain: f64,
    /// `y - prior`.
    pub innovation: f64,
    pub posterior: f64,
}

impl ScalarKfState {
    pub fn new(x0: f64, p0: f64, sigma2_omega: f64, sigma2_eta: f64) -> Result<Self> {
        if p0 < 0.0 || p0.is_nan() {
            return Err(Error::NegativeVariance(p0));
        }
        if sigma2_omega < 0.0 || sigma2_eta < 0.0 || sigma2_omega.is_nan() || sigma2_eta.is_nan() {
            return Err(Error::InvalidConfig("noise variances must be non-negative".into()));
        }
        if !x0.is_finite() {
            return Err(Error::InvalidConfig(format!("initial estimate must be finite, got {x0}")));
        }
        Ok(ScalarKfState {
            x_hat: x0,
            p: p0,
            sigma2_omega,
            sigma2_eta,
        })
    }

    /// Predict then correct with observation `y`.
    pub fn step(&mut self, y: f64) -> Result<ScalarStep> {
        if !(y > 0.0 && y.is_finite()) {
            return Err(Error::BadObservation(y));
        }
        let prior = self.x_hat;
        let prior_var = self.p + self.sigma2_omega;
        let denom = prior_var + self.sigma2_eta;
        // both variances zero: nothing to weigh, keep the prior
        let gain = if denom > 0.0 { prior_var / denom } else { 0.0 };
        let innovation = y - prior;
        self.x_hat = prior + gain * innovation;
        self.p = if denom > 0.0 {
            (prior_var - prior_var * prior_var / denom).max(0.0)
        } else {
            0.0
        };
        Ok(ScalarStep {
            prior,
            prior_var,
            gain,
            innovation,
            posterior: self.x_hat,
        })
    }
}

/// Initial state for an edge: the mean of its legacy observations when any
/// exist, the heuristic travel time otherwise.
pub fn scalar_kf_init(
    legacy_mean: Option<f64>,
    heuristic: f64,
    p0: f64,
    sigma2_omega: f64,
    sigma2_eta: f64,
) -> Result<ScalarKfState> {
    ScalarKfState::new(legacy_mean.unwrap_or(heuristic), p0, sigma2_omega, sigma2_eta)
}
