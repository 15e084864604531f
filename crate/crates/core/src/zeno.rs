//! Repeated nonselective measurements on the W branch.
//!
//! After each measurement at interval `T` the system is projected back onto
//! the W state, so `N` measurements leave it there with probability
//! `|E(T)|^(2N) = exp(-Gamma_z(T) N T)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{survival_amplitude, ModelParams};

/// `|E(T)|` below this counts as a node of the survival amplitude.
pub const NODE_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZenoSchedule {
    interval: f64,
    count: usize,
}

impl ZenoSchedule {
    pub fn new(interval: f64, count: usize) -> Result<Self> {
        if !(interval.is_finite() && interval > 0.0) {
            return Err(Error::invalid(format!("measurement interval must be positive, got {interval}")));
        }
        if count < 1 {
            return Err(Error::invalid("need at least one measurement"));
        }
        Ok(Self { interval, count })
    }

    /// `N = floor(t / T)` measurements inside a total time `t`; the realized
    /// duration is [`Self::total_time`].
    pub fn within(total_time: f64, interval: f64) -> Result<Self> {
        if !(total_time.is_finite() && total_time > 0.0) {
            return Err(Error::invalid(format!("total time must be positive, got {total_time}")));
        }
        Self::new(interval, Self::completed(total_time, interval))
    }

    /// Number of measurements at interval `T` completed by time `t`, which
    /// may be zero.
    pub fn completed(total_time: f64, interval: f64) -> usize {
        // Absorb round-off such as 25 / 0.1 = 249.99999999999997.
        let ratio = total_time / interval;
        (ratio * (1.0 + 4.0 * f64::EPSILON)).floor().max(0.0) as usize
    }

    pub fn interval(&self) -> f64 {
        self.interval
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn total_time(&self) -> f64 {
        self.interval * self.count as f64
    }
}

/// Effective decay rate. Measuring exactly at a node of the survival
/// amplitude empties the initial state, which is reported as `Saturated`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DecayRate {
    Finite(f64),
    Saturated,
}

impl DecayRate {
    /// Rate as a number, `+inf` when saturated.
    pub fn value(&self) -> f64 {
        match self {
            DecayRate::Finite(g) => *g,
            DecayRate::Saturated => f64::INFINITY,
        }
    }

    pub fn is_saturated(&self) -> bool {
        matches!(self, DecayRate::Saturated)
    }
}

/// `Gamma_z(T) = -ln(|E(T)|^2) / T`.
pub fn effective_decay_rate(params: &ModelParams, interval: f64) -> Result<DecayRate> {
    if !(interval.is_finite() && interval > 0.0) {
        return Err(Error::invalid(format!("measurement interval must be positive, got {interval}")));
    }
    let amp = survival_amplitude(params, interval).norm();
    if amp < NODE_TOLERANCE {
        return Ok(DecayRate::Saturated);
    }
    Ok(DecayRate::Finite((-(amp * amp).ln() / interval).max(0.0)))
}

/// Probability of surviving all `N` measurements.
pub fn zeno_survival(params: &ModelParams, schedule: &ZenoSchedule) -> Result<f64> {
    Ok(match effective_decay_rate(params, schedule.interval())? {
        DecayRate::Saturated => 0.0,
        DecayRate::Finite(g) => (-g * schedule.total_time()).exp(),
    })
}

/// Pairwise concurrence of the W branch under measurement, `(2/n) P0^(N)`.
pub fn zeno_concurrence(params: &ModelParams, schedule: &ZenoSchedule) -> Result<f64> {
    Ok(2.0 / params.n() as f64 * zeno_survival(params, schedule)?)
}
