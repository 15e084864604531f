//! Model parameters and the exact solution of the memory-kernel dynamics.
//!
//! Everything is expressed in units of the cavity decay rate: times are the
//! scaled time `tau = kappa * t` and the qubit-cavity coupling enters only
//! through the ratio `R = g / kappa`. The qubits are resonant with the cavity.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Half-width of the band around `R^2 = 1/(4n)` classified as critical.
pub const CRITICAL_TOLERANCE: f64 = 1e-12;

/// Below this argument `sinhc` switches to its Taylor series.
const SINHC_TAYLOR_CUTOFF: f64 = 1e-4;

/// Half-width of the bisection bracket used to polish closed-form zeros.
const ZERO_POLISH_HALF_WIDTH: f64 = 5e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Weak,
    Critical,
    Strong,
}

/// `n` identical qubits coupled with strength `R = g/kappa` to one leaky cavity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    n: usize,
    ratio: f64,
}

impl ModelParams {
    pub fn new(n: usize, ratio: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("need at least 2 qubits, got n = {n}")));
        }
        if !(ratio.is_finite() && ratio > 0.0) {
            return Err(Error::invalid(format!("coupling ratio R must be positive and finite, got {ratio}")));
        }
        Ok(Self { n, ratio })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The dimensionless coupling `R = g / kappa`.
    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    /// `n R^2`, the weight of the collective (bright) coupling.
    pub fn collective_coupling_sq(&self) -> f64 {
        self.n as f64 * self.ratio * self.ratio
    }

    pub fn regime(&self) -> Regime {
        let r2 = self.ratio * self.ratio;
        let boundary = 1.0 / (4.0 * self.n as f64);
        if (r2 - boundary).abs() < CRITICAL_TOLERANCE {
            Regime::Critical
        } else if r2 < boundary {
            Regime::Weak
        } else {
            Regime::Strong
        }
    }

    /// `Omega_n = sqrt(1 - 4 n R^2)`, purely imaginary in the strong regime.
    pub fn omega(&self) -> ComplexRate {
        ComplexRate(Complex64::new(1.0 - 4.0 * self.collective_coupling_sq(), 0.0).sqrt())
    }

    /// `Omega'_n = sqrt(4 n R^2 - 1)`, the oscillation frequency of the strong regime.
    pub fn omega_prime(&self) -> ComplexRate {
        ComplexRate(Complex64::new(4.0 * self.collective_coupling_sq() - 1.0, 0.0).sqrt())
    }
}

/// A complex frequency or rate in units of kappa.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexRate(Complex64);

impl ComplexRate {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        if !(re.is_finite() && im.is_finite()) {
            return Err(Error::invalid("complex rate must be finite"));
        }
        Ok(Self(Complex64::new(re, im)))
    }

    pub fn re(&self) -> f64 {
        self.0.re
    }

    pub fn im(&self) -> f64 {
        self.0.im
    }

    pub fn value(&self) -> Complex64 {
        self.0
    }
}

/// `sinh(z) / z`, continuous through `z = 0`.
pub fn sinhc(z: Complex64) -> Complex64 {
    if z.norm() < SINHC_TAYLOR_CUTOFF {
        let z2 = z * z;
        Complex64::new(1.0, 0.0) + z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sinh() / z
    }
}

/// Lorentzian spectral density at frequency offset `omega` from the cavity line.
pub fn spectral_density(params: &ModelParams, omega: f64) -> f64 {
    params.collective_coupling_sq() / (PI * (omega * omega + 1.0))
}

/// Reservoir correlation function `f(dt)`; the Fourier transform of
/// [`spectral_density`]. It is even in `dt`, so negative lags are accepted.
pub fn correlation_kernel(params: &ModelParams, dt: f64) -> Complex64 {
    Complex64::new(params.collective_coupling_sq() * (-dt.abs()).exp(), 0.0)
}

/// Survival amplitude of the collective excitation at scaled time `tau`.
///
/// Evaluated with complex `Omega_n`, so weak, critical and strong coupling go
/// through the same expression. The result is mathematically real; the
/// imaginary part is returned rather than dropped so callers can check it.
pub fn survival_amplitude(params: &ModelParams, tau: f64) -> Complex64 {
    let omega = params.omega().value();
    let x = omega * (tau / 2.0);
    let half = -tau / 2.0;
    // e^{-tau/2} cosh(x) and e^{-tau/2} sinh(x)/Omega, written with the damping
    // folded into the exponentials so large tau never overflows.
    let up = (x + half).exp();
    let down = (-x + half).exp();
    let cosh_part = (up + down) * 0.5;
    let sinh_part = if x.norm() < SINHC_TAYLOR_CUTOFF {
        sinhc(x) * (tau / 2.0) * half.exp()
    } else {
        (up - down) / (omega * 2.0)
    };
    cosh_part + sinh_part
}

/// `|E(tau)|^2`, the probability of still finding the initial excitation.
pub fn survival_probability(params: &ModelParams, tau: f64) -> f64 {
    survival_amplitude(params, tau).norm_sqr()
}

/// Closed-form zero of the survival amplitude for index `m >= 1`.
fn closed_form_zero(omega_prime: f64, m: usize) -> f64 {
    2.0 * (m as f64 * PI - omega_prime.atan()) / omega_prime
}

/// Scaled times `t_1 < t_2 < ... < t_m_max` at which the survival amplitude
/// vanishes. Only defined in the strong-coupling regime.
pub fn zero_crossings(params: &ModelParams, m_max: usize) -> Result<Vec<f64>> {
    if params.regime() != Regime::Strong {
        return Err(Error::WrongRegime("zero_crossings"));
    }
    if m_max < 1 {
        return Err(Error::invalid("m_max must be at least 1"));
    }
    let omega_prime = params.omega_prime().re();
    let zeros = (1..=m_max)
        .map(|m| {
            let guess = closed_form_zero(omega_prime, m);
            polish_zero(params, guess)
        })
        .collect();
    Ok(zeros)
}

/// Refines a zero of `Re E` by bisection inside a narrow bracket. If the
/// bracket holds no sign change the closed-form guess is returned unchanged.
fn polish_zero(params: &ModelParams, guess: f64) -> f64 {
    let f = |t: f64| survival_amplitude(params, t).re;
    let mut lo = (guess - ZERO_POLISH_HALF_WIDTH).max(0.0);
    let mut hi = guess + ZERO_POLISH_HALF_WIDTH;
    let (mut f_lo, f_hi) = (f(lo), f(hi));
    if f_lo == 0.0 {
        return lo;
    }
    if f_hi == 0.0 {
        return hi;
    }
    if f_lo.signum() == f_hi.signum() {
        return guess;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
