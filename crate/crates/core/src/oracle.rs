//! Numerical reference solvers for the survival amplitude.
//!
//! Neither solver touches the closed form in [`crate::model`]; they exist to
//! check it. The memory ODE exploits the exponential kernel: with
//! `y(tau) = int_0^tau e^{-(tau - s)} E(s) ds` the integro-differential
//! equation becomes `E' = -nR^2 y`, `y' = E - y`. The discretized bath evolves
//! the bright collective state coupled to a finite set of reservoir modes.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Minimum Lorentzian mass a bath window must capture.
pub const MIN_CAPTURED_MASS: f64 = 0.98;

/// Largest `h * omega` the bath integrator accepts for the fastest frequency.
const MAX_BATH_PHASE_PER_STEP: f64 = 0.25;

pub const DEFAULT_BATH_MODES: usize = 5000;
pub const DEFAULT_BATH_HALF_WIDTH: f64 = 100.0;

/// Uniformly sampled complex trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries {
    pub taus: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl TimeSeries {
    /// Largest pointwise `|self - f(tau)|`.
    pub fn max_deviation(&self, mut f: impl FnMut(f64) -> Complex64) -> f64 {
        self.taus
            .iter()
            .zip(&self.values)
            .map(|(&t, &v)| (v - f(t)).norm())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdeState {
    pub e_amp: Complex64,
    pub y_aux: Complex64,
}

impl OdeState {
    fn initial() -> Self {
        Self {
            e_amp: Complex64::new(1.0, 0.0),
            y_aux: Complex64::new(0.0, 0.0),
        }
    }

    fn derivative(&self, coupling: f64) -> Self {
        Self {
            e_amp: -self.y_aux * coupling,
            y_aux: self.e_amp - self.y_aux,
        }
    }

    fn axpy(&self, h: f64, d: &Self) -> Self {
        Self {
            e_amp: self.e_amp + d.e_amp * h,
            y_aux: self.y_aux + d.y_aux * h,
        }
    }
}

/// Steps needed so that `h` resolves both the unit decay time and the
/// oscillation period `~ 1/(2 sqrt(n) R)` ten times over.
pub fn min_ode_steps(params: &ModelParams, tau_max: f64) -> usize {
    let fastest = (1.0_f64).min(1.0 / (2.0 * (params.n() as f64).sqrt() * params.ratio()));
    (10.0 * tau_max / fastest).ceil() as usize
}

/// Fixed-step classical RK4 on the two-component memory ODE.
pub fn solve_memory_ode(params: &ModelParams, tau_max: f64, steps: usize) -> Result<TimeSeries> {
    check_horizon(tau_max)?;
    let required = min_ode_steps(params, tau_max).max(1);
    if steps < required {
        return Err(Error::TooFewSteps { given: steps, required });
    }
    let coupling = params.collective_coupling_sq();
    let h = tau_max / steps as f64;
    let mut state = OdeState::initial();
    let mut taus = Vec::with_capacity(steps + 1);
    let mut values = Vec::with_capacity(steps + 1);
    taus.push(0.0);
    values.push(state.e_amp);
    for i in 1..=steps {
        let k1 = state.derivative(coupling);
        let k2 = state.axpy(h / 2.0, &k1).derivative(coupling);
        let k3 = state.axpy(h / 2.0, &k2).derivative(coupling);
        let k4 = state.axpy(h, &k3).derivative(coupling);
        state = OdeState {
            e_amp: state.e_amp + (k1.e_amp + k2.e_amp * 2.0 + k3.e_amp * 2.0 + k4.e_amp) * (h / 6.0),
            y_aux: state.y_aux + (k1.y_aux + k2.y_aux * 2.0 + k3.y_aux * 2.0 + k4.y_aux) * (h / 6.0),
        };
        taus.push(i as f64 * h);
        values.push(state.e_amp);
    }
    Ok(TimeSeries { taus, values })
}

fn check_horizon(tau_max: f64) -> Result<()> {
    if !(tau_max.is_finite() && tau_max > 0.0) {
        return Err(Error::invalid(format!("tau_max must be positive and finite, got {tau_max}")));
    }
    Ok(())
}

/// A finite set of reservoir modes on a uniform grid, each coupled to the
/// bright collective state with a real amplitude.
#[derive(Clone, Debug, PartialEq)]
pub struct BathDiscretization {
    pub n_modes: usize,
    pub omega_min: f64,
    pub omega_max: f64,
    pub weights: Vec<f64>,
}

impl BathDiscretization {
    /// Midpoint sampling of the Lorentzian on `[-half_width, half_width]`:
    /// mode `i` couples with `sqrt(n) g |alpha(omega_i)| sqrt(d omega)`.
    pub fn uniform(params: &ModelParams, n_modes: usize, half_width: f64) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::invalid("bath needs at least one mode"));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::invalid(format!("bath half-width must be positive, got {half_width}")));
        }
        let mut bath = Self {
            n_modes,
            omega_min: -half_width,
            omega_max: half_width,
            weights: Vec::new(),
        };
        let d_omega = bath.spacing();
        let sqrt_n_g = (params.n() as f64).sqrt() * params.ratio();
        bath.weights = bath
            .frequencies()
            .iter()
            .map(|&w| sqrt_n_g * lorentz_amplitude(w) * d_omega.sqrt())
            .collect();
        Ok(bath)
    }

    pub fn with_defaults(params: &ModelParams) -> Result<Self> {
        Self::uniform(params, DEFAULT_BATH_MODES, DEFAULT_BATH_HALF_WIDTH)
    }

    pub fn spacing(&self) -> f64 {
        (self.omega_max - self.omega_min) / self.n_modes as f64
    }

    pub fn frequencies(&self) -> Vec<f64> {
        let d = self.spacing();
        (0..self.n_modes)
            .map(|i| self.omega_min + d * (i as f64 + 0.5))
            .collect()
    }

    /// Fraction of the unit-normalized Lorentzian inside the window.
    pub fn captured_mass(&self) -> f64 {
        (self.omega_max.atan() - self.omega_min.atan()) / PI
    }

    /// `sum w_i^2`, which approximates `n R^2` times [`Self::captured_mass`].
    pub fn coupling_mass(&self) -> f64 {
        self.weights.iter().map(|w| w * w).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_modes == 0 || self.weights.len() != self.n_modes {
            return Err(Error::invalid(format!(
                "bath has {} modes but {} weights",
                self.n_modes,
                self.weights.len()
            )));
        }
        if !(self.omega_min < self.omega_max) || !self.omega_min.is_finite() || !self.omega_max.is_finite() {
            return Err(Error::invalid("bath window must be a finite, non-empty interval"));
        }
        if (self.omega_min + self.omega_max).abs() > 1e-12 * self.omega_max.abs() {
            return Err(Error::invalid("bath window must be symmetric about resonance"));
        }
        if self.weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::invalid("bath weights must be finite"));
        }
        let captured = self.captured_mass();
        if captured < MIN_CAPTURED_MASS {
            return Err(Error::WindowTooNarrow {
                omega_min: self.omega_min,
                omega_max: self.omega_max,
                captured,
                required: MIN_CAPTURED_MASS,
            });
        }
        Ok(())
    }
}

/// `|alpha(omega)| = sqrt(1/pi) / |omega + i|` in kappa units.
fn lorentz_amplitude(omega: f64) -> f64 {
    (1.0 / PI).sqrt() / (omega * omega + 1.0).sqrt()
}

/// Survival amplitude together with the total single-excitation probability
/// at each sample.
#[derive(Clone, Debug, PartialEq)]
pub struct BathSolution {
    pub series: TimeSeries,
    pub norms: Vec<f64>,
}

/// Unitary evolution of the bright state plus `n_modes` reservoir modes.
///
/// The Hamiltonian is an arrowhead matrix (bright state in the corner, mode
/// detunings on the diagonal). Each step applies the (2,2) Padé approximant of
/// `exp(-i h H)`, factored over its two complex poles; each factor needs one
/// arrowhead solve, so a step is O(n_modes) and exactly norm preserving.
pub fn solve_discretized_bath(
    params: &ModelParams,
    bath: &BathDiscretization,
    tau_max: f64,
    steps: usize,
) -> Result<BathSolution> {
    check_horizon(tau_max)?;
    bath.validate()?;
    let fastest = bath
        .omega_max
        .abs()
        .max(bath.omega_min.abs())
        .max((params.n() as f64).sqrt() * params.ratio() * 2.0);
    let required = (tau_max * fastest / MAX_BATH_PHASE_PER_STEP).ceil() as usize;
    if steps < required.max(1) {
        return Err(Error::TooFewSteps { given: steps, required });
    }

    let h = tau_max / steps as f64;
    let detunings = bath.frequencies();
    let weights = &bath.weights;
    let mut bright = Complex64::new(1.0, 0.0);
    let mut modes = vec![Complex64::new(0.0, 0.0); bath.n_modes];
    let mut scratch = vec![Complex64::new(0.0, 0.0); bath.n_modes];

    let sqrt3 = 3.0_f64.sqrt();
    let poles = [Complex64::new(3.0, sqrt3), Complex64::new(3.0, -sqrt3)];
    // (I + c H) forward, (I - c H)^{-1} back, with c = -i h / pole.
    let factors: Vec<Complex64> = poles
        .iter()
        .map(|&p| Complex64::new(0.0, -h) / p)
        .collect();
    // Per-mode denominators 1 - c Delta_i are fixed for the whole run.
    let inverse_denoms: Vec<Vec<Complex64>> = factors
        .iter()
        .map(|&c| detunings.iter().map(|&d| (Complex64::new(1.0, 0.0) - c * d).inv()).collect())
        .collect();
    let schur: Vec<Complex64> = factors
        .iter()
        .zip(&inverse_denoms)
        .map(|(&c, inv)| {
            let s: Complex64 = weights.iter().zip(inv).map(|(&w, &q)| q * (w * w)).sum();
            Complex64::new(1.0, 0.0) - c * c * s
        })
        .collect();

    let mut taus = Vec::with_capacity(steps + 1);
    let mut values = Vec::with_capacity(steps + 1);
    let mut norms = Vec::with_capacity(steps + 1);
    taus.push(0.0);
    values.push(bright);
    norms.push(1.0);

    for step in 1..=steps {
        for ((&c, inv), &schur_c) in factors.iter().zip(&inverse_denoms).zip(&schur) {
            // y = (I + c H) x
            let coupled: Complex64 = weights.iter().zip(&modes).map(|(&w, &a)| a * w).sum();
            let y0 = bright + c * coupled;
            for ((s, &a), (&w, &d)) in scratch.iter_mut().zip(&modes).zip(weights.iter().zip(&detunings)) {
                *s = a + c * (bright * w + a * d);
            }
            // x = (I - c H)^{-1} y via elimination of the mode block.
            let folded: Complex64 = weights
                .iter()
                .zip(&scratch)
                .zip(inv)
                .map(|((&w, &y), &q)| y * q * w)
                .sum();
            let x0 = (y0 + c * folded) / schur_c;
            for (((a, &y), &w), &q) in modes.iter_mut().zip(&scratch).zip(weights).zip(inv) {
                *a = (y + c * w * x0) * q;
            }
            bright = x0;
        }
        taus.push(step as f64 * h);
        values.push(bright);
        norms.push(bright.norm_sqr() + modes.iter().map(|a| a.norm_sqr()).sum::<f64>());
    }

    Ok(BathSolution {
        series: TimeSeries { taus, values },
        norms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, r: f64) -> ModelParams {
        ModelParams::new(n, r).unwrap()
    }

    #[test]
    fn ode_starts_at_one() {
        let s = solve_memory_ode(&params(4, 1.0), 1.0, 1000).unwrap();
        assert_eq!(s.values[0], Complex64::new(1.0, 0.0));
        assert_eq!(s.taus.len(), 1001);
        assert_eq!(*s.taus.last().unwrap(), 1.0);
    }

    #[test]
    fn ode_refuses_coarse_grid() {
        let p = params(12, 10.0);
        let required = min_ode_steps(&p, 10.0);
        assert_eq!(required, 6929);
        match solve_memory_ode(&p, 10.0, 100) {
            Err(Error::TooFewSteps { given, required: r }) => {
                assert_eq!(given, 100);
                assert_eq!(r, required);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(solve_memory_ode(&p, -1.0, 100).is_err());
    }

    #[test]
    fn bath_rejects_narrow_or_asymmetric_windows() {
        let p = params(4, 0.1);
        let narrow = BathDiscretization::uniform(&p, 200, 10.0).unwrap();
        assert!(matches!(
            solve_discretized_bath(&p, &narrow, 1.0, 1000),
            Err(Error::WindowTooNarrow { .. })
        ));
        let mut skew = BathDiscretization::uniform(&p, 200, 100.0).unwrap();
        skew.omega_min = -90.0;
        assert!(skew.validate().is_err());
        let mut short = BathDiscretization::uniform(&p, 200, 100.0).unwrap();
        short.weights.pop();
        assert!(short.validate().is_err());
    }

    #[test]
    fn bath_window_mass() {
        let p = params(4, 0.1);
        let b = BathDiscretization::uniform(&p, 2000, 40.0).unwrap();
        assert!((b.captured_mass() - 0.984_087_8).abs() < 1e-6);
        assert!((b.coupling_mass() / p.collective_coupling_sq() - b.captured_mass()).abs() < 1e-6);
    }

    #[test]
    fn decoupled_bath_keeps_the_excitation() {
        let p = params(4, 0.1);
        let mut b = BathDiscretization::uniform(&p, 300, 100.0).unwrap();
        b.weights.iter_mut().for_each(|w| *w = 0.0);
        let sol = solve_discretized_bath(&p, &b, 2.0, 2000).unwrap();
        for v in &sol.series.values {
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        }
    }
}
