//! Initial states and single-excitation amplitudes.
//!
//! Two families are supported. The W state spreads one excitation evenly over
//! all `n` qubits (sometimes called a "Werner" state); its whole evolution is
//! the scalar survival amplitude. The two-qubit superposition
//! `c01 |1_k> + c02 |1_l>` evolves into `c1 |1_k> + c2 |1_l> + c3 |E_rest>`,
//! where `|E_rest>` is the normalized W state of the remaining `n - 2` qubits.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{survival_amplitude, ModelParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    WState,
    TwoQubitSuperposition,
}

/// Initial condition. `k_index` and `l_index` are 1-based qubit labels; since
/// all qubits couple identically only the pair class matters, and the rest
/// of the crate works with the canonical labels `k = 1`, `l = 2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialSpec {
    pub kind: InitialKind,
    /// Separability parameter in `[-1, 1]`; `0` is maximally entangled.
    pub s: f64,
    /// Relative phase of `c02`.
    pub phi: f64,
    pub k_index: usize,
    pub l_index: usize,
}

impl InitialSpec {
    pub fn w_state() -> Self {
        Self {
            kind: InitialKind::WState,
            s: 0.0,
            phi: 0.0,
            k_index: 1,
            l_index: 2,
        }
    }

    pub fn two_qubit(s: f64, phi: f64) -> Result<Self> {
        let spec = Self {
            kind: InitialKind::TwoQubitSuperposition,
            s,
            phi,
            k_index: 1,
            l_index: 2,
        };
        spec.check_coefficients()?;
        Ok(spec)
    }

    fn check_coefficients(&self) -> Result<()> {
        if !(-1.0..=1.0).contains(&self.s) {
            return Err(Error::invalid(format!("separability parameter s = {} outside [-1, 1]", self.s)));
        }
        if !self.phi.is_finite() {
            return Err(Error::invalid("phase phi must be finite"));
        }
        Ok(())
    }

    /// Checks the spec against a system of `n` qubits.
    pub fn validate(&self, n: usize) -> Result<()> {
        self.check_coefficients()?;
        let in_range = |i: usize| (1..=n).contains(&i);
        if !in_range(self.k_index) || !in_range(self.l_index) || self.k_index == self.l_index {
            return Err(Error::invalid(format!(
                "qubit labels k = {}, l = {} must be distinct and in 1..={n}",
                self.k_index, self.l_index
            )));
        }
        Ok(())
    }
}

/// `(c01, c02) = (sqrt((1 - s)/2), sqrt((1 + s)/2) e^{i phi})`.
pub fn initial_coefficients(spec: &InitialSpec) -> Result<(Complex64, Complex64)> {
    spec.check_coefficients()?;
    let c01 = Complex64::new(((1.0 - spec.s) / 2.0).sqrt(), 0.0);
    let c02 = Complex64::from_polar(((1.0 + spec.s) / 2.0).sqrt(), spec.phi);
    Ok((c01, c02))
}

/// Amplitudes at scaled time `tau`. For the W branch only `e_amp` is
/// meaningful and `c1 = c2 = c3 = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmplitudeState {
    pub tau: f64,
    pub c1: Complex64,
    pub c2: Complex64,
    pub c3: Complex64,
    pub e_amp: Complex64,
}

impl AmplitudeState {
    /// Probability that the excitation has leaked into the reservoir.
    pub fn emitted_probability(&self) -> f64 {
        1.0 - (self.c1.norm_sqr() + self.c2.norm_sqr() + self.c3.norm_sqr())
    }
}

/// `(c1, c2, c3)` for a given survival amplitude `e`. Passing `e = 0` gives
/// the stationary amplitudes.
pub fn amplitudes_for(n: usize, c01: Complex64, c02: Complex64, e: Complex64) -> (Complex64, Complex64, Complex64) {
    let nf = n as f64;
    let bright = (c01 + c02) / nf;
    let c1 = (c01 * (nf - 1.0) - c02) / nf + bright * e;
    let c2 = (c02 * (nf - 1.0) - c01) / nf + bright * e;
    let c3 = (c01 + c02) * ((nf - 2.0).sqrt() / nf) * (e - 1.0);
    (c1, c2, c3)
}

pub fn evolve_amplitudes(params: &ModelParams, spec: &InitialSpec, tau: f64) -> Result<AmplitudeState> {
    if spec.kind != InitialKind::TwoQubitSuperposition {
        return Err(Error::invalid("evolve_amplitudes needs a two-qubit superposition spec"));
    }
    spec.validate(params.n())?;
    let (c01, c02) = initial_coefficients(spec)?;
    let e = survival_amplitude(params, tau);
    let (c1, c2, c3) = amplitudes_for(params.n(), c01, c02, e);
    Ok(AmplitudeState { tau, c1, c2, c3, e_amp: e })
}

/// Survival amplitude of the W state. The W-branch density matrix depends
/// on nothing else.
pub fn w_state_survival(params: &ModelParams, tau: f64) -> Complex64 {
    survival_amplitude(params, tau)
}

/// Amplitude on each qubit's `|1_i>` in canonical order: `k`, `l`, then the
/// `n - 2` remaining qubits.
pub fn qubit_amplitudes(n: usize, spec: &InitialSpec, e: Complex64) -> Result<Vec<Complex64>> {
    spec.validate(n)?;
    match spec.kind {
        InitialKind::WState => Ok(vec![e / (n as f64).sqrt(); n]),
        InitialKind::TwoQubitSuperposition => {
            let (c01, c02) = initial_coefficients(spec)?;
            let (c1, c2, c3) = amplitudes_for(n, c01, c02, e);
            let mut amps = vec![c1, c2];
            if n > 2 {
                let each = c3 / ((n - 2) as f64).sqrt();
                amps.extend(std::iter::repeat(each).take(n - 2));
            }
            Ok(amps)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    #[test]
    fn coefficients_examples() {
        let (a, b) = initial_coefficients(&InitialSpec::two_qubit(0.0, 0.0).unwrap()).unwrap();
        assert_abs_diff_eq!(a.re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(b.re, FRAC_1_SQRT_2, epsilon = 1e-15);

        let (a, b) = initial_coefficients(&InitialSpec::two_qubit(-1.0, 0.0).unwrap()).unwrap();
        assert_eq!(a, Complex64::new(1.0, 0.0));
        assert_eq!(b, Complex64::new(0.0, 0.0));

        let (a, b) = initial_coefficients(&InitialSpec::two_qubit(1.0, PI).unwrap()).unwrap();
        assert_eq!(a, Complex64::new(0.0, 0.0));
        assert_abs_diff_eq!(b.re, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(InitialSpec::two_qubit(1.5, 0.0).is_err());
        assert!(InitialSpec::two_qubit(0.0, f64::NAN).is_err());
        let mut spec = InitialSpec::two_qubit(0.0, 0.0).unwrap();
        spec.l_index = 1;
        assert!(spec.validate(4).is_err());
        spec.l_index = 5;
        assert!(spec.validate(4).is_err());
        let p = ModelParams::new(4, 0.1).unwrap();
        assert!(evolve_amplitudes(&p, &InitialSpec::w_state(), 1.0).is_err());
    }

    #[test]
    fn initial_amplitudes() {
        let p = ModelParams::new(5, 0.3).unwrap();
        let spec = InitialSpec::two_qubit(0.3, 1.1).unwrap();
        let (c01, c02) = initial_coefficients(&spec).unwrap();
        let st = evolve_amplitudes(&p, &spec, 0.0).unwrap();
        assert_abs_diff_eq!((st.c1 - c01).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((st.c2 - c02).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(st.c3.norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn long_time_limit_n4() {
        // E(inf) = 0: c1 = c2 = q/2 with q = 1/sqrt(2), c3 = -1/2.
        let p = ModelParams::new(4, 0.1).unwrap();
        let spec = InitialSpec::two_qubit(0.0, 0.0).unwrap();
        let (c01, c02) = initial_coefficients(&spec).unwrap();
        let (c1, c2, c3) = amplitudes_for(4, c01, c02, Complex64::new(0.0, 0.0));
        assert_abs_diff_eq!(c1.re, FRAC_1_SQRT_2 / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c2.re, FRAC_1_SQRT_2 / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c3.re, -0.5, epsilon = 1e-15);
        // tau = 50 is still weak coupling's transient tail: e^{-n R^2 tau} ~ 0.135.
        let late = evolve_amplitudes(&p, &spec, 400.0).unwrap();
        assert_abs_diff_eq!((late.c3 - c3).norm(), 0.0, epsilon = 1e-6);
    }

    #[test]
    fn single_excitation_c2() {
        let p = ModelParams::new(7, 2.0).unwrap();
        let spec = InitialSpec::two_qubit(-1.0, 0.0).unwrap();
        for &tau in &[0.0, 0.3, 1.7, 9.0] {
            let st = evolve_amplitudes(&p, &spec, tau).unwrap();
            let expected = (survival_amplitude(&p, tau) - 1.0) / 7.0;
            assert_abs_diff_eq!((st.c2 - expected).norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn n2_has_no_rest() {
        let p = ModelParams::new(2, 3.0).unwrap();
        let spec = InitialSpec::two_qubit(0.2, 0.4).unwrap();
        for &tau in &[0.0, 0.5, 4.0] {
            assert_eq!(evolve_amplitudes(&p, &spec, tau).unwrap().c3, Complex64::new(0.0, 0.0));
        }
        assert_eq!(qubit_amplitudes(2, &spec, Complex64::new(0.5, 0.0)).unwrap().len(), 2);
    }

    #[test]
    fn w_amplitudes_are_uniform() {
        let amps = qubit_amplitudes(4, &InitialSpec::w_state(), Complex64::new(1.0, 0.0)).unwrap();
        assert!(amps.iter().all(|a| (a.re - 0.5).abs() < 1e-15));
    }
}
