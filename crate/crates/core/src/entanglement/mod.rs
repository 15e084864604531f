//! Pairwise entanglement of the evolving qubits.
//!
//! Concurrences are produced two ways: closed forms in the single-excitation
//! amplitudes (the production path) and the generic Wootters formula applied
//! to explicitly built reduced density matrices (the checking path).

mod density;
mod esd;
mod graph;
mod wootters;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use density::{
    basis_index, partial_trace_oracle, SectorDensityMatrix, TwoQubitDensityMatrix, HERMITIAN_TOLERANCE,
    PSD_TOLERANCE, TRACE_TOLERANCE,
};
pub use esd::{detect_esd, EsdEvent, ESD_THRESHOLD, MAX_SAMPLE_JUMP};
pub use graph::{steady_graph, SteadyEdge, SteadyGraph};
pub use wootters::{spin_flip_singular_values, wootters_concurrence};

use crate::error::{Error, Result};
use crate::model::{survival_amplitude, survival_probability, ModelParams};
use crate::states::{amplitudes_for, evolve_amplitudes, initial_coefficients, InitialKind, InitialSpec};

/// Which kind of qubit pair a concurrence refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairClass {
    /// The two initially superposed qubits `k`, `l`.
    Kl,
    /// Qubit `k` and a qubit `j` that starts in the ground state.
    Kj,
    /// Two qubits `j`, `m` that both start in the ground state.
    Jm,
    /// Any pair, starting from the W state.
    PairW,
}

impl PairClass {
    pub const ALL: [PairClass; 4] = [PairClass::Kl, PairClass::Kj, PairClass::Jm, PairClass::PairW];

    pub fn name(&self) -> &'static str {
        match self {
            PairClass::Kl => "kl",
            PairClass::Kj => "kj",
            PairClass::Jm => "jm",
            PairClass::PairW => "pair_w",
        }
    }

    /// Representative 1-based qubit labels for the canonical `k = 1, l = 2`.
    pub fn representative(&self) -> (usize, usize) {
        match self {
            PairClass::Kl | PairClass::PairW => (1, 2),
            PairClass::Kj => (1, 3),
            PairClass::Jm => (3, 4),
        }
    }

    pub fn check(&self, n: usize, kind: InitialKind) -> Result<()> {
        let incompatible = |reason: String| Error::IncompatiblePair { pair: self.name(), reason };
        match (self, kind) {
            (PairClass::PairW, InitialKind::WState) => Ok(()),
            (PairClass::PairW, _) => Err(incompatible("a two-qubit superposition".into())),
            (_, InitialKind::WState) => Err(incompatible("the W state".into())),
            (PairClass::Kj, _) if n < 3 => Err(incompatible(format!("n = {n}"))),
            (PairClass::Jm, _) if n < 4 => Err(incompatible(format!("n = {n}"))),
            _ => Ok(()),
        }
    }
}

impl std::fmt::Display for PairClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for PairClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PairClass::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown pair class '{s}'")))
    }
}

/// Single-excitation amplitudes `(a, b)` on the two qubits of the pair class.
fn pair_amplitudes(n: usize, spec: &InitialSpec, pair: PairClass, e: Complex64) -> Result<(Complex64, Complex64)> {
    pair.check(n, spec.kind)?;
    spec.validate(n)?;
    if pair == PairClass::PairW {
        let a = e / (n as f64).sqrt();
        return Ok((a, a));
    }
    let (c01, c02) = initial_coefficients(spec)?;
    let (c1, c2, c3) = amplitudes_for(n, c01, c02, e);
    let rest = |c: Complex64| c / ((n - 2) as f64).sqrt();
    Ok(match pair {
        PairClass::Kl => (c1, c2),
        PairClass::Kj => (c1, rest(c3)),
        PairClass::Jm => (rest(c3), rest(c3)),
        PairClass::PairW => unreachable!(),
    })
}

/// Reduced density matrix of the pair, written out entry by entry.
///
/// Every pair state has the same shape: populations `|a|^2` on `|10>`,
/// `|b|^2` on `|01>`, coherence `a b*` between them and the remainder on
/// `|00>`.
pub fn build_pair_rho(params: &ModelParams, spec: &InitialSpec, pair: PairClass, tau: f64) -> Result<TwoQubitDensityMatrix> {
    let n = params.n();
    let rho = match pair {
        PairClass::PairW => {
            pair.check(n, spec.kind)?;
            let p = survival_amplitude(params, tau).norm_sqr() / n as f64;
            x_block(Complex64::new(p, 0.0), Complex64::new(p, 0.0), Complex64::new(p, 0.0))
        }
        PairClass::Kl => {
            pair.check(n, spec.kind)?;
            let st = evolve_amplitudes(params, spec, tau)?;
            x_block(st.c1 * st.c1.conj(), st.c2 * st.c2.conj(), st.c1 * st.c2.conj())
        }
        PairClass::Kj => {
            pair.check(n, spec.kind)?;
            let st = evolve_amplitudes(params, spec, tau)?;
            let m = (n - 2) as f64;
            x_block(st.c1 * st.c1.conj(), st.c3 * st.c3.conj() / m, st.c1 * st.c3.conj() / m.sqrt())
        }
        PairClass::Jm => {
            pair.check(n, spec.kind)?;
            let st = evolve_amplitudes(params, spec, tau)?;
            let w = st.c3 * st.c3.conj() / (n - 2) as f64;
            x_block(w, w, w)
        }
    };
    rho.validate()?;
    Ok(rho)
}

fn x_block(pop_10: Complex64, pop_01: Complex64, coherence: Complex64) -> TwoQubitDensityMatrix {
    let zero = Complex64::new(0.0, 0.0);
    let mut e = [[zero; 4]; 4];
    e[1][1] = pop_10;
    e[2][2] = pop_01;
    e[1][2] = coherence;
    e[2][1] = coherence.conj();
    e[3][3] = Complex64::new(1.0, 0.0) - pop_10 - pop_01;
    TwoQubitDensityMatrix::new_unchecked(e)
}

/// Closed-form concurrence: `2|E|^2/n`, `2|c1||c2|`, `2|c1||c3|/sqrt(n-2)`
/// or `2|c3|^2/(n-2)` depending on the pair class.
pub fn closed_form_concurrence(params: &ModelParams, spec: &InitialSpec, pair: PairClass, tau: f64) -> Result<f64> {
    if pair == PairClass::PairW {
        pair.check(params.n(), spec.kind)?;
        return Ok(2.0 * survival_probability(params, tau) / params.n() as f64);
    }
    let (a, b) = pair_amplitudes(params.n(), spec, pair, survival_amplitude(params, tau))?;
    Ok(2.0 * a.norm() * b.norm())
}

/// `tau -> infinity` limit of the concurrence, from the amplitudes with the
/// survival amplitude set to zero. The W branch has no stationary
/// entanglement and returns 0.
pub fn stationary_concurrence(n: usize, spec: &InitialSpec, pair: PairClass) -> Result<f64> {
    if pair == PairClass::PairW {
        pair.check(n, spec.kind)?;
        return Ok(0.0);
    }
    let (a, b) = pair_amplitudes(n, spec, pair, Complex64::new(0.0, 0.0))?;
    Ok(2.0 * a.norm() * b.norm())
}

/// Uniformly sampled concurrence curve for one pair class.
#[derive(Clone, Debug, PartialEq)]
pub struct ConcurrenceSeries {
    pub pair: PairClass,
    pub taus: Vec<f64>,
    pub values: Vec<f64>,
}

/// `tau` grid with `samples` points spanning `[0, tau_max]`.
pub fn uniform_grid(tau_max: f64, samples: usize) -> Result<Vec<f64>> {
    if samples < 2 {
        return Err(Error::invalid(format!("need at least 2 samples, got {samples}")));
    }
    if !(tau_max.is_finite() && tau_max > 0.0) {
        return Err(Error::invalid(format!("tau_max must be positive and finite, got {tau_max}")));
    }
    let step = tau_max / (samples - 1) as f64;
    Ok((0..samples).map(|i| if i == samples - 1 { tau_max } else { i as f64 * step }).collect())
}

pub fn concurrence_series(
    params: &ModelParams,
    spec: &InitialSpec,
    pair: PairClass,
    tau_max: f64,
    samples: usize,
) -> Result<ConcurrenceSeries> {
    let taus = uniform_grid(tau_max, samples)?;
    let values = taus
        .iter()
        .map(|&t| closed_form_concurrence(params, spec, pair, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConcurrenceSeries { pair, taus, values })
}
