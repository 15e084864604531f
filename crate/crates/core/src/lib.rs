//! Exact entanglement dynamics of `n` identical qubits sharing one leaky
//! cavity mode (a Lorentzian reservoir), restricted to a single excitation.
//!
//! The survival amplitude [`model::survival_amplitude`] drives everything:
//! single-excitation amplitudes ([`states`]), pairwise concurrences and their
//! stationary limits ([`entanglement`]), and the decay under repeated
//! measurement ([`zeno`]). [`oracle`] holds independent numerical solvers for
//! cross-checking, and [`runner`] turns it all into CSV/JSON tables.

pub mod entanglement;
pub mod error;
pub mod model;
pub mod oracle;
pub mod runner;
pub mod states;
pub mod zeno;

pub use entanglement::{
    build_pair_rho, closed_form_concurrence, detect_esd, stationary_concurrence, steady_graph, wootters_concurrence,
    ConcurrenceSeries, EsdEvent, PairClass, SteadyGraph, TwoQubitDensityMatrix,
};
pub use error::{Error, Result};
pub use model::{survival_amplitude, survival_probability, zero_crossings, ModelParams, Regime};
pub use states::{evolve_amplitudes, AmplitudeState, InitialKind, InitialSpec};
pub use zeno::{effective_decay_rate, zeno_concurrence, zeno_survival, DecayRate, ZenoSchedule};
