//! Experiment runner: configuration, evaluation modes and file output.
//!
//! A run is described by one JSON document ([`RunConfig`]); the CLI loads it
//! and then applies its own flags on top. Every mode produces a [`Table`]
//! plus optional JSON extras, and identical configs give byte-identical
//! output.

mod eval;
mod table;
mod verify;

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value as Json};

pub use eval::{run_simulate, run_stationary, run_sweep, run_zeno, MAX_SWEEP_ROWS};
pub use table::{Table, Value};
pub use verify::{long_time_ratio, rk4_error_ratio, run_verify, verify, CheckResult, VerifyReport};

use crate::entanglement::PairClass;
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::oracle::{DEFAULT_BATH_HALF_WIDTH, DEFAULT_BATH_MODES};
use crate::states::{InitialKind, InitialSpec};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Simulate,
    Zeno,
    Stationary,
    Sweep,
    Verify,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// A column that simulate and sweep can emit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Kl,
    Kj,
    Jm,
    PairW,
    /// `|E(tau)|^2`.
    Survival,
    /// Effective decay rate under measurement at interval `T`.
    GammaZ,
    ZenoSurvival,
    ZenoConcurrence,
}

impl Quantity {
    pub fn name(&self) -> &'static str {
        match self {
            Quantity::Kl => "kl",
            Quantity::Kj => "kj",
            Quantity::Jm => "jm",
            Quantity::PairW => "pair_w",
            Quantity::Survival => "survival",
            Quantity::GammaZ => "gamma_z",
            Quantity::ZenoSurvival => "zeno_survival",
            Quantity::ZenoConcurrence => "zeno_concurrence",
        }
    }

    pub fn pair(&self) -> Option<PairClass> {
        match self {
            Quantity::Kl => Some(PairClass::Kl),
            Quantity::Kj => Some(PairClass::Kj),
            Quantity::Jm => Some(PairClass::Jm),
            Quantity::PairW => Some(PairClass::PairW),
            _ => None,
        }
    }

    pub fn needs_interval(&self) -> bool {
        matches!(self, Quantity::GammaZ | Quantity::ZenoSurvival | Quantity::ZenoConcurrence)
    }
}

impl std::str::FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(Json::String(s.to_owned()))
            .map_err(|_| Error::Config(format!("unknown quantity '{s}'")))
    }
}

/// Sweep axes. An empty axis stays fixed at the corresponding scalar field.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepGrid {
    pub n: Vec<usize>,
    pub ratio: Vec<f64>,
    pub s: Vec<f64>,
    pub phi: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySettings {
    pub ode_steps: usize,
    pub bath_modes: usize,
    pub bath_half_width: f64,
    pub bath_steps: usize,
    /// Per-check tolerance overrides, keyed by check name.
    pub tolerances: BTreeMap<String, f64>,
}

impl Default for VerifySettings {
    fn default() -> Self {
        Self {
            ode_steps: 10_000,
            bath_modes: DEFAULT_BATH_MODES,
            bath_half_width: DEFAULT_BATH_HALF_WIDTH,
            bath_steps: 5_000,
            tolerances: BTreeMap::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    pub n: usize,
    /// Coupling ratio `R = g / kappa`.
    pub ratio: f64,
    pub initial: InitialKind,
    pub s: f64,
    pub phi: f64,
    /// End of the `tau` grid; the total time `t` in zeno mode.
    pub tau_max: f64,
    pub samples: usize,
    #[serde(alias = "pair_classes")]
    pub quantities: Vec<Quantity>,
    pub zeno_intervals: Vec<f64>,
    pub sweep_grid: SweepGrid,
    /// Evaluate sweep cells at `tau = infinity` instead of on the grid.
    pub stationary_limit: bool,
    pub output_path: Option<PathBuf>,
    pub output_format: OutputFormat,
    pub verify: VerifySettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Simulate,
            n: 4,
            ratio: 0.1,
            initial: InitialKind::WState,
            s: 0.0,
            phi: 0.0,
            tau_max: 50.0,
            samples: 501,
            quantities: Vec::new(),
            zeno_intervals: Vec::new(),
            sweep_grid: SweepGrid::default(),
            stationary_limit: false,
            output_path: None,
            output_format: OutputFormat::Csv,
            verify: VerifySettings::default(),
        }
    }
}

impl RunConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_json_str(&text)
    }

    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(self.n, self.ratio)
    }

    pub fn spec(&self) -> Result<InitialSpec> {
        spec_for(self.initial, self.s, self.phi)
    }

    /// Checks that do not depend on a particular grid point.
    pub fn validate(&self) -> Result<()> {
        if self.samples < 2 {
            return Err(Error::Config(format!("samples must be at least 2, got {}", self.samples)));
        }
        if !(self.tau_max.is_finite() && self.tau_max > 0.0) {
            return Err(Error::Config(format!("tau_max must be positive, got {}", self.tau_max)));
        }
        for &t in &self.zeno_intervals {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::Config(format!("zeno interval must be positive, got {t}")));
            }
        }
        for q in &self.quantities {
            match (q.pair(), self.initial) {
                (Some(PairClass::PairW), InitialKind::TwoQubitSuperposition)
                | (Some(PairClass::Kl | PairClass::Kj | PairClass::Jm), InitialKind::WState) => {
                    let reason = match self.initial {
                        InitialKind::WState => "the W state",
                        InitialKind::TwoQubitSuperposition => "a two-qubit superposition",
                    };
                    return Err(Error::IncompatiblePair { pair: q.name(), reason: reason.into() });
                }
                _ => {}
            }
            if q.needs_interval() && self.initial != InitialKind::WState {
                return Err(Error::Config(format!("{} is defined for the W state only", q.name())));
            }
        }
        Ok(())
    }
}

pub(crate) fn spec_for(kind: InitialKind, s: f64, phi: f64) -> Result<InitialSpec> {
    match kind {
        InitialKind::WState => Ok(InitialSpec::w_state()),
        InitialKind::TwoQubitSuperposition => InitialSpec::two_qubit(s, phi),
    }
}

/// Result of one run: the main table plus mode-specific JSON extras.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    pub table: Table,
    pub extras: Map<String, Json>,
    /// `Some(false)` when a verify run found a failing check.
    pub verified: Option<bool>,
}

impl RunOutput {
    pub fn from_table(table: Table) -> Self {
        Self { table, extras: Map::new(), verified: None }
    }

    pub fn render(&self, format: OutputFormat) -> Vec<u8> {
        match format {
            OutputFormat::Csv => {
                let mut buf = Vec::new();
                self.table.write_csv(&mut buf).expect("writing to a Vec cannot fail");
                buf
            }
            OutputFormat::Json => {
                let mut doc = match self.table.to_json() {
                    Json::Object(m) => m,
                    _ => unreachable!(),
                };
                doc.extend(self.extras.clone());
                let mut text = serde_json::to_string_pretty(&Json::Object(doc)).expect("JSON values always serialize");
                text.push('\n');
                text.into_bytes()
            }
        }
    }

    /// Writes to `path`, or stdout when `path` is `None`.
    pub fn write(&self, format: OutputFormat, path: Option<&Path>) -> Result<()> {
        let bytes = self.render(format);
        match path {
            Some(p) => fs::write(p, bytes).map_err(|source| Error::Io { path: p.to_owned(), source }),
            None => std::io::stdout().write_all(&bytes).map_err(|source| Error::Io {
                path: PathBuf::from("<stdout>"),
                source,
            }),
        }
    }
}

/// Dispatches on `config.mode`.
pub fn run(config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    match config.mode {
        Mode::Simulate => run_simulate(config),
        Mode::Zeno => run_zeno(config),
        Mode::Stationary => run_stationary(config),
        Mode::Sweep => run_sweep(config),
        Mode::Verify => run_verify(config),
    }
}
