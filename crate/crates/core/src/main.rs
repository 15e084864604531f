use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qubitbath::runner::{self, Mode, OutputFormat, Quantity, RunConfig};
use qubitbath::{Error, InitialKind};

/// Entanglement dynamics of n qubits in a common Lorentzian reservoir.
///
/// Settings are read from the JSON file given by --config (if any); flags on
/// the command line override the corresponding fields.
#[derive(Parser)]
#[command(name = "qubitbath", version)]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Worker threads for sweeps and verification (default: RAYON_NUM_THREADS
    /// or the number of cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Initial {
    W,
    Pair,
}

#[derive(Subcommand)]
enum Command {
    /// Time series of concurrences and survival at one parameter point.
    Simulate(Overrides),
    /// Survival under repeated measurement, one row per interval.
    Zeno(Overrides),
    /// Stationary concurrences and steady-state graphs.
    Stationary(Overrides),
    /// Cartesian product over the sweep grid.
    Sweep(Overrides),
    /// Run the oracle cross-checks; exits with 2 if any fails.
    Verify(Overrides),
}

#[derive(Args, Default)]
struct Overrides {
    /// Number of qubits.
    #[arg(short, long)]
    n: Option<usize>,
    /// Coupling ratio g / kappa.
    #[arg(short = 'R', long)]
    ratio: Option<f64>,
    #[arg(long, value_enum)]
    initial: Option<Initial>,
    /// Separability parameter of the two-qubit superposition.
    #[arg(short, long, allow_hyphen_values = true)]
    s: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<f64>,
    #[arg(long)]
    tau_max: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    /// Comma-separated, e.g. `kl,kj,survival`.
    #[arg(short, long, value_delimiter = ',')]
    quantities: Option<Vec<Quantity>>,
    /// Comma-separated measurement intervals.
    #[arg(long, value_delimiter = ',')]
    intervals: Option<Vec<f64>>,
    /// Evaluate sweep cells at tau = infinity.
    #[arg(long)]
    stationary_limit: bool,
}

impl Command {
    fn split(self) -> (Mode, Overrides) {
        match self {
            Command::Simulate(o) => (Mode::Simulate, o),
            Command::Zeno(o) => (Mode::Zeno, o),
            Command::Stationary(o) => (Mode::Stationary, o),
            Command::Sweep(o) => (Mode::Sweep, o),
            Command::Verify(o) => (Mode::Verify, o),
        }
    }
}

impl Overrides {
    fn apply(self, cfg: &mut RunConfig) {
        if let Some(v) = self.n {
            cfg.n = v;
        }
        if let Some(v) = self.ratio {
            cfg.ratio = v;
        }
        if let Some(v) = self.initial {
            cfg.initial = match v {
                Initial::W => InitialKind::WState,
                Initial::Pair => InitialKind::TwoQubitSuperposition,
            };
        }
        if let Some(v) = self.s {
            cfg.s = v;
        }
        if let Some(v) = self.phi {
            cfg.phi = v;
        }
        if let Some(v) = self.tau_max {
            cfg.tau_max = v;
        }
        if let Some(v) = self.samples {
            cfg.samples = v;
        }
        if let Some(v) = self.quantities {
            cfg.quantities = v;
        }
        if let Some(v) = self.intervals {
            cfg.zeno_intervals = v;
        }
        if self.stationary_limit {
            cfg.stationary_limit = true;
        }
    }
}

enum Failure {
    Error(Error),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

fn execute(cli: Cli) -> Result<(), Failure> {
    if let Some(k) = cli.threads {
        if k == 0 {
            return Err(Error::Config("--threads must be at least 1".into()).into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let (mode, overrides) = cli.command.split();
    cfg.mode = mode;
    overrides.apply(&mut cfg);
    if let Some(out) = cli.out {
        cfg.output_path = Some(out);
    }
    if let Some(f) = cli.format {
        cfg.output_format = match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        };
    }

    let output = runner::run(&cfg)?;
    output.write(cfg.output_format, cfg.output_path.as_deref())?;
    match output.verified {
        Some(false) => Err(Failure::Verification),
        _ => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => {
            eprintln!("verification failed");
            ExitCode::from(2)
        }
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Io { .. } => 3,
                _ => 1,
            })
        }
    }
}
