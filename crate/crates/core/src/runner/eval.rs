use rayon::prelude::*;
use serde_json::{json, Map, Value as Json};

use super::{spec_for, Quantity, RunConfig, RunOutput, Table, Value};
use crate::entanglement::{
    build_pair_rho, closed_form_concurrence, detect_esd, stationary_concurrence, steady_graph, uniform_grid,
    ConcurrenceSeries, PairClass,
};
use crate::error::{Error, Result};
use crate::model::{survival_probability, ModelParams};
use crate::states::{InitialKind, InitialSpec};
use crate::zeno::{effective_decay_rate, zeno_survival, DecayRate, ZenoSchedule};

/// Largest table a sweep will produce.
pub const MAX_SWEEP_ROWS: u128 = 10_000_000;

/// One point of the parameter grid.
#[derive(Clone, Copy, Debug)]
struct Cell {
    params: ModelParams,
    spec: InitialSpec,
    interval: Option<f64>,
}

impl Cell {
    /// Concurrence, survival or Zeno quantity at `tau`; `None` is the
    /// `tau -> infinity` limit. With `strict` unset, a pair class that does
    /// not exist for this `n` gives `na` instead of an error.
    fn evaluate(&self, q: Quantity, tau: Option<f64>, strict: bool) -> Result<Value> {
        let n = self.params.n();
        if let Some(pair) = q.pair() {
            if let Err(e) = pair.check(n, self.spec.kind) {
                return if strict { Err(e) } else { Ok(Value::NotApplicable) };
            }
            let c = match tau {
                Some(t) => {
                    build_pair_rho(&self.params, &self.spec, pair, t)?;
                    closed_form_concurrence(&self.params, &self.spec, pair, t)?
                }
                None => stationary_concurrence(n, &self.spec, pair)?,
            };
            return Ok(Value::Num(c));
        }
        Ok(match q {
            Quantity::Survival => Value::Num(tau.map_or(0.0, |t| survival_probability(&self.params, t))),
            Quantity::GammaZ => Value::from_f64(effective_decay_rate(&self.params, self.interval()?)?.value()),
            Quantity::ZenoSurvival => Value::Num(self.zeno_probability(tau)?),
            Quantity::ZenoConcurrence => Value::Num(2.0 / n as f64 * self.zeno_probability(tau)?),
            _ => unreachable!("pair quantities handled above"),
        })
    }

    fn interval(&self) -> Result<f64> {
        self.interval
            .ok_or_else(|| Error::Config("zeno quantities need a measurement interval in zeno_intervals".into()))
    }

    /// Survival after the measurements completed by `tau`.
    fn zeno_probability(&self, tau: Option<f64>) -> Result<f64> {
        let interval = self.interval()?;
        match tau {
            Some(t) => match ZenoSchedule::completed(t, interval) {
                0 => Ok(1.0),
                _ => zeno_survival(&self.params, &ZenoSchedule::within(t, interval)?),
            },
            None => Ok(match effective_decay_rate(&self.params, interval)? {
                DecayRate::Finite(g) if g == 0.0 => 1.0,
                _ => 0.0,
            }),
        }
    }

    fn rows(&self, quantities: &[Quantity], taus: &[Option<f64>], strict: bool) -> Result<Vec<Vec<Value>>> {
        taus.iter()
            .map(|&tau| quantities.iter().map(|&q| self.evaluate(q, tau, strict)).collect())
            .collect()
    }
}

fn require_quantities(config: &RunConfig) -> Result<()> {
    if config.quantities.is_empty() {
        return Err(Error::Config("no quantities requested".into()));
    }
    Ok(())
}

fn needs_interval(config: &RunConfig) -> bool {
    config.quantities.iter().any(Quantity::needs_interval)
}

fn quantity_columns(config: &RunConfig) -> impl Iterator<Item = String> + '_ {
    config.quantities.iter().map(|q| q.name().to_owned())
}

fn esd_json(series: &ConcurrenceSeries) -> Json {
    match detect_esd(series) {
        Ok(events) => Json::Array(
            events
                .iter()
                .map(|e| json!({ "death": e.death, "revival": e.revival }))
                .collect(),
        ),
        Err(e) => Json::String(e.to_string()),
    }
}

/// Time series of the requested quantities at a single parameter point.
pub fn run_simulate(config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    require_quantities(config)?;
    let params = config.params()?;
    let spec = config.spec()?;
    spec.validate(params.n())?;
    let interval = match (needs_interval(config), config.zeno_intervals.as_slice()) {
        (false, _) => None,
        (true, [t]) => Some(*t),
        (true, _) => {
            return Err(Error::Config(
                "simulate takes exactly one zeno interval; use sweep for several".into(),
            ))
        }
    };
    let taus = uniform_grid(config.tau_max, config.samples)?;
    let cell = Cell { params, spec, interval };
    let at: Vec<Option<f64>> = taus.iter().copied().map(Some).collect();
    let values = cell.rows(&config.quantities, &at, true)?;

    let mut table = Table::new(std::iter::once("tau".to_owned()).chain(quantity_columns(config)).collect());
    for (tau, row) in taus.iter().zip(values) {
        let mut full = Vec::with_capacity(row.len() + 1);
        full.push(Value::Num(*tau));
        full.extend(row);
        table.rows.push(full);
    }

    let mut esd = Map::new();
    for q in &config.quantities {
        let Some(pair) = q.pair() else { continue };
        let values = table
            .column_values(q.name())
            .expect("column exists")
            .iter()
            .map(|v| v.as_f64().expect("concurrences are numeric"))
            .collect();
        esd.insert(q.name().to_owned(), esd_json(&ConcurrenceSeries { pair, taus: taus.clone(), values }));
    }
    let mut out = RunOutput::from_table(table);
    if !esd.is_empty() {
        out.extras.insert("esd".into(), Json::Object(esd));
    }
    Ok(out)
}

fn axis<T: Copy>(values: &[T], fallback: T) -> Vec<T> {
    if values.is_empty() {
        vec![fallback]
    } else {
        values.to_vec()
    }
}

/// Cartesian product over `n`, `R`, `s`, `phi` and (when given) `T`, with
/// the cells evaluated in parallel and assembled in grid order.
pub fn run_sweep(config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    require_quantities(config)?;
    let grid = &config.sweep_grid;
    let ns = axis(&grid.n, config.n);
    let ratios = axis(&grid.ratio, config.ratio);
    let ss = axis(&grid.s, config.s);
    let phis = axis(&grid.phi, config.phi);
    let intervals: Vec<Option<f64>> = if config.zeno_intervals.is_empty() {
        if needs_interval(config) {
            return Err(Error::Config("zeno quantities need at least one entry in zeno_intervals".into()));
        }
        vec![None]
    } else {
        config.zeno_intervals.iter().copied().map(Some).collect()
    };
    let taus: Vec<Option<f64>> = if config.stationary_limit {
        vec![None]
    } else {
        uniform_grid(config.tau_max, config.samples)?.into_iter().map(Some).collect()
    };

    let rows = [ns.len(), ratios.len(), ss.len(), phis.len(), intervals.len(), taus.len()]
        .iter()
        .map(|&k| k as u128)
        .product::<u128>();
    if rows > MAX_SWEEP_ROWS {
        return Err(Error::GridTooLarge { rows, limit: MAX_SWEEP_ROWS });
    }

    // every coordinate is validated before the parallel pass
    let mut cells = Vec::new();
    for &n in &ns {
        for &ratio in &ratios {
            let params = ModelParams::new(n, ratio)?;
            for &s in &ss {
                for &phi in &phis {
                    let spec = spec_for(config.initial, s, phi)?;
                    spec.validate(n)?;
                    for &interval in &intervals {
                        cells.push((s, phi, Cell { params, spec, interval }));
                    }
                }
            }
        }
    }

    let with_t = !config.zeno_intervals.is_empty();
    let evaluated: Vec<Result<Vec<Vec<Value>>>> = cells
        .par_iter()
        .map(|(_, _, cell)| cell.rows(&config.quantities, &taus, false))
        .collect();

    let mut columns: Vec<String> = ["n", "R", "s", "phi"].iter().map(|c| c.to_string()).collect();
    if with_t {
        columns.push("T".into());
    }
    columns.push("tau".into());
    columns.extend(quantity_columns(config));
    let mut table = Table::new(columns);
    for ((s, phi, cell), result) in cells.iter().zip(evaluated) {
        for (tau, values) in taus.iter().zip(result?) {
            let mut row = vec![
                Value::Int(cell.params.n() as i64),
                Value::Num(cell.params.ratio()),
                Value::Num(*s),
                Value::Num(*phi),
            ];
            if let Some(t) = cell.interval {
                row.push(Value::Num(t));
            }
            row.push(tau.map_or(Value::Inf, Value::Num));
            row.extend(values);
            table.rows.push(row);
        }
    }
    Ok(RunOutput::from_table(table))
}

/// Measurement-interval scan at total time `t = tau_max` on the W branch.
pub fn run_zeno(config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    if config.initial != InitialKind::WState {
        return Err(Error::Config("zeno mode runs on the W state".into()));
    }
    if config.zeno_intervals.is_empty() {
        return Err(Error::Config("zeno mode needs at least one entry in zeno_intervals".into()));
    }
    let params = config.params()?;
    let n = params.n() as f64;
    let columns = [
        "interval",
        "count",
        "t",
        "gamma_z",
        "zeno_survival",
        "zeno_concurrence",
        "free_survival",
        "free_concurrence",
    ];
    let mut table = Table::new(columns.iter().map(|c| c.to_string()).collect());
    for &interval in &config.zeno_intervals {
        let schedule = ZenoSchedule::within(config.tau_max, interval)?;
        let rate = effective_decay_rate(&params, interval)?;
        let p = zeno_survival(&params, &schedule)?;
        let t = schedule.total_time();
        let free = survival_probability(&params, t);
        table.rows.push(vec![
            Value::Num(interval),
            Value::Int(schedule.count() as i64),
            Value::Num(t),
            Value::from_f64(rate.value()),
            Value::Num(p),
            Value::Num(2.0 / n * p),
            Value::Num(free),
            Value::Num(2.0 / n * free),
        ]);
    }
    Ok(RunOutput::from_table(table))
}

/// Stationary concurrences of the two-qubit superposition over `n`, `s`
/// and `phi`, plus the steady-state graphs in JSON output.
pub fn run_stationary(config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    let grid = &config.sweep_grid;
    let pairs = [PairClass::Kl, PairClass::Kj, PairClass::Jm];
    let mut columns: Vec<String> = ["n", "s", "phi"].iter().map(|c| c.to_string()).collect();
    columns.extend(pairs.iter().map(|p| p.name().to_owned()));
    let mut table = Table::new(columns);
    let mut graphs = Vec::new();
    for &n in &axis(&grid.n, config.n) {
        for &s in &axis(&grid.s, config.s) {
            for &phi in &axis(&grid.phi, config.phi) {
                let spec = InitialSpec::two_qubit(s, phi)?;
                spec.validate(n)?;
                let mut row = vec![Value::Int(n as i64), Value::Num(s), Value::Num(phi)];
                for pair in pairs {
                    row.push(match pair.check(n, spec.kind) {
                        Ok(()) => Value::Num(stationary_concurrence(n, &spec, pair)?),
                        Err(_) => Value::NotApplicable,
                    });
                }
                table.rows.push(row);
                let graph = steady_graph(n, &spec)?;
                graphs.push(json!({ "n": n, "s": s, "phi": phi, "edges": graph.edges }));
            }
        }
    }
    let mut out = RunOutput::from_table(table);
    out.extras.insert("graphs".into(), Json::Array(graphs));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runner::{Mode, OutputFormat, SweepGrid};

    fn two_qubit(quantities: Vec<Quantity>) -> RunConfig {
        RunConfig {
            initial: InitialKind::TwoQubitSuperposition,
            quantities,
            ..RunConfig::default()
        }
    }

    #[test]
    fn simulate_header_and_start() {
        let cfg = RunConfig {
            n: 8,
            samples: 11,
            tau_max: 5.0,
            quantities: vec![Quantity::PairW, Quantity::Survival],
            ..RunConfig::default()
        };
        let out = run_simulate(&cfg).unwrap();
        assert_eq!(out.table.columns, ["tau", "pair_w", "survival"]);
        assert_eq!(out.table.rows.len(), 11);
        assert_eq!(out.table.rows[0], vec![Value::Num(0.0), Value::Num(0.25), Value::Num(1.0)]);
        assert_eq!(out.table.rows[10][0], Value::Num(5.0));
        assert!(out.extras["esd"]["pair_w"].as_array().unwrap().is_empty());
    }

    #[test]
    fn simulate_rejects_bad_requests() {
        assert!(matches!(run_simulate(&RunConfig::default()), Err(Error::Config(_))));
        let cfg = RunConfig { n: 3, ..two_qubit(vec![Quantity::Jm]) };
        assert!(matches!(run_simulate(&cfg), Err(Error::IncompatiblePair { .. })));
        let cfg = RunConfig { zeno_intervals: vec![0.1, 1.0], ..RunConfig { quantities: vec![Quantity::GammaZ], ..RunConfig::default() } };
        assert!(run_simulate(&cfg).is_err());
    }

    #[test]
    fn sweep_marks_missing_pairs() {
        let cfg = RunConfig {
            mode: Mode::Sweep,
            sweep_grid: SweepGrid { n: vec![3, 4], ..SweepGrid::default() },
            stationary_limit: true,
            ..two_qubit(vec![Quantity::Kj, Quantity::Jm])
        };
        let out = run_sweep(&cfg).unwrap();
        assert_eq!(out.table.columns, ["n", "R", "s", "phi", "tau", "kj", "jm"]);
        assert_eq!(out.table.rows[0][4], Value::Inf);
        assert_eq!(out.table.rows[0][6], Value::NotApplicable);
        assert!((out.table.rows[1][5].as_f64().unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn sweep_cell_equals_simulate() {
        let base = RunConfig { n: 6, ratio: 2.0, s: 0.3, samples: 41, tau_max: 8.0, ..two_qubit(vec![Quantity::Kl, Quantity::Kj, Quantity::Survival]) };
        let single = run_simulate(&base).unwrap();
        let sweep = run_sweep(&RunConfig {
            sweep_grid: SweepGrid { n: vec![4, 6], ratio: vec![2.0], s: vec![0.3, -0.2], phi: vec![] },
            ..base.clone()
        })
        .unwrap();
        let cell: Vec<_> = sweep
            .table
            .rows
            .iter()
            .filter(|r| r[0] == Value::Int(6) && r[2] == Value::Num(0.3))
            .map(|r| r[4..].to_vec())
            .collect();
        assert_eq!(cell, single.table.rows);
    }

    #[test]
    fn sweep_refuses_huge_grids() {
        let cfg = RunConfig {
            samples: 100_000,
            sweep_grid: SweepGrid { n: (2..12).collect(), ratio: (1..20).map(f64::from).collect(), ..SweepGrid::default() },
            quantities: vec![Quantity::Survival],
            ..RunConfig::default()
        };
        assert!(matches!(run_sweep(&cfg), Err(Error::GridTooLarge { rows: 19_000_000, .. })));
    }

    #[test]
    fn zeno_table() {
        let cfg = RunConfig { tau_max: 25.0, zeno_intervals: vec![5.0, 1.0, 0.1], ..RunConfig::default() };
        let out = run_zeno(&cfg).unwrap();
        let counts: Vec<_> = out.table.column_values("count").unwrap();
        assert_eq!(counts, vec![Value::Int(5), Value::Int(25), Value::Int(250)]);
        let p: Vec<f64> = out.table.column_values("zeno_survival").unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
        assert!(p[0] < p[1] && p[1] < p[2]);
        assert!(run_zeno(&RunConfig::default()).is_err());
    }

    #[test]
    fn zeno_quantities_in_sweep() {
        let cfg = RunConfig {
            tau_max: 2.0,
            samples: 5,
            zeno_intervals: vec![1.0],
            quantities: vec![Quantity::ZenoSurvival, Quantity::Survival],
            ..RunConfig::default()
        };
        let out = run_sweep(&cfg).unwrap();
        assert_eq!(out.table.columns[4], "T");
        // one completed measurement at tau = 1 reproduces free decay
        let row = &out.table.rows[2];
        assert_eq!(row[5], Value::Num(1.0));
        assert_eq!(row[6], row[7]);
        assert_eq!(out.table.rows[1][6], Value::Num(1.0));
    }

    #[test]
    fn stationary_mode_columns() {
        let cfg = RunConfig {
            sweep_grid: SweepGrid { n: vec![2, 4], s: vec![0.0, -1.0], ..SweepGrid::default() },
            ..RunConfig::default()
        };
        let out = run_stationary(&cfg).unwrap();
        assert_eq!(out.table.columns, ["n", "s", "phi", "kl", "kj", "jm"]);
        assert_eq!(out.table.rows[0][4], Value::NotApplicable);
        assert!((out.table.rows[2][5].as_f64().unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(out.extras["graphs"].as_array().unwrap().len(), 4);
        let text = String::from_utf8(out.render(OutputFormat::Json)).unwrap();
        assert!(text.contains("\"class\": \"kj\""));
    }
}
