use std::fmt;
use std::path::{Path, PathBuf};

use nsv_core::config::{ExperimentKind, ExperimentSection, RunConfig, Setup, TorusSetup};
use nsv_core::experiments::{
    kappa_sweep, run_gronwall, run_manufactured, run_refinement, run_regularization_sweep,
    run_taylor_green,
};
use nsv_core::kv1d::integrate_1d;
use nsv_core::solver::{integrate, solve_regularized, SimConfig};
use nsv_core::verify::{run_suite, Suite};
use nsv_core::NsvError;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::manifest::Manifest;
use crate::table::{num, opt, Table};

pub const LEDGER_FILE: &str = "ledger.csv";
const DEFAULT_VERIFY_SEED: u64 = 2024;

pub struct Context {
    pub out_dir: PathBuf,
    pub seed: Option<u64>,
}

impl Context {
    fn write(&self, name: &str, text: &str, manifest: &mut Manifest) -> Result<(), Failure> {
        let path = self.out_dir.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| Failure::Run(e.into()))?;
        }
        std::fs::write(&path, text).map_err(|e| Failure::Run(NsvError::Io(format!("{}: {e}", path.display()))))?;
        manifest.outputs.push(name.to_string());
        Ok(())
    }
}

#[derive(Debug)]
pub enum Failure {
    /// Unreadable or invalid input.
    Input(NsvError),
    /// The solver or an output write failed.
    Run(NsvError),
    /// Verification checks that did not pass, by name.
    Checks(Vec<String>),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Run(_) | Failure::Checks(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(e) | Failure::Run(e) => write!(f, "{e}"),
            Failure::Checks(names) => write!(f, "{} check(s) failed: {}", names.len(), names.join("; ")),
        }
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).unwrap_or(Value::Null)
}

fn load(path: &Path, manifest: &mut Manifest) -> Result<RunConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(NsvError::Io(format!("{}: {e}", path.display()))))?;
    manifest.config = Value::String(text.clone());
    let cfg = RunConfig::parse(&text).map_err(Failure::Input)?;
    manifest.config = to_value(&cfg);
    Ok(cfg)
}

pub fn simulate(path: &Path, ctx: &Context, manifest: &mut Manifest) -> Result<(), Failure> {
    let cfg = load(path, manifest)?;
    let setup = cfg.setup(ctx.seed).map_err(Failure::Input)?;
    let ledger = match setup {
        Setup::Torus(s) => {
            let run = if s.params.regularization.is_some() {
                solve_regularized(&s.config, &s.params, &s.initial)
            } else {
                integrate(&s.config, &s.params, &s.initial)
            };
            run.map_err(Failure::Run)?.ledger
        }
        Setup::Sine(s) => {
            integrate_1d(&s.initial, s.params, &s.forcing, s.config)
                .map_err(Failure::Run)?
                .ledger
        }
    };
    ctx.write(LEDGER_FILE, &ledger.to_csv_string(), manifest)?;
    manifest.summary = to_value(&ledger.summary());
    Ok(())
}

pub fn verify(name: &str, ctx: &Context, manifest: &mut Manifest) -> Result<(), Failure> {
    let suite: Suite = name.parse().map_err(Failure::Input)?;
    let results = run_suite(suite, ctx.seed.unwrap_or(DEFAULT_VERIFY_SEED));
    for r in &results {
        let mark = if r.passed { "PASS" } else { "FAIL" };
        println!("{mark} {} ({})", r.name, r.detail);
    }
    let failed: Vec<String> = results.iter().filter(|r| !r.passed).map(|r| r.name.clone()).collect();
    let passed = results.len() - failed.len();
    println!("{suite}: {passed}/{} checks passed", results.len());
    manifest.checks = results;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Checks(failed))
    }
}

fn invalid(msg: String) -> Failure {
    Failure::Input(NsvError::Config(msg))
}

/// Sweep entries that must be positive integers.
fn counts(sweep: &[f64], what: &str) -> Result<Vec<usize>, Failure> {
    sweep
        .iter()
        .map(|&x| {
            if x >= 1.0 && x.fract() == 0.0 && x <= u32::MAX as f64 {
                Ok(x as usize)
            } else {
                Err(invalid(format!("experiment.sweep: {what} must be positive integers, got {x}")))
            }
        })
        .collect()
}

pub fn experiment(path: &Path, ctx: &Context, manifest: &mut Manifest) -> Result<(), Failure> {
    let cfg = load(path, manifest)?;
    let Some(exp) = cfg.experiment.clone() else {
        return Err(invalid("missing [experiment] section".into()));
    };
    let table_name = exp.output.clone();
    let report_name = Path::new(&table_name).with_extension("json").display().to_string();
    if report_name == table_name {
        return Err(invalid(format!("experiment.output `{table_name}` must not end in .json")));
    }
    let s = match cfg.setup(ctx.seed).map_err(Failure::Input)? {
        Setup::Torus(s) => s,
        Setup::Sine(_) => return Err(invalid("experiments run on the periodic box (grid.dim = 2 or 3)".into())),
    };
    let (table, report) = dispatch(&exp, &cfg, &s, ctx)?;
    ctx.write(&table_name, &table, manifest)?;
    ctx.write(&report_name, &(serde_json::to_string_pretty(&report).unwrap_or_default() + "\n"), manifest)?;
    manifest.summary = report;
    Ok(())
}

fn dispatch(
    exp: &ExperimentSection,
    cfg: &RunConfig,
    s: &TorusSetup,
    ctx: &Context,
) -> Result<(String, Value), Failure> {
    let run = Failure::Run;
    match exp.kind {
        ExperimentKind::TaylorGreen => {
            let reports = exp
                .sweep
                .par_iter()
                .map(|&a| run_taylor_green(&s.config, &s.params, a))
                .collect::<Result<Vec<_>, _>>()
                .map_err(run)?;
            let mut t = Table::new(&["amplitude", "expected_rate", "measured_rate", "terminal_error"]);
            for r in &reports {
                t.row(&[num(r.amplitude), num(r.expected_rate), opt(r.measured_rate), num(r.terminal_error)]);
            }
            Ok((t.into_string(), json!({ "kind": "taylor_green", "points": reports })))
        }
        ExperimentKind::Manufactured => {
            let target = exp
                .target
                .ok_or_else(|| invalid("manufactured experiment needs experiment.target".into()))?;
            if !cfg.forcing.is_empty() {
                return Err(invalid("manufactured experiment derives its own forcing; remove [[forcing]]".into()));
            }
            let configs: Vec<SimConfig> = exp
                .sweep
                .iter()
                .map(|&dt| {
                    let c = SimConfig { dt, ..s.config.clone() };
                    c.validate().map(|_| c).map_err(Failure::Input)
                })
                .collect::<Result<_, _>>()?;
            let reports = configs
                .par_iter()
                .map(|c| run_manufactured(&target, &s.params, c))
                .collect::<Result<Vec<_>, _>>()
                .map_err(run)?;
            let orders: Vec<Option<f64>> = std::iter::once(None)
                .chain(reports.windows(2).map(|w| {
                    let ratio = w[0].terminal_error / w[1].terminal_error;
                    (ratio > 0.0 && w[0].dt != w[1].dt).then(|| ratio.ln() / (w[0].dt / w[1].dt).ln())
                }))
                .collect();
            let mut t = Table::new(&["dt", "modes", "t_end", "terminal_error", "max_error", "relative_error", "observed_order"]);
            for (r, o) in reports.iter().zip(&orders) {
                t.row(&[
                    num(r.dt),
                    r.modes.to_string(),
                    num(r.t_end),
                    num(r.terminal_error),
                    num(r.max_error),
                    num(r.relative_error),
                    opt(*o),
                ]);
            }
            Ok((
                t.into_string(),
                json!({ "kind": "manufactured", "target": target, "points": reports, "observed_order": orders }),
            ))
        }
        ExperimentKind::Refinement => {
            let shells = counts(&exp.sweep, "shells")?;
            let rows = run_refinement(&s.config, &s.params, &s.initial, &shells).map_err(|e| match e {
                NsvError::InvalidParameter(_) => Failure::Input(e),
                e => Failure::Run(e),
            })?;
            let mut t = Table::new(&["coarse", "fine", "l2_qt", "sup_w12"]);
            for r in &rows {
                t.row(&[r.coarse.to_string(), r.fine.to_string(), num(r.l2_qt), num(r.sup_w12)]);
            }
            Ok((t.into_string(), json!({ "kind": "refinement", "shells": shells, "rows": rows })))
        }
        ExperimentKind::KappaSweep => {
            let points = kappa_sweep(&s.config, &s.params, &s.initial, &exp.sweep).map_err(run)?;
            let mut t = Table::new(&["kappa", "energy_decay_rate", "final_energy"]);
            for p in &points {
                t.row(&[num(p.kappa), opt(p.energy_decay_rate), num(p.final_energy)]);
            }
            Ok((t.into_string(), json!({ "kind": "kappa_sweep", "points": points })))
        }
        ExperimentKind::Gronwall => {
            let seed = exp.perturbation_seed.or(ctx.seed).unwrap_or(1);
            let reports = exp
                .sweep
                .par_iter()
                .map(|&delta| run_gronwall(&s.config, &s.params, &s.initial, delta, seed))
                .collect::<Result<Vec<_>, _>>()
                .map_err(run)?;
            let mut t = Table::new(&["delta", "rate", "max_excess", "max_grad_w"]);
            for r in &reports {
                t.row(&[num(r.delta), opt(r.rate), opt(r.max_excess), num(r.max_grad_w)]);
            }
            Ok((
                t.into_string(),
                json!({ "kind": "gronwall", "perturbation_seed": seed, "runs": reports }),
            ))
        }
        ExperimentKind::RegularizationSweep => {
            let beta = exp
                .beta
                .ok_or_else(|| invalid("regularization_sweep needs experiment.beta".into()))?;
            let n_list: Vec<u32> = counts(&exp.sweep, "regularization indices")?
                .into_iter()
                .map(|n| n as u32)
                .collect();
            let report = run_regularization_sweep(&s.config, &s.params, &s.initial, beta, &n_list)
                .map_err(|e| match e {
                    NsvError::InvalidParameter(_) => Failure::Input(e),
                    e => Failure::Run(e),
                })?;
            let mut t = Table::new(&["n_reg", "stress_norm", "energy_term"]);
            for p in &report.points {
                t.row(&[p.n_reg.to_string(), num(p.stress_norm), num(p.energy_term)]);
            }
            Ok((
                t.into_string(),
                json!({ "kind": "regularization_sweep", "beta": report.beta, "slope": report.slope, "points": report.points }),
            ))
        }
    }
}
