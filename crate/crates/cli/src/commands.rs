use std::io::{self, Write};

use immersed_fsi::assembly::assemble_solid;
use immersed_fsi::bench::{convergence_study, run_scenario, stability_sweep, stokes_mms, MmsRow, StudyTable};
use immersed_fsi::diagnostics::{fmt_f64, EnergyRecord};
use immersed_fsi::linalg::{generalized_eig_max, EIG_MAX_ITER, EIG_TOL};
use immersed_fsi::schemes::{cfl_check, CoupledState, SchemeKind};

use crate::config::RunConfig;
use crate::output::OutputDir;

/// Subcommands of the driver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Run,
    Sweep,
    Converge,
    StokesMms,
    Check,
}

impl Command {
    pub const ALL: [Command; 5] = [Command::Run, Command::Sweep, Command::Converge, Command::StokesMms, Command::Check];

    pub fn name(self) -> &'static str {
        match self {
            Command::Run => "run",
            Command::Sweep => "sweep",
            Command::Converge => "converge",
            Command::StokesMms => "stokes-mms",
            Command::Check => "check",
        }
    }

    pub fn about(self) -> &'static str {
        match self {
            Command::Run => "integrate one scenario and write energy.csv and snapshots",
            Command::Sweep => "run a stability sweep over sweep.taus",
            Command::Converge => "run a convergence study and write errors_<study>.csv",
            Command::StokesMms => "stabilized Stokes manufactured-solution study",
            Command::Check => "report the time-step restriction of the configured scheme",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == s)
    }
}

/// Outcome of a subcommand that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// A stability guarantee was violated or the run blew up.
    Failed,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Solver(#[from] immersed_fsi::Error),
    #[error("writing output: {0}")]
    Io(#[from] io::Error),
}

/// Execute `cmd`, writing files under the configured output directory and a
/// short report to `log`.
pub fn dispatch(cmd: Command, cfg: &RunConfig, log: &mut dyn Write) -> Result<Outcome, RunError> {
    if cmd == Command::Check {
        return check(cfg, log);
    }
    let out = OutputDir::create(&cfg.output_dir, &cfg.hash())?;
    out.effective_config(&cfg.effective_text())?;
    match cmd {
        Command::Run => run(cfg, &out, log),
        Command::Sweep => sweep(cfg, &out, log),
        Command::Converge => converge(cfg, &out, log),
        Command::StokesMms => mms(cfg, &out, log),
        Command::Check => unreachable!(),
    }
}

const SOLID_COLUMNS: &str = "node,x,y,d_x,d_y,ddot_x,ddot_y,lambda_x,lambda_y";
const FLUID_COLUMNS: &str = "vertex,x,y,u_x,u_y,p";

fn snapshot(out: &OutputDir, vertices: &[[f64; 2]], state: &CoupledState) -> io::Result<()> {
    let solid: Vec<String> = state
        .phi
        .iter()
        .enumerate()
        .map(|(k, x)| {
            let f = |v: &[f64], c: usize| fmt_f64(v[2 * k + c]);
            format!(
                "{k},{},{},{},{},{},{},{},{}",
                fmt_f64(x[0]),
                fmt_f64(x[1]),
                f(&state.d, 0),
                f(&state.d, 1),
                f(&state.ddot, 0),
                f(&state.ddot, 1),
                f(&state.lambda, 0),
                f(&state.lambda, 1)
            )
        })
        .collect();
    out.table(&format!("snapshot_{}", state.step), SOLID_COLUMNS, &solid)?;
    let fluid: Vec<String> = vertices
        .iter()
        .enumerate()
        .map(|(i, x)| {
            format!(
                "{i},{},{},{},{},{}",
                fmt_f64(x[0]),
                fmt_f64(x[1]),
                fmt_f64(state.u[2 * i]),
                fmt_f64(state.u[2 * i + 1]),
                fmt_f64(state.p[i])
            )
        })
        .collect();
    out.table(&format!("snapshot_{}_fluid", state.step), FLUID_COLUMNS, &fluid)
}

fn run(cfg: &RunConfig, out: &OutputDir, log: &mut dyn Write) -> Result<Outcome, RunError> {
    let steps = cfg.scheme.num_steps()?;
    let disc = cfg.scenario.discretize(cfg.resolution)?;
    let vertices = disc.fluid.vertices().to_vec();
    let mut rows = Vec::with_capacity(steps + 1);
    let mut records: Vec<EnergyRecord> = Vec::with_capacity(steps + 1);
    let mut write_err: Option<io::Error> = None;
    let every = cfg.snapshot_every;
    let result = run_scenario(&cfg.scenario, cfg.resolution, &cfg.scheme, steps, &mut |rec, state| {
        rows.push(rec.csv_row());
        records.push(*rec);
        if every > 0 && (rec.n % every == 0 || rec.n == steps) && write_err.is_none() {
            write_err = snapshot(out, &vertices, state).err();
        }
    });
    out.table("energy", EnergyRecord::COLUMNS, &rows)?;
    if let Some(e) = write_err {
        return Err(e.into());
    }
    match result {
        Ok(_) => {
            let first = records.first().map(|r| r.energy).unwrap_or(0.0);
            let last = records.last().map(|r| r.energy).unwrap_or(0.0);
            let kin = records.iter().map(|r| r.kinematic_residual).fold(0.0, f64::max);
            writeln!(log, "{} steps of {} on {}", steps, cfg.scheme.kind, cfg.scenario.kind.name())?;
            writeln!(log, "energy {} -> {}", fmt_f64(first), fmt_f64(last))?;
            writeln!(log, "max kinematic residual {}", fmt_f64(kin))?;
            Ok(Outcome::Success)
        }
        Err(e @ immersed_fsi::Error::Unstable { .. }) => {
            writeln!(log, "run aborted: {e}")?;
            Ok(Outcome::Failed)
        }
        Err(e) => Err(e.into()),
    }
}

const SWEEP_COLUMNS: &str = "tau,stable,bound,max_energy,cfl_value,cfl_limit,cfl_satisfied,steps_done";

fn sweep(cfg: &RunConfig, out: &OutputDir, log: &mut dyn Write) -> Result<Outcome, RunError> {
    let kind = cfg.scheme.kind;
    let r = cfg.scheme.r;
    let points = stability_sweep(&cfg.scenario, cfg.resolution, kind, r, &cfg.sweep_taus, cfg.sweep_steps)?;
    let mut rows = Vec::with_capacity(points.len());
    let mut violated = false;
    for (k, p) in points.iter().enumerate() {
        let energy: Vec<String> = p.records.iter().map(EnergyRecord::csv_row).collect();
        out.table(&format!("energy_sweep_{k}"), EnergyRecord::COLUMNS, &energy)?;
        let bound = if p.bound.is_finite() { fmt_f64(p.bound) } else { String::new() };
        let max_energy = if p.max_energy.is_finite() { fmt_f64(p.max_energy) } else { String::new() };
        let (value, limit) = if p.cfl.unconditional {
            (String::new(), String::new())
        } else {
            (fmt_f64(p.cfl.value), fmt_f64(p.cfl.limit))
        };
        rows.push(format!(
            "{},{},{bound},{max_energy},{value},{limit},{},{}",
            fmt_f64(p.tau),
            p.stable,
            p.cfl.satisfied,
            p.records.len().saturating_sub(1)
        ));
        let status = match (&p.aborted, p.stable) {
            (Some(msg), _) => format!("aborted ({msg})"),
            (None, true) => "stable".to_string(),
            (None, false) => "bound violated".to_string(),
        };
        writeln!(log, "tau {:<8} {status}; cfl {}", p.tau, if p.cfl.satisfied { "ok" } else { "violated" })?;
        // Only schemes with an unconditional energy estimate can fail a sweep.
        violated |= p.cfl.unconditional && !p.stable && guaranteed(kind, r);
    }
    out.table("sweep", SWEEP_COLUMNS, &rows)?;
    Ok(if violated { Outcome::Failed } else { Outcome::Success })
}

fn guaranteed(kind: SchemeKind, r: usize) -> bool {
    kind.is_monolithic() || (kind == SchemeKind::InertialSplitCorrected && r <= 1)
}

fn converge(cfg: &RunConfig, out: &OutputDir, log: &mut dyn Write) -> Result<Outcome, RunError> {
    let table = convergence_study(&cfg.study, &cfg.scenario, &cfg.scheme)?;
    out.table(&format!("errors_{}", table.name), StudyTable::ERROR_COLUMNS, &table.error_rows())?;
    out.table(&format!("fields_{}", table.name), StudyTable::FIELD_COLUMNS, &table.field_rows())?;
    writeln!(log, "{} convergence of {}", table.name, cfg.scheme.kind)?;
    writeln!(log, "{}", StudyTable::ERROR_COLUMNS)?;
    for row in table.error_rows() {
        writeln!(log, "{row}")?;
    }
    Ok(Outcome::Success)
}

fn mms_row(r: &MmsRow) -> String {
    let o = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    format!(
        "{},{},{},{},{},{},{},{}",
        r.n,
        fmt_f64(1.0 / r.n as f64),
        fmt_f64(r.err_u_l2),
        o(r.rate_u_l2),
        fmt_f64(r.err_u_h1),
        o(r.rate_u_h1),
        fmt_f64(r.err_p_l2),
        o(r.rate_p_l2)
    )
}

fn mms(cfg: &RunConfig, out: &OutputDir, log: &mut dyn Write) -> Result<Outcome, RunError> {
    let rows = stokes_mms(&cfg.mms.ns, cfg.mms.mu, cfg.mms.gamma)?;
    let lines: Vec<String> = rows.iter().map(mms_row).collect();
    out.table("errors_mms", MmsRow::COLUMNS, &lines)?;
    writeln!(log, "{}", MmsRow::COLUMNS)?;
    for l in &lines {
        writeln!(log, "{l}")?;
    }
    Ok(Outcome::Success)
}

fn check(cfg: &RunConfig, log: &mut dyn Write) -> Result<Outcome, RunError> {
    let kind = cfg.scheme.kind;
    let inertia = cfg.scheme.solid.inertia();
    let unconditional = cfg_check_unconditional(kind, cfg.scheme.r);
    if unconditional {
        writeln!(log, "unconditional")?;
        return Ok(Outcome::Success);
    }
    let disc = cfg.scenario.discretize(cfg.resolution)?;
    let blocks = assemble_solid(&disc.solid, &cfg.scheme.solid);
    let lambda = generalized_eig_max(&blocks.stiffness, &blocks.mass, EIG_TOL, EIG_MAX_ITER)?.lambda;
    let report = cfl_check(kind, cfg.scheme.r, cfg.scheme.tau, lambda, inertia);
    writeln!(
        log,
        "conditional: {} with lambda_max = {}: {} < {} is {}",
        report.condition,
        fmt_f64(lambda),
        fmt_f64(report.value),
        fmt_f64(report.limit),
        if report.satisfied { "satisfied" } else { "violated" }
    )?;
    Ok(Outcome::Success)
}

fn cfg_check_unconditional(kind: SchemeKind, r: usize) -> bool {
    cfl_check(kind, r, 1.0, 0.0, 1.0).unconditional
}
