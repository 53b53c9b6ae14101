use rayon::prelude::*;

use super::run::{run_scenario, RunOutput};
use super::scenario::Scenario;
use crate::diagnostics::{convergence_rate, error_vs_reference, fmt_f64, ErrorReport, Solution};
use crate::schemes::{steps_to, SchemeConfig};
use crate::{Error, Result};

/// Which discretization parameter a study refines.
#[derive(Debug, Clone, PartialEq)]
pub enum StudyPlan {
    /// Fixed mesh `n`, time steps `taus` against a run with `tau_ref`.
    Time { n: usize, taus: Vec<f64>, tau_ref: f64, t_eval: f64 },
    /// Fixed step `tau`, meshes `ns` against a run on `n_ref`.
    Space { tau: f64, ns: Vec<usize>, n_ref: usize, t_eval: f64 },
    /// Mesh and step refined together (`ns[i]` with `taus[i]`).
    Global { ns: Vec<usize>, taus: Vec<f64>, n_ref: usize, tau_ref: f64, t_eval: f64 },
}

impl StudyPlan {
    pub fn name(&self) -> &'static str {
        match self {
            StudyPlan::Time { .. } => "time",
            StudyPlan::Space { .. } => "space",
            StudyPlan::Global { .. } => "global",
        }
    }

    fn t_eval(&self) -> f64 {
        match self {
            StudyPlan::Time { t_eval, .. } | StudyPlan::Space { t_eval, .. } | StudyPlan::Global { t_eval, .. } => {
                *t_eval
            }
        }
    }

    /// `(n, tau)` of the reference run followed by each ladder point.
    fn runs(&self) -> Result<Vec<(usize, f64)>> {
        let mut out = Vec::new();
        match self {
            StudyPlan::Time { n, taus, tau_ref, .. } => {
                out.push((*n, *tau_ref));
                out.extend(taus.iter().map(|&t| (*n, t)));
            }
            StudyPlan::Space { tau, ns, n_ref, .. } => {
                out.push((*n_ref, *tau));
                out.extend(ns.iter().map(|&n| (n, *tau)));
            }
            StudyPlan::Global { ns, taus, n_ref, tau_ref, .. } => {
                if ns.len() != taus.len() {
                    return Err(Error::InvalidArgument("global study needs as many steps as meshes".into()));
                }
                out.push((*n_ref, *tau_ref));
                out.extend(ns.iter().copied().zip(taus.iter().copied()));
            }
        }
        if out.len() < 2 {
            return Err(Error::InvalidArgument("study needs at least one ladder point".into()));
        }
        Ok(out)
    }
}

/// One ladder point of a study.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    /// `τ` for time studies, `h = 1/n` otherwise.
    pub param: f64,
    pub n: usize,
    pub tau: f64,
    pub errors: ErrorReport,
    /// Rates against the previous (coarser) row; `None` on the first row.
    pub rate_total: Option<f64>,
    pub rate_u: Option<f64>,
    pub rate_p: Option<f64>,
    pub rate_d: Option<f64>,
    pub rate_ddot: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyTable {
    pub name: String,
    pub rows: Vec<StudyRow>,
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

impl StudyTable {
    pub const ERROR_COLUMNS: &'static str = "param,err_u,err_d,err_ddot,total,rate";
    pub const FIELD_COLUMNS: &'static str =
        "param,n,tau,err_u,rate_u,err_p,rate_p,err_d,rate_d,err_ddot,rate_ddot";

    /// Rows of the error table (`param,err_u,err_d,err_ddot,total,rate`).
    pub fn error_rows(&self) -> Vec<String> {
        self.rows
            .iter()
            .map(|r| {
                format!(
                    "{},{},{},{},{},{}",
                    fmt_f64(r.param),
                    fmt_f64(r.errors.err_u_l2),
                    fmt_f64(r.errors.err_d_energy),
                    fmt_f64(r.errors.err_ddot_l2),
                    fmt_f64(r.errors.total),
                    opt(r.rate_total)
                )
            })
            .collect()
    }

    /// Rows of the per-field table, including pressure.
    pub fn field_rows(&self) -> Vec<String> {
        self.rows
            .iter()
            .map(|r| {
                format!(
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    fmt_f64(r.param),
                    r.n,
                    fmt_f64(r.tau),
                    fmt_f64(r.errors.err_u_l2),
                    opt(r.rate_u),
                    fmt_f64(r.errors.err_p_l2),
                    opt(r.rate_p),
                    fmt_f64(r.errors.err_d_energy),
                    opt(r.rate_d),
                    fmt_f64(r.errors.err_ddot_l2),
                    opt(r.rate_ddot)
                )
            })
            .collect()
    }

    pub fn last_row(&self) -> &StudyRow {
        self.rows.last().expect("non-empty study")
    }
}

/// Run a convergence study of `base` (its `tau` and `t_final` are replaced)
/// on `scenario`.
///
/// The reference and all ladder runs execute in parallel. Errors are
/// measured at `t_eval` on the reference meshes and assembled in ladder
/// order, so the table does not depend on the number of worker threads.
pub fn convergence_study(plan: &StudyPlan, scenario: &Scenario, base: &SchemeConfig) -> Result<StudyTable> {
    let runs = plan.runs()?;
    let t_eval = plan.t_eval();
    let outputs: Vec<RunOutput> = runs
        .par_iter()
        .map(|&(n, tau)| {
            let config = SchemeConfig { tau, t_final: t_eval, ..*base };
            let steps = steps_to(t_eval, tau)?;
            run_scenario(scenario, scenario.resolution(n), &config, steps, &mut |_, _| {})
        })
        .collect::<Result<Vec<_>>>()?;

    let reference = &outputs[0];
    let ref_sol = Solution { fluid: &reference.disc.fluid, solid: &reference.disc.solid, state: &reference.state };
    let mut rows: Vec<StudyRow> = Vec::with_capacity(runs.len() - 1);
    for (&(n, tau), out) in runs[1..].iter().zip(&outputs[1..]) {
        let sol = Solution { fluid: &out.disc.fluid, solid: &out.disc.solid, state: &out.state };
        let errors = error_vs_reference(sol, ref_sol, &reference.ops)?;
        let param = match plan {
            StudyPlan::Time { .. } => tau,
            _ => 1.0 / n as f64,
        };
        let prev = rows.last().map(|r| r.errors);
        let rate = |f: fn(&ErrorReport) -> f64| prev.and_then(|p| convergence_rate(f(&p), f(&errors)).ok());
        rows.push(StudyRow {
            param,
            n,
            tau,
            errors,
            rate_total: rate(|e| e.total),
            rate_u: rate(|e| e.err_u_l2),
            rate_p: rate(|e| e.err_p_l2),
            rate_d: rate(|e| e.err_d_energy),
            rate_ddot: rate(|e| e.err_ddot_l2),
        });
    }
    Ok(StudyTable { name: plan.name().to_string(), rows })
}
