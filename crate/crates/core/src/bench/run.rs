use rayon::prelude::*;

use super::scenario::{Discretization, Resolution, Scenario};
use crate::assembly::{assemble_operators, AssembledOperators, DiscreteSolidOperator};
use crate::diagnostics::{
    corrected_split_bound, dissipation_increment, energy, split_dissipation_increment, split_energy,
    unweighted_energy, EnergyRecord,
};
use crate::linalg::{generalized_eig_max, EIG_MAX_ITER, EIG_TOL};
use crate::schemes::{cfl_check, CflReport, CoupledState, SchemeConfig, SchemeKind, Stepper};
use crate::{Error, Result};

/// Energy growth factor over the initial energy that aborts a run.
pub const BLOWUP_FACTOR: f64 = 1e6;

/// Everything a finished run leaves behind.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub disc: Discretization,
    pub ops: AssembledOperators,
    pub initial: CoupledState,
    pub state: CoupledState,
    pub records: Vec<EnergyRecord>,
}

/// Run `steps` steps of `config` on `scenario` at resolution `res`.
///
/// `observer` sees every record together with the state it describes,
/// starting with the initial state (`n = 0`). The run aborts with
/// [`Error::Unstable`] once the energy exceeds `BLOWUP_FACTOR · E⁰`.
pub fn run_scenario(
    scenario: &Scenario,
    res: Resolution,
    config: &SchemeConfig,
    steps: usize,
    observer: &mut dyn FnMut(&EnergyRecord, &CoupledState),
) -> Result<RunOutput> {
    scenario.validate()?;
    config.validate()?;
    let disc = scenario.discretize(res)?;
    let d0 = scenario.initial_displacement(&disc.solid);
    let d1 = vec![0.0; d0.len()];
    let initial = CoupledState::initial(disc.fluid.num_vertices(), &disc.solid, d0, d1, config.tau)?;
    let ops = assemble_operators(&disc.fluid, &disc.solid, &config.solid, config.gamma, disc.solid.nodes())?;
    let (state, records) = integrate(&disc, &ops, config, &initial, steps, observer)?;
    Ok(RunOutput { disc, ops, initial, state, records })
}

fn integrate(
    disc: &Discretization,
    ops: &AssembledOperators,
    config: &SchemeConfig,
    initial: &CoupledState,
    steps: usize,
    observer: &mut dyn FnMut(&EnergyRecord, &CoupledState),
) -> Result<(CoupledState, Vec<EnergyRecord>)> {
    let stepper = Stepper::new(&disc.fluid, &disc.solid, ops, *config)?;
    let e0 = energy(initial, ops, config);
    let first = EnergyRecord {
        n: 0,
        t: 0.0,
        energy: e0,
        dissipation_cum: 0.0,
        kinematic_residual: 0.0,
        frac_identity_residual: None,
        split_energy: split_energy(initial, ops, config),
        split_dissipation_cum: 0.0,
        unweighted_energy: unweighted_energy(initial, ops),
    };
    observer(&first, initial);
    let mut records = Vec::with_capacity(steps + 1);
    records.push(first);
    let mut state = initial.clone();
    for _ in 0..steps {
        let (next, report) = stepper.step(&state)?;
        let prev = records.last().unwrap();
        let e = energy(&next, ops, config);
        let rec = EnergyRecord {
            n: next.step,
            t: next.t,
            energy: e,
            dissipation_cum: prev.dissipation_cum + dissipation_increment(&state, &next, ops, config),
            kinematic_residual: report.kinematic_residual,
            frac_identity_residual: report.correction_residual,
            split_energy: split_energy(&next, ops, config),
            split_dissipation_cum: prev.split_dissipation_cum + split_dissipation_increment(&state, &next, ops, config),
            unweighted_energy: unweighted_energy(&next, ops),
        };
        observer(&rec, &next);
        records.push(rec);
        if e0 > 0.0 && !(e <= BLOWUP_FACTOR * e0) {
            return Err(Error::Unstable { step: next.step, energy: e, limit: BLOWUP_FACTOR * e0 });
        }
        state = next;
    }
    Ok((state, records))
}

/// One time step size of a stability sweep.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub tau: f64,
    /// Energy stayed within the bound its scheme guarantees (see
    /// [`stability_sweep`]).
    pub stable: bool,
    /// Upper bound checked for every step (`f64::INFINITY` when the scheme
    /// has no step-independent bound).
    pub bound: f64,
    pub max_energy: f64,
    pub cfl: CflReport,
    /// Reason the run stopped early, if it did; `records` then ends at the
    /// last completed step.
    pub aborted: Option<String>,
    pub records: Vec<EnergyRecord>,
}

/// Run `steps` steps for every `tau` at a fixed resolution.
///
/// A point is stable when the energy respects the bound of its scheme at
/// every step: non-increasing for the monolithic schemes, `E⁰` for the
/// corrected split with `r = 0`, `E⁰ + (τ²/2)‖ḋ⁰‖_s² + (τ²/2ρ_sε)‖L_h^s d⁰‖²`
/// for `r = 1`, and mere completion without blow-up otherwise. Points run in
/// parallel; results come back in the order of `taus`. A point that fails
/// (blow-up, curve leaving the domain, singular system) is recorded as
/// unstable and the sweep goes on.
pub fn stability_sweep(
    scenario: &Scenario,
    res: Resolution,
    kind: SchemeKind,
    r: usize,
    taus: &[f64],
    steps: usize,
) -> Result<Vec<SweepPoint>> {
    let disc = scenario.discretize(res)?;
    let probe = scenario.scheme(kind, r, 1.0, 0.0);
    let ops = assemble_operators(&disc.fluid, &disc.solid, &probe.solid, probe.gamma, disc.solid.nodes())?;
    let lambda_max = generalized_eig_max(&ops.solid.stiffness, &ops.solid.mass, EIG_TOL, EIG_MAX_ITER)?.lambda;
    let d0 = scenario.initial_displacement(&disc.solid);
    let l_d0 = DiscreteSolidOperator::new(&ops.solid)?.apply(&d0);

    taus.par_iter()
        .map(|&tau| -> Result<SweepPoint> {
            let config = scenario.scheme(kind, r, tau, tau * steps as f64);
            let initial =
                CoupledState::initial(disc.fluid.num_vertices(), &disc.solid, d0.clone(), vec![0.0; d0.len()], tau)?;
            let e0 = energy(&initial, &ops, &config);
            let bound = match (kind, r) {
                (SchemeKind::InertialSplitCorrected, 0) => e0,
                (SchemeKind::InertialSplitCorrected, 1) => corrected_split_bound(&initial, &ops, &config, &l_d0),
                _ => f64::INFINITY,
            };
            let cfl = cfl_check(kind, r, tau, lambda_max, config.solid.inertia());
            let mut partial = Vec::new();
            let outcome = integrate(&disc, &ops, &config, &initial, steps, &mut |rec, _| partial.push(*rec));
            let (records, aborted) = match outcome {
                Ok((_, recs)) => (recs, None),
                Err(Error::Unstable { step, energy, limit }) => {
                    (partial, Some(format!("energy {energy:e} exceeded {limit:e} at step {step}")))
                }
                Err(e) => (partial, Some(e.to_string())),
            };
            let slack = 1e-12 * e0;
            let stable = aborted.is_none()
                && if kind.is_monolithic() {
                    records.windows(2).all(|w| w[1].energy <= w[0].energy + slack)
                } else {
                    records.iter().all(|rec| rec.energy <= bound + slack)
                };
            let max_energy = records.iter().map(|rec| rec.energy).fold(f64::NEG_INFINITY, f64::max);
            Ok(SweepPoint { tau, stable, bound, max_energy, cfl, aborted, records })
        })
        .collect()
}
