//! Benchmark scenarios, stability sweeps and convergence studies.

mod mms;
mod run;
mod scenario;
mod study;

pub use mms::{manufactured, solve_stokes, stokes_mms, MmsRow, StokesSolution};
pub use run::{run_scenario, stability_sweep, RunOutput, SweepPoint, BLOWUP_FACTOR};
pub use scenario::{Discretization, Resolution, Scenario, ScenarioKind};
pub use study::{convergence_study, StudyPlan, StudyRow, StudyTable};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "IMMERSED_FSI_THREADS";

/// Worker cap from [`THREADS_ENV`], if set to a positive integer.
pub fn thread_cap_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Run `f` inside a dedicated pool with at most `threads` workers (all
/// available cores when `None`).
pub fn with_thread_cap<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    match builder.build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}
