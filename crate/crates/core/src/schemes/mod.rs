//! Time discretizations of the coupled problem.
//!
//! * [`SchemeKind::Monolithic`] solves fluid, solid and multiplier together
//!   with backward Euler, tracing the fluid on the curve at the previous
//!   configuration.
//! * [`SchemeKind::MonolithicLinearized`] is the same coupling with the
//!   interface frozen at the reference configuration.
//! * [`SchemeKind::InertialSplit`] keeps only solid inertia implicit and
//!   feeds the elastic force from an extrapolated displacement.
//! * [`SchemeKind::InertialSplitCorrected`] adds a solid-only correction
//!   that brings the elastic force back to the new displacement.

mod cfl;
mod stepper;

pub use cfl::{cfl_check, CflReport};
pub use stepper::{StepReport, Stepper};

use crate::assembly::{FluidParams, SolidModel};
use crate::mesh::SolidMesh;
use crate::{Error, Point, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    Monolithic,
    MonolithicLinearized,
    InertialSplit,
    InertialSplitCorrected,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 4] = [
        SchemeKind::Monolithic,
        SchemeKind::MonolithicLinearized,
        SchemeKind::InertialSplit,
        SchemeKind::InertialSplitCorrected,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Monolithic => "monolithic",
            SchemeKind::MonolithicLinearized => "monolithic-linearized",
            SchemeKind::InertialSplit => "inertial-split",
            SchemeKind::InertialSplitCorrected => "inertial-split-corrected",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    pub fn is_monolithic(self) -> bool {
        matches!(self, SchemeKind::Monolithic | SchemeKind::MonolithicLinearized)
    }
}

impl std::fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Everything a time stepper needs besides meshes and operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    pub kind: SchemeKind,
    /// Extrapolation order of the elastic displacement in the splittings.
    pub r: usize,
    pub tau: f64,
    pub t_final: f64,
    pub fluid: FluidParams,
    pub solid: SolidModel,
    pub gamma: f64,
    /// Trace the fluid on the reference configuration instead of the
    /// previous one. Always on for the linearized monolithic scheme.
    pub interface_frozen: bool,
}

impl SchemeConfig {
    pub fn frozen(&self) -> bool {
        self.interface_frozen || self.kind == SchemeKind::MonolithicLinearized
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return bad(format!("time step must be positive, got {}", self.tau));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return bad(format!("final time must be non-negative, got {}", self.t_final));
        }
        if self.r > 2 {
            return bad(format!("extrapolation order must be 0, 1 or 2, got {}", self.r));
        }
        if self.kind == SchemeKind::InertialSplit && self.r == 0 {
            return bad("the uncorrected inertial split needs extrapolation order >= 1".into());
        }
        let positive = [
            ("fluid.rho", self.fluid.rho),
            ("fluid.mu", self.fluid.mu),
            ("solid.rho", self.solid.rho_s),
            ("solid.eps", self.solid.eps),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return bad(format!("stabilization must be non-negative, got {}", self.gamma));
        }
        Ok(())
    }

    /// Number of steps to reach `t_final`; errors unless `t_final` is an
    /// integer multiple of `tau`.
    pub fn num_steps(&self) -> Result<usize> {
        steps_to(self.t_final, self.tau)
    }
}

/// Integer number of steps of size `tau` that reach `t`.
pub fn steps_to(t: f64, tau: f64) -> Result<usize> {
    let n = (t / tau).round();
    if (n * tau - t).abs() > 1e-9 * t.max(1.0) {
        return Err(Error::InvalidArgument(format!("time {t} is not a multiple of step {tau}")));
    }
    Ok(n as usize)
}

/// Discrete unknowns after a completed step.
///
/// `u` covers every fluid vertex (boundary entries stay zero); `d`, `ddot`
/// and `lambda` are interleaved per solid node. `d_prev` is the displacement
/// one step back and `ddot_half` is the intermediate velocity of the
/// corrected split (empty otherwise).
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledState {
    pub u: Vec<f64>,
    pub p: Vec<f64>,
    pub d: Vec<f64>,
    pub ddot: Vec<f64>,
    pub lambda: Vec<f64>,
    pub phi: Vec<Point>,
    pub d_prev: Vec<f64>,
    pub ddot_half: Vec<f64>,
    pub t: f64,
    pub step: usize,
}

impl CoupledState {
    /// Fluid at rest, solid displaced by `d0` with velocity `d1`.
    pub fn initial(num_fluid_vertices: usize, solid: &SolidMesh, d0: Vec<f64>, d1: Vec<f64>, tau: f64) -> Result<Self> {
        let ns = 2 * solid.num_nodes();
        if d0.len() != ns || d1.len() != ns {
            return Err(Error::InvalidArgument(format!(
                "initial data has length {}/{}, expected {ns}",
                d0.len(),
                d1.len()
            )));
        }
        let d_prev = d0.iter().zip(&d1).map(|(a, b)| a - tau * b).collect();
        Ok(CoupledState {
            u: vec![0.0; 2 * num_fluid_vertices],
            p: vec![0.0; num_fluid_vertices],
            phi: solid.deformed(&d0),
            d: d0,
            ddot: d1,
            lambda: vec![0.0; ns],
            d_prev,
            ddot_half: Vec::new(),
            t: 0.0,
            step: 0,
        })
    }
}

/// Extrapolated displacement `d^{n⋆}` of order `r` from the last state.
pub fn extrapolate(state: &CoupledState, r: usize, tau: f64) -> Vec<f64> {
    match r {
        0 => vec![0.0; state.d.len()],
        1 => state.d.clone(),
        _ => state.d.iter().zip(&state.ddot).map(|(d, v)| d + tau * v).collect(),
    }
}
