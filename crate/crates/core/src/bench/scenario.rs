use std::f64::consts::PI;

use crate::assembly::{Elasticity, FluidParams, SolidModel, DEFAULT_GAMMA};
use crate::mesh::{build_ellipse, build_unit_square, ellipse_points, FluidMesh, SolidMesh};
use crate::schemes::{SchemeConfig, SchemeKind};
use crate::{Error, Point, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    /// Elliptic curve released from rest relaxes towards its circular
    /// stress-free shape.
    EllipseRelax,
    /// Circle held in a uniformly stretched state inside a fluid at rest.
    SteadyCircle,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::EllipseRelax => "ellipse-relax",
            ScenarioKind::SteadyCircle => "steady-circle",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [ScenarioKind::EllipseRelax, ScenarioKind::SteadyCircle].into_iter().find(|k| k.name() == s)
    }
}

/// Geometry and material data of a benchmark.
///
/// The stress-free reference curve is a circle of radius
/// `reference_radius` about `center`; the initial curve is the ellipse with
/// semi-axes `a`, `b` about the same center, sampled at the same parameter
/// angles. The initial displacement is the difference of the two.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub center: Point,
    pub a: f64,
    pub b: f64,
    pub reference_radius: f64,
    pub fluid: FluidParams,
    pub solid: SolidModel,
    pub gamma: f64,
}

/// Fluid subdivisions and solid node count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Resolution {
    pub n: usize,
    pub m: usize,
}

/// Meshes of one resolution.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub fluid: FluidMesh,
    pub solid: SolidMesh,
}

fn default_materials() -> (FluidParams, SolidModel) {
    (
        FluidParams { rho: 1.0, mu: 0.1 },
        SolidModel { rho_s: 1.0, eps: 0.1, elasticity: Elasticity::GeneralizedString { lambda0: 1.0, lambda1: 10.0 } },
    )
}

impl Scenario {
    /// Ellipse with semi-axes 0.25 and 0.16 relaxing to a circle of the same
    /// area.
    pub fn ellipse_relax() -> Self {
        let (fluid, solid) = default_materials();
        let (a, b) = (0.25, 0.16);
        Scenario {
            kind: ScenarioKind::EllipseRelax,
            center: [0.5, 0.5],
            a,
            b,
            reference_radius: (a * b).sqrt(),
            fluid,
            solid,
            gamma: DEFAULT_GAMMA,
        }
    }

    /// Circle of radius 0.2 whose stress-free radius is 0.15.
    pub fn steady_circle() -> Self {
        let (fluid, solid) = default_materials();
        Scenario {
            kind: ScenarioKind::SteadyCircle,
            center: [0.5, 0.5],
            a: 0.2,
            b: 0.2,
            reference_radius: 0.15,
            fluid,
            solid,
            gamma: DEFAULT_GAMMA,
        }
    }

    pub fn preset(kind: ScenarioKind) -> Self {
        match kind {
            ScenarioKind::EllipseRelax => Self::ellipse_relax(),
            ScenarioKind::SteadyCircle => Self::steady_circle(),
        }
    }

    /// Default solid node count for `n` fluid subdivisions.
    ///
    /// The count matches the reference perimeter at `h_s ≈ 1/8` and is then
    /// scaled with `n/8`, so halving `h_f` doubles the solid nodes and the
    /// chains of a refinement ladder are nested. Other `n` use `h_s ≈ 1/n`.
    pub fn solid_nodes_for(&self, n: usize) -> usize {
        let perimeter = 2.0 * PI * self.reference_radius;
        if n.is_multiple_of(8) {
            let base = ((perimeter * 8.0).round() as usize).max(8);
            base * n / 8
        } else {
            ((perimeter * n as f64).round() as usize).max(8)
        }
    }

    pub fn resolution(&self, n: usize) -> Resolution {
        Resolution { n, m: self.solid_nodes_for(n) }
    }

    pub fn discretize(&self, res: Resolution) -> Result<Discretization> {
        let fluid = build_unit_square(res.n)?;
        let r = self.reference_radius;
        let solid = build_ellipse(self.center, r, r, res.m)?;
        // The initial curve has to fit as well.
        build_ellipse(self.center, self.a, self.b, res.m)?;
        Ok(Discretization { fluid, solid })
    }

    /// Initial displacement: initial curve minus reference curve, node by node.
    pub fn initial_displacement(&self, solid: &SolidMesh) -> Vec<f64> {
        let target = ellipse_points(self.center, self.a, self.b, solid.num_nodes());
        solid
            .nodes()
            .iter()
            .zip(&target)
            .flat_map(|(x, y)| [y[0] - x[0], y[1] - x[1]])
            .collect()
    }

    /// A scheme configuration carrying this scenario's materials.
    pub fn scheme(&self, kind: SchemeKind, r: usize, tau: f64, t_final: f64) -> SchemeConfig {
        SchemeConfig {
            kind,
            r,
            tau,
            t_final,
            fluid: self.fluid,
            solid: self.solid,
            gamma: self.gamma,
            interface_frozen: kind == SchemeKind::MonolithicLinearized,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.reference_radius > 0.0) {
            return Err(Error::InvalidArgument("reference radius must be positive".into()));
        }
        if self.kind == ScenarioKind::SteadyCircle && self.a != self.b {
            return Err(Error::InvalidArgument("a steady circle needs equal semi-axes".into()));
        }
        Ok(())
    }
}
