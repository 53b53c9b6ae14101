//! Finite element operators for the fluid, the solid and their coupling.

mod coupling;
mod fluid;
mod quadrature;
mod solid;

pub use coupling::assemble_coupling;
pub use fluid::{
    assemble_fluid, free_velocity_dofs, interpolate_scalar, interpolate_vector, load_vector, FluidBlocks,
    DEFAULT_GAMMA,
};
pub use quadrature::{edge_midpoint_rule, gauss3, seven_point_rule, LineRule, TriangleRule};
pub use solid::{assemble_solid, Elasticity, SolidBlocks, SolidModel};

use crate::linalg::{SparseLu, SparseMatrix};
use crate::mesh::{FluidMesh, SolidMesh};
use crate::{Point, Result};

/// Gradients of the three P1 basis functions on triangle `t`.
pub fn p1_gradients_of(mesh: &FluidMesh, t: usize) -> [[f64; 2]; 3] {
    fluid::p1_gradients(mesh.corners(t), mesh.area(t))
}

/// Fluid density and dynamic viscosity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluidParams {
    pub rho: f64,
    pub mu: f64,
}

/// Every operator needed by the time steppers.
#[derive(Debug, Clone)]
pub struct AssembledOperators {
    pub fluid: FluidBlocks,
    pub solid: SolidBlocks,
    /// Coupling at the configuration given to [`assemble_operators`].
    pub coupling: SparseMatrix,
    /// Velocity unknowns that are not fixed by the no-slip condition.
    pub free_velocity: Vec<usize>,
}

/// Assemble fluid, solid and coupling operators. The coupling is evaluated
/// with the solid nodes placed at `positions`.
pub fn assemble_operators(
    fluid: &FluidMesh,
    solid: &SolidMesh,
    model: &SolidModel,
    gamma: f64,
    positions: &[Point],
) -> Result<AssembledOperators> {
    Ok(AssembledOperators {
        fluid: assemble_fluid(fluid, gamma),
        solid: assemble_solid(solid, model),
        coupling: assemble_coupling(fluid, solid, positions)?,
        free_velocity: free_velocity_dofs(fluid),
    })
}

/// The discrete elastic operator `L_h^s`: `w ↦ x` with `M_s x = K_s w`.
#[derive(Debug, Clone)]
pub struct DiscreteSolidOperator {
    mass_lu: SparseLu,
    stiffness: SparseMatrix,
}

impl DiscreteSolidOperator {
    pub fn new(blocks: &SolidBlocks) -> Result<Self> {
        Ok(DiscreteSolidOperator { mass_lu: SparseLu::new(&blocks.mass)?, stiffness: blocks.stiffness.clone() })
    }

    pub fn apply(&self, w: &[f64]) -> Vec<f64> {
        self.mass_lu.solve(&self.stiffness.mul_vec(w))
    }
}

/// One-off application of `L_h^s`.
pub fn apply_discrete_solid_operator(blocks: &SolidBlocks, w: &[f64]) -> Result<Vec<f64>> {
    Ok(DiscreteSolidOperator::new(blocks)?.apply(w))
}
