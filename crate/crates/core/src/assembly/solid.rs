use crate::linalg::{SparseMatrix, Triplets};
use crate::mesh::SolidMesh;

/// Elastic response of the immersed curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Elasticity {
    /// `a(d, w) = λ0 ∫ ∂_s d·∂_s w + λ1 ∫ d·w` on the reference curve.
    GeneralizedString { lambda0: f64, lambda1: f64 },
    /// Zeroth-order membrane: `a(d, w) = k ∫ d·w`.
    Membrane { stiffness: f64 },
}

/// Material data of the immersed curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolidModel {
    pub rho_s: f64,
    pub eps: f64,
    pub elasticity: Elasticity,
}

impl SolidModel {
    /// Thin cylindrical shell reduced to a generalized string, with Young's
    /// modulus `young`, Poisson ratio `nu`, thickness `eps` and reference
    /// radius `radius`.
    pub fn from_shell(rho_s: f64, eps: f64, young: f64, nu: f64, radius: f64) -> Self {
        let lambda0 = young * eps / (2.0 * (1.0 + nu));
        let lambda1 = young * eps / (radius * radius * (1.0 - nu * nu));
        SolidModel { rho_s, eps, elasticity: Elasticity::GeneralizedString { lambda0, lambda1 } }
    }

    /// Surface density `ρ_s ε`.
    pub fn inertia(&self) -> f64 {
        self.rho_s * self.eps
    }
}

/// Solid operators, interleaved by node: component `c` of node `k` has
/// index `2*k + c`.
#[derive(Debug, Clone)]
pub struct SolidBlocks {
    pub mass: SparseMatrix,
    pub stiffness: SparseMatrix,
    /// Multiplier-by-solid coupling `∫ μ·w`, identical to the mass matrix for
    /// the L² pairing on matching spaces.
    pub multiplier: SparseMatrix,
}

/// Assemble mass, stiffness and multiplier blocks on the reference chain.
pub fn assemble_solid(mesh: &SolidMesh, model: &SolidModel) -> SolidBlocks {
    let n = 2 * mesh.num_nodes();
    let mut mass = Triplets::with_capacity(n, n, 8 * mesh.num_segments());
    let mut stiff = Triplets::with_capacity(n, n, 8 * mesh.num_segments());
    for (seg, &l) in mesh.segments().iter().zip(mesh.lengths()) {
        let ml = [[l / 3.0, l / 6.0], [l / 6.0, l / 3.0]];
        let kl = match model.elasticity {
            Elasticity::GeneralizedString { lambda0, lambda1 } => {
                let g = lambda0 / l;
                [
                    [g + lambda1 * ml[0][0], -g + lambda1 * ml[0][1]],
                    [-g + lambda1 * ml[1][0], g + lambda1 * ml[1][1]],
                ]
            }
            Elasticity::Membrane { stiffness } => {
                [[stiffness * ml[0][0], stiffness * ml[0][1]], [stiffness * ml[1][0], stiffness * ml[1][1]]]
            }
        };
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    mass.push(2 * seg[a] + c, 2 * seg[b] + c, ml[a][b]);
                    stiff.push(2 * seg[a] + c, 2 * seg[b] + c, kl[a][b]);
                }
            }
        }
    }
    let mass = mass.build();
    SolidBlocks { multiplier: mass.clone(), mass, stiffness: stiff.build() }
}
