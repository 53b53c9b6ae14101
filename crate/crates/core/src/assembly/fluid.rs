use super::quadrature::{edge_midpoint_rule, TriangleRule};
use crate::linalg::{SparseMatrix, Triplets};
use crate::mesh::FluidMesh;
use crate::Point;

/// Default pressure stabilization parameter.
pub const DEFAULT_GAMMA: f64 = 0.05;

/// Fluid operators over all vertices, before boundary conditions.
///
/// Velocity unknowns are interleaved: component `c` at vertex `v` has index
/// `2*v + c`. Pressure unknowns are numbered by vertex.
#[derive(Debug, Clone)]
pub struct FluidBlocks {
    /// Vector mass matrix.
    pub mass: SparseMatrix,
    /// Symmetric-gradient form `∫ ε(u):ε(v)`.
    pub stiffness: SparseMatrix,
    /// `B_{q,j} = -∫ div(φ_j) ψ_q`, pressure rows by velocity columns.
    pub divergence: SparseMatrix,
    /// Pressure stabilization `γ Σ_K h_K² ∫_K ∇p·∇q`.
    pub stabilization: SparseMatrix,
    /// Scalar mass matrix on pressure unknowns.
    pub pressure_mass: SparseMatrix,
    /// `∫ ψ_q` for each pressure basis function.
    pub pressure_weights: Vec<f64>,
}

/// Gradients of the three barycentric coordinates on a triangle.
pub(crate) fn p1_gradients(c: [Point; 3], area: f64) -> [[f64; 2]; 3] {
    let two_a = 2.0 * area;
    [
        [(c[1][1] - c[2][1]) / two_a, (c[2][0] - c[1][0]) / two_a],
        [(c[2][1] - c[0][1]) / two_a, (c[0][0] - c[2][0]) / two_a],
        [(c[0][1] - c[1][1]) / two_a, (c[1][0] - c[0][0]) / two_a],
    ]
}

fn local_mass(rule: &TriangleRule, area: f64) -> [[f64; 3]; 3] {
    let mut m = [[0.0; 3]; 3];
    for (b, w) in rule.points.iter().zip(&rule.weights) {
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += area * w * b[i] * b[j];
            }
        }
    }
    m
}

/// Assemble the fluid operators with stabilization parameter `gamma`.
pub fn assemble_fluid(mesh: &FluidMesh, gamma: f64) -> FluidBlocks {
    let nv = mesh.num_vertices();
    let nt = mesh.num_triangles();
    let rule = edge_midpoint_rule();
    let mut mass = Triplets::with_capacity(2 * nv, 2 * nv, 18 * nt);
    let mut stiff = Triplets::with_capacity(2 * nv, 2 * nv, 36 * nt);
    let mut div = Triplets::with_capacity(nv, 2 * nv, 18 * nt);
    let mut stab = Triplets::with_capacity(nv, nv, 9 * nt);
    let mut pmass = Triplets::with_capacity(nv, nv, 9 * nt);
    let mut weights = vec![0.0; nv];

    for t in 0..nt {
        let tri = mesh.triangles()[t];
        let area = mesh.area(t);
        let g = p1_gradients(mesh.corners(t), area);
        let hk = mesh.diameter(t);
        let ml = local_mass(&rule, area);
        for a in 0..3 {
            weights[tri[a]] += area / 3.0;
            for b in 0..3 {
                let (va, vb) = (tri[a], tri[b]);
                pmass.push(va, vb, ml[a][b]);
                let gg = g[a][0] * g[b][0] + g[a][1] * g[b][1];
                stab.push(va, vb, gamma * hk * hk * area * gg);
                for c in 0..2 {
                    mass.push(2 * va + c, 2 * vb + c, ml[a][b]);
                    // Row (a, c), column (b, d).
                    for d in 0..2 {
                        let delta = if c == d { gg } else { 0.0 };
                        let v = 0.5 * area * (delta + g[b][c] * g[a][d]);
                        stiff.push(2 * va + c, 2 * vb + d, v);
                    }
                    div.push(va, 2 * vb + c, -area / 3.0 * g[b][c]);
                }
            }
        }
    }
    FluidBlocks {
        mass: mass.build(),
        stiffness: stiff.build(),
        divergence: div.build(),
        stabilization: stab.build(),
        pressure_mass: pmass.build(),
        pressure_weights: weights,
    }
}

/// Velocity unknowns not on the boundary, in increasing order.
pub fn free_velocity_dofs(mesh: &FluidMesh) -> Vec<usize> {
    (0..mesh.num_vertices())
        .filter(|&v| !mesh.is_boundary(v))
        .flat_map(|v| [2 * v, 2 * v + 1])
        .collect()
}

/// Load vector `∫ f·φ_i` for a vector field `f`, using `rule` on every
/// triangle.
pub fn load_vector(mesh: &FluidMesh, rule: &TriangleRule, f: impl Fn(Point) -> [f64; 2]) -> Vec<f64> {
    let mut out = vec![0.0; 2 * mesh.num_vertices()];
    for t in 0..mesh.num_triangles() {
        let tri = mesh.triangles()[t];
        let c = mesh.corners(t);
        let area = mesh.area(t);
        for (b, w) in rule.points.iter().zip(&rule.weights) {
            let x = [
                b[0] * c[0][0] + b[1] * c[1][0] + b[2] * c[2][0],
                b[0] * c[0][1] + b[1] * c[1][1] + b[2] * c[2][1],
            ];
            let fx = f(x);
            for a in 0..3 {
                for comp in 0..2 {
                    out[2 * tri[a] + comp] += area * w * b[a] * fx[comp];
                }
            }
        }
    }
    out
}

/// Nodal interpolant of a vector field, interleaved.
pub fn interpolate_vector(mesh: &FluidMesh, f: impl Fn(Point) -> [f64; 2]) -> Vec<f64> {
    mesh.vertices().iter().flat_map(|&x| f(x)).collect()
}

/// Nodal interpolant of a scalar field.
pub fn interpolate_scalar(mesh: &FluidMesh, f: impl Fn(Point) -> f64) -> Vec<f64> {
    mesh.vertices().iter().map(|&x| f(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_unit_square;

    #[test]
    fn mass_total_is_two_areas() {
        let m = build_unit_square(5).unwrap();
        let f = assemble_fluid(&m, DEFAULT_GAMMA);
        let total: f64 = f.mass.row_sums().iter().sum();
        assert!((total - 2.0).abs() < 1e-13);
        assert!((f.pressure_weights.iter().sum::<f64>() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn stiffness_kills_rigid_motions() {
        let m = build_unit_square(4).unwrap();
        let f = assemble_fluid(&m, DEFAULT_GAMMA);
        let trans = interpolate_vector(&m, |_| [1.0, -2.0]);
        let rot = interpolate_vector(&m, |x| [-(x[1] - 0.5), x[0] - 0.5]);
        assert!(f.stiffness.mul_vec(&trans).iter().all(|v| v.abs() < 1e-12));
        assert!(f.stiffness.mul_vec(&rot).iter().all(|v| v.abs() < 1e-12));
        assert!(f.stiffness.asymmetry() < 1e-14);
    }

    #[test]
    fn divergence_of_linear_field() {
        // u = (x, y) has div 2, so B u = -2 ∫ ψ_q.
        let m = build_unit_square(3).unwrap();
        let f = assemble_fluid(&m, DEFAULT_GAMMA);
        let u = interpolate_vector(&m, |x| [x[0], x[1]]);
        let bu = f.divergence.mul_vec(&u);
        for (v, w) in bu.iter().zip(&f.pressure_weights) {
            assert!((v + 2.0 * w).abs() < 1e-14);
        }
    }

    #[test]
    fn stabilization_annihilates_constants() {
        let m = build_unit_square(6).unwrap();
        let f = assemble_fluid(&m, 0.3);
        let ones = vec![1.0; m.num_vertices()];
        assert!(f.stabilization.mul_vec(&ones).iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn free_dofs_count() {
        let m = build_unit_square(4).unwrap();
        assert_eq!(free_velocity_dofs(&m).len(), 2 * 9);
    }
}
