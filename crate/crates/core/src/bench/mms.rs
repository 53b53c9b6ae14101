use std::f64::consts::PI;

use crate::assembly::{assemble_fluid, free_velocity_dofs, load_vector, seven_point_rule};
use crate::diagnostics::{convergence_rate, h1_seminorm_error, l2_error_scalar, l2_error_vector};
use crate::linalg::{compose_system, Block, SparseMatrix};
use crate::mesh::{build_unit_square, FluidMesh};
use crate::{Point, Result};

/// Discrete steady Stokes solution: interleaved velocity on every vertex and
/// mean-zero pressure.
#[derive(Debug, Clone)]
pub struct StokesSolution {
    pub u: Vec<f64>,
    pub p: Vec<f64>,
}

/// Solve `-div(2μ ε(u)) + ∇p = f`, `div u = 0` with no-slip walls and the
/// same pressure stabilization as the coupled problem. `load` is the full
/// interleaved load vector `∫ f·φ_i`.
pub fn solve_stokes(mesh: &FluidMesh, mu: f64, gamma: f64, load: &[f64]) -> Result<StokesSolution> {
    let blocks = assemble_fluid(mesh, gamma);
    let nv = mesh.num_vertices();
    let free = free_velocity_dofs(mesh);
    let all: Vec<usize> = (0..nv).collect();
    let a = blocks.stiffness.select(&free, &free).scaled(2.0 * mu);
    let b = blocks.divergence.select(&all, &free);
    let bt = b.transpose();
    let neg_s = blocks.stabilization.scaled(-1.0);
    let trip: Vec<(usize, usize, f64)> = blocks.pressure_weights.iter().enumerate().map(|(i, &w)| (i, 0, w)).collect();
    let mean_col = SparseMatrix::from_triplets(nv, 1, &trip);
    let mean_row = mean_col.transpose();
    let f: Vec<f64> = free.iter().map(|&i| load[i]).collect();
    let zp = vec![0.0; nv];
    let system = compose_system(
        &[free.len(), nv, 1],
        &[
            Block::new(0, 0, 1.0, &a),
            Block::new(0, 1, 1.0, &bt),
            Block::new(1, 0, 1.0, &b),
            Block::new(1, 1, 1.0, &neg_s),
            Block::new(1, 2, 1.0, &mean_col),
            Block::new(2, 1, 1.0, &mean_row),
        ],
        &[&f, &zp, &[0.0]],
    )?;
    let x = system.solve()?;
    let mut u = vec![0.0; 2 * nv];
    for (k, &i) in free.iter().enumerate() {
        u[i] = x[k];
    }
    Ok(StokesSolution { u, p: x[free.len()..free.len() + nv].to_vec() })
}

/// Manufactured solution: `u = curl ψ` with `ψ = sin²(πx) sin²(πy)` and
/// `p = cos(πx) cos(πy)`.
pub mod manufactured {
    use super::*;

    pub fn velocity(x: Point) -> [f64; 2] {
        let (sx, sy) = ((PI * x[0]).sin(), (PI * x[1]).sin());
        [PI * sx * sx * (2.0 * PI * x[1]).sin(), -PI * (2.0 * PI * x[0]).sin() * sy * sy]
    }

    /// `[[∂x u_x, ∂y u_x], [∂x u_y, ∂y u_y]]`.
    pub fn velocity_gradient(x: Point) -> [[f64; 2]; 2] {
        let (s2x, s2y) = ((2.0 * PI * x[0]).sin(), (2.0 * PI * x[1]).sin());
        let (c2x, c2y) = ((2.0 * PI * x[0]).cos(), (2.0 * PI * x[1]).cos());
        let (sx, sy) = ((PI * x[0]).sin(), (PI * x[1]).sin());
        [
            [PI * PI * s2x * s2y, 2.0 * PI * PI * sx * sx * c2y],
            [-2.0 * PI * PI * c2x * sy * sy, -PI * PI * s2x * s2y],
        ]
    }

    pub fn pressure(x: Point) -> f64 {
        (PI * x[0]).cos() * (PI * x[1]).cos()
    }

    /// `f = -μ Δu + ∇p` (the velocity is divergence free).
    pub fn body_force(mu: f64, x: Point) -> [f64; 2] {
        let p3 = 2.0 * PI.powi(3);
        let (s2x, s2y) = ((2.0 * PI * x[0]).sin(), (2.0 * PI * x[1]).sin());
        let (c2x, c2y) = ((2.0 * PI * x[0]).cos(), (2.0 * PI * x[1]).cos());
        let lap = [p3 * s2y * (2.0 * c2x - 1.0), -p3 * s2x * (2.0 * c2y - 1.0)];
        let grad_p = [-PI * (PI * x[0]).sin() * (PI * x[1]).cos(), -PI * (PI * x[0]).cos() * (PI * x[1]).sin()];
        [-mu * lap[0] + grad_p[0], -mu * lap[1] + grad_p[1]]
    }
}

/// Errors of the stabilized Stokes solve at one mesh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmsRow {
    pub n: usize,
    pub err_u_l2: f64,
    pub err_u_h1: f64,
    pub err_p_l2: f64,
    pub rate_u_l2: Option<f64>,
    pub rate_u_h1: Option<f64>,
    pub rate_p_l2: Option<f64>,
}

impl MmsRow {
    pub const COLUMNS: &'static str = "n,h,err_u_l2,rate_u_l2,err_u_h1,rate_u_h1,err_p_l2,rate_p_l2";
}

/// Manufactured-solution convergence of the stabilized Stokes solver.
pub fn stokes_mms(ns: &[usize], mu: f64, gamma: f64) -> Result<Vec<MmsRow>> {
    let rule = seven_point_rule();
    let mut rows: Vec<MmsRow> = Vec::with_capacity(ns.len());
    for &n in ns {
        let mesh = build_unit_square(n)?;
        let load = load_vector(&mesh, &rule, |x| manufactured::body_force(mu, x));
        let sol = solve_stokes(&mesh, mu, gamma, &load)?;
        let err_u_l2 = l2_error_vector(&mesh, &rule, &sol.u, manufactured::velocity);
        let err_u_h1 = h1_seminorm_error(&mesh, &rule, &sol.u, manufactured::velocity_gradient);
        let err_p_l2 = l2_error_scalar(&mesh, &rule, &sol.p, manufactured::pressure);
        let prev = rows.last().copied();
        let rate = |a: Option<f64>, b: f64| a.and_then(|a| convergence_rate(a, b).ok());
        rows.push(MmsRow {
            n,
            err_u_l2,
            err_u_h1,
            err_p_l2,
            rate_u_l2: rate(prev.map(|p| p.err_u_l2), err_u_l2),
            rate_u_h1: rate(prev.map(|p| p.err_u_h1), err_u_h1),
            rate_p_l2: rate(prev.map(|p| p.err_p_l2), err_p_l2),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::manufactured::*;
    use super::*;

    #[test]
    fn body_force_matches_finite_differences() {
        let mu = 0.7;
        let h = 1e-4;
        for x in [[0.3, 0.7], [0.11, 0.52], [0.8, 0.25]] {
            let lap = |c: usize| {
                let f = |p: Point| velocity(p)[c];
                (f([x[0] + h, x[1]]) + f([x[0] - h, x[1]]) + f([x[0], x[1] + h]) + f([x[0], x[1] - h])
                    - 4.0 * f(x))
                    / (h * h)
            };
            let gp = [
                (pressure([x[0] + h, x[1]]) - pressure([x[0] - h, x[1]])) / (2.0 * h),
                (pressure([x[0], x[1] + h]) - pressure([x[0], x[1] - h])) / (2.0 * h),
            ];
            let f = body_force(mu, x);
            for c in 0..2 {
                assert!((f[c] - (-mu * lap(c) + gp[c])).abs() < 1e-4, "component {c} at {x:?}");
            }
        }
    }

    #[test]
    fn velocity_gradient_matches_finite_differences() {
        let h = 1e-6;
        let x = [0.37, 0.61];
        let g = velocity_gradient(x);
        for k in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[k] += h;
            xm[k] -= h;
            for c in 0..2 {
                let fd = (velocity(xp)[c] - velocity(xm)[c]) / (2.0 * h);
                assert!((g[c][k] - fd).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn zero_load_gives_zero_solution() {
        let mesh = build_unit_square(5).unwrap();
        let sol = solve_stokes(&mesh, 1.0, 0.05, &vec![0.0; 2 * mesh.num_vertices()]).unwrap();
        assert!(sol.u.iter().chain(&sol.p).all(|v| *v == 0.0));
    }
}
