//! Energy bookkeeping, error norms against reference solutions and
//! convergence rates.

mod norms;

pub use norms::{h1_seminorm_error, l2_error_scalar, l2_error_vector};

use crate::assembly::AssembledOperators;
use crate::linalg::dot;
use crate::mesh::{FluidMesh, SolidMesh};
use crate::schemes::{CoupledState, SchemeConfig};
use crate::{Error, Result};

/// Format a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `E = (ρ_f/2)‖u‖² + (ρ_sε/2)‖ḋ‖² + ½‖d‖_s²`.
pub fn energy(state: &CoupledState, ops: &AssembledOperators, config: &SchemeConfig) -> f64 {
    0.5 * config.fluid.rho * ops.fluid.mass.quadratic(&state.u)
        + 0.5 * config.solid.inertia() * ops.solid.mass.quadratic(&state.ddot)
        + 0.5 * ops.solid.stiffness.quadratic(&state.d)
}

/// Energy without the one-half factors, as used in the stability analysis of
/// the splittings: `ρ_f‖u‖² + ρ_sε‖ḋ‖² + ‖d‖_s²`.
pub fn split_energy(state: &CoupledState, ops: &AssembledOperators, config: &SchemeConfig) -> f64 {
    2.0 * energy(state, ops, config)
}

/// Unweighted total `‖u‖² + ‖ḋ‖² + ‖d‖_s²`.
pub fn unweighted_energy(state: &CoupledState, ops: &AssembledOperators) -> f64 {
    ops.fluid.mass.quadratic(&state.u)
        + ops.solid.mass.quadratic(&state.ddot)
        + ops.solid.stiffness.quadratic(&state.d)
}

/// Dissipation released between `prev` and `next`:
/// `2μτ‖ε(u)‖² + τ|p|_S² + (ρ_f/2)‖Δu‖² + (ρ_sε/2)‖Δḋ‖² + ½‖Δd‖_s²`.
///
/// For the monolithic schemes `E(next) + increment = E(prev)` holds exactly
/// in exact arithmetic.
pub fn dissipation_increment(
    prev: &CoupledState,
    next: &CoupledState,
    ops: &AssembledOperators,
    config: &SchemeConfig,
) -> f64 {
    let tau = config.tau;
    let du = diff(&next.u, &prev.u);
    let dv = diff(&next.ddot, &prev.ddot);
    let dd = diff(&next.d, &prev.d);
    2.0 * config.fluid.mu * tau * ops.fluid.stiffness.quadratic(&next.u)
        + tau * ops.fluid.stabilization.quadratic(&next.p)
        + 0.5 * config.fluid.rho * ops.fluid.mass.quadratic(&du)
        + 0.5 * config.solid.inertia() * ops.solid.mass.quadratic(&dv)
        + 0.5 * ops.solid.stiffness.quadratic(&dd)
}

/// Dissipation with the weights of the splitting analysis:
/// `τ(‖ε(u)‖² + |p|_S²) + ρ_f‖Δu‖² + ρ_sε‖Δḋ‖² + ‖Δd‖_s²`.
pub fn split_dissipation_increment(
    prev: &CoupledState,
    next: &CoupledState,
    ops: &AssembledOperators,
    config: &SchemeConfig,
) -> f64 {
    let tau = config.tau;
    let du = diff(&next.u, &prev.u);
    let dv = diff(&next.ddot, &prev.ddot);
    let dd = diff(&next.d, &prev.d);
    tau * (ops.fluid.stiffness.quadratic(&next.u) + ops.fluid.stabilization.quadratic(&next.p))
        + config.fluid.rho * ops.fluid.mass.quadratic(&du)
        + config.solid.inertia() * ops.solid.mass.quadratic(&dv)
        + ops.solid.stiffness.quadratic(&dd)
}

/// Right-hand side of the stability bound for the corrected split with
/// first-order extrapolation:
/// `E⁰ + (τ²/2)‖ḋ⁰‖_s² + (τ²/2ρ_sε)‖L_h^s d⁰‖²`.
pub fn corrected_split_bound(
    initial: &CoupledState,
    ops: &AssembledOperators,
    config: &SchemeConfig,
    l_d0: &[f64],
) -> f64 {
    let tau = config.tau;
    energy(initial, ops, config)
        + 0.5 * tau * tau * ops.solid.stiffness.quadratic(&initial.ddot)
        + 0.5 * tau * tau / config.solid.inertia() * ops.solid.mass.quadratic(l_d0)
}

/// Per-step bookkeeping row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRecord {
    pub n: usize,
    pub t: f64,
    pub energy: f64,
    pub dissipation_cum: f64,
    pub kinematic_residual: f64,
    /// Residual of the fractional velocity relation; only for the corrected split.
    pub frac_identity_residual: Option<f64>,
    pub split_energy: f64,
    pub split_dissipation_cum: f64,
    pub unweighted_energy: f64,
}

impl EnergyRecord {
    pub const COLUMNS: &'static str = "n,t,E,D_cum,kinematic_residual,frac_identity_residual,E_split,D_split_cum,E_tot";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.n,
            fmt_f64(self.t),
            fmt_f64(self.energy),
            fmt_f64(self.dissipation_cum),
            fmt_f64(self.kinematic_residual),
            self.frac_identity_residual.map(fmt_f64).unwrap_or_default(),
            fmt_f64(self.split_energy),
            fmt_f64(self.split_dissipation_cum),
            fmt_f64(self.unweighted_energy),
        )
    }
}

/// Errors of a coarse solution measured on the reference meshes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub err_u_l2: f64,
    pub err_d_energy: f64,
    pub err_ddot_l2: f64,
    pub err_p_l2: f64,
    pub total: f64,
}

impl ErrorReport {
    pub fn new(err_u_l2: f64, err_d_energy: f64, err_ddot_l2: f64, err_p_l2: f64) -> Self {
        let total = (err_u_l2 * err_u_l2 + err_d_energy * err_d_energy + err_ddot_l2 * err_ddot_l2).sqrt();
        ErrorReport { err_u_l2, err_d_energy, err_ddot_l2, err_p_l2, total }
    }
}

/// A state together with the meshes it lives on.
#[derive(Debug, Clone, Copy)]
pub struct Solution<'a> {
    pub fluid: &'a FluidMesh,
    pub solid: &'a SolidMesh,
    pub state: &'a CoupledState,
}

fn power_of_two_ratio(fine: usize, coarse: usize) -> Option<usize> {
    (coarse > 0 && fine.is_multiple_of(coarse) && (fine / coarse).is_power_of_two()).then(|| fine / coarse)
}

/// Normalized cumulative arclength of a closed chain: `m + 1` values from
/// 0 to 1, the last one closing the loop.
fn arclength_fractions(mesh: &SolidMesh) -> Vec<f64> {
    let nodes = mesh.nodes();
    let m = nodes.len();
    let mut s = vec![0.0; m + 1];
    for i in 1..=m {
        let (p, q) = (nodes[i - 1], nodes[i % m]);
        s[i] = s[i - 1] + (q[0] - p[0]).hypot(q[1] - p[1]);
    }
    let total = s[m];
    s.iter_mut().for_each(|v| *v /= total);
    s
}

/// Interpolate a coarse solid field onto the reference nodes using the
/// shared arclength parametrization: both closed chains are parametrized by
/// their normalized arclength starting at node 0, and the coarse field is
/// evaluated piecewise linearly at the parameter of every reference node.
fn prolong_solid(coarse: &SolidMesh, fine: &SolidMesh, field: &[f64]) -> Result<Vec<f64>> {
    if !(coarse.is_closed() && fine.is_closed()) {
        return Err(Error::NotNested("error comparison needs closed solid chains".into()));
    }
    let mc = coarse.num_nodes();
    let sc = arclength_fractions(coarse);
    let sf = arclength_fractions(fine);
    let mut out = Vec::with_capacity(2 * fine.num_nodes());
    let mut k = 0;
    for &t in &sf[..fine.num_nodes()] {
        while k + 1 < mc && sc[k + 1] <= t {
            k += 1;
        }
        let w = ((t - sc[k]) / (sc[k + 1] - sc[k])).clamp(0.0, 1.0);
        let k1 = (k + 1) % mc;
        for c in 0..2 {
            out.push((1.0 - w) * field[2 * k + c] + w * field[2 * k1 + c]);
        }
    }
    Ok(out)
}

/// Interpolate coarse nodal fluid values (with `ncomp` components) at the
/// vertices of the reference mesh.
fn prolong_fluid(coarse: &FluidMesh, fine: &FluidMesh, field: &[f64], ncomp: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(fine.num_vertices() * ncomp);
    for &x in fine.vertices() {
        let loc = coarse.locate_point(x)?;
        let tri = coarse.triangles()[loc.triangle];
        for c in 0..ncomp {
            out.push((0..3).map(|a| loc.bary[a] * field[ncomp * tri[a] + c]).sum());
        }
    }
    Ok(out)
}

/// Errors of `coarse` against `reference`, measured with the reference
/// operators: fluid velocity and pressure in L², solid displacement in the
/// energy norm and solid velocity in L².
pub fn error_vs_reference(
    coarse: Solution<'_>,
    reference: Solution<'_>,
    ref_ops: &AssembledOperators,
) -> Result<ErrorReport> {
    let (nc, nf) = (coarse.fluid.subdivisions(), reference.fluid.subdivisions());
    if power_of_two_ratio(nf, nc).is_none() {
        return Err(Error::NotNested(format!("fluid meshes n={nc} and n={nf} are not nested")));
    }
    let u = prolong_fluid(coarse.fluid, reference.fluid, &coarse.state.u, 2)?;
    let p = prolong_fluid(coarse.fluid, reference.fluid, &coarse.state.p, 1)?;
    let d = prolong_solid(coarse.solid, reference.solid, &coarse.state.d)?;
    let v = prolong_solid(coarse.solid, reference.solid, &coarse.state.ddot)?;
    let eu = diff(&reference.state.u, &u);
    let ep = diff(&reference.state.p, &p);
    let ed = diff(&reference.state.d, &d);
    let ev = diff(&reference.state.ddot, &v);
    let q = |m: &crate::linalg::SparseMatrix, e: &[f64]| dot(e, &m.mul_vec(e)).max(0.0).sqrt();
    Ok(ErrorReport::new(
        q(&ref_ops.fluid.mass, &eu),
        q(&ref_ops.solid.stiffness, &ed),
        q(&ref_ops.solid.mass, &ev),
        q(&ref_ops.fluid.pressure_mass, &ep),
    ))
}

/// Observed order `log₂(e_coarse / e_fine)` for a halving of the parameter.
pub fn convergence_rate(e_coarse: f64, e_fine: f64) -> Result<f64> {
    if !(e_coarse > 0.0 && e_fine > 0.0 && e_coarse.is_finite() && e_fine.is_finite()) {
        return Err(Error::NonPositiveErrors { coarse: e_coarse, fine: e_fine });
    }
    Ok((e_coarse / e_fine).log2())
}
