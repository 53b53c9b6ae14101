use super::{extrapolate, CoupledState, SchemeConfig, SchemeKind};
use crate::assembly::{assemble_coupling, AssembledOperators, DiscreteSolidOperator};
use crate::linalg::{compose_system, norm_inf, Block, BorderedFactor, BorderedSystem, SparseLu, SparseMatrix};
use crate::mesh::{FluidMesh, SolidMesh};
use crate::Result;

/// Diagnostics produced alongside each new state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    /// `‖L_f u − L_s v‖_∞` where `v` is the solid velocity that entered the
    /// constraint row of the solve.
    pub kinematic_residual: f64,
    /// For the corrected split: `‖M_s(ḋ^{n-½} − ḋ^n) − (τ/ρ_sε) K_s (d^n − d^{n⋆})‖_∞`.
    pub correction_residual: Option<f64>,
}

/// Advances a [`CoupledState`] by one step of the configured scheme.
///
/// The unknowns are split into the fluid part `(u, p, ς)`, whose matrix never
/// changes and is factorized once, and the interface part `(s, λ)`, which is
/// eliminated through a dense Schur complement. When the interface is frozen
/// that complement is built once as well; otherwise the coupling is
/// re-traced at the previous configuration every step.
pub struct Stepper<'a> {
    fluid: &'a FluidMesh,
    solid: &'a SolidMesh,
    ops: &'a AssembledOperators,
    config: SchemeConfig,
    free: Vec<usize>,
    fluid_system: BorderedSystem,
    /// `[[A_s, −L_sᵀ], [c L_s, 0]]`, the interface diagonal block.
    interface: SparseMatrix,
    frozen: Option<(SparseMatrix, BorderedFactor)>,
    correction_lu: Option<SparseLu>,
    correction_matrix: Option<SparseMatrix>,
    solid_op: DiscreteSolidOperator,
    load: Option<Vec<f64>>,
}

impl<'a> Stepper<'a> {
    /// For frozen interfaces `ops.coupling` must already be traced at the
    /// reference configuration.
    pub fn new(
        fluid: &'a FluidMesh,
        solid: &'a SolidMesh,
        ops: &'a AssembledOperators,
        config: SchemeConfig,
    ) -> Result<Self> {
        config.validate()?;
        let tau = config.tau;
        let free = ops.free_velocity.clone();
        let nv = fluid.num_vertices();
        let all_p: Vec<usize> = (0..nv).collect();

        let a_f_full = ops.fluid.mass.lin_comb(config.fluid.rho / tau, &ops.fluid.stiffness, 2.0 * config.fluid.mu);
        let a_f = a_f_full.select(&free, &free);
        let b = ops.fluid.divergence.select(&all_p, &free);
        let bt = b.transpose();
        let neg_s = ops.fluid.stabilization.scaled(-1.0);
        let mean_col = SparseMatrix::from_triplets(
            nv,
            1,
            &ops.fluid.pressure_weights.iter().enumerate().map(|(i, &w)| (i, 0, w)).collect::<Vec<_>>(),
        );
        let mean_row = mean_col.transpose();
        let nf = free.len();
        let k = compose_system(
            &[nf, nv, 1],
            &[
                Block::new(0, 0, 1.0, &a_f),
                Block::new(0, 1, 1.0, &bt),
                Block::new(1, 0, 1.0, &b),
                Block::new(1, 1, 1.0, &neg_s),
                Block::new(1, 2, 1.0, &mean_col),
                Block::new(2, 1, 1.0, &mean_row),
            ],
            &[&vec![0.0; nf], &vec![0.0; nv], &[0.0]],
        )?
        .matrix;
        let fluid_system = BorderedSystem::new(k)?;

        let inertia = config.solid.inertia();
        let m_s = &ops.solid.mass;
        let a_s = match config.kind {
            SchemeKind::Monolithic | SchemeKind::MonolithicLinearized => {
                m_s.lin_comb(inertia / (tau * tau), &ops.solid.stiffness, 1.0)
            }
            SchemeKind::InertialSplit | SchemeKind::InertialSplitCorrected => m_s.scaled(inertia / tau),
        };
        let ls = &ops.solid.multiplier;
        let neg_lst = ls.transpose().scaled(-1.0);
        let ns = 2 * solid.num_nodes();
        let kinematic_scale = if config.kind.is_monolithic() { -1.0 / tau } else { -1.0 };
        let interface = compose_system(
            &[ns, ns],
            &[Block::new(0, 0, 1.0, &a_s), Block::new(0, 1, 1.0, &neg_lst), Block::new(1, 0, kinematic_scale, ls)],
            &[&vec![0.0; ns], &vec![0.0; ns]],
        )?
        .matrix;

        let (correction_lu, correction_matrix) = if config.kind == SchemeKind::InertialSplitCorrected {
            let c = m_s.lin_comb(inertia / tau, &ops.solid.stiffness, tau);
            (Some(SparseLu::new(&c)?), Some(c))
        } else {
            (None, None)
        };

        let mut stepper = Stepper {
            fluid,
            solid,
            ops,
            config,
            free,
            fluid_system,
            interface,
            frozen: None,
            correction_lu,
            correction_matrix,
            solid_op: DiscreteSolidOperator::new(&ops.solid)?,
            load: None,
        };
        if config.frozen() {
            let (lf, factor) = stepper.eliminate_interface(&ops.coupling)?;
            stepper.frozen = Some((lf, factor));
        }
        Ok(stepper)
    }

    pub fn config(&self) -> &SchemeConfig {
        &self.config
    }

    /// Add a constant fluid body-force load vector (full velocity length).
    pub fn set_fluid_load(&mut self, load: Vec<f64>) {
        assert_eq!(load.len(), 2 * self.fluid.num_vertices());
        self.load = Some(load);
    }

    /// Restrict a traced coupling to free velocities and eliminate the
    /// interface unknowns against the fluid factorization.
    fn eliminate_interface(&self, coupling: &SparseMatrix) -> Result<(SparseMatrix, BorderedFactor)> {
        let ns = coupling.nrows();
        let nk = self.fluid_system.dim();
        let rows: Vec<usize> = (0..ns).collect();
        let lf = coupling.select(&rows, &self.free);
        // Border columns: solid unknowns first, multipliers second.
        let mut e = Vec::with_capacity(lf.nnz());
        let mut f = Vec::with_capacity(lf.nnz());
        for i in 0..ns {
            let (cols, vals) = lf.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                e.push((j, ns + i, v));
                f.push((ns + i, j, v));
            }
        }
        let e = SparseMatrix::from_triplets(nk, 2 * ns, &e);
        let f = SparseMatrix::from_triplets(2 * ns, nk, &f);
        let factor = self.fluid_system.factor(e, f, self.interface.clone())?;
        Ok((lf, factor))
    }

    /// Advance one step.
    pub fn step(&self, state: &CoupledState) -> Result<(CoupledState, StepReport)> {
        let cfg = &self.config;
        let tau = cfg.tau;
        let inertia = cfg.solid.inertia();
        let m_s = &self.ops.solid.mass;
        let k_s = &self.ops.solid.stiffness;
        let ls = &self.ops.solid.multiplier;

        // Fluid right-hand side on free velocity unknowns.
        let mut f_full = self.ops.fluid.mass.mul_vec(&state.u);
        f_full.iter_mut().for_each(|v| *v *= cfg.fluid.rho / tau);
        if let Some(load) = &self.load {
            f_full.iter_mut().zip(load).for_each(|(v, l)| *v += l);
        }
        let f: Vec<f64> = self.free.iter().map(|&i| f_full[i]).collect();

        let d_star = extrapolate(state, cfg.r, tau);
        let (g, m) = if cfg.kind.is_monolithic() {
            let hist: Vec<f64> = state.d.iter().zip(&state.d_prev).map(|(d, dp)| 2.0 * d - dp).collect();
            let mut g = m_s.mul_vec(&hist);
            g.iter_mut().for_each(|v| *v *= inertia / (tau * tau));
            let mut m = ls.mul_vec(&state.d);
            m.iter_mut().for_each(|v| *v *= -1.0 / tau);
            (g, m)
        } else {
            let mv = m_s.mul_vec(&state.ddot);
            let kd = k_s.mul_vec(&d_star);
            let g = mv.iter().zip(&kd).map(|(a, b)| inertia / tau * a - b).collect();
            (g, vec![0.0; state.d.len()])
        };
        let mut fluid_rhs = f;
        fluid_rhs.resize(self.fluid_system.dim(), 0.0);
        let mut interface_rhs = g;
        interface_rhs.extend_from_slice(&m);

        let traced;
        let (lf, factor) = match &self.frozen {
            Some((lf, factor)) => (lf, factor),
            None => {
                let coupling = assemble_coupling(self.fluid, self.solid, &state.phi)?;
                traced = self.eliminate_interface(&coupling)?;
                (&traced.0, &traced.1)
            }
        };
        let (x, y) = factor.solve(&self.fluid_system, &fluid_rhs, &interface_rhs);

        let nf = self.free.len();
        let np = self.fluid.num_vertices();
        let ns = state.d.len();
        let u_free = &x[..nf];
        let p = x[nf..nf + np].to_vec();
        let s_part = &y[..ns];
        let lambda = y[ns..].to_vec();
        let mut u = vec![0.0; 2 * np];
        for (&i, &v) in self.free.iter().zip(u_free) {
            u[i] = v;
        }

        let lfu = lf.mul_vec(u_free);
        let mut report = StepReport { kinematic_residual: 0.0, correction_residual: None };
        let (d, ddot, ddot_half) = match cfg.kind {
            SchemeKind::Monolithic | SchemeKind::MonolithicLinearized => {
                let d = s_part.to_vec();
                let ddot: Vec<f64> = d.iter().zip(&state.d).map(|(a, b)| (a - b) / tau).collect();
                report.kinematic_residual = residual(&lfu, &ls.mul_vec(&ddot));
                (d, ddot, Vec::new())
            }
            SchemeKind::InertialSplit => {
                let ddot = s_part.to_vec();
                report.kinematic_residual = residual(&lfu, &ls.mul_vec(&ddot));
                let d = state.d.iter().zip(&ddot).map(|(a, v)| a + tau * v).collect();
                (d, ddot, Vec::new())
            }
            SchemeKind::InertialSplitCorrected => {
                let half = s_part.to_vec();
                report.kinematic_residual = residual(&lfu, &ls.mul_vec(&half));
                let mh = m_s.mul_vec(&half);
                let diff: Vec<f64> = d_star.iter().zip(&state.d).map(|(a, b)| a - b).collect();
                let kdiff = k_s.mul_vec(&diff);
                let rhs2: Vec<f64> = mh.iter().zip(&kdiff).map(|(a, b)| inertia / tau * a + b).collect();
                let lu = self.correction_lu.as_ref().expect("correction factorization");
                let ddot = lu.solve_refined(self.correction_matrix.as_ref().unwrap(), &rhs2, 1);
                let d: Vec<f64> = state.d.iter().zip(&ddot).map(|(a, v)| a + tau * v).collect();
                let jump: Vec<f64> = half.iter().zip(&ddot).map(|(a, b)| a - b).collect();
                let stretch: Vec<f64> = d.iter().zip(&d_star).map(|(a, b)| a - b).collect();
                let lhs = m_s.mul_vec(&jump);
                let kst = k_s.mul_vec(&stretch);
                let r: Vec<f64> = lhs.iter().zip(&kst).map(|(a, b)| a - tau / inertia * b).collect();
                report.correction_residual = Some(norm_inf(&r));
                (d, ddot, half)
            }
        };

        let next = CoupledState {
            u,
            p,
            phi: self.solid.deformed(&d),
            d_prev: state.d.clone(),
            d,
            ddot,
            lambda,
            ddot_half,
            t: state.t + tau,
            step: state.step + 1,
        };
        Ok((next, report))
    }

    /// Apply `L_h^s`, mainly for diagnostics.
    pub fn solid_operator(&self) -> &DiscreteSolidOperator {
        &self.solid_op
    }
}

fn residual(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}
