use super::SchemeKind;

/// Outcome of the time-step restriction check for one scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct CflReport {
    /// No restriction applies.
    pub unconditional: bool,
    /// Left-hand side of the restriction.
    pub value: f64,
    /// Right-hand side of the restriction.
    pub limit: f64,
    pub satisfied: bool,
    pub condition: &'static str,
}

/// Time-step restriction for `kind` with extrapolation order `r`, given the
/// largest generalized eigenvalue `lambda_max` of the solid stiffness
/// against its mass and the surface density `inertia = ρ_s ε`.
///
/// The split without correction needs `τ² λ_max < ρ_s ε`. The corrected
/// split is unconditional for `r ≤ 1` and needs `2 τ⁶ λ_max³ < (ρ_s ε)³`
/// for `r = 2`.
pub fn cfl_check(kind: SchemeKind, r: usize, tau: f64, lambda_max: f64, inertia: f64) -> CflReport {
    let free = CflReport { unconditional: true, value: 0.0, limit: 0.0, satisfied: true, condition: "unconditional" };
    match kind {
        SchemeKind::Monolithic | SchemeKind::MonolithicLinearized => free,
        SchemeKind::InertialSplitCorrected if r <= 1 => free,
        SchemeKind::InertialSplit => {
            let value = tau * tau * lambda_max;
            CflReport { unconditional: false, value, limit: inertia, satisfied: value < inertia, condition: "tau^2 lambda_max < rho_s eps" }
        }
        SchemeKind::InertialSplitCorrected => {
            let value = 2.0 * tau.powi(6) * lambda_max.powi(3);
            let limit = inertia.powi(3);
            CflReport {
                unconditional: false,
                value,
                limit,
                satisfied: value < limit,
                condition: "2 tau^6 lambda_max^3 < (rho_s eps)^3",
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monolithic_is_unconditional() {
        let r = cfl_check(SchemeKind::Monolithic, 0, 10.0, 1e9, 0.1);
        assert!(r.unconditional && r.satisfied);
    }

    #[test]
    fn split_threshold() {
        let ok = cfl_check(SchemeKind::InertialSplit, 1, 0.001, 1e4, 0.1);
        assert!(ok.satisfied);
        let bad = cfl_check(SchemeKind::InertialSplit, 1, 0.01, 1e4, 0.1);
        assert!(!bad.satisfied);
    }

    #[test]
    fn corrected_split_order_two() {
        let lam: f64 = 1e4;
        let edge = (0.1f64.powi(3) / (2.0 * lam.powi(3))).powf(1.0 / 6.0);
        assert!(cfl_check(SchemeKind::InertialSplitCorrected, 2, 0.99 * edge, lam, 0.1).satisfied);
        assert!(!cfl_check(SchemeKind::InertialSplitCorrected, 2, 1.01 * edge, lam, 0.1).satisfied);
        assert!(cfl_check(SchemeKind::InertialSplitCorrected, 1, 1.0, lam, 0.1).unconditional);
    }
}
