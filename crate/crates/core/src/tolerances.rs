use serde::{Deserialize, Serialize};

/// Numerical thresholds shared by every module.
///
/// The `*_rel` entries are relative to `1 + ‖A‖₂` of the matrix under study, so a
/// single record works across scales.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Eigen-residual bound `‖Hv − λv‖ ≤ eig_residual·‖H‖`.
    pub eig_residual: f64,
    /// Smallest eigenvalue accepted for a density matrix is `-psd_slack`.
    pub psd_slack: f64,
    /// Allowed deviation of a density matrix trace from one.
    pub trace_slack: f64,
    /// Eigenvalues closer than `gap_rel·(1+‖A‖)` count as degenerate.
    pub gap_rel: f64,
    /// Width of the band around the boundary of `W(A)` that is not called interior.
    pub interior_rel: f64,
    /// Derivatives closer than this (relative) belong to the same group.
    pub deriv_rel: f64,
    /// Branches whose sup-distance over the period is below this (relative) are identical.
    pub identity_rel: f64,
    /// Gradient norm at which the dual Newton iteration stops.
    pub solver_tol: f64,
    /// Iteration cap of the dual Newton iteration.
    pub max_newton_iter: usize,
    /// Smallest eigenvalue for which the matrix logarithm is defined.
    pub log_floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eig_residual: 1e-9,
            psd_slack: 1e-10,
            trace_slack: 1e-12,
            gap_rel: 1e-8,
            interior_rel: 1e-7,
            deriv_rel: 1e-7,
            identity_rel: 1e-7,
            solver_tol: 1e-10,
            max_newton_iter: 200,
            log_floor: 1e-14,
        }
    }
}

impl Tolerances {
    pub fn gap(&self, norm: f64) -> f64 {
        self.gap_rel * (1.0 + norm)
    }

    pub fn interior(&self, norm: f64) -> f64 {
        self.interior_rel * (1.0 + norm)
    }

    pub fn deriv(&self, norm: f64) -> f64 {
        self.deriv_rel * (1.0 + norm)
    }

    pub fn identity(&self, norm: f64) -> f64 {
        self.identity_rel * (1.0 + norm)
    }
}
