//! Numerical range, maximum-entropy inference and the discontinuities of the
//! inference map for a pair of observables encoded as one complex matrix.

mod assignment;
pub mod continuity;
pub mod eigencurves;
pub mod error;
pub mod maxent;
pub mod numrange;
mod optimize;
pub mod qmatrix;
pub mod random;
pub mod tolerances;

pub use continuity::{
    detect_discontinuities, oracle_check, prior_invariance_check, AnalysisConfig, ContinuityReport,
    OracleClass, OracleResult, Verdict, VerdictStatus,
};
pub use eigencurves::{find_top_degeneracies, kippenhahn_curve, track_branches, DegeneracyEvent, EigenBranchSet};
pub use error::{Error, Result};
pub use maxent::{dual_solve_interior, fiber_sample, maxent_infer, maxent_infer_detailed, DualSolution};
pub use numrange::{classify_point, contains, exposed_face, support_scan, ExpectedValue, PointTag};
pub use qmatrix::{DensityMatrix, HermitianMatrix, MatrixC, UnitVector};
pub use tolerances::Tolerances;
