//! Shared fixtures for the benchmarks.

use maxcont_core::qmatrix::disk_with_touching_point;
use maxcont_core::random::{random_matrix, seeded};
use maxcont_core::MatrixC;

/// Seeded Ginibre-style test matrix of dimension `d`.
pub fn generic(d: usize) -> MatrixC {
    random_matrix(&mut seeded(d as u64), d, 1.0)
}

/// The unit-disk example with a touching eigenvalue at 1.
pub fn disk() -> MatrixC {
    disk_with_touching_point()
}
