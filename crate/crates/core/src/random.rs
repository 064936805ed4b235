//! Seeded random ensembles used by tests, the oracle and the command line.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::qmatrix::{CMat, CVec, DensityMatrix, HermitianMatrix, MatrixC, UnitVector, C64};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-distributed unit vector.
pub fn random_unit_vector(rng: &mut impl Rng, d: usize) -> UnitVector {
    loop {
        let v = CVec::from_fn(d, |_, _| gaussian(rng));
        if let Ok(u) = UnitVector::normalize(v) {
            return u;
        }
    }
}

/// Complex Ginibre matrix with entries of variance `scale²/d`.
pub fn random_matrix(rng: &mut impl Rng, d: usize, scale: f64) -> MatrixC {
    let s = scale / (2.0 * d as f64).sqrt();
    MatrixC::new(CMat::from_fn(d, d, |_, _| gaussian(rng) * s)).expect("finite gaussian entries")
}

pub fn random_hermitian(rng: &mut impl Rng, d: usize, scale: f64) -> HermitianMatrix {
    random_matrix(rng, d, scale).re_part().scale(2f64.sqrt())
}

/// Hilbert–Schmidt random state `G G* / tr(G G*)`.
pub fn random_density(rng: &mut impl Rng, d: usize) -> DensityMatrix {
    let g = CMat::from_fn(d, d, |_, _| gaussian(rng));
    DensityMatrix::from_trusted(HermitianMatrix::new(&g * g.adjoint()))
}

/// Positive definite state `½·I/d + ½·τ` with `τ` Hilbert–Schmidt random.
pub fn random_prior(rng: &mut impl Rng, d: usize) -> DensityMatrix {
    let tau = random_density(rng, d);
    let mixed = HermitianMatrix::identity(d).scale(0.5 / d as f64);
    DensityMatrix::from_trusted(mixed.add(&tau.as_hermitian().scale(0.5)))
}

/// Haar unitary from the QR decomposition of a Ginibre matrix.
pub fn random_unitary(rng: &mut impl Rng, d: usize) -> CMat {
    let g = CMat::from_fn(d, d, |_, _| gaussian(rng));
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for k in 0..d {
        let rk = r[(k, k)];
        if rk.norm() > 0.0 {
            let phase = rk / rk.norm();
            for i in 0..d {
                q[(i, k)] *= phase;
            }
        }
    }
    q
}

/// `r·[[0,2],[0,0]] ⊕ [r·e^{iφ}] ⊕ B` in a random basis, with `B` a small
/// random block of size `extra` inside the disk of radius `r`. The numerical
/// range is that disk and the inference map is discontinuous exactly at
/// `r·e^{iφ}`, which is returned alongside the matrix.
pub fn touching_disk(rng: &mut impl Rng, r: f64, phi: f64, extra: usize) -> (MatrixC, C64) {
    let touch = C64::from_polar(r, phi);
    let nilpotent = MatrixC::from_rows(&[
        vec![C64::new(0.0, 0.0), C64::new(2.0 * r, 0.0)],
        vec![C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
    ])
    .expect("2x2 block");
    let mut a = nilpotent.direct_sum(&MatrixC::from_rows(&[vec![touch]]).expect("1x1 block"));
    if extra > 0 {
        a = a.direct_sum(&random_matrix(rng, extra, 0.2 * r));
    }
    let u = random_unitary(rng, a.dim());
    (a.conjugate_by(&u).expect("matching dimensions"), touch)
}
