use nalgebra::{DMatrix, SymmetricEigen};

use super::{CMat, CVec, HermitianMatrix, UnitVector, C64};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 10_000;
const LOG_FLOOR: f64 = 1e-14;

/// Spectral decomposition of a Hermitian matrix, eigenvalues descending.
#[derive(Clone, Debug, PartialEq)]
pub struct EigDecomposition {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, in the order of `values`.
    pub vectors: CMat,
}

impl EigDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, k: usize) -> CVec {
        self.vectors.column(k).into_owned()
    }

    pub fn unit_vector(&self, k: usize) -> UnitVector {
        UnitVector::normalize(self.vector(k)).expect("eigenvectors are normalized")
    }

    /// Columns `range` of the eigenvector matrix.
    pub fn columns(&self, start: usize, count: usize) -> CMat {
        self.vectors.columns(start, count).into_owned()
    }
}

/// Full eigendecomposition of a Hermitian matrix.
///
/// `H = R + iS` is embedded as the real symmetric matrix `[[R, −S], [S, R]]`,
/// whose spectrum is that of `H` with every eigenvalue doubled. A real
/// eigenvector `(u; v)` maps to the complex eigenvector `u + iv`; inside each
/// doubled cluster a pivoted Gram–Schmidt pass keeps one complex vector per pair.
pub fn hermitian_eig(h: &HermitianMatrix) -> Result<EigDecomposition> {
    let d = h.dim();
    let m = h.as_matrix();
    let scale = m.norm();
    if d == 1 {
        return Ok(EigDecomposition {
            values: vec![m[(0, 0)].re],
            vectors: CMat::identity(1, 1),
        });
    }

    let n = 2 * d;
    let big = DMatrix::<f64>::from_fn(n, n, |i, j| {
        let (bi, ri) = (i / d, i % d);
        let (bj, rj) = (j / d, j % d);
        let z = m[(ri, rj)];
        match (bi, bj) {
            (0, 0) | (1, 1) => z.re,
            (0, 1) => -z.im,
            _ => z.im,
        }
    });
    let eig = SymmetricEigen::try_new(big, f64::EPSILON, MAX_SWEEPS)
        .ok_or(Error::SolverFailure { norm: scale })?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .total_cmp(&eig.eigenvalues[a])
            .then(a.cmp(&b))
    });

    let pair_tol = 1e-12 * (1.0 + scale);
    let mut values = Vec::with_capacity(d);
    let mut columns: Vec<CVec> = Vec::with_capacity(d);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n
            && eig.eigenvalues[order[end - 1]] - eig.eigenvalues[order[end]] <= pair_tol
        {
            end += 1;
        }
        let size = end - start;
        let keep = size.div_ceil(2).min(d - columns.len());
        let candidates: Vec<CVec> = order[start..end]
            .iter()
            .map(|&k| {
                let col = eig.eigenvectors.column(k);
                CVec::from_fn(d, |i, _| C64::new(col[i], col[i + d]))
            })
            .collect();
        let chosen = pivoted_gram_schmidt(&candidates, keep)
            .ok_or(Error::SolverFailure { norm: scale })?;

        let mut cluster_values: Vec<f64> = order[start..end]
            .chunks(2)
            .map(|c| c.iter().map(|&k| eig.eigenvalues[k]).sum::<f64>() / c.len() as f64)
            .collect();
        cluster_values.truncate(keep);
        let mut ranked: Vec<(f64, CVec)> = chosen
            .into_iter()
            .map(|w| (h.expectation(&w), w))
            .collect();
        ranked.sort_by(|a, b| b.0.total_cmp(&a.0));
        for (value, (_, w)) in cluster_values.into_iter().zip(ranked) {
            values.push(value);
            columns.push(fix_phase(w));
        }
        start = end;
    }
    if columns.len() != d {
        return Err(Error::SolverFailure { norm: scale });
    }
    Ok(EigDecomposition {
        values,
        vectors: CMat::from_columns(&columns),
    })
}

fn pivoted_gram_schmidt(candidates: &[CVec], keep: usize) -> Option<Vec<CVec>> {
    let mut residuals: Vec<CVec> = candidates.to_vec();
    let mut basis: Vec<CVec> = Vec::with_capacity(keep);
    for _ in 0..keep {
        let (best, norm) = residuals
            .iter()
            .enumerate()
            .map(|(i, r)| (i, r.norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))?;
        if norm < 1e-6 {
            return None;
        }
        let mut q = residuals[best].clone() / C64::new(norm, 0.0);
        // second pass against the accepted basis
        for b in &basis {
            let c = b.dotc(&q);
            q -= b * c;
        }
        let qn = q.norm();
        q /= C64::new(qn, 0.0);
        for r in residuals.iter_mut() {
            let c = q.dotc(r);
            *r -= &q * c;
        }
        basis.push(q);
    }
    Some(basis)
}

/// Rotates the phase so that the first component of substantial magnitude is
/// real and positive; makes the decomposition deterministic.
fn fix_phase(mut v: CVec) -> CVec {
    let max = v.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if let Some(pivot) = v.iter().find(|c| c.norm() >= 0.5 * max) {
        let phase = pivot.conj() / pivot.norm();
        v *= phase;
    }
    v
}

/// Functional calculus `Σ f(λ_k) v_k v_k*`.
pub fn herm_map(h: &HermitianMatrix, f: impl Fn(f64) -> f64) -> Result<HermitianMatrix> {
    let e = hermitian_eig(h)?;
    Ok(spectral_sum(&e, f))
}

pub(crate) fn spectral_sum(e: &EigDecomposition, f: impl Fn(f64) -> f64) -> HermitianMatrix {
    let mut scaled = e.vectors.clone();
    for (k, &lambda) in e.values.iter().enumerate() {
        scaled.column_mut(k).scale_mut(f(lambda));
    }
    HermitianMatrix::new(&scaled * e.vectors.adjoint())
}

pub fn herm_exp(h: &HermitianMatrix) -> Result<HermitianMatrix> {
    herm_map(h, f64::exp)
}

/// Matrix logarithm; requires a strictly positive spectrum.
pub fn herm_log(h: &HermitianMatrix) -> Result<HermitianMatrix> {
    let e = hermitian_eig(h)?;
    let min = *e.values.last().unwrap_or(&0.0);
    if min <= LOG_FLOOR {
        return Err(Error::Domain(format!(
            "logarithm needs a positive definite matrix, smallest eigenvalue is {min:e}"
        )));
    }
    Ok(spectral_sum(&e, f64::ln))
}

/// Square root after clamping eigenvalues to be non-negative.
pub fn herm_sqrt_psd(h: &HermitianMatrix) -> Result<HermitianMatrix> {
    herm_map(h, |x| x.max(0.0).sqrt())
}
