//! Dense complex matrices, Hermitian observables, quantum states and the
//! spectral machinery shared by the rest of the crate.
//!
//! A [`MatrixC`] `A` encodes the pair of observables `(Re A, Im A)` where
//! `Re A = (A + A*)/2` and `Im A = (A − A*)/(2i)`. States are
//! [`DensityMatrix`] values: positive semidefinite with unit trace.

mod eig;
mod info;

pub use eig::{herm_exp, herm_log, herm_map, herm_sqrt_psd, hermitian_eig, EigDecomposition};
pub use info::{
    beta, expected_value, fidelity, relative_entropy, trace_distance, von_neumann_entropy,
};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerances::Tolerances;

pub type C64 = Complex64;
pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

#[cfg(test)]
const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Dense complex `d×d` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixC(CMat);

impl MatrixC {
    pub fn new(m: CMat) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::Shape {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                if !m[(i, j)].re.is_finite() || !m[(i, j)].im.is_finite() {
                    return Err(Error::NonFinite(i, j));
                }
            }
        }
        Ok(Self(m))
    }

    /// Builds `A[j][k] = re[j][k] + i·im[j][k]` from row-major planes.
    pub fn from_planes(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<Self> {
        let d = re.len();
        if im.len() != d {
            return Err(Error::DimensionMismatch(d, im.len()));
        }
        for row in re.iter().chain(im.iter()) {
            if row.len() != d {
                return Err(Error::Shape {
                    rows: d,
                    cols: row.len(),
                });
            }
        }
        Self::new(CMat::from_fn(d, d, |i, j| C64::new(re[i][j], im[i][j])))
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let d = rows.len();
        for row in rows {
            if row.len() != d {
                return Err(Error::Shape {
                    rows: d,
                    cols: row.len(),
                });
            }
        }
        Self::new(CMat::from_fn(d, d, |i, j| rows[i][j]))
    }

    pub fn zeros(d: usize) -> Self {
        Self(CMat::zeros(d.max(1), d.max(1)))
    }

    pub fn identity(d: usize) -> Self {
        Self(CMat::identity(d.max(1), d.max(1)))
    }

    pub fn diagonal(entries: &[C64]) -> Result<Self> {
        Self::new(CMat::from_diagonal(&CVec::from_column_slice(entries)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &CMat {
        &self.0
    }

    pub fn into_inner(self) -> CMat {
        self.0
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    /// `Re(A) = (A + A*)/2`.
    pub fn re_part(&self) -> HermitianMatrix {
        HermitianMatrix::new((&self.0 + self.0.adjoint()) * C64::new(0.5, 0.0))
    }

    /// `Im(A) = (A − A*)/(2i)`.
    pub fn im_part(&self) -> HermitianMatrix {
        HermitianMatrix::new((&self.0 - self.0.adjoint()) * C64::new(0.0, -0.5))
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// Block-diagonal `A ⊕ B`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let (a, b) = (self.dim(), other.dim());
        let mut m = CMat::zeros(a + b, a + b);
        m.view_mut((0, 0), (a, a)).copy_from(&self.0);
        m.view_mut((a, a), (b, b)).copy_from(&other.0);
        Self(m)
    }

    /// `s·A + c·I`.
    pub fn affine(&self, s: C64, c: C64) -> Self {
        let d = self.dim();
        Self(&self.0 * s + CMat::identity(d, d) * c)
    }

    /// `U* A U`.
    pub fn conjugate_by(&self, u: &CMat) -> Result<Self> {
        if u.nrows() != self.dim() {
            return Err(Error::DimensionMismatch(self.dim(), u.nrows()));
        }
        Self::new(u.adjoint() * &self.0 * u)
    }

    /// Compression `V* A V` onto the column span of an isometry `V`.
    pub fn compress(&self, v: &CMat) -> Result<Self> {
        if v.nrows() != self.dim() {
            return Err(Error::DimensionMismatch(self.dim(), v.nrows()));
        }
        Self::new(v.adjoint() * &self.0 * v)
    }

    /// Spectral norm `‖A‖₂ = sqrt(λ_max(A*A))`.
    pub fn spectral_norm(&self) -> f64 {
        let gram = HermitianMatrix::new(self.0.adjoint() * &self.0);
        match hermitian_eig(&gram) {
            Ok(e) => e.values[0].max(0.0).sqrt(),
            Err(_) => self.0.norm(),
        }
    }
}

/// Hermitian matrix; the constructor symmetrizes its input.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(CMat);

impl HermitianMatrix {
    /// Symmetrizes `m` by averaging with its adjoint so that
    /// `entries[i][j] = conj(entries[j][i])` holds exactly.
    pub fn new(m: CMat) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "hermitian matrix must be square");
        let n = m.nrows();
        let mut h = CMat::zeros(n, n);
        for j in 0..n {
            h[(j, j)] = C64::new(m[(j, j)].re, 0.0);
            for i in (j + 1)..n {
                let v = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
                h[(i, j)] = v;
                h[(j, i)] = v.conj();
            }
        }
        Self(h)
    }

    pub fn zeros(d: usize) -> Self {
        Self(CMat::zeros(d, d))
    }

    pub fn identity(d: usize) -> Self {
        Self(CMat::identity(d, d))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let v: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self(CMat::from_diagonal(&CVec::from_vec(v)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &CMat {
        &self.0
    }

    pub fn into_inner(self) -> CMat {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    /// Hilbert–Schmidt inner product `tr(self·other)` (real for Hermitian pairs).
    pub fn inner(&self, other: &Self) -> f64 {
        self.0.zip_fold(&other.0, 0.0, |acc, a, b| acc + (a.conj() * b).re)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        Self(&self.0 * C64::new(a, 0.0) + &other.0 * C64::new(b, 0.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(&self.0 * C64::new(s, 0.0))
    }

    /// `self − (tr(self)/d)·I`.
    pub fn traceless(&self) -> Self {
        let d = self.dim();
        let shift = self.trace() / d as f64;
        Self(&self.0 - CMat::identity(d, d) * C64::new(shift, 0.0))
    }

    pub fn compress(&self, v: &CMat) -> Self {
        Self::new(v.adjoint() * &self.0 * v)
    }

    /// `⟨x, H x⟩`.
    pub fn expectation(&self, x: &CVec) -> f64 {
        x.dotc(&(&self.0 * x)).re
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }
}

/// Positive semidefinite unit-trace Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(HermitianMatrix);

impl DensityMatrix {
    /// Validates trace and positivity against `tol`.
    pub fn new(h: HermitianMatrix, tol: &Tolerances) -> Result<Self> {
        let tr = h.trace();
        if (tr - 1.0).abs() > tol.trace_slack {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let e = hermitian_eig(&h)?;
        let min = *e.values.last().unwrap_or(&0.0);
        if min < -tol.psd_slack {
            return Err(Error::InvalidState(format!(
                "minimum eigenvalue {min:e} is negative"
            )));
        }
        Ok(Self(h))
    }

    /// Divides by the trace, then validates.
    pub fn normalized(h: HermitianMatrix, tol: &Tolerances) -> Result<Self> {
        let tr = h.trace();
        if !(tr > 0.0) || !tr.is_finite() {
            return Err(Error::InvalidState(format!("trace {tr} is not positive")));
        }
        Self::new(h.scale(1.0 / tr), tol)
    }

    /// Clamps negative eigenvalues to zero and renormalizes the trace.
    pub fn from_psd_projection(h: &HermitianMatrix) -> Result<Self> {
        let p = herm_map(h, |x| x.max(0.0))?;
        let tr = p.trace();
        if !(tr > 0.0) {
            return Err(Error::InvalidState("projection onto the PSD cone is zero".into()));
        }
        Ok(Self(p.scale(1.0 / tr)))
    }

    pub(crate) fn from_trusted(h: HermitianMatrix) -> Self {
        let tr = h.trace();
        Self(h.scale(1.0 / tr))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self(HermitianMatrix::identity(d).scale(1.0 / d as f64))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn as_hermitian(&self) -> &HermitianMatrix {
        &self.0
    }

    pub fn as_matrix(&self) -> &CMat {
        self.0.as_matrix()
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.0.as_matrix()[(i, j)]
    }

    /// Conjugates the state into a larger space: `V ρ V*`.
    pub fn lift(&self, v: &CMat) -> Self {
        Self(HermitianMatrix::new(v * self.as_matrix() * v.adjoint()))
    }

    /// Smallest eigenvalue.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(*hermitian_eig(&self.0)?.values.last().unwrap_or(&0.0))
    }
}

/// Vector on the unit sphere of `ℂ^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitVector(CVec);

impl UnitVector {
    pub fn new(v: CVec) -> Result<Self> {
        let n = v.norm();
        if v.is_empty() || (n - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(n));
        }
        Ok(Self(v))
    }

    pub fn normalize(v: CVec) -> Result<Self> {
        let n = v.norm();
        if v.is_empty() || !(n > 0.0) || !n.is_finite() {
            return Err(Error::NotNormalized(n));
        }
        Ok(Self(v / C64::new(n, 0.0)))
    }

    pub fn basis(d: usize, k: usize) -> Self {
        let mut v = CVec::zeros(d);
        v[k] = C64::new(1.0, 0.0);
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_vector(&self) -> &CVec {
        &self.0
    }

    /// `⟨self, other⟩`, conjugate-linear in the first slot.
    pub fn inner(&self, other: &Self) -> C64 {
        self.0.dotc(&other.0)
    }
}

/// Matrix built from the real and imaginary planes, for use in tests and fixtures.
pub fn cmat(re: &[&[f64]], im: &[&[f64]]) -> CMat {
    let d = re.len();
    CMat::from_fn(d, d, |i, j| C64::new(re[i][j], im[i][j]))
}

/// The 3×3 block matrix `[[0,2],[0,0]] ⊕ [1]` whose numerical range is the
/// closed unit disk and whose maximum-entropy inference jumps at `1`.
pub fn disk_with_touching_point() -> MatrixC {
    let z = C64::new(0.0, 0.0);
    let two = C64::new(2.0, 0.0);
    let one = C64::new(1.0, 0.0);
    MatrixC::from_rows(&[vec![z, two, z], vec![z, z, z], vec![z, z, one]])
        .expect("static matrix is valid")
}
