use super::eig::spectral_sum;
use super::{hermitian_eig, herm_sqrt_psd, DensityMatrix, HermitianMatrix, MatrixC, UnitVector};
use crate::error::{Error, Result};
use crate::numrange::ExpectedValue;

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch(a, b));
    }
    Ok(())
}

/// `(tr(ρ·Re A), tr(ρ·Im A))`.
pub fn expected_value(rho: &DensityMatrix, a: &MatrixC) -> Result<ExpectedValue> {
    check_dims(rho.dim(), a.dim())?;
    let z = (rho.as_matrix() * a.as_matrix()).trace();
    // tr(ρA) = tr(ρ Re A) + i tr(ρ Im A) with both traces real for Hermitian ρ
    Ok(ExpectedValue::new(z.re, z.im))
}

/// Pure state `|x⟩⟨x|`.
pub fn beta(x: &UnitVector) -> DensityMatrix {
    let v = x.as_vector();
    DensityMatrix::from_trusted(HermitianMatrix::new(v * v.adjoint()))
}

/// `D(ρ,σ) = ½‖ρ − σ‖₁`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho.dim(), sigma.dim())?;
    let diff = HermitianMatrix::new(rho.as_matrix() - sigma.as_matrix());
    let e = hermitian_eig(&diff)?;
    let d = 0.5 * e.values.iter().map(|x| x.abs()).sum::<f64>();
    Ok(d.clamp(0.0, 1.0))
}

/// Uhlmann fidelity `F(ρ,σ) = ‖√ρ √σ‖₁ = tr sqrt(√ρ σ √ρ)`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho.dim(), sigma.dim())?;
    let sr = herm_sqrt_psd(rho.as_hermitian())?;
    let inner = HermitianMatrix::new(sr.as_matrix() * sigma.as_matrix() * sr.as_matrix());
    let e = hermitian_eig(&inner)?;
    let f = e.values.iter().map(|x| x.max(0.0).sqrt()).sum::<f64>();
    Ok(f.clamp(0.0, 1.0))
}

fn xlogx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// `S(ρ) = −tr(ρ log ρ)` with `0·log 0 = 0`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let e = hermitian_eig(rho.as_hermitian())?;
    let s = -e.values.iter().map(|&x| xlogx(x)).sum::<f64>();
    Ok(s.max(0.0))
}

/// Umegaki relative entropy `S(σ,ρ) = tr σ(log σ − log ρ)`; the reference
/// state `ρ` must be positive definite.
pub fn relative_entropy(sigma: &DensityMatrix, rho: &DensityMatrix) -> Result<f64> {
    check_dims(sigma.dim(), rho.dim())?;
    let er = hermitian_eig(rho.as_hermitian())?;
    let min = *er.values.last().unwrap_or(&0.0);
    if min <= 1e-14 {
        return Err(Error::Domain(format!(
            "relative entropy needs a positive definite reference state, smallest eigenvalue is {min:e}"
        )));
    }
    let log_rho = spectral_sum(&er, f64::ln);
    let es = hermitian_eig(sigma.as_hermitian())?;
    let neg_entropy = es.values.iter().map(|&x| xlogx(x)).sum::<f64>();
    let cross = sigma.as_hermitian().inner(&log_rho);
    Ok((neg_entropy - cross).max(0.0))
}
