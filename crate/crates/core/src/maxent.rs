//! Maximum-entropy inference `ρ*_A(α)` and its relative-entropy variant with a
//! positive definite prior.
//!
//! Interior points are solved in the dual: the maximizer has the form
//! `exp(K + t₁ Re A + t₂ Im A)/Z` with `K = log(prior)`, and `t` minimizes
//! `φ(t) = log Z(t) − t·α`. Boundary points lie on an exposed face of `W(A)`,
//! whose fiber consists of the states supported on the top eigenspace of
//! `H(θ)`; the problem is compressed onto that eigenspace and solved again.

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::numrange::{ExpectedValue, RangeGeometry};
use crate::qmatrix::{
    expected_value, herm_exp, herm_log, hermitian_eig, CMat, DensityMatrix, HermitianMatrix, MatrixC,
};
use crate::random::random_density;
use crate::tolerances::Tolerances;

/// Angles sampled when locating the closest support line.
const SCAN_SIZE: usize = 512;
const ARMIJO: f64 = 1e-4;

/// Converged dual solution of an interior problem.
#[derive(Clone, Debug, PartialEq)]
pub struct DualSolution {
    /// Multipliers of `Re A` and `Im A`.
    pub t: [f64; 2],
    pub state: DensityMatrix,
    /// `‖𝔼_A(state) − α‖`.
    pub residual: f64,
    pub iterations: usize,
}

/// One compression onto the top eigenspace of `H(θ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FaceStep {
    pub theta: f64,
    /// Orthonormal basis in the coordinates of the previous level.
    pub eigenbasis: CMat,
    pub compressed: MatrixC,
}

/// Sequence of face compressions leading to the inferred state.
#[derive(Clone, Debug, PartialEq)]
pub struct FaceChain {
    pub steps: Vec<FaceStep>,
    pub final_state: DensityMatrix,
}

impl FaceChain {
    /// Isometry `V₁V₂⋯V_n` from the innermost level into `ℂ^d`.
    pub fn support_basis(&self, d: usize) -> CMat {
        self.steps
            .iter()
            .fold(CMat::identity(d, d), |acc, s| acc * &s.eigenbasis)
    }
}

/// Result of [`maxent_infer_detailed`].
#[derive(Clone, Debug, PartialEq)]
pub struct Inference {
    pub state: DensityMatrix,
    pub chain: FaceChain,
    /// Dual solve of the innermost level, if one was needed.
    pub dual: Option<DualSolution>,
    /// `‖𝔼_A(state) − α‖`.
    pub residual: f64,
}

/// Evaluation of the dual objective at one multiplier vector.
struct DualEval {
    value: f64,
    grad: Vec<f64>,
    hess: Vec<Vec<f64>>,
    state: HermitianMatrix,
}

/// `φ(t) = log tr exp(K + Σ tᵢBᵢ) − Σ tᵢbᵢ`.
#[derive(Clone, Debug)]
pub struct DualObjective {
    base: Option<HermitianMatrix>,
    directions: Vec<HermitianMatrix>,
    targets: Vec<f64>,
}

/// Fréchet kernel of `exp`: `(e^λ − e^μ)/(λ − μ)`, equal to `e^λ` on the diagonal.
fn exp_kernel(l: f64, m: f64) -> f64 {
    let (lo, hi) = if l <= m { (l, m) } else { (m, l) };
    let delta = hi - lo;
    if delta < 1e-300 {
        lo.exp()
    } else {
        lo.exp() * delta.exp_m1() / delta
    }
}

impl DualObjective {
    /// Objective in the multipliers of `(Re A, Im A)`.
    pub fn new(a: &MatrixC, alpha: ExpectedValue, prior: Option<&DensityMatrix>) -> Result<Self> {
        let base = log_prior(prior, a.dim())?;
        Ok(Self {
            base,
            directions: vec![a.re_part(), a.im_part()],
            targets: vec![alpha.re, alpha.im],
        })
    }

    fn dim(&self) -> usize {
        self.directions[0].dim()
    }

    fn exponent(&self, t: &[f64]) -> HermitianMatrix {
        let d = self.dim();
        let mut x = self.base.clone().unwrap_or_else(|| HermitianMatrix::zeros(d));
        for (ti, b) in t.iter().zip(&self.directions) {
            x = x.combine(1.0, b, *ti);
        }
        x
    }

    fn eval(&self, t: &[f64], with_hessian: bool) -> Result<DualEval> {
        let e = hermitian_eig(&self.exponent(t))?;
        let shift = e.values[0];
        let lam: Vec<f64> = e.values.iter().map(|v| v - shift).collect();
        let weights: Vec<f64> = lam.iter().map(|v| v.exp()).collect();
        let z: f64 = weights.iter().sum();
        let log_z = shift + z.ln();
        let value = log_z - t.iter().zip(&self.targets).map(|(a, b)| a * b).sum::<f64>();

        let u = &e.vectors;
        let rotated: Vec<CMat> = self
            .directions
            .iter()
            .map(|b| u.adjoint() * b.as_matrix() * u)
            .collect();
        let means: Vec<f64> = rotated
            .iter()
            .map(|bt| (0..lam.len()).map(|p| weights[p] * bt[(p, p)].re).sum::<f64>() / z)
            .collect();
        let grad = means.iter().zip(&self.targets).map(|(m, b)| m - b).collect();

        let p = self.directions.len();
        let mut hess = vec![vec![0.0; p]; p];
        if with_hessian {
            let n = lam.len();
            let kernel = DMatrix::from_fn(n, n, |i, j| exp_kernel(lam[i], lam[j]) / z);
            for i in 0..p {
                for j in i..p {
                    let mut s = 0.0;
                    for q in 0..n {
                        for r in 0..n {
                            s += (rotated[i][(q, r)].conj() * rotated[j][(q, r)]).re * kernel[(q, r)];
                        }
                    }
                    hess[i][j] = s - means[i] * means[j];
                    hess[j][i] = hess[i][j];
                }
            }
        }

        let mut scaled = e.vectors.clone();
        for (k, w) in weights.iter().enumerate() {
            scaled.column_mut(k).scale_mut(w / z);
        }
        let state = HermitianMatrix::new(&scaled * e.vectors.adjoint());
        Ok(DualEval {
            value,
            grad,
            hess,
            state,
        })
    }

    pub fn value(&self, t: [f64; 2]) -> Result<f64> {
        Ok(self.eval(&t, false)?.value)
    }

    /// `∇φ(t) = 𝔼_A(ρ_t) − α`.
    pub fn gradient(&self, t: [f64; 2]) -> Result<[f64; 2]> {
        let g = self.eval(&t, false)?.grad;
        Ok([g[0], g[1]])
    }

    /// Exact Hessian from the divided-difference kernel of `exp`.
    pub fn hessian(&self, t: [f64; 2]) -> Result<[[f64; 2]; 2]> {
        let h = self.eval(&t, true)?.hess;
        Ok([[h[0][0], h[0][1]], [h[1][0], h[1][1]]])
    }

    /// `ρ_t = exp(K + t₁ Re A + t₂ Im A)/Z`.
    pub fn state(&self, t: [f64; 2]) -> Result<DensityMatrix> {
        Ok(DensityMatrix::from_trusted(self.eval(&t, false)?.state))
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Solves `(H + μI)δ = −g`, raising `μ` until the matrix is positive definite.
fn newton_direction(hess: &[Vec<f64>], grad: &[f64]) -> Vec<f64> {
    let p = grad.len();
    let scale = 1.0 + (0..p).map(|i| hess[i][i].abs()).sum::<f64>();
    let mut mu = 0.0;
    loop {
        let h = DMatrix::from_fn(p, p, |i, j| hess[i][j] + if i == j { mu } else { 0.0 });
        if let Some(ch) = h.cholesky() {
            let rhs = nalgebra::DVector::from_iterator(p, grad.iter().map(|g| -g));
            return ch.solve(&rhs).iter().copied().collect();
        }
        mu = if mu == 0.0 { 1e-14 * scale } else { mu * 10.0 };
        if mu > 1e20 * scale {
            return grad.iter().map(|g| -g).collect();
        }
    }
}

struct NewtonOutcome {
    t: Vec<f64>,
    state: HermitianMatrix,
    iterations: usize,
}

/// Damped Newton iteration on the dual objective, started at `t = 0`.
fn newton(obj: &DualObjective, tol: &Tolerances) -> Result<NewtonOutcome> {
    let p = obj.directions.len();
    let mut t = vec![0.0; p];
    let mut ev = obj.eval(&t, true)?;
    for iter in 0..tol.max_newton_iter {
        let gnorm = norm(&ev.grad);
        if gnorm <= tol.solver_tol {
            return Ok(NewtonOutcome {
                t,
                state: ev.state,
                iterations: iter,
            });
        }
        let delta = newton_direction(&ev.hess, &ev.grad);
        let slope: f64 = delta.iter().zip(&ev.grad).map(|(a, b)| a * b).sum();
        let mut step = 1.0;
        let mut accepted = None;
        while step >= 1e-12 {
            let trial: Vec<f64> = t.iter().zip(&delta).map(|(a, b)| a + step * b).collect();
            let cand = obj.eval(&trial, true)?;
            if cand.value <= ev.value + ARMIJO * step * slope {
                accepted = Some((trial, cand));
                break;
            }
            // near the optimum φ stalls at rounding level; accept steps that still reduce ∇φ
            if step == 1.0 && norm(&cand.grad) < 0.5 * gnorm {
                accepted = Some((trial, cand));
                break;
            }
            step *= 0.5;
        }
        match accepted {
            Some((trial, cand)) => {
                t = trial;
                ev = cand;
            }
            None => {
                return Err(Error::NonConvergence {
                    iterations: iter,
                    residual: gnorm,
                })
            }
        }
    }
    let gnorm = norm(&ev.grad);
    if gnorm <= tol.solver_tol {
        return Ok(NewtonOutcome {
            t,
            state: ev.state,
            iterations: tol.max_newton_iter,
        });
    }
    Err(Error::NonConvergence {
        iterations: tol.max_newton_iter,
        residual: gnorm,
    })
}

fn log_prior(prior: Option<&DensityMatrix>, d: usize) -> Result<Option<HermitianMatrix>> {
    match prior {
        None => Ok(None),
        Some(p) if p.dim() != d => Err(Error::DimensionMismatch(p.dim(), d)),
        Some(p) => herm_log(p.as_hermitian()).map(Some),
    }
}

/// Objective in the non-degenerate traceless directions of `a`.
fn frame_objective(
    geom: &RangeGeometry,
    base: Option<&HermitianMatrix>,
    alpha: ExpectedValue,
) -> (DualObjective, Vec<[f64; 2]>) {
    let frame = geom.frame();
    let r0 = geom.re_part().traceless();
    let i0 = geom.im_part().traceless();
    let offset = [alpha.re - frame.center.re, alpha.im - frame.center.im];
    let directions = frame
        .directions
        .iter()
        .map(|q| r0.combine(q[0], &i0, q[1]))
        .collect();
    let targets = frame
        .directions
        .iter()
        .map(|q| q[0] * offset[0] + q[1] * offset[1])
        .collect();
    (
        DualObjective {
            base: base.cloned(),
            directions,
            targets,
        },
        frame.directions,
    )
}

/// Multipliers of `(Re A, Im A)` from multipliers of frame directions.
fn frame_to_planes(t: &[f64], q: &[[f64; 2]]) -> [f64; 2] {
    t.iter()
        .zip(q)
        .fold([0.0, 0.0], |acc, (ti, qi)| [acc[0] + ti * qi[0], acc[1] + ti * qi[1]])
}

fn gibbs(base: Option<&HermitianMatrix>, m: usize) -> Result<HermitianMatrix> {
    match base {
        None => Ok(HermitianMatrix::identity(m).scale(1.0 / m as f64)),
        Some(k) => {
            let shift = hermitian_eig(k)?.values[0];
            let e = herm_exp(&k.combine(1.0, &HermitianMatrix::identity(m), -shift))?;
            let tr = e.trace();
            Ok(e.scale(1.0 / tr))
        }
    }
}

/// Solves the interior problem by Newton's method on the dual.
///
/// The multipliers are found in an orthonormal frame of the traceless parts
/// of `(Re A, Im A)` and reported in the original coordinates.
pub fn dual_solve_interior(
    a: &MatrixC,
    alpha: ExpectedValue,
    prior: Option<&DensityMatrix>,
    tol: &Tolerances,
) -> Result<DualSolution> {
    let base = log_prior(prior, a.dim())?;
    let geom = RangeGeometry::new(a, tol);
    let (obj, q) = frame_objective(&geom, base.as_ref(), alpha);
    let out = newton(&obj, tol)?;
    let state = DensityMatrix::from_trusted(out.state);
    let residual = expected_value(&state, a)?.distance(alpha);
    Ok(DualSolution {
        t: frame_to_planes(&out.t, &q),
        state,
        residual,
        iterations: out.iterations,
    })
}

struct Solver<'a> {
    tol: &'a Tolerances,
    /// Boundary band, fixed by the top-level matrix.
    tol_int: f64,
}

struct LevelResult {
    state: HermitianMatrix,
    dual: Option<DualSolution>,
}

impl Solver<'_> {
    fn compress(
        &self,
        a: &MatrixC,
        base: Option<&HermitianMatrix>,
        alpha: ExpectedValue,
        theta: f64,
        basis: CMat,
        steps: &mut Vec<FaceStep>,
    ) -> Result<LevelResult> {
        if basis.ncols() >= a.dim() {
            return Err(Error::Domain(format!(
                "face at theta = {theta} does not reduce the dimension"
            )));
        }
        let compressed = a.compress(&basis)?;
        let sub_base = base.map(|k| k.compress(&basis));
        steps.push(FaceStep {
            theta,
            eigenbasis: basis,
            compressed: compressed.clone(),
        });
        self.solve(&compressed, sub_base.as_ref(), alpha, steps)
    }

    fn dual(
        &self,
        obj: &DualObjective,
        q: &[[f64; 2]],
        a: &MatrixC,
        alpha: ExpectedValue,
    ) -> Result<LevelResult> {
        let out = newton(obj, self.tol)?;
        let state = DensityMatrix::from_trusted(out.state.clone());
        let residual = expected_value(&state, a)?.distance(alpha);
        Ok(LevelResult {
            state: out.state,
            dual: Some(DualSolution {
                t: frame_to_planes(&out.t, q),
                state,
                residual,
                iterations: out.iterations,
            }),
        })
    }

    fn solve(
        &self,
        a: &MatrixC,
        base: Option<&HermitianMatrix>,
        alpha: ExpectedValue,
        steps: &mut Vec<FaceStep>,
    ) -> Result<LevelResult> {
        let m = a.dim();
        if m == 1 {
            return Ok(LevelResult {
                state: HermitianMatrix::identity(1),
                dual: None,
            });
        }
        let geom = RangeGeometry::new(a, self.tol);
        let (obj, q) = frame_objective(&geom, base, alpha);
        match q.len() {
            0 => Ok(LevelResult {
                state: gibbs(base, m)?,
                dual: None,
            }),
            1 => {
                let b = &obj.directions[0];
                let target = obj.targets[0];
                let e = hermitian_eig(b)?;
                let (top, bottom) = (e.values[0], e.values[m - 1]);
                let eps = geom.eps_gap();
                let theta_dir = q[0][1].atan2(q[0][0]);
                let to_top = top - target;
                let to_bottom = target - bottom;
                let mut end = |upper: bool| -> Result<LevelResult> {
                    let (theta, eb) = if upper {
                        (theta_dir, e.clone())
                    } else {
                        (theta_dir + std::f64::consts::PI, hermitian_eig(&b.scale(-1.0))?)
                    };
                    let lead = eb.values[0];
                    let k = eb.values.iter().take_while(|&&v| lead - v <= eps).count();
                    let mut chain = Vec::new();
                    let r = self.compress(a, base, alpha, theta, eb.columns(0, k), &mut chain)?;
                    steps.extend(chain);
                    Ok(r)
                };
                if to_top <= self.tol_int {
                    return end(true);
                }
                if to_bottom <= self.tol_int {
                    return end(false);
                }
                match self.dual(&obj, &q, a, alpha) {
                    Err(Error::NonConvergence { .. }) if to_top.min(to_bottom) <= 10.0 * self.tol_int => {
                        end(to_top <= to_bottom)
                    }
                    r => r,
                }
            }
            _ => {
                let scan = geom.scan(SCAN_SIZE)?;
                let (margin, theta) = geom.min_margin(alpha, &scan)?;
                let face = |steps: &mut Vec<FaceStep>| -> Result<LevelResult> {
                    let f = geom.exposed_face(theta)?;
                    self.compress(a, base, alpha, theta, f.eigenbasis, steps)
                };
                if margin <= self.tol_int {
                    return face(steps);
                }
                match self.dual(&obj, &q, a, alpha) {
                    Err(Error::NonConvergence { .. }) if margin <= 10.0 * self.tol_int => face(steps),
                    r => r,
                }
            }
        }
    }
}

/// Maximum-entropy state with `𝔼_A = α`, or the relative-entropy minimizer
/// to `prior` when one is given, together with the face compressions used.
pub fn maxent_infer_detailed(
    a: &MatrixC,
    alpha: ExpectedValue,
    prior: Option<&DensityMatrix>,
    tol: &Tolerances,
) -> Result<Inference> {
    if !alpha.is_finite() {
        return Err(Error::InvalidArgument("expected value must be finite".into()));
    }
    let d = a.dim();
    let base = log_prior(prior, d)?;
    let geom = RangeGeometry::new(a, tol);
    let tol_int = geom.tol_int();
    let scan = geom.scan(SCAN_SIZE)?;
    let (margin, _) = geom.min_margin(alpha, &scan)?;
    if margin < -tol_int {
        return Err(Error::OutsideRange {
            re: alpha.re,
            im: alpha.im,
            margin,
        });
    }
    let solver = Solver { tol, tol_int };
    let mut steps = Vec::new();
    let level = solver.solve(a, base.as_ref(), alpha, &mut steps)?;
    let inner = DensityMatrix::from_trusted(level.state);
    let chain = FaceChain {
        final_state: inner.clone(),
        steps,
    };
    let state = inner.lift(&chain.support_basis(d));
    let residual = expected_value(&state, a)?.distance(alpha);
    Ok(Inference {
        state,
        chain,
        dual: level.dual,
        residual,
    })
}

/// `ρ*_A(α)` (no prior) or `Ψ_{A,prior}(α)`.
pub fn maxent_infer(
    a: &MatrixC,
    alpha: ExpectedValue,
    prior: Option<&DensityMatrix>,
    tol: &Tolerances,
) -> Result<DensityMatrix> {
    Ok(maxent_infer_detailed(a, alpha, prior, tol)?.state)
}

/// Chord `[−back, forward]` of `{s : x + s·dir ⪰ 0}` for `x ≻ 0` and traceless `dir ≠ 0`.
///
/// With `M = x^{−1/2} dir x^{−1/2}` the bounds are `1/|λ_min(M)|` and `1/λ_max(M)`.
fn chord(x: &HermitianMatrix, dir: &HermitianMatrix) -> Result<Option<(f64, f64)>> {
    let ex = hermitian_eig(x)?;
    if *ex.values.last().unwrap_or(&0.0) <= 1e-14 {
        return Ok(None);
    }
    let inv_sqrt = crate::qmatrix::herm_map(x, |v| 1.0 / v.sqrt())?;
    let m = HermitianMatrix::new(inv_sqrt.as_matrix() * dir.as_matrix() * inv_sqrt.as_matrix());
    let em = hermitian_eig(&m)?;
    let (hi, lo) = (em.values[0], em.values[em.values.len() - 1]);
    if hi <= 0.0 || lo >= 0.0 {
        return Ok(None);
    }
    Ok(Some((1.0 / hi, -1.0 / lo)))
}

/// Random states of the fiber `{σ : 𝔼_A(σ) = α}`.
///
/// The fiber is the set of states supported on the innermost face of the
/// inference chain that satisfy the constraint there. Samples come from a
/// hit-and-run walk started at `ρ*_A(α)`: each step draws a Hilbert–Schmidt
/// random state, uses its difference to the current point, projected to keep
/// the constraint, as a direction, and moves to a uniform point of the chord.
pub fn fiber_sample(
    a: &MatrixC,
    alpha: ExpectedValue,
    n: usize,
    rng: &mut impl Rng,
    tol: &Tolerances,
) -> Result<Vec<DensityMatrix>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let inf = maxent_infer_detailed(a, alpha, None, tol)?;
    let d = a.dim();
    let v = inf.chain.support_basis(d);
    let m = v.ncols();
    if m == 1 {
        return Ok(vec![inf.state; n]);
    }
    let inner = inf
        .chain
        .steps
        .last()
        .map_or_else(|| a.clone(), |s| s.compressed.clone());
    let constraints: Vec<HermitianMatrix> = [inner.re_part().traceless(), inner.im_part().traceless()]
        .into_iter()
        .filter(|c| c.frobenius_norm() > 1e-12)
        .collect();
    // orthonormal basis of the constraint directions
    let mut ortho: Vec<HermitianMatrix> = Vec::new();
    for c in constraints {
        let mut r = c;
        for o in &ortho {
            r = r.combine(1.0, o, -r.inner(o));
        }
        let nr = r.frobenius_norm();
        if nr > 1e-9 {
            ortho.push(r.scale(1.0 / nr));
        }
    }

    let mut current = inf.chain.final_state.as_hermitian().clone();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let tau = random_density(rng, m);
        let mut dir = tau.as_hermitian().combine(1.0, &current, -1.0);
        for o in &ortho {
            dir = dir.combine(1.0, o, -dir.inner(o));
        }
        dir = dir.traceless();
        if dir.frobenius_norm() > 1e-12 {
            if let Some((back, forward)) = chord(&current, &dir)? {
                let s = -back + rng.random::<f64>() * (forward + back);
                current = current.combine(1.0, &dir, s);
            }
        }
        out.push(DensityMatrix::from_trusted(current.clone()).lift(&v));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmatrix::{disk_with_touching_point, trace_distance, von_neumann_entropy, C64};
    use crate::random::{random_matrix, random_prior, seeded};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn disk_fiber_midpoint() -> HermitianMatrix {
        let mut m = CMat::zeros(3, 3);
        for i in 0..2 {
            for j in 0..2 {
                m[(i, j)] = C64::new(0.25, 0.0);
            }
        }
        m[(2, 2)] = C64::new(0.5, 0.0);
        HermitianMatrix::new(m)
    }

    fn entrywise(a: &DensityMatrix, b: &HermitianMatrix) -> f64 {
        (a.as_matrix() - b.as_matrix()).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn center_gives_maximally_mixed() {
        let mut rng = seeded(4);
        let a = random_matrix(&mut rng, 4, 1.0);
        let c = a.trace() / 4.0;
        let sol = dual_solve_interior(&a, ExpectedValue::from_complex(c), None, &tol()).unwrap();
        assert!(sol.t[0].abs() < 1e-12 && sol.t[1].abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(4);
        assert!(entrywise(&sol.state, mixed.as_hermitian()) < 1e-12);
    }

    #[test]
    fn pauli_z_closed_form() {
        let a = MatrixC::diagonal(&[C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]).unwrap();
        for x in [-0.9, -0.3, 0.0, 0.5, 0.95] {
            let sol = dual_solve_interior(&a, ExpectedValue::new(x, 0.0), None, &tol()).unwrap();
            assert_abs_diff_eq!(sol.state.entry(0, 0).re, 0.5 * (1.0 + x), epsilon = 1e-10);
            assert_abs_diff_eq!(sol.state.entry(1, 1).re, 0.5 * (1.0 - x), epsilon = 1e-10);
            assert_abs_diff_eq!(sol.t[0].tanh(), x, epsilon = 1e-9);
        }
    }

    #[test]
    fn prior_expectation_returns_prior() {
        let mut rng = seeded(6);
        let a = random_matrix(&mut rng, 3, 1.0);
        let p = random_prior(&mut rng, 3);
        let alpha = expected_value(&p, &a).unwrap();
        let sol = dual_solve_interior(&a, alpha, Some(&p), &tol()).unwrap();
        assert!(sol.t[0].abs() < 1e-10 && sol.t[1].abs() < 1e-10);
        assert!(entrywise(&sol.state, p.as_hermitian()) < 1e-10);
    }

    #[test]
    fn exponential_family_form() {
        let mut rng = seeded(12);
        let a = random_matrix(&mut rng, 4, 1.0);
        let sol = dual_solve_interior(&a, ExpectedValue::new(0.1, -0.05), None, &tol()).unwrap();
        assert!(sol.residual <= 1e-10);
        let log = herm_log(sol.state.as_hermitian()).unwrap();
        let rest = log
            .combine(1.0, &a.re_part(), -sol.t[0])
            .combine(1.0, &a.im_part(), -sol.t[1]);
        assert!(rest.traceless().frobenius_norm() < 1e-7);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = seeded(30);
        let a = random_matrix(&mut rng, 3, 1.0);
        let obj = DualObjective::new(&a, ExpectedValue::new(0.2, 0.1), None).unwrap();
        let h = 1e-5;
        for _ in 0..20 {
            let t = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
            let g = obj.gradient(t).unwrap();
            let fd = [
                (obj.value([t[0] + h, t[1]]).unwrap() - obj.value([t[0] - h, t[1]]).unwrap()) / (2.0 * h),
                (obj.value([t[0], t[1] + h]).unwrap() - obj.value([t[0], t[1] - h]).unwrap()) / (2.0 * h),
            ];
            let err = ((g[0] - fd[0]).powi(2) + (g[1] - fd[1]).powi(2)).sqrt();
            assert!(err <= 1e-5 * (1.0 + norm(&g)), "{g:?} vs {fd:?}");
        }
    }

    #[test]
    fn hessian_matches_gradient_differences() {
        let mut rng = seeded(31);
        let a = random_matrix(&mut rng, 4, 1.0);
        let obj = DualObjective::new(&a, ExpectedValue::new(0.0, 0.0), None).unwrap();
        let h = 1e-6;
        let t = [0.7, -1.3];
        let hess = obj.hessian(t).unwrap();
        for i in 0..2 {
            let mut tp = t;
            let mut tm = t;
            tp[i] += h;
            tm[i] -= h;
            let (gp, gm) = (obj.gradient(tp).unwrap(), obj.gradient(tm).unwrap());
            for j in 0..2 {
                assert_abs_diff_eq!((gp[j] - gm[j]) / (2.0 * h), hess[j][i], epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn disk_example_touching_point() {
        let a = disk_with_touching_point();
        let inf = maxent_infer_detailed(&a, ExpectedValue::new(1.0, 0.0), None, &tol()).unwrap();
        assert!(entrywise(&inf.state, &disk_fiber_midpoint()) < 1e-8);
        assert!(inf.residual <= 1e-7);
        assert_eq!(inf.chain.steps.len(), 1);
        // weights on the two extreme points of the segment fiber
        let y = crate::qmatrix::CVec::from_vec(vec![
            C64::new(FRAC_1_SQRT_2, 0.0),
            C64::new(FRAC_1_SQRT_2, 0.0),
            C64::new(0.0, 0.0),
        ]);
        let wy = inf.state.as_hermitian().expectation(&y);
        let w3 = inf.state.entry(2, 2).re;
        assert!(wy >= 0.1 && w3 >= 0.1);
    }

    #[test]
    fn disk_example_origin() {
        let a = disk_with_touching_point();
        let inf = maxent_infer_detailed(&a, ExpectedValue::new(0.0, 0.0), None, &tol()).unwrap();
        assert!(inf.residual <= 1e-10);
        assert!(inf.chain.steps.is_empty());
        let s = von_neumann_entropy(&inf.state).unwrap();
        let mut rng = seeded(1);
        for sigma in fiber_sample(&a, ExpectedValue::new(0.0, 0.0), 2000, &mut rng, &tol()).unwrap() {
            assert!(expected_value(&sigma, &a).unwrap().distance(ExpectedValue::new(0.0, 0.0)) <= 1e-7);
            assert!(s >= von_neumann_entropy(&sigma).unwrap() - 1e-9);
        }
    }

    #[test]
    fn simple_extreme_point_is_pure() {
        let a = disk_with_touching_point();
        let alpha = ExpectedValue::from_complex(C64::from_polar(1.0, 2.0));
        let inf = maxent_infer_detailed(&a, alpha, None, &tol()).unwrap();
        assert!(inf.residual <= 1e-7);
        assert!(von_neumann_entropy(&inf.state).unwrap() < 1e-6);
        let samples = fiber_sample(&a, alpha, 3, &mut seeded(0), &tol()).unwrap();
        assert_eq!(samples.len(), 3);
        for s in samples {
            assert!(trace_distance(&s, &inf.state).unwrap() < 1e-12);
        }
    }

    #[test]
    fn outside_point_rejected() {
        let r = maxent_infer(&disk_with_touching_point(), ExpectedValue::new(2.0, 0.0), None, &tol());
        assert!(matches!(r, Err(Error::OutsideRange { .. })));
    }

    #[test]
    fn uniform_prior_matches_no_prior() {
        let a = disk_with_touching_point();
        let uniform = DensityMatrix::maximally_mixed(3);
        for alpha in [ExpectedValue::new(0.3, -0.2), ExpectedValue::new(1.0, 0.0), ExpectedValue::new(-0.5, 0.5)] {
            let x = maxent_infer(&a, alpha, None, &tol()).unwrap();
            let y = maxent_infer(&a, alpha, Some(&uniform), &tol()).unwrap();
            assert!(entrywise(&x, y.as_hermitian()) < 1e-8);
        }
    }

    #[test]
    fn prior_on_face_uses_log_compression() {
        let a = disk_with_touching_point();
        let p = DensityMatrix::new(HermitianMatrix::from_real_diagonal(&[0.7, 0.2, 0.1]), &tol()).unwrap();
        let inf = maxent_infer_detailed(&a, ExpectedValue::new(1.0, 0.0), Some(&p), &tol()).unwrap();
        // face basis {y, e₃}: ⟨y|log p|y⟩ = ½(log .7 + log .2)
        let ky = 0.5 * (0.7f64.ln() + 0.2f64.ln());
        let k3 = 0.1f64.ln();
        let wy = ky.exp() / (ky.exp() + k3.exp());
        assert_abs_diff_eq!(inf.state.entry(0, 0).re, 0.5 * wy, epsilon = 1e-8);
        assert_abs_diff_eq!(inf.state.entry(2, 2).re, 1.0 - wy, epsilon = 1e-8);
    }

    #[test]
    fn singular_prior_rejected() {
        let p = DensityMatrix::new(HermitianMatrix::from_real_diagonal(&[1.0, 0.0, 0.0]), &tol()).unwrap();
        let r = maxent_infer(&disk_with_touching_point(), ExpectedValue::new(0.0, 0.0), Some(&p), &tol());
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn hermitian_segment_interior_and_end() {
        let a = MatrixC::diagonal(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)]).unwrap();
        let mid = maxent_infer(&a, ExpectedValue::new(0.5, 0.0), None, &tol()).unwrap();
        assert_abs_diff_eq!(mid.entry(0, 0).re, 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(mid.entry(1, 1).re, 0.25, epsilon = 1e-9);
        let end = maxent_infer(&a, ExpectedValue::new(0.0, 0.0), None, &tol()).unwrap();
        assert_abs_diff_eq!(end.entry(1, 1).re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(end.entry(0, 0).re, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn scalar_matrix() {
        let a = MatrixC::identity(3).affine(C64::new(0.0, 0.0), C64::new(0.5, 0.5));
        let s = maxent_infer(&a, ExpectedValue::new(0.5, 0.5), None, &tol()).unwrap();
        assert!(entrywise(&s, DensityMatrix::maximally_mixed(3).as_hermitian()) < 1e-15);
    }

    #[test]
    fn random_optimality_and_constraints() {
        let mut rng = seeded(77);
        for d in 2..=4 {
            let a = random_matrix(&mut rng, d, 1.0);
            let sigma = random_density(&mut rng, d);
            let alpha = expected_value(&sigma, &a).unwrap();
            let inf = maxent_infer_detailed(&a, alpha, None, &tol()).unwrap();
            assert!(inf.residual <= 1e-7);
            let s = von_neumann_entropy(&inf.state).unwrap();
            assert!(s >= von_neumann_entropy(&sigma).unwrap() - 1e-9);
            for x in fiber_sample(&a, alpha, 200, &mut rng, &tol()).unwrap() {
                assert!(expected_value(&x, &a).unwrap().distance(alpha) <= 1e-7);
                assert!(x.min_eigenvalue().unwrap() >= -1e-10);
                assert!(s >= von_neumann_entropy(&x).unwrap() - 1e-9);
            }
        }
    }

    #[test]
    fn fiber_sample_empty() {
        let a = disk_with_touching_point();
        assert!(fiber_sample(&a, ExpectedValue::new(0.0, 0.0), 0, &mut seeded(0), &tol())
            .unwrap()
            .is_empty());
    }
}
