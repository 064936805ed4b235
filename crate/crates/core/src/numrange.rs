//! The numerical range `W(A) = {⟨x, Ax⟩ : |x| = 1}`, which coincides with the
//! set of expected-value pairs of `(Re A, Im A)` over all states.
//!
//! Support lines use the outward normal `e^{iθ}`: the support value at `θ` is
//! the largest eigenvalue `h(θ)` of `H(θ) = Re(e^{−iθ}A) = cos θ·Re A + sin θ·Im A`
//! and the support line is `{z : Re(e^{−iθ}z) = h(θ)}`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::optimize::{bisect_sign, golden_min, wrap_angle};
use crate::qmatrix::{hermitian_eig, CMat, HermitianMatrix, MatrixC, C64};
use crate::tolerances::Tolerances;

/// A point of `ℂ ≅ ℝ²`, the pair `(⟨Re A⟩, ⟨Im A⟩)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpectedValue {
    pub re: f64,
    pub im: f64,
}

impl ExpectedValue {
    pub const fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub fn from_complex(z: C64) -> Self {
        Self::new(z.re, z.im)
    }

    pub fn to_complex(self) -> C64 {
        C64::new(self.re, self.im)
    }

    pub fn distance(self, other: Self) -> f64 {
        (self.to_complex() - other.to_complex()).norm()
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    /// `Re(e^{−iθ}·self)`, the coordinate along the normal `e^{iθ}`.
    pub fn normal_coordinate(self, theta: f64) -> f64 {
        self.re * theta.cos() + self.im * theta.sin()
    }

    /// `Im(e^{−iθ}·self)`, the coordinate along the support line at `θ`.
    pub fn tangent_coordinate(self, theta: f64) -> f64 {
        self.im * theta.cos() - self.re * theta.sin()
    }

    /// `e^{iθ}(normal + i·tangent)`.
    pub fn from_line_coordinates(theta: f64, normal: f64, tangent: f64) -> Self {
        Self::from_complex(C64::from_polar(1.0, theta) * C64::new(normal, tangent))
    }
}

/// Support data at one angle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportSample {
    pub theta: f64,
    /// `λ_max(H(θ))`.
    pub h: f64,
    /// `⟨x, Ax⟩` for a top eigenvector `x`.
    pub boundary_point: ExpectedValue,
    pub top_multiplicity: usize,
}

/// Intersection of `W(A)` with the support line at `theta`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExposedFace {
    pub theta: f64,
    pub support_value: f64,
    /// Orthonormal basis (columns) of the top eigenspace of `H(θ)`.
    pub eigenbasis: CMat,
    /// `V* A V` for the eigenbasis `V`.
    pub compressed: MatrixC,
    /// Face endpoints ordered by increasing tangent coordinate.
    pub endpoints: (ExpectedValue, ExpectedValue),
}

impl ExposedFace {
    pub fn multiplicity(&self) -> usize {
        self.eigenbasis.ncols()
    }

    pub fn length(&self) -> f64 {
        self.endpoints.0.distance(self.endpoints.1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointTag {
    Outside,
    Interior,
    FacetRelint,
    Extreme,
    SegmentDegenerate,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointClass {
    pub tag: PointTag,
    pub witness_theta: Option<f64>,
}

/// Affine frame of the observable pair: `A = center·I + traceless part`, with
/// the directions of the traceless part that are numerically nonzero.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservableFrame {
    pub center: C64,
    /// Orthonormal coefficient vectors `q` such that `q₀·Re A₀ + q₁·Im A₀` is
    /// not negligible, strongest first.
    pub directions: Vec<[f64; 2]>,
    /// Coefficient vectors whose combination vanishes within tolerance.
    pub null_directions: Vec<[f64; 2]>,
}

impl ObservableFrame {
    pub fn dimension(&self) -> usize {
        self.directions.len()
    }
}

/// `Re(e^{−iθ}A) = cos θ·Re A + sin θ·Im A`.
pub fn rotated_real_part(a: &MatrixC, theta: f64) -> HermitianMatrix {
    a.re_part().combine(theta.cos(), &a.im_part(), theta.sin())
}

/// Cached Hermitian parts of `A` plus its scale, reused across many queries.
#[derive(Clone, Debug)]
pub struct RangeGeometry {
    a: MatrixC,
    re: HermitianMatrix,
    im: HermitianMatrix,
    norm: f64,
    tol: Tolerances,
}

impl RangeGeometry {
    pub fn new(a: &MatrixC, tol: &Tolerances) -> Self {
        Self {
            re: a.re_part(),
            im: a.im_part(),
            norm: a.spectral_norm(),
            a: a.clone(),
            tol: *tol,
        }
    }

    pub fn matrix(&self) -> &MatrixC {
        &self.a
    }

    pub fn re_part(&self) -> &HermitianMatrix {
        &self.re
    }

    pub fn im_part(&self) -> &HermitianMatrix {
        &self.im
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn eps_gap(&self) -> f64 {
        self.tol.gap(self.norm)
    }

    pub fn tol_int(&self) -> f64 {
        self.tol.interior(self.norm)
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    /// `H(θ)`.
    pub fn rotated(&self, theta: f64) -> HermitianMatrix {
        self.re.combine(theta.cos(), &self.im, theta.sin())
    }

    /// `H′(θ) = −sin θ·Re A + cos θ·Im A`.
    pub fn rotated_derivative(&self, theta: f64) -> HermitianMatrix {
        self.re.combine(-theta.sin(), &self.im, theta.cos())
    }

    pub fn support(&self, theta: f64) -> Result<SupportSample> {
        let e = hermitian_eig(&self.rotated(theta))?;
        let h = e.values[0];
        let eps = self.eps_gap();
        let top_multiplicity = e.values.iter().take_while(|&&v| h - v <= eps).count();
        let x = e.vector(0);
        let z = x.dotc(&(self.a.as_matrix() * &x));
        Ok(SupportSample {
            theta,
            h,
            boundary_point: ExpectedValue::from_complex(z),
            top_multiplicity,
        })
    }

    pub fn scan(&self, n_grid: usize) -> Result<Vec<SupportSample>> {
        if n_grid < 16 {
            return Err(Error::InvalidArgument(format!(
                "support scan needs at least 16 angles, got {n_grid}"
            )));
        }
        (0..n_grid)
            .into_par_iter()
            .map(|j| self.support(TAU * j as f64 / n_grid as f64))
            .collect()
    }

    /// `h(θ) − Re(e^{−iθ}α)`.
    pub fn margin(&self, alpha: ExpectedValue, theta: f64) -> Result<f64> {
        let e = hermitian_eig(&self.rotated(theta))?;
        Ok(e.values[0] - alpha.normal_coordinate(theta))
    }

    fn margin_slope(&self, alpha: ExpectedValue, theta: f64) -> Result<f64> {
        let e = hermitian_eig(&self.rotated(theta))?;
        let x = e.vector(0);
        Ok(self.rotated_derivative(theta).expectation(&x) - alpha.tangent_coordinate(theta))
    }

    /// Minimum over `θ` of `h(θ) − Re(e^{−iθ}α)` and a minimizing angle.
    ///
    /// Grid minima from `scan` are refined by bisection on the margin slope
    /// `λ′_top(θ) − Im(e^{−iθ}α)`, falling back to golden section when the slope
    /// does not change sign inside the bracket.
    pub fn min_margin(&self, alpha: ExpectedValue, scan: &[SupportSample]) -> Result<(f64, f64)> {
        let n = scan.len();
        if n == 0 {
            return Err(Error::InvalidArgument("empty support scan".into()));
        }
        let m: Vec<f64> = scan
            .iter()
            .map(|s| s.h - alpha.normal_coordinate(s.theta))
            .collect();
        let mut minima: Vec<usize> = (0..n)
            .filter(|&j| m[j] <= m[(j + n - 1) % n] && m[j] <= m[(j + 1) % n])
            .collect();
        minima.sort_by(|&a, &b| m[a].total_cmp(&m[b]));
        minima.truncate(3);

        let step = TAU / n as f64;
        let mut best = (f64::INFINITY, 0.0);
        for j in minima {
            let center = scan[j].theta;
            let (lo, hi) = (center - step, center + step);
            let s_lo = self.margin_slope(alpha, lo)?;
            let s_hi = self.margin_slope(alpha, hi)?;
            let theta = if s_lo <= 0.0 && s_hi > 0.0 {
                bisect_sign(|t| self.margin_slope(alpha, t), lo, hi, 1e-15)?
            } else {
                golden_min(|t| self.margin(alpha, t), lo, hi, 1e-12)?.0
            };
            let value = self.margin(alpha, theta)?;
            let (value, theta) = if m[j] < value {
                (m[j], center)
            } else {
                (value, theta)
            };
            if value < best.0 {
                best = (value, wrap_angle(theta));
            }
        }
        Ok(best)
    }

    /// Affine frame of `(Re A, Im A)` after removing the multiple of the identity.
    pub fn frame(&self) -> ObservableFrame {
        let d = self.dim() as f64;
        let center = self.a.trace() / d;
        let r0 = self.re.traceless();
        let i0 = self.im.traceless();
        let (g00, g01, g11) = (r0.inner(&r0), r0.inner(&i0), i0.inner(&i0));
        // eigen-decomposition of the 2×2 Gram matrix
        let mean = 0.5 * (g00 + g11);
        let rad = (0.25 * (g00 - g11).powi(2) + g01 * g01).sqrt();
        let (l_hi, l_lo) = (mean + rad, (mean - rad).max(0.0));
        let angle = 0.5 * (2.0 * g01).atan2(g00 - g11);
        let q_hi = [angle.cos(), angle.sin()];
        let q_lo = [-angle.sin(), angle.cos()];
        let thr = self.tol_int();
        let mut directions = Vec::new();
        let mut null_directions = Vec::new();
        for (l, q) in [(l_hi, q_hi), (l_lo, q_lo)] {
            if l.sqrt() > thr {
                directions.push(q);
            } else {
                null_directions.push(q);
            }
        }
        ObservableFrame {
            center,
            directions,
            null_directions,
        }
    }

    pub fn exposed_face(&self, theta: f64) -> Result<ExposedFace> {
        let e = hermitian_eig(&self.rotated(theta))?;
        let h = e.values[0];
        let eps = self.eps_gap();
        let m = e.values.iter().take_while(|&&v| h - v <= eps).count();
        let v = e.columns(0, m);
        let compressed = self.a.compress(&v)?;
        let deriv = hermitian_eig(&self.rotated_derivative(theta).compress(&v))?;
        let (mu_max, mu_min) = (deriv.values[0], deriv.values[m - 1]);
        Ok(ExposedFace {
            theta,
            support_value: h,
            eigenbasis: v,
            compressed,
            endpoints: (
                ExpectedValue::from_line_coordinates(theta, h, mu_min),
                ExpectedValue::from_line_coordinates(theta, h, mu_max),
            ),
        })
    }

    pub fn contains(&self, alpha: ExpectedValue, scan: &[SupportSample]) -> bool {
        let tol = self.tol_int();
        !scan.is_empty()
            && scan
                .iter()
                .all(|s| alpha.normal_coordinate(s.theta) <= s.h + tol)
    }

    pub fn classify(&self, alpha: ExpectedValue, scan: &[SupportSample]) -> Result<PointClass> {
        let tol = self.tol_int();
        let (margin, theta) = self.min_margin(alpha, scan)?;
        if margin < -tol {
            return Err(Error::OutsideRange {
                re: alpha.re,
                im: alpha.im,
                margin,
            });
        }
        if self.frame().dimension() < 2 {
            return Ok(PointClass {
                tag: PointTag::SegmentDegenerate,
                witness_theta: None,
            });
        }
        if margin > tol {
            return Ok(PointClass {
                tag: PointTag::Interior,
                witness_theta: None,
            });
        }
        let face = self.exposed_face(theta)?;
        let s = alpha.tangent_coordinate(theta);
        let lo = face.endpoints.0.tangent_coordinate(theta);
        let hi = face.endpoints.1.tangent_coordinate(theta);
        let tag = if hi - lo <= tol || s - lo <= tol || hi - s <= tol {
            PointTag::Extreme
        } else {
            PointTag::FacetRelint
        };
        Ok(PointClass {
            tag,
            witness_theta: Some(theta),
        })
    }
}

/// Samples `h(θ_j)` and support points at `θ_j = 2πj/n_grid`.
pub fn support_scan(a: &MatrixC, n_grid: usize, tol: &Tolerances) -> Result<Vec<SupportSample>> {
    RangeGeometry::new(a, tol).scan(n_grid)
}

/// Half-plane test against every sampled support line.
pub fn contains(a: &MatrixC, alpha: ExpectedValue, scan: &[SupportSample], tol: &Tolerances) -> bool {
    RangeGeometry::new(a, tol).contains(alpha, scan)
}

pub fn exposed_face(a: &MatrixC, theta: f64, tol: &Tolerances) -> Result<ExposedFace> {
    RangeGeometry::new(a, tol).exposed_face(theta)
}

pub fn classify_point(
    a: &MatrixC,
    alpha: ExpectedValue,
    scan: &[SupportSample],
    tol: &Tolerances,
) -> Result<PointClass> {
    RangeGeometry::new(a, tol).classify(alpha, scan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmatrix::disk_with_touching_point;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn rotated_real_part_special_angles() {
        let a = disk_with_touching_point();
        assert_eq!(rotated_real_part(&a, 0.0), a.re_part());
        let at_pi = rotated_real_part(&a, PI);
        assert!((at_pi.as_matrix() + a.re_part().as_matrix()).norm() < 1e-15);
    }

    #[test]
    fn rotated_real_part_of_disk_example() {
        // (cos θ σ₁ + sin θ σ₂) ⊕ cos θ
        let a = disk_with_touching_point();
        for &t in &[0.3, 1.7, -2.2] {
            let h = rotated_real_part(&a, t);
            let m = h.as_matrix();
            assert_abs_diff_eq!(m[(0, 1)].re, t.cos(), epsilon = 1e-15);
            assert_abs_diff_eq!(m[(0, 1)].im, -t.sin(), epsilon = 1e-15);
            assert_abs_diff_eq!(m[(2, 2)].re, t.cos(), epsilon = 1e-15);
            assert_abs_diff_eq!(m[(0, 0)].norm(), 0.0);
            assert_abs_diff_eq!(m[(0, 2)].norm(), 0.0);
        }
    }

    #[test]
    fn disk_support_values_are_one() {
        let scan = support_scan(&disk_with_touching_point(), 256, &tol()).unwrap();
        for s in &scan {
            assert_abs_diff_eq!(s.h, 1.0, epsilon = 1e-12);
        }
        assert_eq!(scan[0].top_multiplicity, 2);
        assert_eq!(scan[64].top_multiplicity, 1);
    }

    #[test]
    fn hermitian_diagonal_range_is_segment() {
        let a = MatrixC::from_planes(&[vec![0.0, 0.0], vec![0.0, 1.0]], &vec![vec![0.0; 2]; 2]).unwrap();
        let scan = support_scan(&a, 64, &tol()).unwrap();
        for s in &scan {
            assert!(s.boundary_point.im.abs() < 1e-15);
            assert!((-1e-15..=1.0 + 1e-15).contains(&s.boundary_point.re));
        }
        assert_abs_diff_eq!(scan[0].boundary_point.re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(scan[32].boundary_point.re, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_matrix_range_is_origin() {
        let scan = support_scan(&MatrixC::zeros(3), 32, &tol()).unwrap();
        assert!(scan.iter().all(|s| s.boundary_point == ExpectedValue::new(0.0, 0.0)));
    }

    #[test]
    fn scan_rejects_coarse_grid() {
        assert!(support_scan(&MatrixC::zeros(2), 8, &tol()).is_err());
    }

    #[test]
    fn containment_examples() {
        let a = disk_with_touching_point();
        let scan = support_scan(&a, 128, &tol()).unwrap();
        assert!(contains(&a, ExpectedValue::new(0.0, 0.0), &scan, &tol()));
        assert!(!contains(&a, ExpectedValue::new(2.0, 0.0), &scan, &tol()));
        for s in &scan {
            assert!(contains(&a, s.boundary_point, &scan, &tol()));
        }
    }

    #[test]
    fn face_of_simple_top_is_a_point() {
        let a = disk_with_touching_point();
        let face = exposed_face(&a, 1.0, &tol()).unwrap();
        assert_eq!(face.multiplicity(), 1);
        assert!(face.length() < 1e-14);
        assert_abs_diff_eq!(face.endpoints.0.re, 1f64.cos(), epsilon = 1e-14);
        assert_abs_diff_eq!(face.endpoints.0.im, 1f64.sin(), epsilon = 1e-14);
    }

    #[test]
    fn face_of_disk_example_at_zero() {
        let face = exposed_face(&disk_with_touching_point(), 0.0, &tol()).unwrap();
        assert_eq!(face.multiplicity(), 2);
        for p in [face.endpoints.0, face.endpoints.1] {
            assert_abs_diff_eq!(p.re, 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(p.im, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn face_of_hermitian_at_zero() {
        let a = MatrixC::from_planes(&[vec![0.0, 0.0], vec![0.0, 1.0]], &vec![vec![0.0; 2]; 2]).unwrap();
        let face = exposed_face(&a, 0.0, &tol()).unwrap();
        assert_eq!(face.endpoints.0, ExpectedValue::new(1.0, 0.0));
        assert_eq!(face.endpoints.1, ExpectedValue::new(1.0, 0.0));
    }

    #[test]
    fn facet_endpoints_of_triangle() {
        // W(diag(0, 1, i)) is the triangle; the facet [0,1] has normal −i
        let a = MatrixC::diagonal(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 1.0)]).unwrap();
        let face = exposed_face(&a, 1.5 * PI, &tol()).unwrap();
        assert_eq!(face.multiplicity(), 2);
        let (p, q) = face.endpoints;
        let mut xs = [p.re, q.re];
        xs.sort_by(f64::total_cmp);
        assert_abs_diff_eq!(xs[0], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(xs[1], 1.0, epsilon = 1e-14);
        assert!(p.im.abs() < 1e-14 && q.im.abs() < 1e-14);
    }

    #[test]
    fn classification_examples() {
        let a = disk_with_touching_point();
        let scan = support_scan(&a, 512, &tol()).unwrap();
        let c = classify_point(&a, ExpectedValue::new(0.0, 0.0), &scan, &tol()).unwrap();
        assert_eq!(c.tag, PointTag::Interior);
        let c = classify_point(&a, ExpectedValue::new(1.0, 0.0), &scan, &tol()).unwrap();
        assert_eq!(c.tag, PointTag::Extreme);
        assert!(c.witness_theta.unwrap().min(TAU - c.witness_theta.unwrap()) < 1e-7);
        assert!(matches!(
            classify_point(&a, ExpectedValue::new(2.0, 0.0), &scan, &tol()),
            Err(Error::OutsideRange { .. })
        ));

        let h = MatrixC::from_planes(&[vec![1.0, 0.0], vec![0.0, -1.0]], &vec![vec![0.0; 2]; 2]).unwrap();
        let scan = support_scan(&h, 64, &tol()).unwrap();
        let c = classify_point(&h, ExpectedValue::new(0.0, 0.0), &scan, &tol()).unwrap();
        assert_eq!(c.tag, PointTag::SegmentDegenerate);
    }

    #[test]
    fn facet_relative_interior() {
        let a = MatrixC::diagonal(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 1.0)]).unwrap();
        let scan = support_scan(&a, 256, &tol()).unwrap();
        let c = classify_point(&a, ExpectedValue::new(0.5, 0.0), &scan, &tol()).unwrap();
        assert_eq!(c.tag, PointTag::FacetRelint);
        assert_abs_diff_eq!(c.witness_theta.unwrap(), 1.5 * PI, epsilon = 1e-9);
        let c = classify_point(&a, ExpectedValue::new(0.5, 0.5), &scan, &tol()).unwrap();
        assert_eq!(c.tag, PointTag::FacetRelint);
        let c = classify_point(&a, ExpectedValue::new(1.0, 0.0), &scan, &tol()).unwrap();
        assert_eq!(c.tag, PointTag::Extreme);
    }

    #[test]
    fn frame_dimensions() {
        let t = tol();
        assert_eq!(RangeGeometry::new(&MatrixC::zeros(2), &t).frame().dimension(), 0);
        let h = MatrixC::from_planes(&[vec![1.0, 0.0], vec![0.0, -1.0]], &vec![vec![0.0; 2]; 2]).unwrap();
        let rotated = h.affine(C64::from_polar(1.0, 0.7), C64::new(0.3, 0.1));
        assert_eq!(RangeGeometry::new(&rotated, &t).frame().dimension(), 1);
        assert_eq!(RangeGeometry::new(&disk_with_touching_point(), &t).frame().dimension(), 2);
    }
}
