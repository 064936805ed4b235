//! Discontinuities of `α ↦ ρ*_A(α)`.
//!
//! The detector inspects every tangential degeneracy of the top eigenvalue of
//! `H(θ)`: a candidate point of `W(A)` where two or more branches share value
//! and derivative is a discontinuity exactly when it is an extreme point and
//! the branches are not identical functions. An independent oracle checks
//! sequential continuity by solving the inference problem on small circles
//! around the candidate.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::eigencurves::{find_top_degeneracies, group_point, track_branches, DegeneracyEvent, DerivGroup};
use crate::error::{Error, Result};
use crate::maxent::maxent_infer;
use crate::numrange::{ExpectedValue, PointTag, RangeGeometry, SupportSample};
use crate::optimize::bisect_sign;
use crate::qmatrix::{herm_log, trace_distance, DensityMatrix, MatrixC};
use crate::tolerances::Tolerances;

/// Oracle gaps at or below this corroborate continuity.
pub const CONTINUOUS_GAP: f64 = 0.05;
/// Oracle gaps at or above this, at the two smallest radii, corroborate a discontinuity.
pub const DISCONTINUOUS_GAP: f64 = 0.2;
/// Checks closer than this factor to their tolerance make a verdict inconclusive.
const TOLERANCE_FACTOR: f64 = 10.0;
/// Angles used by the oracle to locate support lines.
const ORACLE_SCAN: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictStatus {
    Continuous,
    Discontinuous,
    IdenticalBranches,
    Inconclusive,
}

/// Class an oracle run supports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OracleClass {
    Continuous,
    Discontinuous,
    Inconclusive,
}

/// A measured quantity compared against the tolerance that decides it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToleranceCheck {
    pub quantity: String,
    pub value: f64,
    pub tolerance: f64,
    /// Whether the decision relied on `value` lying below the tolerance.
    pub below: bool,
}

impl ToleranceCheck {
    fn new(quantity: &str, value: f64, tolerance: f64, below: bool) -> Self {
        Self {
            quantity: quantity.to_string(),
            value,
            tolerance,
            below,
        }
    }

    /// Distance to the threshold as a ratio in `[0, ∞)`; small is safe.
    pub fn ratio(&self) -> f64 {
        let v = self.value.abs();
        if self.below {
            v / self.tolerance
        } else if v == 0.0 {
            f64::INFINITY
        } else {
            self.tolerance / v
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub point_tag: PointTag,
    pub deriv_group: Option<DerivGroup>,
    pub identical_flags: Vec<bool>,
    pub checks: Vec<ToleranceCheck>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub alpha: ExpectedValue,
    pub theta_star: f64,
    pub status: VerdictStatus,
    pub branches: Vec<usize>,
    pub evidence: Evidence,
    pub confidence: f64,
}

/// Gap measurements at one radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusProbe {
    pub radius: f64,
    /// `None` when no probe point of this radius lies in `W(A)`.
    pub max_gap: Option<f64>,
    pub points: Vec<ProbePoint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbePoint {
    pub direction: f64,
    pub alpha: ExpectedValue,
    /// The circle point was outside `W(A)` and was moved to the boundary.
    pub on_boundary: bool,
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub alpha: ExpectedValue,
    /// Largest trace distance at the smallest radius with probe points.
    pub max_gap: f64,
    pub class: OracleClass,
    pub radii: Vec<RadiusProbe>,
    pub skipped_radii: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub n_grid: usize,
    pub tolerances: Tolerances,
    pub radii: Vec<f64>,
    pub n_directions: usize,
    pub run_oracle: bool,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            n_grid: 4096,
            tolerances: Tolerances::default(),
            radii: vec![1e-2, 1e-3, 1e-4],
            n_directions: 16,
            run_oracle: true,
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_grid < 64 {
            return Err(Error::InvalidArgument(format!("grid size {} is below 64", self.n_grid)));
        }
        validate_radii(&self.radii)?;
        if self.n_directions < 2 {
            return Err(Error::InvalidArgument("the oracle needs at least 2 directions".into()));
        }
        Ok(())
    }
}

fn validate_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0) || !r.is_finite()) {
        return Err(Error::InvalidArgument("radii must be positive and finite".into()));
    }
    if radii.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("radii must be strictly decreasing".into()));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FacetSummary {
    pub theta: f64,
    pub endpoints: (ExpectedValue, ExpectedValue),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuityReport {
    pub dimension: usize,
    pub norm: f64,
    pub config: AnalysisConfig,
    pub events: Vec<DegeneracyEvent>,
    /// One verdict per tangential candidate of a degeneracy event.
    pub verdicts: Vec<Verdict>,
    /// Corners of `W(A)` with a simple top eigenvalue.
    pub corner_verdicts: Vec<Verdict>,
    /// Oracle runs, aligned with `verdicts` followed by `corner_verdicts`.
    pub oracle: Vec<OracleResult>,
    /// `W(A)` is a segment or a point.
    pub segment_degenerate: bool,
    pub facets: Vec<FacetSummary>,
}

impl ContinuityReport {
    pub fn all_verdicts(&self) -> impl Iterator<Item = &Verdict> {
        self.verdicts.iter().chain(&self.corner_verdicts)
    }

    pub fn discontinuities(&self) -> Vec<ExpectedValue> {
        self.verdicts
            .iter()
            .filter(|v| v.status == VerdictStatus::Discontinuous)
            .map(|v| v.alpha)
            .collect()
    }

    /// Verdicts whose oracle run contradicts them.
    pub fn disagreements(&self) -> usize {
        self.all_verdicts()
            .zip(&self.oracle)
            .filter(|(v, o)| disagree(v.status, o.class))
            .count()
    }

    pub fn has_inconclusive(&self) -> bool {
        self.all_verdicts().any(|v| v.status == VerdictStatus::Inconclusive)
            || self.oracle.iter().any(|o| o.class == OracleClass::Inconclusive)
    }

    /// `3` on detector/oracle disagreement, `2` with inconclusive results, else `0`.
    pub fn exit_code(&self) -> i32 {
        if self.disagreements() > 0 {
            3
        } else if self.has_inconclusive() {
            2
        } else {
            0
        }
    }
}

fn disagree(status: VerdictStatus, class: OracleClass) -> bool {
    matches!(
        (status, class),
        (VerdictStatus::Discontinuous, OracleClass::Continuous)
            | (VerdictStatus::Continuous, OracleClass::Discontinuous)
            | (VerdictStatus::IdenticalBranches, OracleClass::Discontinuous)
    )
}

fn finish_verdict(
    alpha: ExpectedValue,
    theta_star: f64,
    status: VerdictStatus,
    branches: Vec<usize>,
    evidence: Evidence,
) -> Verdict {
    let worst = evidence.checks.iter().map(ToleranceCheck::ratio).fold(0.0, f64::max);
    let status = if worst * TOLERANCE_FACTOR > 1.0 {
        VerdictStatus::Inconclusive
    } else {
        status
    };
    Verdict {
        alpha,
        theta_star,
        status,
        branches,
        evidence,
        confidence: (1.0 - worst).clamp(0.0, 1.0),
    }
}

struct Detector<'a> {
    geom: RangeGeometry,
    scan: Vec<SupportSample>,
    tol: &'a Tolerances,
}

impl Detector<'_> {
    fn candidate(&self, event: &DegeneracyEvent, group: &DerivGroup) -> Result<Verdict> {
        let alpha = group_point(event, group);
        let tol_int = self.geom.tol_int();
        let eps_deriv = self.tol.deriv(self.geom.norm());
        let eps_id = self.tol.identity(self.geom.norm());
        let class = self.geom.classify(alpha, &self.scan)?;
        let theta = class.witness_theta.unwrap_or(event.theta_star);

        let mut checks = vec![ToleranceCheck::new("derivative spread", group.spread, eps_deriv, true)];
        let separation = event
            .deriv_groups
            .iter()
            .filter(|g| g.branches != group.branches)
            .map(|g| (g.derivative - group.derivative).abs())
            .fold(f64::INFINITY, f64::min);
        if separation.is_finite() {
            checks.push(ToleranceCheck::new("derivative separation", separation, eps_deriv, false));
        }
        for p in &group.pairs {
            checks.push(ToleranceCheck::new("branch sup-distance", p.sup_distance, eps_id, p.identical));
        }
        let margin = self.geom.margin(alpha, theta)?;
        checks.push(ToleranceCheck::new("boundary margin", margin, tol_int, true));

        let face = self.geom.exposed_face(theta)?;
        let s = alpha.tangent_coordinate(theta);
        let lo = face.endpoints.0.tangent_coordinate(theta);
        let hi = face.endpoints.1.tangent_coordinate(theta);
        let to_end = (s - lo).abs().min((hi - s).abs());
        let status = match class.tag {
            PointTag::Extreme => {
                if hi - lo <= tol_int {
                    checks.push(ToleranceCheck::new("face length", hi - lo, tol_int, true));
                } else {
                    checks.push(ToleranceCheck::new("face length", hi - lo, tol_int, false));
                    checks.push(ToleranceCheck::new("distance to face end", to_end, tol_int, true));
                }
                if group.all_identical() {
                    VerdictStatus::IdenticalBranches
                } else {
                    VerdictStatus::Discontinuous
                }
            }
            PointTag::FacetRelint => {
                checks.push(ToleranceCheck::new("distance to face end", to_end, tol_int, false));
                VerdictStatus::Continuous
            }
            _ => VerdictStatus::Inconclusive,
        };
        let evidence = Evidence {
            point_tag: class.tag,
            deriv_group: Some(group.clone()),
            identical_flags: group.pairs.iter().map(|p| p.identical).collect(),
            checks,
        };
        Ok(finish_verdict(alpha, event.theta_star, status, group.branches.clone(), evidence))
    }

    /// Boundary points that stay fixed over consecutive scan angles.
    fn corners(&self, taken: &[ExpectedValue]) -> Vec<Verdict> {
        let n = self.scan.len();
        let tol_int = self.geom.tol_int();
        let simple = |j: usize| self.scan[j].top_multiplicity == 1;
        let same = |i: usize, j: usize| {
            simple(i) && simple(j) && self.scan[i].boundary_point.distance(self.scan[j].boundary_point) <= tol_int
        };
        // start at a sample that does not continue a run, so runs are not split at j = 0
        let Some(start) = (0..n).find(|&j| !same((j + n - 1) % n, j)) else {
            return Vec::new();
        };
        let mut out: Vec<Verdict> = Vec::new();
        let mut j = 0;
        while j < n {
            let first = (start + j) % n;
            let mut len = 1;
            while len < n && same((first + len - 1) % n, (first + len) % n) {
                len += 1;
            }
            j += len;
            if len < 2 {
                continue;
            }
            let run: Vec<usize> = (0..len).map(|k| (first + k) % n).collect();
            let alpha = self.scan[run[len / 2]].boundary_point;
            if taken.iter().chain(out.iter().map(|v| &v.alpha)).any(|t| t.distance(alpha) <= 1e-6) {
                continue;
            }
            let spread = run
                .iter()
                .map(|&k| self.scan[k].boundary_point.distance(alpha))
                .fold(0.0, f64::max);
            let evidence = Evidence {
                point_tag: PointTag::Extreme,
                deriv_group: None,
                identical_flags: Vec::new(),
                checks: vec![ToleranceCheck::new("corner drift", spread, tol_int, true)],
            };
            out.push(finish_verdict(
                alpha,
                self.scan[run[len / 2]].theta,
                VerdictStatus::Continuous,
                Vec::new(),
                evidence,
            ));
        }
        out
    }
}

/// Runs the branch tracker, the degeneracy scan and the detector; when
/// `config.run_oracle` is set, every verdict is cross-checked by [`oracle_check`].
pub fn detect_discontinuities(a: &MatrixC, config: &AnalysisConfig) -> Result<ContinuityReport> {
    config.validate()?;
    let tol = &config.tolerances;
    let d = a.dim();
    let n_grid = config.n_grid;
    let branches = track_branches(a, n_grid, tol)?;
    let events = find_top_degeneracies(a, &branches, tol)?;
    let geom = RangeGeometry::new(a, tol);
    let scan = geom.scan(n_grid)?;
    let segment_degenerate = geom.frame().dimension() < 2;

    let tol_int = geom.tol_int();
    let mut facets = Vec::new();
    for ev in &events {
        let face = geom.exposed_face(ev.theta_star)?;
        if face.length() > tol_int {
            facets.push(FacetSummary {
                theta: ev.theta_star,
                endpoints: face.endpoints,
            });
        }
    }

    let norm = geom.norm();
    let detector = Detector { geom, scan, tol };
    let mut verdicts: Vec<Verdict> = Vec::new();
    let mut corner_verdicts = Vec::new();
    if !segment_degenerate {
        for ev in &events {
            for g in ev.deriv_groups.iter().filter(|g| g.branches.len() >= 2) {
                let v = detector.candidate(ev, g)?;
                if !verdicts.iter().any(|w| w.alpha.distance(v.alpha) <= tol_int) {
                    verdicts.push(v);
                }
            }
        }
        let taken: Vec<ExpectedValue> = verdicts.iter().map(|v| v.alpha).collect();
        corner_verdicts = detector.corners(&taken);
    }

    let oracle = if config.run_oracle {
        verdicts
            .iter()
            .chain(&corner_verdicts)
            .map(|v| oracle_check(a, v.alpha, &config.radii, config.n_directions, None, tol))
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };

    Ok(ContinuityReport {
        dimension: d,
        norm,
        config: config.clone(),
        events,
        verdicts,
        corner_verdicts,
        oracle,
        segment_degenerate,
        facets,
    })
}

/// Probe point at `alpha + r·e^{iφ}`, moved onto the boundary of `W(A)` along
/// the arc towards `inward` (or the radius towards `alpha`) when it falls outside.
fn probe_location(
    geom: &RangeGeometry,
    scan: &[SupportSample],
    alpha: ExpectedValue,
    r: f64,
    phi: f64,
    inward: Option<f64>,
) -> Result<Option<(ExpectedValue, bool)>> {
    let tol_int = geom.tol_int();
    let at = |angle: f64, rad: f64| ExpectedValue::new(alpha.re + rad * angle.cos(), alpha.im + rad * angle.sin());
    let outside = |p: ExpectedValue| -> Result<f64> { Ok(-geom.min_margin(p, scan)?.0) };
    let p = at(phi, r);
    if outside(p)? <= tol_int {
        return Ok(Some((p, false)));
    }
    let p = match inward {
        Some(phi_in) => {
            if outside(at(phi_in, r))? > 0.0 {
                return Ok(None);
            }
            let s = bisect_sign(|s| outside(at(phi_in + s * (phi - phi_in), r)), 0.0, 1.0, 1e-15)?;
            at(phi_in + s * (phi - phi_in), r)
        }
        None => {
            let s = bisect_sign(|s| outside(at(phi, s * r)), 0.0, 1.0, 1e-15)?;
            at(phi, s * r)
        }
    };
    if outside(p)? > tol_int {
        return Ok(None);
    }
    Ok(Some((p, true)))
}

/// Sequential-continuity oracle at `alpha`.
///
/// For each radius, `n_directions` points on the circle around `alpha` are
/// inferred and compared in trace distance with the inference at `alpha`.
/// At a boundary point the directions cover the closed inward half-circle;
/// probes that leave `W(A)` are moved back onto its boundary.
pub fn oracle_check(
    a: &MatrixC,
    alpha: ExpectedValue,
    radii: &[f64],
    n_directions: usize,
    prior: Option<&DensityMatrix>,
    tol: &Tolerances,
) -> Result<OracleResult> {
    validate_radii(radii)?;
    if n_directions < 2 {
        return Err(Error::InvalidArgument("the oracle needs at least 2 directions".into()));
    }
    let geom = RangeGeometry::new(a, tol);
    let scan = geom.scan(ORACLE_SCAN)?;
    let (margin, theta) = geom.min_margin(alpha, &scan)?;
    if margin < -geom.tol_int() {
        return Err(Error::OutsideRange {
            re: alpha.re,
            im: alpha.im,
            margin,
        });
    }
    let reference = maxent_infer(a, alpha, prior, tol)?;
    let boundary = margin <= geom.tol_int();
    let directions: Vec<f64> = if boundary {
        let start = theta + FRAC_PI_2;
        (0..n_directions)
            .map(|j| start + PI * j as f64 / (n_directions - 1) as f64)
            .collect()
    } else {
        (0..n_directions).map(|j| TAU * j as f64 / n_directions as f64).collect()
    };
    let inward = boundary.then_some(theta + PI);

    let mut probes = Vec::with_capacity(radii.len());
    for &r in radii {
        let points: Vec<Option<ProbePoint>> = directions
            .par_iter()
            .map(|&phi| -> Result<Option<ProbePoint>> {
                let Some((p, on_boundary)) = probe_location(&geom, &scan, alpha, r, phi, inward)? else {
                    return Ok(None);
                };
                let state = maxent_infer(a, p, prior, tol)?;
                Ok(Some(ProbePoint {
                    direction: phi,
                    alpha: p,
                    on_boundary,
                    gap: trace_distance(&state, &reference)?,
                }))
            })
            .collect::<Result<_>>()?;
        let points: Vec<ProbePoint> = points.into_iter().flatten().collect();
        let max_gap = points.iter().map(|p| p.gap).reduce(f64::max);
        probes.push(RadiusProbe {
            radius: r,
            max_gap,
            points,
        });
    }

    let measured: Vec<f64> = probes.iter().filter_map(|p| p.max_gap).collect();
    let skipped_radii = measured.len() < probes.len();
    let max_gap = measured.last().copied().unwrap_or(f64::NAN);
    let class = match measured.as_slice() {
        [] => OracleClass::Inconclusive,
        [.., prev, last] if *prev >= DISCONTINUOUS_GAP && *last >= DISCONTINUOUS_GAP => OracleClass::Discontinuous,
        [.., last] if *last <= CONTINUOUS_GAP => OracleClass::Continuous,
        _ => OracleClass::Inconclusive,
    };
    Ok(OracleResult {
        alpha,
        max_gap,
        class,
        radii: probes,
        skipped_radii,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PriorInvariance {
    /// All priors agree at every candidate.
    pub consistent: bool,
    pub candidates: Vec<ExpectedValue>,
    /// `classes[p][c]`: oracle class for prior `p` at candidate `c`.
    pub classes: Vec<Vec<OracleClass>>,
    /// Candidates each prior corroborates as discontinuous.
    pub discontinuities: Vec<Vec<ExpectedValue>>,
}

/// Re-runs the oracle at every detector candidate with each prior in place of
/// the uniform one.
pub fn prior_invariance_check(
    a: &MatrixC,
    priors: &[DensityMatrix],
    config: &AnalysisConfig,
) -> Result<PriorInvariance> {
    for p in priors {
        if p.dim() != a.dim() {
            return Err(Error::DimensionMismatch(p.dim(), a.dim()));
        }
        herm_log(p.as_hermitian())?;
    }
    let report = detect_discontinuities(
        a,
        &AnalysisConfig {
            run_oracle: false,
            ..config.clone()
        },
    )?;
    let candidates: Vec<ExpectedValue> = report.all_verdicts().map(|v| v.alpha).collect();
    let tol = &config.tolerances;
    let mut classes = Vec::with_capacity(priors.len());
    let mut discontinuities = Vec::with_capacity(priors.len());
    for p in priors {
        let row: Vec<OracleClass> = candidates
            .iter()
            .map(|&c| Ok(oracle_check(a, c, &config.radii, config.n_directions, Some(p), tol)?.class))
            .collect::<Result<_>>()?;
        discontinuities.push(
            candidates
                .iter()
                .zip(&row)
                .filter(|(_, c)| **c == OracleClass::Discontinuous)
                .map(|(a, _)| *a)
                .collect(),
        );
        classes.push(row);
    }
    let consistent = classes.windows(2).all(|w| w[0] == w[1]);
    Ok(PriorInvariance {
        consistent,
        candidates,
        classes,
        discontinuities,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmatrix::{disk_with_touching_point, HermitianMatrix, C64};
    use crate::random::{random_matrix, random_prior, seeded};

    fn quick() -> AnalysisConfig {
        AnalysisConfig {
            n_grid: 1024,
            ..AnalysisConfig::default()
        }
    }

    #[test]
    fn disk_example_single_discontinuity() {
        let report = detect_discontinuities(&disk_with_touching_point(), &quick()).unwrap();
        assert_eq!(report.verdicts.len(), 1, "{:?}", report.verdicts);
        let v = &report.verdicts[0];
        assert_eq!(v.status, VerdictStatus::Discontinuous);
        assert!(v.alpha.distance(ExpectedValue::new(1.0, 0.0)) < 1e-9);
        assert!(v.confidence > 0.9);
        assert!(report.corner_verdicts.is_empty());
        assert_eq!(report.oracle[0].class, OracleClass::Discontinuous);
        assert_eq!(report.exit_code(), 0);
        assert!(report.verdicts.len() <= report.events.len());
    }

    #[test]
    fn oracle_on_disk_example() {
        let a = disk_with_touching_point();
        let tol = Tolerances::default();
        let radii = [1e-2, 1e-3, 1e-4];
        let touch = oracle_check(&a, ExpectedValue::new(1.0, 0.0), &radii, 16, None, &tol).unwrap();
        assert_eq!(touch.class, OracleClass::Discontinuous);
        for p in &touch.radii[1..] {
            assert!(p.max_gap.unwrap() >= DISCONTINUOUS_GAP);
        }
        let opposite = oracle_check(&a, ExpectedValue::new(-1.0, 0.0), &radii, 16, None, &tol).unwrap();
        assert!(opposite.max_gap <= CONTINUOUS_GAP, "{}", opposite.max_gap);
        let center = oracle_check(&a, ExpectedValue::new(0.0, 0.0), &radii, 16, None, &tol).unwrap();
        assert!(center.max_gap <= CONTINUOUS_GAP);
        assert!(!center.radii[0].points.iter().any(|p| p.on_boundary));
    }

    #[test]
    fn duplicated_block_only_identical_branches() {
        let mut rng = seeded(21);
        let blk = random_matrix(&mut rng, 2, 1.0);
        let report = detect_discontinuities(&blk.direct_sum(&blk), &quick()).unwrap();
        assert!(!report.events.is_empty());
        assert!(report
            .verdicts
            .iter()
            .all(|v| v.status == VerdictStatus::IdenticalBranches));
        assert!(report.discontinuities().is_empty());
    }

    #[test]
    fn generic_matrix_has_no_candidates() {
        let mut rng = seeded(40);
        let a = random_matrix(&mut rng, 4, 1.0);
        let report = detect_discontinuities(&a, &quick()).unwrap();
        assert!(report.events.is_empty());
        assert!(report.verdicts.is_empty());
        assert_eq!(report.exit_code(), 0);
    }

    #[test]
    fn triangle_corners_are_continuous() {
        let a = MatrixC::diagonal(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 1.0)]).unwrap();
        let report = detect_discontinuities(&a, &quick()).unwrap();
        assert!(report.verdicts.is_empty());
        assert_eq!(report.corner_verdicts.len(), 3);
        assert_eq!(report.facets.len(), 3);
        for v in &report.corner_verdicts {
            assert_eq!(v.status, VerdictStatus::Continuous);
        }
        for o in &report.oracle {
            assert_eq!(o.class, OracleClass::Continuous, "{:?}", o.alpha);
        }
    }

    #[test]
    fn hermitian_matrix_is_segment_degenerate() {
        let a = MatrixC::diagonal(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(-1.0, 0.0)]).unwrap();
        let report = detect_discontinuities(&a, &quick()).unwrap();
        assert!(report.segment_degenerate);
        assert!(report.verdicts.is_empty());
    }

    #[test]
    fn priors_agree_on_disk_example() {
        let a = disk_with_touching_point();
        let mut rng = seeded(3);
        let tol = Tolerances::default();
        let priors = vec![
            DensityMatrix::maximally_mixed(3),
            random_prior(&mut rng, 3),
            DensityMatrix::new(HermitianMatrix::from_real_diagonal(&[0.7, 0.2, 0.1]), &tol).unwrap(),
        ];
        let out = prior_invariance_check(&a, &priors, &quick()).unwrap();
        assert!(out.consistent, "{:?}", out.classes);
        for d in &out.discontinuities {
            assert_eq!(d.len(), 1);
            assert!(d[0].distance(ExpectedValue::new(1.0, 0.0)) < 1e-9);
        }
    }

    #[test]
    fn singular_prior_is_rejected() {
        let tol = Tolerances::default();
        let p = DensityMatrix::new(HermitianMatrix::from_real_diagonal(&[0.5, 0.5, 0.0]), &tol).unwrap();
        assert!(prior_invariance_check(&disk_with_touching_point(), &[p], &quick()).is_err());
    }

    #[test]
    fn radii_must_decrease() {
        let a = disk_with_touching_point();
        let tol = Tolerances::default();
        assert!(oracle_check(&a, ExpectedValue::new(0.0, 0.0), &[1e-3, 1e-2], 8, None, &tol).is_err());
        assert!(oracle_check(&a, ExpectedValue::new(0.0, 0.0), &[1e-3, -1.0], 8, None, &tol).is_err());
    }

    #[test]
    fn oracle_rejects_outside_point() {
        let r = oracle_check(
            &disk_with_touching_point(),
            ExpectedValue::new(2.0, 0.0),
            &[1e-2],
            8,
            None,
            &Tolerances::default(),
        );
        assert!(matches!(r, Err(Error::OutsideRange { .. })));
    }
}
