//! Real-analytic eigenvalue branches `λ_k(θ)` of `H(θ) = Re(e^{−iθ}A)`, their
//! Kippenhahn points `z_k(θ) = e^{iθ}(λ_k(θ) + iλ_k′(θ))`, and the angles at
//! which the top of the spectrum becomes degenerate.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::assignment::max_score_assignment;
use crate::error::{Error, Result};
use crate::numrange::{ExpectedValue, RangeGeometry};
use crate::optimize::{angle_distance, bisect_sign, golden_min, wrap_angle};
use crate::qmatrix::{herm_map, hermitian_eig, CMat, CVec, HermitianMatrix, MatrixC};
use crate::tolerances::Tolerances;

/// Overlap differences below this make an assignment ambiguous.
const OVERLAP_TIE: f64 = 1e-6;

/// Eigenvalue branches sampled on a uniform grid over one period.
#[derive(Clone, Debug)]
pub struct EigenBranchSet {
    pub grid: Vec<f64>,
    /// `values[k][j] = λ_k(θ_j)`.
    pub values: Vec<Vec<f64>>,
    /// `derivs[k][j] = λ_k′(θ_j)` (Hellmann–Feynman).
    pub derivs: Vec<Vec<f64>>,
    /// `vectors[j]` holds `x_k(θ_j)` in column `k` (branch order).
    pub vectors: Vec<CMat>,
    /// Branch `k` leaving `θ → 2π` continues as branch `wrap_permutation[k]` at `θ = 0`.
    pub wrap_permutation: Vec<usize>,
    /// `‖A‖₂` of the matrix the branches were tracked for.
    pub norm: f64,
}

impl EigenBranchSet {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn step(&self) -> f64 {
        TAU / self.grid.len() as f64
    }

    pub fn vector(&self, k: usize, j: usize) -> CVec {
        self.vectors[j].column(k).into_owned()
    }

    /// Index of the grid point closest to `theta`.
    pub fn nearest_index(&self, theta: f64) -> usize {
        let n = self.len();
        ((wrap_angle(theta) / self.step()).round() as usize) % n
    }

    /// `max_j |λ_k(θ_j) − λ_l(θ_j)|`.
    pub fn sup_distance(&self, k: usize, l: usize) -> f64 {
        self.values[k]
            .iter()
            .zip(&self.values[l])
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// One point `z_k(θ)` of the Kippenhahn curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KippenhahnPoint {
    pub theta: f64,
    pub branch: usize,
    pub z: ExpectedValue,
}

/// Identity test of two branches over the sampled period.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchPair {
    pub first: usize,
    pub second: usize,
    pub sup_distance: f64,
    pub identical: bool,
}

/// Branches at a degeneracy that share their derivative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivGroup {
    pub derivative: f64,
    pub level: f64,
    pub branches: Vec<usize>,
    /// Spread of the member derivatives.
    pub spread: f64,
    pub pairs: Vec<BranchPair>,
}

impl DerivGroup {
    pub fn all_identical(&self) -> bool {
        self.pairs.iter().all(|p| p.identical)
    }
}

/// An angle where the top eigenvalue of `H(θ)` is degenerate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyEvent {
    pub theta_star: f64,
    pub multiplicity: usize,
    pub level: f64,
    /// Gap between the top eigenvalue and the first eigenvalue outside the cluster.
    pub outer_gap: f64,
    pub deriv_groups: Vec<DerivGroup>,
    /// True when the degeneracy persists over the period (identical branches on top).
    pub persistent: bool,
}

struct Column {
    values: Vec<f64>,
    derivs: Vec<f64>,
    vectors: CMat,
    /// Positions inside one degenerate cluster whose derivatives also coincide.
    ambiguous: Vec<Vec<usize>>,
}

fn chain_groups(sorted: &[(usize, f64)], eps: f64) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut last = f64::NAN;
    for &(idx, v) in sorted {
        match groups.last_mut() {
            Some(g) if (last - v).abs() <= eps => g.push(idx),
            _ => groups.push(vec![idx]),
        }
        last = v;
    }
    groups
}

/// Eigen-decomposition at `theta` with degenerate clusters re-diagonalized
/// against the compressed `H′(θ)`, so that cluster vectors follow the analytic
/// branches.
fn resolve_column(geom: &RangeGeometry, theta: f64, eps_deriv: f64) -> Result<Column> {
    let h = geom.rotated(theta);
    let hp = geom.rotated_derivative(theta);
    let e = hermitian_eig(&h)?;
    let d = e.dim();
    let eps = geom.eps_gap();
    let mut values = Vec::with_capacity(d);
    let mut derivs = Vec::with_capacity(d);
    let mut cols: Vec<CVec> = Vec::with_capacity(d);
    let mut ambiguous = Vec::new();
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && e.values[end - 1] - e.values[end] <= eps {
            end += 1;
        }
        if end - start == 1 {
            let x = e.vector(start);
            values.push(e.values[start]);
            derivs.push(hp.expectation(&x));
            cols.push(x);
        } else {
            let v = e.columns(start, end - start);
            let ec = hermitian_eig(&hp.compress(&v))?;
            let w = &v * &ec.vectors;
            let mut items: Vec<(f64, f64, CVec)> = (0..end - start)
                .map(|i| {
                    let wi = w.column(i).into_owned();
                    (h.expectation(&wi), ec.values[i], wi)
                })
                .collect();
            items.sort_by(|a, b| b.0.total_cmp(&a.0));
            for (i, (_, mu, wi)) in items.into_iter().enumerate() {
                values.push(e.values[start + i]);
                derivs.push(mu);
                cols.push(wi);
            }
            let mut by_deriv: Vec<(usize, f64)> = (start..end).map(|p| (p, derivs[p])).collect();
            by_deriv.sort_by(|a, b| b.1.total_cmp(&a.1));
            ambiguous.extend(
                chain_groups(&by_deriv, eps_deriv)
                    .into_iter()
                    .filter(|g| g.len() >= 2),
            );
        }
        start = end;
    }
    Ok(Column {
        values,
        derivs,
        vectors: CMat::from_columns(&cols),
        ambiguous,
    })
}

/// Löwdin-orthonormalized projections of `sources` onto the span of `basis`.
fn project_orthonormalize(basis: &CMat, sources: &[CVec]) -> Result<Option<Vec<CVec>>> {
    let x = CMat::from_columns(sources);
    let y = basis * (basis.adjoint() * x);
    let s = HermitianMatrix::new(y.adjoint() * &y);
    let es = hermitian_eig(&s)?;
    if *es.values.last().unwrap_or(&0.0) < 1e-8 {
        return Ok(None);
    }
    let inv_sqrt = herm_map(&s, |v| 1.0 / v.sqrt())?;
    let q = y * inv_sqrt.as_matrix();
    Ok(Some((0..sources.len()).map(|i| q.column(i).into_owned()).collect()))
}

fn group_basis(col: &Column, group: &[usize]) -> CMat {
    let cols: Vec<CVec> = group.iter().map(|&p| col.vectors.column(p).into_owned()).collect();
    CMat::from_columns(&cols)
}

/// Replaces the arbitrary basis of every ambiguous group by the transported
/// vectors of the neighbouring column.
fn transport_ambiguous(
    col: &mut Column,
    neighbour: &[CVec],
    h: &HermitianMatrix,
    hp: &HermitianMatrix,
) -> Result<()> {
    for group in col.ambiguous.clone() {
        let basis = group_basis(col, &group);
        let mut ranked: Vec<(usize, f64)> = neighbour
            .iter()
            .enumerate()
            .map(|(k, x)| (k, (basis.adjoint() * x).norm_squared()))
            .collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        let sources: Vec<CVec> = ranked[..group.len()]
            .iter()
            .map(|&(k, _)| neighbour[k].clone())
            .collect();
        if let Some(ys) = project_orthonormalize(&basis, &sources)? {
            let mut items: Vec<(f64, CVec)> = ys.into_iter().map(|y| (h.expectation(&y), y)).collect();
            items.sort_by(|a, b| b.0.total_cmp(&a.0));
            let mut positions = group.clone();
            positions.sort();
            for (&p, (_, y)) in positions.iter().zip(items) {
                col.derivs[p] = hp.expectation(&y);
                col.vectors.set_column(p, &y);
            }
        }
    }
    Ok(())
}

fn overlaps(prev: &[CVec], next: &CMat) -> Vec<Vec<f64>> {
    prev.iter()
        .map(|x| {
            (0..next.ncols())
                .map(|l| next.column(l).dotc(x).norm_sqr())
                .collect()
        })
        .collect()
}

struct MatchContext {
    dt: f64,
    eps_gap: f64,
    theta: f64,
}

/// Assignment of branches at column `j` (given by value, derivative, vector in
/// branch order) to positions of the next column.
fn match_columns(
    prev_values: &[f64],
    prev_derivs: &[f64],
    prev_vectors: &[CVec],
    next: &Column,
    ctx: &MatchContext,
) -> Result<Vec<usize>> {
    let d = prev_vectors.len();
    let o = overlaps(prev_vectors, &next.vectors);
    let mut perm = max_score_assignment(&o);
    let err = |k: usize, l: usize| {
        (prev_values[k] + ctx.dt * prev_derivs[k] - next.values[l]).abs()
            + ctx.dt * (prev_derivs[k] - next.derivs[l]).abs()
    };
    for k1 in 0..d {
        for k2 in (k1 + 1)..d {
            let (l1, l2) = (perm[k1], perm[k2]);
            let current = o[k1][l1] + o[k2][l2];
            let swapped = o[k1][l2] + o[k2][l1];
            if (current - swapped).abs() >= OVERLAP_TIE {
                continue;
            }
            let e_cur = err(k1, l1) + err(k2, l2);
            let e_swp = err(k1, l2) + err(k2, l1);
            if e_swp < e_cur - 1e-15 {
                perm.swap(k1, k2);
            } else if (e_swp - e_cur).abs() <= 1e-15
                && (next.values[l1] - next.values[l2]).abs() > ctx.eps_gap
                && (prev_values[k1] - prev_values[k2]).abs() > ctx.eps_gap
            {
                return Err(Error::TrackingFailure { theta: ctx.theta });
            }
        }
    }
    Ok(perm)
}

fn branch_vectors(col: &Column, pos: &[usize]) -> Vec<CVec> {
    pos.iter().map(|&p| col.vectors.column(p).into_owned()).collect()
}

/// Tracks the `d` eigenvalue branches of `H(θ)` over `θ_j = 2πj/n_grid`.
///
/// Consecutive columns are matched by a maximum-overlap assignment on
/// `|⟨x_k(θ_j), x_l(θ_{j+1})⟩|²`; overlap ties are broken by first-order
/// prediction of value and derivative. Inside degenerate clusters the
/// eigenvectors are re-diagonalized against `H′(θ)`, and where even the
/// derivatives coincide they are transported from the neighbouring column.
pub fn track_branches(a: &MatrixC, n_grid: usize, tol: &Tolerances) -> Result<EigenBranchSet> {
    let d = a.dim();
    if n_grid < 64 * d {
        return Err(Error::InvalidArgument(format!(
            "branch tracking needs at least 64·d = {} grid points, got {n_grid}",
            64 * d
        )));
    }
    let geom = RangeGeometry::new(a, tol);
    let eps_deriv = tol.deriv(geom.norm());
    let grid: Vec<f64> = (0..n_grid).map(|j| TAU * j as f64 / n_grid as f64).collect();
    let mut cols: Vec<Column> = grid
        .par_iter()
        .map(|&t| resolve_column(&geom, t, eps_deriv))
        .collect::<Result<_>>()?;

    let dt = TAU / n_grid as f64;
    let mut pos: Vec<Vec<usize>> = Vec::with_capacity(n_grid);
    pos.push((0..d).collect());
    for j in 0..n_grid - 1 {
        let prev = branch_vectors(&cols[j], &pos[j]);
        let prev_values: Vec<f64> = pos[j].iter().map(|&p| cols[j].values[p]).collect();
        let prev_derivs: Vec<f64> = pos[j].iter().map(|&p| cols[j].derivs[p]).collect();
        let theta = grid[j + 1];
        if !cols[j + 1].ambiguous.is_empty() {
            transport_ambiguous(
                &mut cols[j + 1],
                &prev,
                &geom.rotated(theta),
                &geom.rotated_derivative(theta),
            )?;
        }
        let ctx = MatchContext {
            dt,
            eps_gap: geom.eps_gap(),
            theta,
        };
        let next = match_columns(&prev_values, &prev_derivs, &prev, &cols[j + 1], &ctx)?;
        pos.push(next);
    }

    // column 0 has no predecessor: align its ambiguous groups with column 1
    if n_grid > 1 && !cols[0].ambiguous.is_empty() {
        let next = branch_vectors(&cols[1], &pos[1]);
        let hp0 = geom.rotated_derivative(0.0);
        for group in cols[0].ambiguous.clone() {
            let basis = group_basis(&cols[0], &group);
            let sources: Vec<CVec> = group.iter().map(|&p| next[p].clone()).collect();
            if let Some(ys) = project_orthonormalize(&basis, &sources)? {
                for (&p, y) in group.iter().zip(ys) {
                    cols[0].derivs[p] = hp0.expectation(&y);
                    cols[0].vectors.set_column(p, &y);
                }
            }
        }
    }

    let last = branch_vectors(&cols[n_grid - 1], &pos[n_grid - 1]);
    let first = branch_vectors(&cols[0], &pos[0]);
    let wrap_permutation = max_score_assignment(&overlaps(&last, &CMat::from_columns(&first)));

    let values = (0..d)
        .map(|k| (0..n_grid).map(|j| cols[j].values[pos[j][k]]).collect())
        .collect();
    let derivs = (0..d)
        .map(|k| (0..n_grid).map(|j| cols[j].derivs[pos[j][k]]).collect())
        .collect();
    let vectors = (0..n_grid)
        .map(|j| CMat::from_columns(&branch_vectors(&cols[j], &pos[j])))
        .collect();
    Ok(EigenBranchSet {
        grid,
        values,
        derivs,
        vectors,
        wrap_permutation,
        norm: geom.norm(),
    })
}

/// `z_k(θ_j) = e^{iθ_j}(λ_k(θ_j) + iλ_k′(θ_j))` for every branch and grid angle,
/// ordered by angle, then branch.
pub fn kippenhahn_curve(branches: &EigenBranchSet) -> Vec<KippenhahnPoint> {
    let mut out = Vec::with_capacity(branches.dim() * branches.len());
    for (j, &theta) in branches.grid.iter().enumerate() {
        for k in 0..branches.dim() {
            out.push(KippenhahnPoint {
                theta,
                branch: k,
                z: ExpectedValue::from_line_coordinates(
                    theta,
                    branches.values[k][j],
                    branches.derivs[k][j],
                ),
            });
        }
    }
    out
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, i: usize) -> usize {
        let mut r = i;
        while self.0[r] != r {
            r = self.0[r];
        }
        self.0[i] = r;
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

struct DegeneracyScanner<'a> {
    geom: RangeGeometry,
    branches: &'a EigenBranchSet,
    eps_gap: f64,
    eps_deriv: f64,
    eps_id: f64,
}

impl DegeneracyScanner<'_> {
    fn pair(&self, a: usize, b: usize) -> BranchPair {
        let (first, second) = (a.min(b), a.max(b));
        let sup_distance = self.branches.sup_distance(first, second);
        BranchPair {
            first,
            second,
            sup_distance,
            identical: sup_distance <= self.eps_id,
        }
    }

    /// `λ_(0) − λ_(c)` of the sorted spectrum.
    fn effective_gap(&self, theta: f64, c: usize) -> Result<f64> {
        let e = hermitian_eig(&self.geom.rotated(theta))?;
        Ok(e.values.get(c).map_or(f64::INFINITY, |v| e.values[0] - v))
    }

    /// Derivative of the effective gap, from raw eigenvectors.
    fn effective_gap_slope(&self, theta: f64, c: usize) -> Result<f64> {
        let e = hermitian_eig(&self.geom.rotated(theta))?;
        let hp = self.geom.rotated_derivative(theta);
        Ok(hp.expectation(&e.vector(0)) - hp.expectation(&e.vector(c)))
    }

    /// Spread of the tightest window of `g` consecutive compressed derivatives
    /// on the top-`m` eigenspace.
    fn group_spread(&self, theta: f64, m: usize, g: usize) -> Result<f64> {
        let e = hermitian_eig(&self.geom.rotated(theta))?;
        let v = e.columns(0, m);
        let mu = hermitian_eig(&self.geom.rotated_derivative(theta).compress(&v))?.values;
        Ok(mu
            .windows(g)
            .map(|w| w[0] - w[g - 1])
            .fold(f64::INFINITY, f64::min))
    }

    fn build_event(&self, theta: f64, persistent: bool) -> Result<DegeneracyEvent> {
        let theta = wrap_angle(theta);
        let h = self.geom.rotated(theta);
        let e = hermitian_eig(&h)?;
        let top = e.values[0];
        let m = e.values.iter().take_while(|&&v| top - v <= self.eps_gap).count();
        let outer_gap = e.values.get(m).map_or(f64::INFINITY, |v| top - v);
        let v = e.columns(0, m);
        let ec = hermitian_eig(&self.geom.rotated_derivative(theta).compress(&v))?;
        let w = &v * &ec.vectors;
        let levels: Vec<f64> = (0..m)
            .map(|i| h.expectation(&w.column(i).into_owned()))
            .collect();

        // map cluster vectors to tracked branches at the nearest grid column
        let j = self.branches.nearest_index(theta);
        let d = self.branches.dim();
        let mut ranked: Vec<(usize, f64)> = (0..d)
            .map(|k| (k, (w.adjoint() * self.branches.vector(k, j)).norm_squared()))
            .collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        let members: Vec<usize> = ranked[..m].iter().map(|&(k, _)| k).collect();
        let score: Vec<Vec<f64>> = members
            .iter()
            .map(|&k| {
                let x = self.branches.vector(k, j);
                (0..m).map(|i| w.column(i).dotc(&x).norm_sqr()).collect()
            })
            .collect();
        let perm = max_score_assignment(&score);
        let mut owner = vec![0usize; m];
        for (r, &i) in perm.iter().enumerate() {
            owner[i] = members[r];
        }

        let sorted: Vec<(usize, f64)> = (0..m).map(|i| (i, ec.values[i])).collect();
        let deriv_groups = chain_groups(&sorted, self.eps_deriv)
            .into_iter()
            .map(|idx| {
                let mut branches: Vec<usize> = idx.iter().map(|&i| owner[i]).collect();
                branches.sort();
                let mut pairs = Vec::new();
                for a in 0..branches.len() {
                    for b in (a + 1)..branches.len() {
                        pairs.push(self.pair(branches[a], branches[b]));
                    }
                }
                let mus: Vec<f64> = idx.iter().map(|&i| ec.values[i]).collect();
                DerivGroup {
                    derivative: mus.iter().sum::<f64>() / mus.len() as f64,
                    level: idx.iter().map(|&i| levels[i]).sum::<f64>() / idx.len() as f64,
                    spread: mus[0] - mus[mus.len() - 1],
                    branches,
                    pairs,
                }
            })
            .collect();
        Ok(DegeneracyEvent {
            theta_star: theta,
            multiplicity: m,
            level: top,
            outer_gap,
            deriv_groups,
            persistent,
        })
    }

    /// Locates the crossing in `[lo, hi]` and sharpens tangential contacts.
    fn refine_crossing(&self, lo: f64, hi: f64, c: usize) -> Result<Option<DegeneracyEvent>> {
        let s_lo = self.effective_gap_slope(lo, c)?;
        let s_hi = self.effective_gap_slope(hi, c)?;
        let theta0 = if s_lo <= 0.0 && s_hi > 0.0 {
            bisect_sign(|t| self.effective_gap_slope(t, c), lo, hi, 1e-15)?
        } else {
            golden_min(|t| self.effective_gap(t, c), lo, hi, 1e-13)?.0
        };
        if self.effective_gap(theta0, c)? > self.eps_gap {
            return Ok(None);
        }
        let event = self.build_event(theta0, false)?;
        if event.multiplicity <= c {
            return Ok(None);
        }
        let target = event
            .deriv_groups
            .iter()
            .find(|g| g.branches.len() >= 2 && !g.all_identical());
        let Some(group) = target else {
            return Ok(Some(event));
        };
        // equal value and equal derivative: the gap is flat, so minimize the
        // derivative spread of the group instead
        let (m, g) = (event.multiplicity, group.branches.len());
        let w = (0.5 * self.branches.step()).min(1e-5);
        let (theta1, _) = golden_min(|t| self.group_spread(t, m, g), theta0 - w, theta0 + w, 1e-15)?;
        let refined = self.build_event(theta1, false)?;
        let keeps_group = refined
            .deriv_groups
            .iter()
            .any(|rg| rg.branches.len() >= g && !rg.all_identical());
        Ok(Some(if keeps_group && refined.multiplicity >= m {
            refined
        } else {
            event
        }))
    }
}

/// All angles in `[0, 2π)` where the top eigenvalue of `H(θ)` is degenerate.
///
/// The gap between the top branch and the highest branch not identical to it
/// is scanned on the grid; its local minima are refined to the crossing angle
/// and kept when the refined gap is within `ε_gap`. Classes of identical
/// branches that reach the top yield one persistent event each.
pub fn find_top_degeneracies(
    a: &MatrixC,
    branches: &EigenBranchSet,
    tol: &Tolerances,
) -> Result<Vec<DegeneracyEvent>> {
    let d = branches.dim();
    let n = branches.len();
    if d < 2 || n < 3 {
        return Ok(Vec::new());
    }
    let geom = RangeGeometry::new(a, tol);
    let norm = geom.norm();
    let scanner = DegeneracyScanner {
        eps_gap: geom.eps_gap(),
        eps_deriv: tol.deriv(norm),
        eps_id: tol.identity(norm),
        geom,
        branches,
    };

    let mut uf = UnionFind((0..d).collect());
    for k in 0..d {
        for l in (k + 1)..d {
            if branches.sup_distance(k, l) <= scanner.eps_id {
                uf.union(k, l);
            }
        }
    }
    let class: Vec<usize> = (0..d).map(|k| uf.find(k)).collect();
    let class_size = |r: usize| class.iter().filter(|&&c| c == r).count();

    let mut top_class = vec![0usize; n];
    let mut gap = vec![f64::INFINITY; n];
    for j in 0..n {
        let t = (0..d)
            .max_by(|&x, &y| branches.values[x][j].total_cmp(&branches.values[y][j]).then(y.cmp(&x)))
            .unwrap_or(0);
        top_class[j] = class[t];
        let top = branches.values[t][j];
        gap[j] = (0..d)
            .filter(|&l| class[l] != class[t])
            .map(|l| top - branches.values[l][j])
            .fold(f64::INFINITY, f64::min);
    }

    let mut events: Vec<DegeneracyEvent> = Vec::new();

    let mut persistent_classes: Vec<usize> = top_class.clone();
    persistent_classes.sort();
    persistent_classes.dedup();
    for r in persistent_classes.into_iter().filter(|&r| class_size(r) >= 2) {
        let j = (0..n)
            .filter(|&j| top_class[j] == r)
            .max_by(|&x, &y| gap[x].total_cmp(&gap[y]).then(y.cmp(&x)))
            .expect("class reaches the top somewhere");
        events.push(scanner.build_event(branches.grid[j], true)?);
    }

    let dt = branches.step();
    let threshold = scanner.eps_gap + 2.0 * norm * dt;
    for j in 0..n {
        let (prev, next) = ((j + n - 1) % n, (j + 1) % n);
        if !(gap[j] <= threshold && gap[j] <= gap[prev] && gap[j] <= gap[next]) {
            continue;
        }
        let c = class_size(top_class[j]);
        let theta = branches.grid[j];
        if let Some(ev) = scanner.refine_crossing(theta - dt, theta + dt, c)? {
            let duplicate = events
                .iter()
                .any(|e| !e.persistent && angle_distance(e.theta_star, ev.theta_star) <= 1e-9);
            if !duplicate {
                events.push(ev);
            }
        }
    }
    events.sort_by(|a, b| a.theta_star.total_cmp(&b.theta_star));
    Ok(events)
}

/// Candidate point `e^{iθ*}(level + i·derivative)` of a derivative group.
pub fn group_point(event: &DegeneracyEvent, group: &DerivGroup) -> ExpectedValue {
    ExpectedValue::from_line_coordinates(event.theta_star, group.level, group.derivative)
}
