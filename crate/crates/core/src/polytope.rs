//! H-representation polytope algebra.
//!
//! Every set in this crate (state/input/disturbance constraints, invariant
//! sets, stacked and projected feasible sets) is an [`HPolytope`]
//! `{x : H x <= h}`. Representations are never required to be minimal;
//! [`HPolytope::remove_redundancies`] prunes on demand.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lp::{solve, LpProblem, LpSolution};

/// Relative tolerance for membership, inclusion and redundancy tests.
/// Looser than the LP layer's 1e-9 to absorb Fourier–Motzkin arithmetic.
pub const SET_TOL: f64 = 1e-7;

/// Coefficients below this count as zero when classifying rows.
const ZERO_COEFF: f64 = 1e-11;

/// Chebyshev radii below this mean "no usable interior point".
const INTERIOR_EPS: f64 = 1e-9;

/// Support function value of a polytope in a given direction.
#[derive(Debug, Clone, PartialEq)]
pub enum Support {
    Bounded { value: f64, argmax: DVector<f64> },
    Unbounded,
}

impl Support {
    pub fn value(&self) -> Option<f64> {
        match self {
            Support::Bounded { value, .. } => Some(*value),
            Support::Unbounded => None,
        }
    }
}

/// A convex polyhedron `{x : H x <= h}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HPolytope {
    coeffs: DMatrix<f64>,
    rhs: DVector<f64>,
}

impl HPolytope {
    pub fn new(coeffs: DMatrix<f64>, rhs: DVector<f64>) -> Result<Self> {
        if coeffs.nrows() != rhs.len() {
            return Err(Error::DimensionMismatch(format!(
                "H has {} rows but h has {} entries",
                coeffs.nrows(),
                rhs.len()
            )));
        }
        if coeffs.ncols() == 0 {
            return Err(Error::DimensionMismatch("polytope dimension must be positive".into()));
        }
        if !coeffs.iter().all(|v| v.is_finite()) || !rhs.iter().all(|v| v.is_finite()) {
            return Err(Error::NumericalFailure("polytope data contains non-finite entries".into()));
        }
        Ok(Self { coeffs, rhs })
    }

    /// Axis-aligned box `lo <= x <= hi`.
    pub fn box_set(lo: &[f64], hi: &[f64]) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::DimensionMismatch("box bounds must have equal, positive length".into()));
        }
        let d = lo.len();
        let mut coeffs = DMatrix::zeros(2 * d, d);
        let mut rhs = DVector::zeros(2 * d);
        for i in 0..d {
            coeffs[(2 * i, i)] = 1.0;
            rhs[2 * i] = hi[i];
            coeffs[(2 * i + 1, i)] = -1.0;
            rhs[2 * i + 1] = -lo[i];
        }
        Self::new(coeffs, rhs)
    }

    /// Canonical empty set of the given dimension (`0·x <= -1`).
    pub fn empty(dim: usize) -> Self {
        Self {
            coeffs: DMatrix::zeros(1, dim),
            rhs: DVector::from_element(1, -1.0),
        }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.ncols()
    }

    pub fn num_rows(&self) -> usize {
        self.coeffs.nrows()
    }

    pub fn coeffs(&self) -> &DMatrix<f64> {
        &self.coeffs
    }

    pub fn rhs(&self) -> &DVector<f64> {
        &self.rhs
    }

    fn rhs_scale(&self) -> f64 {
        1.0 + self.rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Membership up to `SET_TOL * (1 + ‖h‖∞)` per component.
    pub fn contains(&self, x: &DVector<f64>) -> Result<bool> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "point has dimension {} but polytope has dimension {}",
                x.len(),
                self.dim()
            )));
        }
        let tol = SET_TOL * self.rhs_scale();
        let prod = &self.coeffs * x;
        Ok(prod.iter().zip(self.rhs.iter()).all(|(lhs, h)| *lhs <= h + tol))
    }

    /// Phase-1 feasibility of `H x <= h`.
    pub fn is_empty(&self) -> Result<bool> {
        if self.num_rows() == 0 {
            return Ok(false);
        }
        let problem = LpProblem::new(DVector::zeros(self.dim()), self.coeffs.clone(), self.rhs.clone())?;
        match solve(&problem)? {
            LpSolution::Infeasible => Ok(true),
            _ => Ok(false),
        }
    }

    /// Row-concatenation representation of `self ∩ other`.
    pub fn intersect(&self, other: &HPolytope) -> Result<HPolytope> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "cannot intersect dimension {} with dimension {}",
                self.dim(),
                other.dim()
            )));
        }
        let m = self.num_rows() + other.num_rows();
        let mut coeffs = DMatrix::zeros(m, self.dim());
        let mut rhs = DVector::zeros(m);
        coeffs.rows_mut(0, self.num_rows()).copy_from(&self.coeffs);
        coeffs.rows_mut(self.num_rows(), other.num_rows()).copy_from(&other.coeffs);
        rhs.rows_mut(0, self.num_rows()).copy_from(&self.rhs);
        rhs.rows_mut(self.num_rows(), other.num_rows()).copy_from(&other.rhs);
        HPolytope::new(coeffs, rhs)
    }

    /// `max { c·x : x ∈ self }`.
    pub fn support(&self, c: &DVector<f64>) -> Result<Support> {
        if c.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "direction has dimension {} but polytope has dimension {}",
                c.len(),
                self.dim()
            )));
        }
        let problem = LpProblem::new(c.clone(), self.coeffs.clone(), self.rhs.clone())?;
        match solve(&problem)? {
            LpSolution::Optimal { value, point } => Ok(Support::Bounded { value, argmax: point }),
            LpSolution::Unbounded => Ok(Support::Unbounded),
            LpSolution::Infeasible => Err(Error::EmptySet("support of an empty set")),
        }
    }

    /// Largest ball center `(x, r)` with `H x + ‖H_i‖ r <= h`; `r` capped at 1e6
    /// so unbounded polyhedra still yield an interior point.
    pub fn chebyshev_center(&self) -> Result<(DVector<f64>, f64)> {
        let d = self.dim();
        let m = self.num_rows();
        let mut coeffs = DMatrix::zeros(m + 2, d + 1);
        let mut rhs = DVector::zeros(m + 2);
        for i in 0..m {
            let norm = self.coeffs.row(i).norm();
            for j in 0..d {
                coeffs[(i, j)] = self.coeffs[(i, j)];
            }
            coeffs[(i, d)] = norm;
            rhs[i] = self.rhs[i];
        }
        coeffs[(m, d)] = -1.0;
        rhs[m] = 0.0;
        coeffs[(m + 1, d)] = 1.0;
        rhs[m + 1] = 1e6;
        let mut objective = DVector::zeros(d + 1);
        objective[d] = 1.0;
        let problem = LpProblem::new(objective, coeffs, rhs)?;
        match solve(&problem)? {
            LpSolution::Optimal { value, point } => {
                let center = DVector::from_iterator(d, point.iter().take(d).copied());
                Ok((center, value))
            }
            LpSolution::Infeasible => Err(Error::EmptySet("Chebyshev center of an empty set")),
            LpSolution::Unbounded => Err(Error::NumericalFailure("capped Chebyshev LP reported unbounded".into())),
        }
    }

    /// Orthogonal projection onto the (0-based, strictly increasing) kept
    /// coordinates, by Fourier–Motzkin elimination of the others with
    /// redundancy removal after each elimination.
    pub fn project(&self, keep: &[usize]) -> Result<HPolytope> {
        if keep.is_empty() {
            return Err(Error::DimensionMismatch("projection needs at least one kept coordinate".into()));
        }
        if !keep.windows(2).all(|w| w[0] < w[1]) || keep[keep.len() - 1] >= self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "kept coordinates {:?} are not a strictly increasing subset of 0..{}",
                keep,
                self.dim()
            )));
        }
        if keep.len() == self.dim() {
            return Ok(self.clone());
        }
        if self.is_empty()? {
            return Ok(HPolytope::empty(keep.len()));
        }
        // Emptiness is invariant under elimination, so it is checked once up
        // front; the interior point survives projection (open maps stay open),
        // which lets Clarkson pruning run on the raw elimination output
        // without ever solving an LP over the full row set.
        let interior = match self.chebyshev_center()? {
            (center, radius) if radius > INTERIOR_EPS => Some(center),
            _ => None,
        };
        let mut coeffs = self.coeffs.clone();
        let mut rhs = self.rhs.clone();
        let mut z = interior;
        let dropped: Vec<usize> = (0..self.dim()).rev().filter(|c| !keep.contains(c)).collect();
        for col in dropped {
            let (c2, r2) = fm_eliminate(&coeffs, &rhs, col);
            let (c2, r2) = dedupe_rows(c2, r2);
            z = z.map(|v| v.remove_row(col));
            let keep_idx = remove_redundant_rows(&c2, &r2, z.as_ref())?;
            coeffs = select_rows(&c2, &keep_idx);
            rhs = DVector::from_iterator(keep_idx.len(), keep_idx.iter().map(|&i| r2[i]));
        }
        if coeffs.nrows() == 0 {
            // Projection is the whole space; keep a trivially satisfied row so
            // the representation stays nonempty.
            coeffs = DMatrix::zeros(1, keep.len());
            rhs = DVector::from_element(1, 1.0);
        }
        HPolytope::new(coeffs, rhs)
    }

    /// Remove rows whose deletion does not change the set. Surviving rows keep
    /// their original order and values.
    pub fn remove_redundancies(&self) -> Result<HPolytope> {
        if self.is_empty()? {
            return Err(Error::EmptySet("redundancy removal on an empty set"));
        }
        if self.num_rows() <= 1 {
            return Ok(self.clone());
        }
        let interior = match self.chebyshev_center()? {
            (center, radius) if radius > INTERIOR_EPS => Some(center),
            _ => None,
        };
        let keep_idx = remove_redundant_rows(&self.coeffs, &self.rhs, interior.as_ref())?;
        Ok(HPolytope {
            coeffs: select_rows(&self.coeffs, &keep_idx),
            rhs: DVector::from_iterator(keep_idx.len(), keep_idx.iter().map(|&i| self.rhs[i])),
        })
    }

    /// Pontryagin difference `self ⊖ other = {x : x + s ∈ self ∀ s ∈ other}`:
    /// each row rhs shrinks by the support of `other` in the row direction.
    pub fn pontryagin_diff(&self, other: &HPolytope) -> Result<HPolytope> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "erosion of dimension {} by dimension {}",
                self.dim(),
                other.dim()
            )));
        }
        if self.is_empty()? {
            return Err(Error::EmptySet("erosion of an empty set"));
        }
        let mut rhs = self.rhs.clone();
        for i in 0..self.num_rows() {
            let dir = self.coeffs.row(i).transpose();
            match other.support(&dir)? {
                Support::Bounded { value, .. } => rhs[i] -= value,
                Support::Unbounded => return Ok(HPolytope::empty(self.dim())),
            }
        }
        HPolytope::new(self.coeffs.clone(), rhs)
    }

    /// Representation-independent set equality; empty sets compare equal only
    /// to empty sets.
    pub fn equals(&self, other: &HPolytope) -> Result<bool> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "cannot compare dimension {} with dimension {}",
                self.dim(),
                other.dim()
            )));
        }
        let e1 = self.is_empty()?;
        let e2 = other.is_empty()?;
        if e1 || e2 {
            return Ok(e1 && e2);
        }
        Ok(subset_of_nonempty(self, other)? && subset_of_nonempty(other, self)?)
    }

    /// `self ⊆ other` via support of `self` in each of `other`'s row directions.
    pub fn is_subset(&self, other: &HPolytope) -> Result<bool> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "cannot compare dimension {} with dimension {}",
                self.dim(),
                other.dim()
            )));
        }
        if self.is_empty()? {
            return Ok(true);
        }
        if other.is_empty()? {
            return Ok(false);
        }
        subset_of_nonempty(self, other)
    }

    /// Brute-force vertex enumeration for dimension <= 3: solve every d-row
    /// square subsystem and keep feasible, distinct solutions. Intended for
    /// small bounded sets (disturbance polytopes); not a general double
    /// description.
    pub fn vertices_low_dim(&self) -> Result<Vec<DVector<f64>>> {
        let d = self.dim();
        if d > 3 {
            return Err(Error::DimensionMismatch(format!(
                "vertex enumeration supports dimension <= 3, got {d}"
            )));
        }
        let m = self.num_rows();
        let mut combos: Vec<Vec<usize>> = Vec::new();
        match d {
            1 => {
                for i in 0..m {
                    combos.push(vec![i]);
                }
            }
            2 => {
                for i in 0..m {
                    for j in (i + 1)..m {
                        combos.push(vec![i, j]);
                    }
                }
            }
            _ => {
                for i in 0..m {
                    for j in (i + 1)..m {
                        for k in (j + 1)..m {
                            combos.push(vec![i, j, k]);
                        }
                    }
                }
            }
        }
        let mut vertices: Vec<DVector<f64>> = Vec::new();
        for combo in combos {
            let mut a = DMatrix::zeros(d, d);
            let mut b = DVector::zeros(d);
            for (r, &idx) in combo.iter().enumerate() {
                for c in 0..d {
                    a[(r, c)] = self.coeffs[(idx, c)];
                }
                b[r] = self.rhs[idx];
            }
            let lu = a.clone().full_piv_lu();
            let Some(x) = lu.solve(&b) else { continue };
            let residual = (&a * &x - &b).amax();
            if residual > 1e-8 * self.rhs_scale() {
                continue;
            }
            if !self.contains(&x)? {
                continue;
            }
            let dup = vertices
                .iter()
                .any(|v| (v - &x).amax() <= 1e-6 * (1.0 + x.amax()));
            if !dup {
                vertices.push(x);
            }
        }
        vertices.sort_by(|a, b| {
            a.iter()
                .zip(b.iter())
                .find_map(|(x, y)| x.partial_cmp(y).filter(|o| o.is_ne()))
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        Ok(vertices)
    }
}

fn subset_of_nonempty(inner: &HPolytope, outer: &HPolytope) -> Result<bool> {
    for i in 0..outer.num_rows() {
        let dir = outer.coeffs.row(i).transpose();
        let bound = outer.rhs[i];
        match inner.support(&dir)? {
            Support::Bounded { value, .. } => {
                if value > bound + SET_TOL * (1.0 + bound.abs()) {
                    return Ok(false);
                }
            }
            Support::Unbounded => return Ok(false),
        }
    }
    Ok(true)
}

fn select_rows(coeffs: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(idx.len(), coeffs.ncols());
    for (r, &i) in idx.iter().enumerate() {
        out.row_mut(r).copy_from(&coeffs.row(i));
    }
    out
}

/// One Fourier–Motzkin step: eliminate `col`, combining each positive row with
/// each negative row using positive multipliers that cancel the column.
fn fm_eliminate(coeffs: &DMatrix<f64>, rhs: &DVector<f64>, col: usize) -> (DMatrix<f64>, DVector<f64>) {
    let d = coeffs.ncols();
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    let mut zero = Vec::new();
    for i in 0..coeffs.nrows() {
        let a = coeffs[(i, col)];
        if a > ZERO_COEFF {
            pos.push(i);
        } else if a < -ZERO_COEFF {
            neg.push(i);
        } else {
            zero.push(i);
        }
    }
    let keep_cols: Vec<usize> = (0..d).filter(|&c| c != col).collect();
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(zero.len() + pos.len() * neg.len());
    let mut out_rhs: Vec<f64> = Vec::new();
    let mut push = |row: Vec<f64>, b: f64| {
        let trivial = row.iter().all(|v| v.abs() <= ZERO_COEFF) && b >= -1e-9;
        if !trivial {
            rows.push(row);
            out_rhs.push(b);
        }
    };
    for &i in &zero {
        let row: Vec<f64> = keep_cols.iter().map(|&c| coeffs[(i, c)]).collect();
        push(row, rhs[i]);
    }
    for &p in &pos {
        let lp = 1.0 / coeffs[(p, col)];
        for &n in &neg {
            let ln = 1.0 / (-coeffs[(n, col)]);
            let row: Vec<f64> = keep_cols
                .iter()
                .map(|&c| lp * coeffs[(p, c)] + ln * coeffs[(n, c)])
                .collect();
            push(row, lp * rhs[p] + ln * rhs[n]);
        }
    }
    let m = rows.len();
    let mut out = DMatrix::zeros(m, d - 1);
    for (r, row) in rows.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            out[(r, c)] = *v;
        }
    }
    (out, DVector::from_vec(out_rhs))
}

/// Drop rows that are exact duplicates (after max-abs normalization) of a row
/// with an equal or smaller rhs. Cheap pre-filter for elimination output.
fn dedupe_rows(coeffs: DMatrix<f64>, rhs: DVector<f64>) -> (DMatrix<f64>, DVector<f64>) {
    let m = coeffs.nrows();
    if m <= 1 {
        return (coeffs, rhs);
    }
    let d = coeffs.ncols();
    let mut normalized: Vec<(Vec<f64>, f64, usize)> = Vec::with_capacity(m);
    for i in 0..m {
        let scale = (0..d).fold(0.0f64, |acc, c| acc.max(coeffs[(i, c)].abs()));
        let inv = if scale > 0.0 { 1.0 / scale } else { 1.0 };
        let key: Vec<f64> = (0..d).map(|c| coeffs[(i, c)] * inv).collect();
        normalized.push((key, rhs[i] * inv, i));
    }
    normalized.sort_by(|a, b| {
        a.0.iter()
            .zip(b.0.iter())
            .find_map(|(x, y)| x.partial_cmp(y).filter(|o| o.is_ne()))
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
    });
    let mut keep: Vec<usize> = Vec::with_capacity(m);
    let mut prev: Option<&[f64]> = None;
    for (key, _, idx) in &normalized {
        if prev.is_some_and(|p| p == key.as_slice()) {
            continue;
        }
        keep.push(*idx);
        prev = Some(key.as_slice());
    }
    keep.sort_unstable();
    let out = select_rows(&coeffs, &keep);
    let out_rhs = DVector::from_iterator(keep.len(), keep.iter().map(|&i| rhs[i]));
    (out, out_rhs)
}

/// Indices of irredundant rows (ascending). With an interior point this runs
/// Clarkson's output-sensitive scheme: each candidate is tested against the
/// rows already known essential, and a ray shot from the interior point
/// toward any LP witness identifies a new essential row. Without an interior
/// point it falls back to one LP per row over all other surviving rows.
fn remove_redundant_rows(
    coeffs: &DMatrix<f64>,
    rhs: &DVector<f64>,
    interior: Option<&DVector<f64>>,
) -> Result<Vec<usize>> {
    let m = coeffs.nrows();
    if m <= 1 {
        return Ok((0..m).collect());
    }
    match interior {
        Some(z) => clarkson_remove(coeffs, rhs, z),
        None => sequential_remove(coeffs, rhs),
    }
}

fn redundancy_bound(h: f64) -> f64 {
    h + SET_TOL * (1.0 + h.abs())
}

fn clarkson_remove(coeffs: &DMatrix<f64>, rhs: &DVector<f64>, z: &DVector<f64>) -> Result<Vec<usize>> {
    let m = coeffs.nrows();
    let d = coeffs.ncols();
    let mut essential: Vec<usize> = Vec::new();
    let mut dropped = vec![false; m];
    for i in 0..m {
        if essential.contains(&i) {
            continue;
        }
        let mut guard = 0usize;
        loop {
            guard += 1;
            if guard > m + 2 {
                return Err(Error::NumericalFailure("redundancy pruning failed to converge".into()));
            }
            let rows = essential.len() + 1;
            let mut sub = DMatrix::zeros(rows, d);
            let mut sub_rhs = DVector::zeros(rows);
            for (r, &e) in essential.iter().enumerate() {
                sub.row_mut(r).copy_from(&coeffs.row(e));
                sub_rhs[r] = rhs[e];
            }
            sub.row_mut(rows - 1).copy_from(&coeffs.row(i));
            sub_rhs[rows - 1] = rhs[i] + 1.0;
            let objective = coeffs.row(i).transpose();
            let problem = LpProblem::new(objective, sub, sub_rhs)?;
            let witness = match solve(&problem)? {
                LpSolution::Optimal { value, point } => {
                    if value <= redundancy_bound(rhs[i]) {
                        dropped[i] = true;
                        break;
                    }
                    point
                }
                LpSolution::Unbounded => {
                    return Err(Error::NumericalFailure("capped redundancy LP reported unbounded".into()))
                }
                LpSolution::Infeasible => {
                    return Err(Error::NumericalFailure(
                        "essential subsystem of a nonempty polytope reported infeasible".into(),
                    ))
                }
            };
            // First constraint crossed from z toward the witness is essential.
            let dir = &witness - z;
            let mut hit: Option<(f64, usize)> = None;
            for j in 0..m {
                if dropped[j] || essential.contains(&j) {
                    continue;
                }
                let denom = coeffs.row(j).transpose().dot(&dir);
                if denom <= ZERO_COEFF {
                    continue;
                }
                let t = (rhs[j] - coeffs.row(j).transpose().dot(z)) / denom;
                let replace = match hit {
                    None => true,
                    Some((bt, bj)) => {
                        let tie = (t - bt).abs() <= 1e-12 * (1.0 + bt.abs());
                        (t < bt && !tie) || (tie && j > bj)
                    }
                };
                if replace {
                    hit = Some((t, j));
                }
            }
            let Some((_, winner)) = hit else {
                // No candidate blocks the ray; the row itself must be the facet.
                essential.push(i);
                break;
            };
            essential.push(winner);
            if winner == i {
                break;
            }
        }
    }
    essential.sort_unstable();
    Ok(essential)
}

fn sequential_remove(coeffs: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<Vec<usize>> {
    let m = coeffs.nrows();
    let d = coeffs.ncols();
    let mut kept = vec![true; m];
    for i in 0..m {
        let others: Vec<usize> = (0..m).filter(|&j| j != i && kept[j]).collect();
        let rows = others.len() + 1;
        let mut sub = DMatrix::zeros(rows, d);
        let mut sub_rhs = DVector::zeros(rows);
        for (r, &j) in others.iter().enumerate() {
            sub.row_mut(r).copy_from(&coeffs.row(j));
            sub_rhs[r] = rhs[j];
        }
        sub.row_mut(rows - 1).copy_from(&coeffs.row(i));
        sub_rhs[rows - 1] = rhs[i] + 1.0;
        let problem = LpProblem::new(coeffs.row(i).transpose(), sub, sub_rhs)?;
        match solve(&problem)? {
            LpSolution::Optimal { value, .. } => {
                if value <= redundancy_bound(rhs[i]) {
                    kept[i] = false;
                }
            }
            LpSolution::Unbounded => {
                return Err(Error::NumericalFailure("capped redundancy LP reported unbounded".into()))
            }
            LpSolution::Infeasible => {
                return Err(Error::NumericalFailure(
                    "redundancy LP on a nonempty polytope reported infeasible".into(),
                ))
            }
        }
    }
    Ok((0..m).filter(|&i| kept[i]).collect())
}

#[derive(Serialize, Deserialize)]
struct HPolytopeJson {
    #[serde(rename = "H")]
    coeffs: Vec<Vec<f64>>,
    h: Vec<f64>,
}

impl Serialize for HPolytope {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let coeffs = (0..self.num_rows())
            .map(|i| self.coeffs.row(i).iter().copied().collect())
            .collect();
        HPolytopeJson {
            coeffs,
            h: self.rhs.iter().copied().collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for HPolytope {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let raw = HPolytopeJson::deserialize(deserializer)?;
        if raw.coeffs.is_empty() {
            return Err(DeError::custom("cannot infer polytope dimension from an empty H"));
        }
        let d = raw.coeffs[0].len();
        if raw.coeffs.iter().any(|r| r.len() != d) {
            return Err(DeError::custom("rows of H have inconsistent lengths"));
        }
        let m = raw.coeffs.len();
        let flat: Vec<f64> = raw.coeffs.iter().flatten().copied().collect();
        let coeffs = DMatrix::from_row_slice(m, d, &flat);
        let rhs = DVector::from_vec(raw.h);
        HPolytope::new(coeffs, rhs).map_err(DeError::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval(lo: f64, hi: f64) -> HPolytope {
        HPolytope::box_set(&[lo], &[hi]).unwrap()
    }

    fn unit_box(d: usize) -> HPolytope {
        HPolytope::box_set(&vec![-1.0; d], &vec![1.0; d]).unwrap()
    }

    fn vec1(x: f64) -> DVector<f64> {
        DVector::from_column_slice(&[x])
    }

    #[test]
    fn contains_box_center_vertex_outside() {
        let p = unit_box(2);
        assert!(p.contains(&DVector::from_column_slice(&[0.0, 0.0])).unwrap());
        assert!(p.contains(&DVector::from_column_slice(&[1.0, 1.0])).unwrap());
        assert!(!p.contains(&DVector::from_column_slice(&[1.001, 0.0])).unwrap());
    }

    #[test]
    fn contains_dimension_mismatch() {
        let p = unit_box(2);
        assert!(matches!(p.contains(&vec1(0.0)), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn emptiness_cases() {
        assert!(!interval(-1.0, 1.0).is_empty().unwrap());
        // x <= -1 and x >= 1
        let p = HPolytope::new(
            DMatrix::from_row_slice(2, 1, &[1.0, -1.0]),
            DVector::from_column_slice(&[-1.0, -1.0]),
        )
        .unwrap();
        assert!(p.is_empty().unwrap());
        // singleton {0}
        assert!(!interval(0.0, 0.0).is_empty().unwrap());
        // zero row with negative rhs must be flagged
        assert!(HPolytope::empty(3).is_empty().unwrap());
    }

    #[test]
    fn intersect_intervals() {
        let p = interval(-1.0, 1.0).intersect(&interval(0.0, 2.0)).unwrap();
        assert!(p.equals(&interval(0.0, 1.0)).unwrap());
    }

    #[test]
    fn intersect_idempotent() {
        let p = unit_box(2);
        assert!(p.intersect(&p).unwrap().equals(&p).unwrap());
    }

    #[test]
    fn intersect_with_halfplane() {
        let half = HPolytope::new(
            DMatrix::from_row_slice(1, 2, &[1.0, 0.0]),
            DVector::from_column_slice(&[0.0]),
        )
        .unwrap();
        let expected = HPolytope::box_set(&[-1.0, -1.0], &[0.0, 1.0]).unwrap();
        assert!(unit_box(2).intersect(&half).unwrap().equals(&expected).unwrap());
    }

    #[test]
    fn support_box_corner() {
        let p = unit_box(2);
        let s = p.support(&DVector::from_column_slice(&[1.0, 1.0])).unwrap();
        assert!((s.value().unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn support_disturbance_interval() {
        let w = interval(0.0, 10.0);
        assert!((w.support(&vec1(1.0)).unwrap().value().unwrap() - 10.0).abs() < 1e-9);
        assert!(w.support(&vec1(-1.0)).unwrap().value().unwrap().abs() < 1e-9);
    }

    #[test]
    fn support_unbounded_and_empty() {
        let half = HPolytope::new(
            DMatrix::from_row_slice(1, 1, &[-1.0]),
            DVector::from_column_slice(&[0.0]),
        )
        .unwrap();
        assert_eq!(half.support(&vec1(1.0)).unwrap(), Support::Unbounded);
        assert!(matches!(
            HPolytope::empty(1).support(&vec1(1.0)),
            Err(Error::EmptySet(_))
        ));
    }

    #[test]
    fn project_square_to_interval() {
        let p = unit_box(2).project(&[0]).unwrap();
        assert!(p.equals(&interval(-1.0, 1.0)).unwrap());
    }

    #[test]
    fn project_identity() {
        let p = unit_box(3);
        let q = p.project(&[0, 1, 2]).unwrap();
        assert!(q.equals(&p).unwrap());
    }

    #[test]
    fn project_simplex_to_triangle() {
        // {x,y,z >= 0, x+y+z <= 1} onto (x,y) is {x,y >= 0, x+y <= 1}
        let simplex = HPolytope::new(
            DMatrix::from_row_slice(4, 3, &[-1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, -1.0, 1.0, 1.0, 1.0]),
            DVector::from_column_slice(&[0.0, 0.0, 0.0, 1.0]),
        )
        .unwrap();
        let triangle = HPolytope::new(
            DMatrix::from_row_slice(3, 2, &[-1.0, 0.0, 0.0, -1.0, 1.0, 1.0]),
            DVector::from_column_slice(&[0.0, 0.0, 1.0]),
        )
        .unwrap();
        assert!(simplex.project(&[0, 1]).unwrap().equals(&triangle).unwrap());
    }

    #[test]
    fn project_empty_input() {
        let p = HPolytope::new(
            DMatrix::from_row_slice(2, 2, &[1.0, 0.0, -1.0, 0.0]),
            DVector::from_column_slice(&[-1.0, -1.0]),
        )
        .unwrap();
        let q = p.project(&[1]).unwrap();
        assert!(q.is_empty().unwrap());
        assert_eq!(q.dim(), 1);
    }

    #[test]
    fn project_rejects_bad_keep() {
        let p = unit_box(2);
        assert!(p.project(&[]).is_err());
        assert!(p.project(&[1, 0]).is_err());
        assert!(p.project(&[0, 2]).is_err());
    }

    #[test]
    fn redundancy_dominated_bound() {
        let p = HPolytope::new(
            DMatrix::from_row_slice(3, 1, &[1.0, 1.0, -1.0]),
            DVector::from_column_slice(&[1.0, 2.0, 0.0]),
        )
        .unwrap();
        let r = p.remove_redundancies().unwrap();
        assert_eq!(r.num_rows(), 2);
        assert_eq!(r.rhs()[0], 1.0);
        assert_eq!(r.rhs()[1], 0.0);
        assert!(r.equals(&p).unwrap());
    }

    #[test]
    fn redundancy_minimal_box_unchanged() {
        let p = unit_box(2);
        let r = p.remove_redundancies().unwrap();
        assert_eq!(r.num_rows(), 4);
        assert_eq!(r.coeffs(), p.coeffs());
    }

    #[test]
    fn redundancy_exact_duplicates() {
        let p = HPolytope::new(
            DMatrix::from_row_slice(3, 1, &[1.0, 1.0, -1.0]),
            DVector::from_column_slice(&[1.0, 1.0, 1.0]),
        )
        .unwrap();
        let r = p.remove_redundancies().unwrap();
        assert_eq!(r.num_rows(), 2);
        assert!(r.equals(&p).unwrap());
    }

    #[test]
    fn redundancy_rejects_empty() {
        assert!(matches!(
            HPolytope::empty(1).remove_redundancies(),
            Err(Error::EmptySet(_))
        ));
    }

    #[test]
    fn erosion_by_origin_is_identity() {
        let p = interval(-1.0, 1.0);
        let origin = interval(0.0, 0.0);
        assert!(p.pontryagin_diff(&origin).unwrap().equals(&p).unwrap());
    }

    #[test]
    fn erosion_one_dimensional() {
        let p = interval(-1.0, 1.0);
        let s = interval(0.0, 0.5);
        assert!(p.pontryagin_diff(&s).unwrap().equals(&interval(-1.0, 0.5)).unwrap());
    }

    #[test]
    fn erosion_symmetric_boxes() {
        let p = HPolytope::box_set(&[-2.0, -2.0], &[2.0, 2.0]).unwrap();
        let s = unit_box(2);
        assert!(p.pontryagin_diff(&s).unwrap().equals(&unit_box(2)).unwrap());
    }

    #[test]
    fn equals_ignores_redundant_rows() {
        let p = unit_box(2);
        let with_extra = p
            .intersect(
                &HPolytope::new(
                    DMatrix::from_row_slice(1, 2, &[1.0, 1.0]),
                    DVector::from_column_slice(&[5.0]),
                )
                .unwrap(),
            )
            .unwrap();
        assert!(p.equals(&with_extra).unwrap());
    }

    #[test]
    fn equals_detects_strict_inclusion() {
        assert!(!interval(-1.0, 1.0).equals(&interval(-1.0, 0.999)).unwrap());
    }

    #[test]
    fn equals_empty_sets() {
        let e1 = HPolytope::empty(1);
        let e2 = HPolytope::new(
            DMatrix::from_row_slice(2, 1, &[1.0, -1.0]),
            DVector::from_column_slice(&[-2.0, 1.0]),
        )
        .unwrap();
        assert!(e2.is_empty().unwrap());
        assert!(e1.equals(&e2).unwrap());
        assert!(!e1.equals(&interval(0.0, 1.0)).unwrap());
        assert!(!interval(0.0, 1.0).equals(&e1).unwrap());
    }

    #[test]
    fn chebyshev_center_of_box() {
        let (c, r) = unit_box(3).chebyshev_center().unwrap();
        assert!(c.amax() < 1e-9);
        assert!((r - 1.0).abs() < 1e-9);
    }

    #[test]
    fn vertices_of_unit_square() {
        let v = unit_box(2).vertices_low_dim().unwrap();
        assert_eq!(v.len(), 4);
        for vertex in &v {
            assert!((vertex[0].abs() - 1.0).abs() < 1e-9);
            assert!((vertex[1].abs() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn vertices_of_interval() {
        let v = interval(0.0, 10.0).vertices_low_dim().unwrap();
        assert_eq!(v.len(), 2);
        assert!((v[0][0] - 0.0).abs() < 1e-9);
        assert!((v[1][0] - 10.0).abs() < 1e-9);
    }

    #[test]
    fn json_round_trip() {
        let p = unit_box(2);
        let text = serde_json::to_string(&p).unwrap();
        let back: HPolytope = serde_json::from_str(&text).unwrap();
        assert_eq!(p.coeffs(), back.coeffs());
        assert_eq!(p.rhs(), back.rhs());
    }

    #[test]
    fn json_shape() {
        let p = interval(-1.0, 2.5);
        let v: serde_json::Value = serde_json::to_value(&p).unwrap();
        assert_eq!(v["H"][0][0], 1.0);
        assert_eq!(v["h"][1], 1.0);
    }
}
