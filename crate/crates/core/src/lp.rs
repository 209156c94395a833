//! Dense two-phase simplex with Bland's anti-cycling rule.
//!
//! Solves `max c·x  s.t.  A x <= b` with free variables, by splitting each
//! variable into a nonnegative pair and adding slacks/artificials. Problems in
//! this crate are small and dense (a handful of columns, up to a few thousand
//! rows), so a plain tableau beats anything fancier.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative feasibility / optimality tolerance.
pub const FEAS_TOL: f64 = 1e-9;
/// Entries below this are never used as pivots.
pub const PIVOT_TOL: f64 = 1e-11;

/// `max objective·x  s.t.  constraints·x <= rhs`, x free.
#[derive(Debug, Clone)]
pub struct LpProblem {
    objective: DVector<f64>,
    constraints: DMatrix<f64>,
    rhs: DVector<f64>,
}

impl LpProblem {
    pub fn new(objective: DVector<f64>, constraints: DMatrix<f64>, rhs: DVector<f64>) -> Result<Self> {
        if constraints.nrows() != rhs.len() {
            return Err(Error::DimensionMismatch(format!(
                "constraint matrix has {} rows but rhs has {} entries",
                constraints.nrows(),
                rhs.len()
            )));
        }
        if constraints.ncols() != objective.len() {
            return Err(Error::DimensionMismatch(format!(
                "constraint matrix has {} columns but objective has {} entries",
                constraints.ncols(),
                objective.len()
            )));
        }
        if objective.is_empty() {
            return Err(Error::DimensionMismatch("objective must have at least one entry".into()));
        }
        let finite = objective.iter().all(|v| v.is_finite())
            && constraints.iter().all(|v| v.is_finite())
            && rhs.iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::NumericalFailure("LP data contains non-finite entries".into()));
        }
        Ok(Self { objective, constraints, rhs })
    }

    pub fn dim(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.rhs.len()
    }
}

/// Outcome of an LP solve.
#[derive(Debug, Clone, PartialEq)]
pub enum LpSolution {
    Optimal { value: f64, point: DVector<f64> },
    Infeasible,
    Unbounded,
}

impl LpSolution {
    pub fn optimal(&self) -> Option<(f64, &DVector<f64>)> {
        match self {
            LpSolution::Optimal { value, point } => Some((*value, point)),
            _ => None,
        }
    }
}

/// Column layout: [x+ (d) | x- (d) | slacks (m) | artificials (k) | rhs].
struct Tableau {
    data: Vec<f64>,
    ncols: usize,
    nrows: usize,
    obj: Vec<f64>,
    basis: Vec<usize>,
    scratch: Vec<f64>,
    iterations: usize,
    cap: usize,
}

enum PivotEnd {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.ncols + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.ncols - 1)
    }

    /// Gaussian elimination step on (prow, pcol), including the objective row.
    fn pivot(&mut self, prow: usize, pcol: usize) {
        let ncols = self.ncols;
        let start = prow * ncols;
        let pval = self.data[start + pcol];
        for c in 0..ncols {
            self.data[start + c] /= pval;
        }
        self.data[start + pcol] = 1.0;
        self.scratch.clear();
        self.scratch.extend_from_slice(&self.data[start..start + ncols]);
        for r in 0..self.nrows {
            if r == prow {
                continue;
            }
            let base = r * ncols;
            let factor = self.data[base + pcol];
            if factor != 0.0 {
                for c in 0..ncols {
                    self.data[base + c] -= factor * self.scratch[c];
                }
                self.data[base + pcol] = 0.0;
            }
        }
        let factor = self.obj[pcol];
        if factor != 0.0 {
            for c in 0..ncols {
                self.obj[c] -= factor * self.scratch[c];
            }
            self.obj[pcol] = 0.0;
        }
        self.basis[prow] = pcol;
        self.iterations += 1;
    }

    /// Bland's rule: enter the lowest-index improving column, leave on the
    /// lowest basic-variable index among minimal ratios.
    fn run(&mut self, col_limit: usize, opt_tol: f64) -> Result<PivotEnd> {
        loop {
            let mut entering = None;
            for c in 0..col_limit {
                if self.obj[c] > opt_tol {
                    entering = Some(c);
                    break;
                }
            }
            let Some(pcol) = entering else {
                return Ok(PivotEnd::Optimal);
            };
            let mut best: Option<(f64, usize, usize)> = None; // (ratio, row, basic var)
            for r in 0..self.nrows {
                let a = self.at(r, pcol);
                if a > PIVOT_TOL {
                    let ratio = self.rhs(r) / a;
                    let replace = match best {
                        None => true,
                        Some((bratio, _, bvar)) => {
                            let tie = (ratio - bratio).abs() <= 1e-12 * (1.0 + bratio.abs());
                            (ratio < bratio && !tie) || (tie && self.basis[r] < bvar)
                        }
                    };
                    if replace {
                        best = Some((ratio, r, self.basis[r]));
                    }
                }
            }
            let Some((_, prow, _)) = best else {
                return Ok(PivotEnd::Unbounded);
            };
            self.pivot(prow, pcol);
            if self.iterations > self.cap {
                return Err(Error::NumericalFailure(format!(
                    "simplex exceeded the iteration cap of {}",
                    self.cap
                )));
            }
        }
    }
}

/// Solve the LP. Deterministic: identical inputs yield bit-identical outputs.
pub fn solve(problem: &LpProblem) -> Result<LpSolution> {
    let d = problem.dim();
    let m = problem.num_constraints();
    let art_rows: Vec<usize> = (0..m).filter(|&i| problem.rhs[i] < 0.0).collect();
    let k = art_rows.len();
    let art_start = 2 * d + m;
    let ncols = art_start + k + 1;

    let mut t = Tableau {
        data: vec![0.0; m * ncols],
        ncols,
        nrows: m,
        obj: vec![0.0; ncols],
        basis: vec![0; m],
        scratch: Vec::with_capacity(ncols),
        iterations: 0,
        cap: 50 * (m + d).max(20),
    };

    let mut art_idx = 0;
    for i in 0..m {
        let negate = problem.rhs[i] < 0.0;
        let sign = if negate { -1.0 } else { 1.0 };
        let base = i * ncols;
        for j in 0..d {
            let a = sign * problem.constraints[(i, j)];
            t.data[base + j] = a;
            t.data[base + d + j] = -a;
        }
        t.data[base + 2 * d + i] = sign;
        t.data[base + ncols - 1] = sign * problem.rhs[i];
        if negate {
            t.data[base + art_start + art_idx] = 1.0;
            t.basis[i] = art_start + art_idx;
            art_idx += 1;
        } else {
            t.basis[i] = 2 * d + i;
        }
    }

    let rhs_scale = 1.0 + problem.rhs.amax_checked();

    // Phase 1: drive the artificials to zero.
    if k > 0 {
        for c in art_start..art_start + k {
            t.obj[c] = -1.0;
        }
        for r in 0..m {
            if t.basis[r] >= art_start {
                let base = r * ncols;
                for c in 0..ncols {
                    t.obj[c] += t.data[base + c];
                }
            }
        }
        match t.run(art_start, FEAS_TOL)? {
            PivotEnd::Optimal => {}
            PivotEnd::Unbounded => {
                return Err(Error::NumericalFailure("phase-1 objective reported unbounded".into()));
            }
        }
        // obj[last] = -z; infeasible when the artificials cannot all reach zero
        if -t.obj[ncols - 1] < -FEAS_TOL * rhs_scale {
            return Ok(LpSolution::Infeasible);
        }
        // Pivot lingering artificials out of the (degenerate) basis when possible.
        for r in 0..m {
            if t.basis[r] >= art_start {
                let base = r * ncols;
                if let Some(c) = (0..art_start).find(|&c| t.data[base + c].abs() > PIVOT_TOL) {
                    t.pivot(r, c);
                }
            }
        }
    }

    // Phase 2: original objective, artificial columns frozen out.
    let mut obj = vec![0.0; ncols];
    for j in 0..d {
        obj[j] = problem.objective[j];
        obj[d + j] = -problem.objective[j];
    }
    t.obj = obj;
    for r in 0..m {
        let v = t.basis[r];
        let factor = t.obj[v];
        if factor != 0.0 {
            let base = r * ncols;
            for c in 0..ncols {
                t.obj[c] -= factor * t.data[base + c];
            }
            t.obj[v] = 0.0;
        }
    }
    let opt_tol = FEAS_TOL * (1.0 + problem.objective.amax_checked());
    match t.run(art_start, opt_tol)? {
        PivotEnd::Unbounded => return Ok(LpSolution::Unbounded),
        PivotEnd::Optimal => {}
    }

    let mut point = DVector::zeros(d);
    for r in 0..m {
        let v = t.basis[r];
        if v < d {
            point[v] += t.rhs(r);
        } else if v < 2 * d {
            point[v - d] -= t.rhs(r);
        }
    }
    let value = problem.objective.dot(&point);
    Ok(LpSolution::Optimal { value, point })
}

trait AmaxChecked {
    fn amax_checked(&self) -> f64;
}

impl AmaxChecked for DVector<f64> {
    /// `amax` of an empty vector panics in nalgebra; treat it as 0.
    fn amax_checked(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.amax()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(c: &[f64], a: &[&[f64]], b: &[f64]) -> LpProblem {
        let m = a.len();
        let d = c.len();
        let flat: Vec<f64> = a.iter().flat_map(|r| r.iter().copied()).collect();
        LpProblem::new(
            DVector::from_column_slice(c),
            DMatrix::from_row_slice(m, d, &flat),
            DVector::from_column_slice(b),
        )
        .unwrap()
    }

    #[test]
    fn one_dim_box_support() {
        let p = lp(&[1.0], &[&[1.0], &[-1.0]], &[1.0, 1.0]);
        match solve(&p).unwrap() {
            LpSolution::Optimal { value, point } => {
                assert!((value - 1.0).abs() < 1e-9);
                assert!((point[0] - 1.0).abs() < 1e-9);
            }
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn contradictory_bounds_infeasible() {
        let p = lp(&[1.0], &[&[1.0], &[-1.0]], &[1.0, -2.0]);
        assert_eq!(solve(&p).unwrap(), LpSolution::Infeasible);
    }

    #[test]
    fn box_corner() {
        let p = lp(
            &[1.0, 1.0],
            &[&[1.0, 0.0], &[0.0, 1.0], &[-1.0, 0.0], &[0.0, -1.0]],
            &[3.0, 4.0, 0.0, 0.0],
        );
        match solve(&p).unwrap() {
            LpSolution::Optimal { value, .. } => assert!((value - 7.0).abs() < 1e-9),
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn triangle_vertex_optimum() {
        // max 2x+y over {x>=0, y>=0, x+y<=1}; vertices (0,0),(1,0),(0,1) give 0,2,1
        let p = lp(
            &[2.0, 1.0],
            &[&[-1.0, 0.0], &[0.0, -1.0], &[1.0, 1.0]],
            &[0.0, 0.0, 1.0],
        );
        match solve(&p).unwrap() {
            LpSolution::Optimal { value, point } => {
                assert!((value - 2.0).abs() < 1e-9);
                assert!((point[0] - 1.0).abs() < 1e-9);
                assert!(point[1].abs() < 1e-9);
            }
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn unbounded_ray() {
        let p = lp(&[1.0], &[&[-1.0]], &[0.0]);
        assert_eq!(solve(&p).unwrap(), LpSolution::Unbounded);
    }

    #[test]
    fn unconstrained_zero_objective() {
        let p = LpProblem::new(DVector::zeros(2), DMatrix::zeros(0, 2), DVector::zeros(0)).unwrap();
        match solve(&p).unwrap() {
            LpSolution::Optimal { value, .. } => assert_eq!(value, 0.0),
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn negative_rhs_feasible() {
        // x <= -1 and x >= -3: phase 1 has to work through an artificial.
        let p = lp(&[1.0], &[&[1.0], &[-1.0]], &[-1.0, 3.0]);
        match solve(&p).unwrap() {
            LpSolution::Optimal { value, .. } => assert!((value + 1.0).abs() < 1e-9),
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn degenerate_point_feasible() {
        let p = lp(&[1.0], &[&[1.0], &[-1.0]], &[0.0, 0.0]);
        match solve(&p).unwrap() {
            LpSolution::Optimal { value, .. } => assert!(value.abs() < 1e-9),
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn beale_cycling_example_terminates() {
        // Classic cycling instance for Dantzig pricing; Bland's rule must terminate.
        let p = lp(
            &[0.75, -150.0, 0.02, -6.0],
            &[
                &[0.25, -60.0, -0.04, 9.0],
                &[0.5, -90.0, -0.02, 3.0],
                &[0.0, 0.0, 1.0, 0.0],
                &[-1.0, 0.0, 0.0, 0.0],
                &[0.0, -1.0, 0.0, 0.0],
                &[0.0, 0.0, -1.0, 0.0],
                &[0.0, 0.0, 0.0, -1.0],
            ],
            &[0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
        );
        match solve(&p).unwrap() {
            LpSolution::Optimal { value, .. } => assert!((value - 0.05).abs() < 1e-9),
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn determinism_bit_identical() {
        let p = lp(
            &[1.0, 2.0, -0.5],
            &[
                &[1.0, 1.0, 1.0],
                &[-1.0, 2.0, 0.0],
                &[0.0, -1.0, 4.0],
                &[-1.0, 0.0, 0.0],
                &[0.0, -1.0, 0.0],
                &[0.0, 0.0, -1.0],
            ],
            &[5.0, 3.0, 2.0, 1.0, 1.0, 1.0],
        );
        let a = solve(&p).unwrap();
        let b = solve(&p).unwrap();
        match (a, b) {
            (LpSolution::Optimal { value: va, point: pa }, LpSolution::Optimal { value: vb, point: pb }) => {
                assert_eq!(va.to_bits(), vb.to_bits());
                assert_eq!(pa.len(), pb.len());
                for i in 0..pa.len() {
                    assert_eq!(pa[i].to_bits(), pb[i].to_bits());
                }
            }
            other => panic!("expected two optimal solves, got {other:?}"),
        }
    }

    #[test]
    fn rejects_mismatched_dims() {
        let r = LpProblem::new(
            DVector::from_column_slice(&[1.0, 2.0]),
            DMatrix::from_row_slice(1, 1, &[1.0]),
            DVector::from_column_slice(&[1.0]),
        );
        assert!(matches!(r, Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn rejects_non_finite() {
        let r = LpProblem::new(
            DVector::from_column_slice(&[f64::NAN]),
            DMatrix::from_row_slice(1, 1, &[1.0]),
            DVector::from_column_slice(&[1.0]),
        );
        assert!(matches!(r, Err(Error::NumericalFailure(_))));
    }
}
