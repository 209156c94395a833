//! Safe time interval of an invariant set.
//!
//! For a horizon j, the states x_1..x_j are expanded in terms of x_0 and the
//! input sequence, the invariant-set and input constraints are stacked into
//! one inequality system over (x_0, û) with disturbance columns G, the rhs is
//! tightened row-wise against the worst disturbance, and the system is
//! projected back onto the state coordinates. The safe time interval is the
//! largest j whose projection still equals the invariant set.

use log::{debug, info};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polytope::{HPolytope, Support};
use crate::system::LinearSystem;

/// Stacked constraints `M (x_0; û) <= P - G ŵ` over a j-step horizon.
#[derive(Debug, Clone)]
pub struct StackedConstraintSystem {
    m: DMatrix<f64>,
    p: DVector<f64>,
    g: DMatrix<f64>,
    horizon: usize,
    state_dim: usize,
}

impl StackedConstraintSystem {
    pub fn m(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn p(&self) -> &DVector<f64> {
        &self.p
    }

    pub fn g(&self) -> &DMatrix<f64> {
        &self.g
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn state_dim(&self) -> usize {
        self.state_dim
    }
}

/// Result of the safe-time search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SafeTimeResult {
    pub alpha: usize,
    pub feasible_sets: Vec<HPolytope>,
    pub hit_cap: bool,
}

/// Build the stacked system for horizon `j`: state rows for t = 0..=j using
/// the recursion `x_t = A^t x_0 + Σ_{i<t} A^{t-1-i} (B u_i + E w_i)`, then
/// input rows for t = 0..j. State rows use the invariant set's H-representation
/// (both x_0 and the future states are constrained to it).
pub fn build_stacked(sys: &LinearSystem, c_inf: &HPolytope, j: usize) -> Result<StackedConstraintSystem> {
    let n = sys.state_dim();
    let mu = sys.input_dim();
    let mw = sys.disturbance_dim();
    if c_inf.dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "invariant set has dimension {} but the state has dimension {}",
            c_inf.dim(),
            n
        )));
    }
    if j == 0 {
        return Err(Error::Config("stacked horizon j must be positive".into()));
    }

    let mut powers: Vec<DMatrix<f64>> = Vec::with_capacity(j + 1);
    powers.push(DMatrix::identity(n, n));
    for _ in 0..j {
        powers.push(powers.last().unwrap() * sys.a());
    }

    let hc = c_inf.coeffs();
    let state_rows = c_inf.num_rows();
    let input_rows = sys.input_set().num_rows();
    let total = (j + 1) * state_rows + j * input_rows;
    let mut m = DMatrix::zeros(total, n + j * mu);
    let mut g = DMatrix::zeros(total, j * mw);
    let mut p = DVector::zeros(total);

    let mut row = 0;
    for t in 0..=j {
        let h_at = hc * &powers[t];
        m.view_mut((row, 0), (state_rows, n)).copy_from(&h_at);
        for i in 0..t {
            let hb = hc * (&powers[t - 1 - i] * sys.b());
            let he = hc * (&powers[t - 1 - i] * sys.e());
            m.view_mut((row, n + i * mu), (state_rows, mu)).copy_from(&hb);
            g.view_mut((row, i * mw), (state_rows, mw)).copy_from(&he);
        }
        p.rows_mut(row, state_rows).copy_from(c_inf.rhs());
        row += state_rows;
    }
    for t in 0..j {
        m.view_mut((row, n + t * mu), (input_rows, mu))
            .copy_from(sys.input_set().coeffs());
        p.rows_mut(row, input_rows).copy_from(sys.input_set().rhs());
        row += input_rows;
    }

    Ok(StackedConstraintSystem {
        m,
        p,
        g,
        horizon: j,
        state_dim: n,
    })
}

/// Worst-case disturbance tightening: each row r of P shrinks by
/// `max { G_r · ŵ : ŵ ∈ W^j }`, which splits into per-step supports because
/// W^j is a Cartesian product. Rows with an all-zero G block stay untouched.
pub fn tighten(stacked: &StackedConstraintSystem, w: &HPolytope) -> Result<HPolytope> {
    let mw = w.dim();
    let j = stacked.horizon;
    if stacked.g.ncols() != j * mw {
        return Err(Error::DimensionMismatch(format!(
            "G has {} columns but the horizon needs {}",
            stacked.g.ncols(),
            j * mw
        )));
    }
    let mut tightened = stacked.p.clone();
    for r in 0..stacked.g.nrows() {
        for step in 0..j {
            let dir = DVector::from_iterator(mw, (0..mw).map(|c| stacked.g[(r, step * mw + c)]));
            if dir.iter().all(|v| *v == 0.0) {
                continue;
            }
            match w.support(&dir)? {
                Support::Bounded { value, .. } => tightened[r] -= value,
                Support::Unbounded => {
                    return Err(Error::NumericalFailure(
                        "disturbance support unbounded while tightening".into(),
                    ))
                }
            }
        }
    }
    HPolytope::new(stacked.m.clone(), tightened)
}

/// The j-step feasible set: initial states admitting an admissible input
/// sequence that keeps x_1..x_j inside `c_inf` for every disturbance
/// realization. Computed as the projection of the tightened stacked system
/// onto the state block, redundancy-removed.
pub fn feasible_set(sys: &LinearSystem, c_inf: &HPolytope, j: usize) -> Result<HPolytope> {
    let stacked = build_stacked(sys, c_inf, j)?;
    let tightened = tighten(&stacked, sys.disturbance_set())?;
    let keep: Vec<usize> = (0..sys.state_dim()).collect();
    let projected = tightened.project(&keep)?;
    if projected.is_empty()? {
        return Ok(projected);
    }
    projected.remove_redundancies()
}

/// Largest j <= j_max with `feasible_set(j) = c_inf`. The feasible sets shrink
/// monotonically, so the search stops at the first failure; `hit_cap` reports
/// that every horizon up to the cap passed.
pub fn safe_time(sys: &LinearSystem, c_inf: &HPolytope, j_max: usize) -> Result<SafeTimeResult> {
    if j_max == 0 {
        return Err(Error::Config("j_max must be positive".into()));
    }
    let mut feasible_sets = Vec::new();
    let mut alpha = 0;
    let mut hit_cap = true;
    for j in 1..=j_max {
        let xj = feasible_set(sys, c_inf, j)?;
        let equal = xj.equals(c_inf)?;
        debug!("feasible set X_{j}: {} rows, equals C_inf: {equal}", xj.num_rows());
        feasible_sets.push(xj);
        if equal {
            alpha = j;
        } else {
            if j == 1 {
                return Err(Error::InvalidInvariant);
            }
            hit_cap = false;
            break;
        }
    }
    info!("safe time interval alpha = {alpha} (cap {j_max}, hit_cap = {hit_cap})");
    Ok(SafeTimeResult {
        alpha,
        feasible_sets,
        hit_cap,
    })
}
