//! Maximal robust control invariant set via fixpoint iteration of the robust
//! controllable-predecessor map.

use log::{debug, info};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polytope::{HPolytope, Support};
use crate::system::LinearSystem;

/// Outcome of the fixpoint iteration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InvariantResult {
    pub set: HPolytope,
    pub iterations: usize,
    pub converged: bool,
}

/// Robust controllable predecessor
/// `{x : ∃ u ∈ U, ∀ w ∈ W, A x + B u + E w ∈ target}`.
///
/// Built by (a) tightening each target row by the disturbance support in the
/// `EᵀHᵢ` direction, (b) lifting to (x, u) space with the input constraints,
/// and (c) projecting out the input block. The result may be empty.
pub fn pre_robust(sys: &LinearSystem, target: &HPolytope) -> Result<HPolytope> {
    let n = sys.state_dim();
    let mu = sys.input_dim();
    if target.dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "target has dimension {} but the system state has dimension {}",
            target.dim(),
            n
        )));
    }
    if target.is_empty()? {
        return Err(Error::EmptySet("robust predecessor of an empty target"));
    }

    let rows = target.num_rows();
    let input_rows = sys.input_set().num_rows();
    let mut lifted = DMatrix::zeros(rows + input_rows, n + mu);
    let mut rhs = DVector::zeros(rows + input_rows);
    let ha = target.coeffs() * sys.a();
    let hb = target.coeffs() * sys.b();
    for i in 0..rows {
        let dir = (target.coeffs().row(i) * sys.e()).transpose();
        let margin = match sys.disturbance_set().support(&dir)? {
            Support::Bounded { value, .. } => value,
            Support::Unbounded => {
                return Err(Error::NumericalFailure(
                    "disturbance set support is unbounded despite boundedness check".into(),
                ))
            }
        };
        for j in 0..n {
            lifted[(i, j)] = ha[(i, j)];
        }
        for j in 0..mu {
            lifted[(i, n + j)] = hb[(i, j)];
        }
        rhs[i] = target.rhs()[i] - margin;
    }
    for i in 0..input_rows {
        for j in 0..mu {
            lifted[(rows + i, n + j)] = sys.input_set().coeffs()[(i, j)];
        }
        rhs[rows + i] = sys.input_set().rhs()[i];
    }

    let keep: Vec<usize> = (0..n).collect();
    HPolytope::new(lifted, rhs)?.project(&keep)
}

/// Fixpoint iteration `Ω_0 = X`, `Ω_{k+1} = pre_robust(Ω_k) ∩ X` with
/// redundancy removal each step, stopping on set equality or `max_iter`.
pub fn max_invariant(sys: &LinearSystem, max_iter: usize) -> Result<InvariantResult> {
    if max_iter == 0 {
        return Err(Error::Config("max_iter must be positive".into()));
    }
    let mut current = sys.state_set().clone();
    for k in 1..=max_iter {
        let pre = pre_robust(sys, &current)?;
        if pre.is_empty()? {
            return Err(Error::EmptyInvariant);
        }
        let next = pre.intersect(sys.state_set())?;
        if next.is_empty()? {
            return Err(Error::EmptyInvariant);
        }
        let next = next.remove_redundancies()?;
        debug!("invariant iteration {k}: {} rows", next.num_rows());
        if next.equals(&current)? {
            info!("invariant fixpoint reached after {k} iterations ({} rows)", next.num_rows());
            return Ok(InvariantResult {
                set: next,
                iterations: k,
                converged: true,
            });
        }
        current = next;
    }
    info!("invariant iteration cap {max_iter} reached without convergence");
    Ok(InvariantResult {
        set: current,
        iterations: max_iter,
        converged: false,
    })
}
