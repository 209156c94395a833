//! Constrained disturbed discrete LTI plant
//! `x_{t+1} = A x_t + B u_t + E w_t`, `y_t = C x_t`
//! with polytopic constraints `x ∈ X`, `u ∈ U`, `w ∈ W`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polytope::{HPolytope, Support};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "LinearSystemJson", into = "LinearSystemJson")]
pub struct LinearSystem {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    e: DMatrix<f64>,
    c: DMatrix<f64>,
    state_set: HPolytope,
    input_set: HPolytope,
    disturbance_set: HPolytope,
    sample_minutes: Option<f64>,
}

impl LinearSystem {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        e: DMatrix<f64>,
        c: DMatrix<f64>,
        state_set: HPolytope,
        input_set: HPolytope,
        disturbance_set: HPolytope,
        sample_minutes: Option<f64>,
    ) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch("A must be square".into()));
        }
        if b.nrows() != n || e.nrows() != n {
            return Err(Error::DimensionMismatch("B and E must have as many rows as A".into()));
        }
        if c.ncols() != n {
            return Err(Error::DimensionMismatch("C must have as many columns as A".into()));
        }
        if state_set.dim() != n {
            return Err(Error::Config("state constraint set X has the wrong dimension".into()));
        }
        if input_set.dim() != b.ncols() {
            return Err(Error::Config("input constraint set U has the wrong dimension".into()));
        }
        if disturbance_set.dim() != e.ncols() {
            return Err(Error::Config("disturbance constraint set W has the wrong dimension".into()));
        }
        check_nonempty_bounded(&state_set, "state constraint set X")?;
        check_nonempty_bounded(&input_set, "input constraint set U")?;
        check_nonempty_bounded(&disturbance_set, "disturbance constraint set W")?;
        Ok(Self {
            a,
            b,
            e,
            c,
            state_set,
            input_set,
            disturbance_set,
            sample_minutes,
        })
    }

    pub fn state_dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.b.ncols()
    }

    pub fn disturbance_dim(&self) -> usize {
        self.e.ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.c.nrows()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn e(&self) -> &DMatrix<f64> {
        &self.e
    }

    pub fn c(&self) -> &DMatrix<f64> {
        &self.c
    }

    pub fn state_set(&self) -> &HPolytope {
        &self.state_set
    }

    pub fn input_set(&self) -> &HPolytope {
        &self.input_set
    }

    pub fn disturbance_set(&self) -> &HPolytope {
        &self.disturbance_set
    }

    pub fn sample_minutes(&self) -> Option<f64> {
        self.sample_minutes
    }

    /// One step of the dynamics: `A x + B u + E w`.
    pub fn step(&self, x: &DVector<f64>, u: &DVector<f64>, w: &DVector<f64>) -> Result<DVector<f64>> {
        if x.len() != self.state_dim() || u.len() != self.input_dim() || w.len() != self.disturbance_dim() {
            return Err(Error::DimensionMismatch(format!(
                "step expects (x,u,w) of dimensions ({},{},{}), got ({},{},{})",
                self.state_dim(),
                self.input_dim(),
                self.disturbance_dim(),
                x.len(),
                u.len(),
                w.len()
            )));
        }
        Ok(&self.a * x + &self.b * u + &self.e * w)
    }

    /// Measurement map `y = C x`.
    pub fn output(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        if x.len() != self.state_dim() {
            return Err(Error::DimensionMismatch(format!(
                "output expects a state of dimension {}, got {}",
                self.state_dim(),
                x.len()
            )));
        }
        Ok(&self.c * x)
    }
}

fn check_nonempty_bounded(p: &HPolytope, what: &str) -> Result<()> {
    if p.is_empty()? {
        return Err(Error::Config(format!("{what} is empty")));
    }
    for i in 0..p.dim() {
        for sign in [1.0, -1.0] {
            let mut dir = DVector::zeros(p.dim());
            dir[i] = sign;
            if matches!(p.support(&dir)?, Support::Unbounded) {
                return Err(Error::Config(format!("{what} is unbounded in coordinate {i}")));
            }
        }
    }
    Ok(())
}

/// Third-order insulin–glucose deviation model with a sampled-data glucose
/// output, meal disturbance on the third state, and box constraints
/// `-30 <= x_i <= 30`, `-10 <= u <= 100`, `0 <= w <= 10`.
///
/// The system matrix is built from the characteristic coefficients of poles
/// {0.965, 0.965, 0.98} with input gain K = -2; its bottom row is (0, 1, 1).
pub fn aps_model() -> LinearSystem {
    aps_system(1.0)
}

/// Variant of [`aps_model`] with the A(3,3) entry zeroed, turning the bottom
/// row into (0, 1, 0) — the companion form matching the pole design. The two
/// variants differ materially: the default is unstable in open loop and has a
/// much shorter safe time interval.
pub fn aps_model_a32_zero() -> LinearSystem {
    aps_system(0.0)
}

fn aps_system(a33: f64) -> LinearSystem {
    let k = -2.0;
    let a1 = -0.965 * 2.0 - 0.98;
    let a2 = 2.0 * 0.98 * 0.965 + 0.965 * 0.965;
    let a3 = -0.98 * 0.965 * 0.965;
    let a = DMatrix::from_row_slice(3, 3, &[-a1, -a2, -a3, 1.0, 0.0, 0.0, 0.0, 1.0, a33]);
    let b = DMatrix::from_column_slice(3, 1, &[k, 0.0, 0.0]);
    let e = DMatrix::from_column_slice(3, 1, &[0.0, 0.0, 1.0]);
    let c = DMatrix::from_row_slice(1, 3, &[0.0, 0.0, 1.0]);
    let x = HPolytope::box_set(&[-30.0; 3], &[30.0; 3]).expect("state box");
    let u = HPolytope::box_set(&[-10.0], &[100.0]).expect("input box");
    let w = HPolytope::box_set(&[0.0], &[10.0]).expect("disturbance box");
    LinearSystem::new(a, b, e, c, x, u, w, Some(5.0)).expect("builtin model is well-formed")
}

#[derive(Serialize, Deserialize)]
struct LinearSystemJson {
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    b: Vec<Vec<f64>>,
    #[serde(rename = "E")]
    e: Vec<Vec<f64>>,
    #[serde(rename = "C")]
    c: Vec<Vec<f64>>,
    #[serde(rename = "X")]
    state_set: HPolytope,
    #[serde(rename = "U")]
    input_set: HPolytope,
    #[serde(rename = "W")]
    disturbance_set: HPolytope,
    #[serde(skip_serializing_if = "Option::is_none")]
    sample_minutes: Option<f64>,
}

fn to_nested(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn from_nested(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>> {
    if rows.is_empty() {
        return Err(Error::Config(format!("matrix {what} has no rows")));
    }
    let cols = rows[0].len();
    if cols == 0 || rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Config(format!("matrix {what} has inconsistent row lengths")));
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    Ok(DMatrix::from_row_slice(rows.len(), cols, &flat))
}

impl From<LinearSystem> for LinearSystemJson {
    fn from(sys: LinearSystem) -> Self {
        LinearSystemJson {
            a: to_nested(&sys.a),
            b: to_nested(&sys.b),
            e: to_nested(&sys.e),
            c: to_nested(&sys.c),
            state_set: sys.state_set,
            input_set: sys.input_set,
            disturbance_set: sys.disturbance_set,
            sample_minutes: sys.sample_minutes,
        }
    }
}

impl TryFrom<LinearSystemJson> for LinearSystem {
    type Error = Error;

    fn try_from(raw: LinearSystemJson) -> Result<Self> {
        LinearSystem::new(
            from_nested(&raw.a, "A")?,
            from_nested(&raw.b, "B")?,
            from_nested(&raw.e, "E")?,
            from_nested(&raw.c, "C")?,
            raw.state_set,
            raw.input_set,
            raw.disturbance_set,
            raw.sample_minutes,
        )
    }
}
