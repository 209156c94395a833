//! Deterministic hit-and-run sampling of bounded polytopes.
//!
//! Used by the invariance certificates and the simulation stress tests; the
//! chain starts at the Chebyshev center and burns in before recording.

use nalgebra::DVector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::polytope::HPolytope;

const BURN_IN: usize = 100;
/// Step lengths are clamped to this for (numerically) unbounded directions.
const STEP_CAP: f64 = 1e6;

/// `count` hit-and-run samples of a nonempty bounded polytope, after 100
/// burn-in steps. Fixed seed, fixed output.
pub fn hit_and_run(p: &HPolytope, count: usize, seed: u64) -> Result<Vec<DVector<f64>>> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let (mut x, _) = p.chebyshev_center()?;
    let mut samples = Vec::with_capacity(count);
    let mut produced = 0;
    while produced < BURN_IN + count {
        let dir = random_direction(p.dim(), &mut rng);
        let (t_lo, t_hi) = chord(p, &x, &dir);
        if t_hi > t_lo {
            let t = t_lo + rng.random::<f64>() * (t_hi - t_lo);
            x += dir * t;
        }
        produced += 1;
        if produced > BURN_IN {
            samples.push(x.clone());
        }
    }
    Ok(samples)
}

/// Hit-and-run samples pushed 99% of the way to the boundary along a fresh
/// random direction. Biases coverage toward the facets, where invariance
/// margins are thinnest.
pub fn boundary_biased(p: &HPolytope, count: usize, seed: u64) -> Result<Vec<DVector<f64>>> {
    let interior = hit_and_run(p, count, seed)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut out = Vec::with_capacity(count);
    for x in interior {
        let dir = random_direction(p.dim(), &mut rng);
        let (_, t_hi) = chord(p, &x, &dir);
        out.push(&x + dir * (0.99 * t_hi.max(0.0)));
    }
    Ok(out)
}

fn random_direction(dim: usize, rng: &mut ChaCha12Rng) -> DVector<f64> {
    loop {
        let v = DVector::from_iterator(dim, (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)));
        let norm = v.norm();
        if norm > 1e-12 {
            return v / norm;
        }
    }
}

/// Parameter interval of `{x + t·dir ∈ P}` around the current point.
fn chord(p: &HPolytope, x: &DVector<f64>, dir: &DVector<f64>) -> (f64, f64) {
    let mut t_lo = -STEP_CAP;
    let mut t_hi = STEP_CAP;
    for i in 0..p.num_rows() {
        let row = p.coeffs().row(i);
        let a = row.transpose().dot(dir);
        let slack = p.rhs()[i] - row.transpose().dot(x);
        if a > 1e-12 {
            t_hi = t_hi.min(slack / a);
        } else if a < -1e-12 {
            t_lo = t_lo.max(slack / a);
        }
    }
    (t_lo.min(0.0), t_hi.max(0.0))
}

/// Sanity check used by tests and generators: every sample must stay inside.
pub fn all_inside(p: &HPolytope, samples: &[DVector<f64>]) -> Result<()> {
    for (i, s) in samples.iter().enumerate() {
        if !p.contains(s)? {
            return Err(Error::NumericalFailure(format!("sample {i} escaped the polytope")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_stay_inside_box() {
        let p = HPolytope::box_set(&[-1.0, -2.0, 0.5], &[1.0, 3.0, 2.0]).unwrap();
        let samples = hit_and_run(&p, 200, 7).unwrap();
        assert_eq!(samples.len(), 200);
        all_inside(&p, &samples).unwrap();
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let p = HPolytope::box_set(&[-1.0, -1.0], &[1.0, 1.0]).unwrap();
        let a = hit_and_run(&p, 50, 42).unwrap();
        let b = hit_and_run(&p, 50, 42).unwrap();
        for (x, y) in a.iter().zip(b.iter()) {
            assert_eq!(x, y);
        }
        let c = hit_and_run(&p, 50, 43).unwrap();
        assert!(a.iter().zip(c.iter()).any(|(x, y)| x != y));
    }

    #[test]
    fn boundary_bias_reaches_facets() {
        let p = HPolytope::box_set(&[-1.0, -1.0], &[1.0, 1.0]).unwrap();
        let samples = boundary_biased(&p, 100, 3).unwrap();
        all_inside(&p, &samples).unwrap();
        let near_boundary = samples
            .iter()
            .filter(|s| s.iter().any(|v| v.abs() > 0.9))
            .count();
        assert!(near_boundary > 50, "only {near_boundary} of 100 samples near a facet");
    }

    #[test]
    fn degenerate_singleton_is_fixed_point() {
        let p = HPolytope::box_set(&[2.0], &[2.0]).unwrap();
        let samples = hit_and_run(&p, 10, 1).unwrap();
        for s in samples {
            assert!((s[0] - 2.0).abs() < 1e-7);
        }
    }
}
