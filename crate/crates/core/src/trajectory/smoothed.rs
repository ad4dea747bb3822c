use nalgebra::DMatrix;

use super::SkippedCounts;
use crate::chain::TransitionMatrix;
use crate::error::{Error, Result};

/// Additively smoothed estimates built from skipped counts.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedEstimates {
    pub alpha: f64,
    /// `M̂(i, j) = (N_ij + α)/(N_i + dα)`.
    pub m_hat: TransitionMatrix,
    /// `π̂(i) = (N_i + dα)/(n + d²α)` with `n` the number of skipped steps.
    pub pi_hat: Vec<f64>,
    /// `L̂(i, j) = (N_ij + α)/√((N_i + dα)(N_j + dα))`.
    pub l_hat: DMatrix<f64>,
}

impl SmoothedEstimates {
    pub fn pi_min(&self) -> f64 {
        self.pi_hat.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

pub fn smoothed_estimates(counts: &SkippedCounts, alpha: f64) -> Result<SmoothedEstimates> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::ConstraintViolation(format!(
            "smoothing must be finite and nonnegative, got {alpha}"
        )));
    }
    let d = counts.d;
    let df = d as f64;
    if alpha == 0.0 {
        if let Some(i) = counts.n_visits.iter().position(|&n| n == 0) {
            return Err(Error::ZeroCountUnsmoothed(i));
        }
    }
    let row_mass: Vec<f64> = counts
        .n_visits
        .iter()
        .map(|&n| n as f64 + df * alpha)
        .collect();
    let total = counts.n_steps as f64 + df * df * alpha;
    let m_hat = DMatrix::from_fn(d, d, |i, j| (counts.trans(i, j) as f64 + alpha) / row_mass[i]);
    let pi_hat = row_mass.iter().map(|r| r / total).collect();
    let l_hat = DMatrix::from_fn(d, d, |i, j| {
        (counts.trans(i, j) as f64 + alpha) / (row_mass[i] * row_mass[j]).sqrt()
    });
    Ok(SmoothedEstimates {
        alpha,
        m_hat: TransitionMatrix::new(m_hat)?,
        pi_hat,
        l_hat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::StationaryDistribution;
    use crate::rng::Stream;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn pure_prior() {
        let c = SkippedCounts::from_transitions(1, 2, vec![0; 4]).unwrap();
        let e = smoothed_estimates(&c, 1.0).unwrap();
        for i in 0..2 {
            assert_abs_diff_eq!(e.pi_hat[i], 0.5);
            for j in 0..2 {
                assert_abs_diff_eq!(e.m_hat.get(i, j), 0.5);
                assert_abs_diff_eq!(e.l_hat[(i, j)], 0.5);
            }
        }
    }

    #[test]
    fn unsmoothed_point_masses() {
        let c = SkippedCounts::from_transitions(1, 3, vec![0, 1, 0, 0, 0, 1, 1, 0, 0]).unwrap();
        let e = smoothed_estimates(&c, 0.0).unwrap();
        assert_eq!(e.m_hat.get(0, 1), 1.0);
        assert_eq!(e.m_hat.get(1, 2), 1.0);
        assert_eq!(e.m_hat.get(2, 0), 1.0);

        let c = SkippedCounts::from_transitions(1, 2, vec![3, 1, 0, 0]).unwrap();
        assert_eq!(smoothed_estimates(&c, 0.0), Err(Error::ZeroCountUnsmoothed(1)));
    }

    #[test]
    fn small_alpha_approaches_frequencies() {
        let c = SkippedCounts::from_transitions(1, 2, vec![30, 10, 5, 15]).unwrap();
        let e = smoothed_estimates(&c, 1e-9).unwrap();
        assert_abs_diff_eq!(e.m_hat.get(0, 0), 0.75, epsilon = 1e-9);
        assert_abs_diff_eq!(e.m_hat.get(1, 1), 0.75, epsilon = 1e-9);
    }

    fn arb_counts() -> impl Strategy<Value = SkippedCounts> {
        (1usize..8, any::<u64>(), 0u64..50).prop_map(|(d, seed, scale)| {
            let mut s = Stream::new(seed);
            let t = (0..d * d).map(|_| (s.uniform() * scale as f64) as u64).collect();
            SkippedCounts::from_transitions(1, d, t).unwrap()
        })
    }

    proptest! {
        #[test]
        fn always_valid_for_positive_alpha(c in arb_counts(), alpha in 1e-6f64..5.0) {
            let e = smoothed_estimates(&c, alpha).unwrap();
            prop_assert!(StationaryDistribution::new(e.pi_hat.clone()).is_ok());
            prop_assert!(e.m_hat.entries().iter().all(|&x| x > 0.0));
            let d = c.d;
            for i in 0..d {
                for j in 0..d {
                    let via_pi = (e.pi_hat[i] / e.pi_hat[j]).sqrt() * e.m_hat.get(i, j);
                    prop_assert!((via_pi - e.l_hat[(i, j)]).abs() <= 1e-12);
                }
            }
        }
    }
}
