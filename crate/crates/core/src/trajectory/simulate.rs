use crate::chain::{TransitionMatrix, ROW_SUM_TOL};
use crate::error::{Error, Result};
use crate::rng::Stream;

/// An observed sequence of states in `[0, d)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    states: Vec<usize>,
    d: usize,
    seed: Option<u64>,
}

impl Trajectory {
    pub fn new(states: Vec<usize>, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidTrajectory("state space is empty".into()));
        }
        if let Some((t, &x)) = states.iter().enumerate().find(|(_, &x)| x >= d) {
            return Err(Error::InvalidTrajectory(format!(
                "state {x} at position {t} is outside [0, {d})"
            )));
        }
        Ok(Self {
            states,
            d,
            seed: None,
        })
    }

    pub fn states(&self) -> &[usize] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }
}

pub(crate) fn check_distribution(mu: &[f64], d: usize) -> Result<()> {
    if mu.len() != d {
        return Err(Error::InvalidDistribution(format!(
            "initial law has {} entries, expected {d}",
            mu.len()
        )));
    }
    if let Some(i) = mu.iter().position(|p| !p.is_finite() || *p < 0.0) {
        return Err(Error::InvalidDistribution(format!(
            "entry {i} is negative or not finite"
        )));
    }
    let sum: f64 = mu.iter().sum();
    if (sum - 1.0).abs() > ROW_SUM_TOL {
        return Err(Error::InvalidDistribution(format!("entries sum to {sum}")));
    }
    Ok(())
}

/// Cumulative sums of a probability row, for inverse-CDF sampling.
struct Sampler {
    cdf: Vec<f64>,
    last_positive: usize,
}

impl Sampler {
    fn new(p: &[f64]) -> Self {
        let mut acc = 0.0;
        let cdf = p
            .iter()
            .map(|x| {
                acc += x;
                acc
            })
            .collect();
        let last_positive = p.iter().rposition(|&x| x > 0.0).unwrap_or(0);
        Self { cdf, last_positive }
    }

    fn draw(&self, u: f64) -> usize {
        self.cdf
            .partition_point(|&c| c <= u)
            .min(self.last_positive)
    }
}

/// Samples `m` states: the first from `mu`, then transitions from `m_chain`.
/// Identical inputs produce identical trajectories.
pub fn simulate(m_chain: &TransitionMatrix, mu: &[f64], m: usize, seed: u64) -> Result<Trajectory> {
    let d = m_chain.dim();
    check_distribution(mu, d)?;
    let initial = Sampler::new(mu);
    let rows: Vec<Sampler> = m_chain.rows().iter().map(|r| Sampler::new(r)).collect();
    let mut stream = Stream::new(seed);
    let mut states = Vec::with_capacity(m);
    if m > 0 {
        let mut x = initial.draw(stream.uniform());
        states.push(x);
        for _ in 1..m {
            x = rows[x].draw(stream.uniform());
            states.push(x);
        }
    }
    Ok(Trajectory {
        states,
        d,
        seed: Some(seed),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    #[test]
    fn deterministic_chains() {
        let id = TransitionMatrix::new(DMatrix::identity(3, 3)).unwrap();
        let t = simulate(&id, &[1.0, 0.0, 0.0], 5, 1).unwrap();
        assert_eq!(t.states(), &[0, 0, 0, 0, 0]);

        let cycle = TransitionMatrix::from_rows(&[
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![1.0, 0.0, 0.0],
        ])
        .unwrap();
        let t = simulate(&cycle, &[1.0, 0.0, 0.0], 4, 9).unwrap();
        assert_eq!(t.states(), &[0, 1, 2, 0]);
        assert_eq!(t.seed(), Some(9));
    }

    #[test]
    fn uniform_chain_frequencies() {
        let d = 4;
        let m = TransitionMatrix::new(DMatrix::from_element(d, d, 0.25)).unwrap();
        let t = simulate(&m, &[0.25; 4], 100_000, 42).unwrap();
        let mut freq = vec![0usize; d];
        t.states().iter().for_each(|&x| freq[x] += 1);
        for f in freq {
            assert!((f as f64 / 1e5 - 0.25).abs() < 0.02);
        }
    }

    #[test]
    fn reproducible_under_seed() {
        let m = TransitionMatrix::from_rows(&[vec![0.3, 0.7], vec![0.6, 0.4]]).unwrap();
        let a = simulate(&m, &[0.5, 0.5], 1000, 17).unwrap();
        let b = simulate(&m, &[0.5, 0.5], 1000, 17).unwrap();
        let c = simulate(&m, &[0.5, 0.5], 1000, 18).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.states(), c.states());
    }

    #[test]
    fn invalid_initial_law() {
        let m = TransitionMatrix::from_rows(&[vec![0.3, 0.7], vec![0.6, 0.4]]).unwrap();
        assert!(matches!(simulate(&m, &[0.5, 0.6], 3, 0), Err(Error::InvalidDistribution(_))));
        assert!(matches!(simulate(&m, &[1.5, -0.5], 3, 0), Err(Error::InvalidDistribution(_))));
        assert!(matches!(simulate(&m, &[1.0], 3, 0), Err(Error::InvalidDistribution(_))));
    }

    #[test]
    fn zero_probability_states_are_never_drawn() {
        let s = Sampler::new(&[0.5, 0.5, 0.0]);
        assert_eq!(s.draw(0.999_999_999_999_999_9), 1);
        assert_eq!(s.draw(0.0), 0);
        assert_eq!(Sampler::new(&[0.0, 1.0]).draw(0.0), 1);
    }

    #[test]
    fn out_of_range_states_rejected() {
        assert!(Trajectory::new(vec![0, 3], 3).is_err());
        assert!(Trajectory::new(vec![0, 2], 3).is_ok());
    }
}
