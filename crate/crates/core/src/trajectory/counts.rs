use serde::Serialize;

use super::Trajectory;
use crate::error::{Error, Result};

/// Visit and transition counts of the `k`-skipped chain
/// `(X_{k(t−1)}, X_{kt})`, `t = 1, …, ⌊(m−1)/k⌋` (0-based positions).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkippedCounts {
    pub k: usize,
    pub d: usize,
    pub n_visits: Vec<u64>,
    /// Row-major `d × d`.
    pub n_trans: Vec<u64>,
    pub n_min: u64,
    pub n_max: u64,
    pub n_steps: u64,
}

impl SkippedCounts {
    /// Builds counts from a transition table; visits are the row sums.
    pub fn from_transitions(k: usize, d: usize, n_trans: Vec<u64>) -> Result<Self> {
        if n_trans.len() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                got: n_trans.len(),
            });
        }
        let n_visits: Vec<u64> = n_trans.chunks(d).map(|r| r.iter().sum()).collect();
        let n_steps = n_visits.iter().sum();
        Ok(Self {
            k,
            d,
            n_min: n_visits.iter().copied().min().unwrap_or(0),
            n_max: n_visits.iter().copied().max().unwrap_or(0),
            n_visits,
            n_trans,
            n_steps,
        })
    }

    pub fn trans(&self, i: usize, j: usize) -> u64 {
        self.n_trans[i * self.d + j]
    }
}

/// Counts of the `k`-skipped chain of `traj`.
pub fn skipped_counts(traj: &Trajectory, k: usize) -> Result<SkippedCounts> {
    let m = traj.len();
    if k == 0 || m < 2 || k > m - 1 {
        return Err(Error::SkipTooLarge { k, m });
    }
    let d = traj.dim();
    let mut n_trans = vec![0u64; d * d];
    let s = traj.states();
    for t in 1..=(m - 1) / k {
        n_trans[s[k * (t - 1)] * d + s[k * t]] += 1;
    }
    SkippedCounts::from_transitions(k, d, n_trans)
}

/// Streaming accumulation of the counts for every skip `k = 1..=k_max`,
/// keeping only the last `k_max + 1` states.
#[derive(Debug, Clone)]
pub struct CountAccumulator {
    d: usize,
    k_max: usize,
    ring: Vec<usize>,
    seen: usize,
    tables: Vec<Vec<u64>>,
}

impl CountAccumulator {
    pub fn new(d: usize, k_max: usize) -> Self {
        let k_max = k_max.max(1);
        Self {
            d,
            k_max,
            ring: vec![0; k_max + 1],
            seen: 0,
            tables: vec![vec![0; d * d]; k_max],
        }
    }

    pub fn push(&mut self, x: usize) -> Result<()> {
        if x >= self.d {
            return Err(Error::InvalidTrajectory(format!(
                "state {x} at position {} is outside [0, {})",
                self.seen, self.d
            )));
        }
        let p = self.seen;
        let width = self.k_max + 1;
        self.ring[p % width] = x;
        for k in 1..=self.k_max.min(p) {
            if p.is_multiple_of(k) {
                let prev = self.ring[(p - k) % width];
                self.tables[k - 1][prev * self.d + x] += 1;
            }
        }
        self.seen += 1;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.seen
    }

    pub fn is_empty(&self) -> bool {
        self.seen == 0
    }

    /// Counts for `k = 1..=min(k_max, m − 1)`.
    pub fn finish(self) -> Result<Vec<SkippedCounts>> {
        let m = self.seen;
        if m < 2 {
            return Err(Error::SkipTooLarge { k: 1, m });
        }
        let d = self.d;
        self.tables
            .into_iter()
            .enumerate()
            .take(m - 1)
            .map(|(i, t)| SkippedCounts::from_transitions(i + 1, d, t))
            .collect()
    }
}
