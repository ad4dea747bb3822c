use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};

/// Row-sum tolerance for stochastic matrices.
pub const ROW_SUM_TOL: f64 = 1e-12;
/// Row-sum drift above which matrix powers are renormalized.
const POWER_DRIFT_TOL: f64 = 1e-12;

/// A row-stochastic `d × d` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    entries: DMatrix<f64>,
}

impl TransitionMatrix {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return Err(Error::InvalidMatrix(format!(
                "transition matrix must be square and non-empty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        for (i, row) in entries.row_iter().enumerate() {
            let mut sum = 0.0;
            for (j, &x) in row.iter().enumerate() {
                if !x.is_finite() || !(0.0..=1.0).contains(&x) {
                    return Err(Error::InvalidMatrix(format!(
                        "entry ({i},{j}) = {x} is outside [0, 1]"
                    )));
                }
                sum += x;
            }
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::InvalidMatrix(format!(
                    "row {i} sums to {sum}, not 1"
                )));
            }
        }
        Ok(Self { entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != d) {
            return Err(Error::InvalidMatrix(format!(
                "row {i} has {} entries, expected {d}",
                r.len()
            )));
        }
        Self::new(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
    }

    /// Builds a stochastic matrix from nonnegative entries, dividing every
    /// row by its sum.
    pub fn normalized(mut entries: DMatrix<f64>) -> Result<Self> {
        normalize_rows(&mut entries);
        Self::new(entries)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect()
    }

    /// `M^k`, with rows renormalized whenever their sums drift.
    pub fn power(&self, k: usize) -> TransitionMatrix {
        let d = self.dim();
        let mut acc = DMatrix::identity(d, d);
        for _ in 0..k {
            acc = step_power(&acc, &self.entries);
        }
        TransitionMatrix { entries: acc }
    }

    /// Iterator over `M, M², M³, …`.
    pub fn powers(&self) -> Powers<'_> {
        Powers {
            base: &self.entries,
            current: None,
        }
    }

    /// Primitivity test: `M^{(d−1)²+1}` entrywise positive (Wielandt's bound),
    /// evaluated with boolean matrix powers.
    pub fn is_ergodic(&self) -> bool {
        let d = self.dim();
        let exponent = (d - 1) * (d - 1) + 1;
        BoolMatrix::support(&self.entries).pow(exponent).is_full()
    }

    /// Irreducibility test: `(I + M)^{d−1}` entrywise positive.
    pub fn is_irreducible(&self) -> bool {
        strongly_connected(&self.entries)
    }
}

pub(crate) fn step_power(acc: &DMatrix<f64>, base: &DMatrix<f64>) -> DMatrix<f64> {
    let mut next = acc * base;
    for mut row in next.row_iter_mut() {
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > POWER_DRIFT_TOL && sum > 0.0 {
            row /= sum;
        }
    }
    next
}

pub(crate) fn normalize_rows(m: &mut DMatrix<f64>) {
    for mut row in m.row_iter_mut() {
        let sum: f64 = row.iter().sum();
        if sum > 0.0 {
            row /= sum;
        }
    }
}

/// Successive powers of a transition matrix.
pub struct Powers<'a> {
    base: &'a DMatrix<f64>,
    current: Option<DMatrix<f64>>,
}

impl Iterator for Powers<'_> {
    type Item = TransitionMatrix;

    fn next(&mut self) -> Option<Self::Item> {
        let next = match &self.current {
            None => self.base.clone(),
            Some(m) => step_power(m, self.base),
        };
        self.current = Some(next.clone());
        Some(TransitionMatrix { entries: next })
    }
}

/// Boolean matrix with bit-packed rows.
#[derive(Debug, Clone, PartialEq)]
struct BoolMatrix {
    n: usize,
    words: usize,
    rows: Vec<u64>,
}

impl BoolMatrix {
    fn support(m: &DMatrix<f64>) -> Self {
        let n = m.nrows();
        let words = n.div_ceil(64);
        let mut rows = vec![0u64; n * words];
        for i in 0..n {
            for j in 0..n {
                if m[(i, j)] > 0.0 {
                    rows[i * words + j / 64] |= 1 << (j % 64);
                }
            }
        }
        Self { n, words, rows }
    }

    fn identity(n: usize) -> Self {
        let words = n.div_ceil(64);
        let mut rows = vec![0u64; n * words];
        for i in 0..n {
            rows[i * words + i / 64] |= 1 << (i % 64);
        }
        Self { n, words, rows }
    }

    fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    fn mul(&self, other: &Self) -> Self {
        let mut out = vec![0u64; self.n * self.words];
        for i in 0..self.n {
            let dst = &mut out[i * self.words..(i + 1) * self.words];
            for k in 0..self.n {
                if self.get(i, k) {
                    let src = &other.rows[k * self.words..(k + 1) * self.words];
                    for (a, b) in dst.iter_mut().zip(src) {
                        *a |= b;
                    }
                }
            }
        }
        Self {
            n: self.n,
            words: self.words,
            rows: out,
        }
    }

    fn pow(&self, mut e: usize) -> Self {
        let mut result = Self::identity(self.n);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    fn is_full(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.get(i, j)))
    }
}

/// Whether the directed graph with adjacency given by the positive entries
/// of `m` is strongly connected.
pub fn strongly_connected(m: &DMatrix<f64>) -> bool {
    let n = m.nrows();
    if n == 0 {
        return false;
    }
    let mut lazy = BoolMatrix::support(m);
    for i in 0..n {
        lazy.rows[i * lazy.words + i / 64] |= 1 << (i % 64);
    }
    lazy.pow(n.saturating_sub(1).max(1)).is_full()
}

/// A probability vector, stationary for some chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationaryDistribution {
    probs: Vec<f64>,
    pi_min: f64,
}

impl StationaryDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty distribution".into()));
        }
        if let Some(i) = probs.iter().position(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "entry {i} is negative or not finite"
            )));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > ROW_SUM_TOL {
            return Err(Error::InvalidDistribution(format!("entries sum to {sum}")));
        }
        let pi_min = probs.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(Self { probs, pi_min })
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn pi_min(&self) -> f64 {
        self.pi_min
    }

    pub(crate) fn require_positive(&self) -> Result<()> {
        match self.probs.iter().position(|&p| p <= 0.0) {
            Some(i) => Err(Error::ZeroStationaryEntry(i)),
            None => Ok(()),
        }
    }
}

/// `L = D_π^{1/2} M D_π^{−1/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RescaledMatrix {
    pub entries: DMatrix<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DilationFlavor {
    /// `[[0, M], [M*, 0]]`, a `2d`-state transition matrix.
    Stochastic,
    /// `[[0, A], [Aᵀ, 0]]`, symmetric.
    Symmetric,
}

/// A `2d × 2d` block dilation.
#[derive(Debug, Clone, PartialEq)]
pub struct DilatedMatrix {
    pub entries: DMatrix<f64>,
    pub flavor: DilationFlavor,
}

impl DilatedMatrix {
    pub fn is_strongly_connected(&self) -> bool {
        strongly_connected(&self.entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_stochastic_rows() {
        let err = TransitionMatrix::from_rows(&[vec![0.5, 0.6], vec![0.5, 0.5]]).unwrap_err();
        assert!(matches!(err, Error::InvalidMatrix(_)));
        let err = TransitionMatrix::from_rows(&[vec![1.5, -0.5], vec![0.5, 0.5]]).unwrap_err();
        assert!(matches!(err, Error::InvalidMatrix(_)));
    }

    #[test]
    fn ergodicity_of_small_examples() {
        let cycle = TransitionMatrix::from_rows(&[
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![1.0, 0.0, 0.0],
        ])
        .unwrap();
        assert!(cycle.is_irreducible());
        assert!(!cycle.is_ergodic());

        let delayed_cycle = TransitionMatrix::from_rows(&[
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![0.5, 0.0, 0.5],
        ])
        .unwrap();
        assert!(delayed_cycle.is_ergodic());

        let identity = TransitionMatrix::new(DMatrix::identity(2, 2)).unwrap();
        assert!(!identity.is_ergodic());
        let single = TransitionMatrix::new(DMatrix::identity(1, 1)).unwrap();
        assert!(single.is_ergodic());
    }

    #[test]
    fn powers_iterator_matches_power() {
        let m = TransitionMatrix::from_rows(&[vec![0.9, 0.1], vec![0.4, 0.6]]).unwrap();
        let p5 = m.powers().nth(4).unwrap();
        let direct = m.power(5);
        assert!((p5.entries() - direct.entries()).amax() < 1e-15);
    }

    #[test]
    fn bool_power_handles_wide_rows() {
        // A 70-cycle with one self-loop crosses the 64-bit word boundary.
        let n = 70;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, (i + 1) % n)] = 1.0;
        }
        m[(0, 1)] = 0.5;
        m[(0, 0)] = 0.5;
        let chain = TransitionMatrix::new(m).unwrap();
        assert!(chain.is_ergodic());
    }
}
