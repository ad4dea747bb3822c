//! Lanczos iteration with full reorthogonalization, and Hotelling deflation
//! of the known `±1` eigenpairs of dilated rescaled matrices.

use nalgebra::{DMatrix, SymmetricEigen};

use super::dense::{check_symmetric, inf_norm};
use super::tridiag::tridiagonal_eigenvalues;
use crate::error::{Error, Result};
use crate::rng::Stream;

/// A real symmetric linear operator given by its matrix-vector product.
pub trait SymmetricOperator {
    fn dim(&self) -> usize;

    /// Writes `A x` into `y`.
    fn apply(&self, x: &[f64], y: &mut [f64]);

    /// Cheap upper bound on the operator norm, used to scale tolerances.
    fn norm_bound(&self) -> f64;
}

/// A dense symmetric matrix, certified symmetric at construction.
#[derive(Debug, Clone)]
pub struct DenseOperator {
    a: DMatrix<f64>,
    norm: f64,
}

impl DenseOperator {
    pub fn new(a: DMatrix<f64>) -> Result<Self> {
        check_symmetric(&a)?;
        let norm = inf_norm(&a);
        Ok(Self { a, norm })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }
}

impl SymmetricOperator for DenseOperator {
    fn dim(&self) -> usize {
        self.a.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.a.nrows();
        for (i, yi) in y.iter_mut().enumerate().take(n) {
            *yi = (0..n).map(|j| self.a[(i, j)] * x[j]).sum();
        }
    }

    fn norm_bound(&self) -> f64 {
        self.norm
    }
}

/// The self-adjoint dilation `[[0, B], [Bᵀ, 0]]` of a square matrix `B`,
/// applied without forming the `2d × 2d` block matrix.
#[derive(Debug, Clone)]
pub struct DilationOperator {
    block: DMatrix<f64>,
    norm: f64,
}

impl DilationOperator {
    pub fn new(block: DMatrix<f64>) -> Result<Self> {
        if !block.is_square() {
            return Err(Error::InvalidMatrix(format!(
                "dilation block must be square, got {}x{}",
                block.nrows(),
                block.ncols()
            )));
        }
        let norm = inf_norm(&block).max(inf_norm(&block.transpose()));
        Ok(Self { block, norm })
    }

    pub fn block(&self) -> &DMatrix<f64> {
        &self.block
    }
}

impl SymmetricOperator for DilationOperator {
    fn dim(&self) -> usize {
        2 * self.block.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let d = self.block.nrows();
        let (top_in, bottom_in) = x.split_at(d);
        let (top_out, bottom_out) = y.split_at_mut(d);
        for (i, out) in top_out.iter_mut().enumerate() {
            *out = (0..d).map(|j| self.block[(i, j)] * bottom_in[j]).sum();
        }
        for (j, out) in bottom_out.iter_mut().enumerate() {
            *out = self.block.column(j).iter().zip(top_in).map(|(a, b)| a * b).sum();
        }
    }

    fn norm_bound(&self) -> f64 {
        self.norm
    }
}

/// Unit vectors `(√π, ±√π)/√2` spanning the `±1` eigenspaces of the dilation
/// of a rescaled transition matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DeflationPair {
    pub v_plus: Vec<f64>,
    pub v_minus: Vec<f64>,
}

impl DeflationPair {
    pub fn from_stationary(pi: &[f64]) -> Result<Self> {
        if let Some(i) = pi.iter().position(|&p| p <= 0.0 || !p.is_finite()) {
            return Err(Error::ZeroStationaryEntry(i));
        }
        let total: f64 = pi.iter().sum();
        let root: Vec<f64> = pi.iter().map(|p| (p / total).sqrt()).collect();
        let scale = std::f64::consts::FRAC_1_SQRT_2;
        let v_plus = root
            .iter()
            .chain(root.iter())
            .map(|x| x * scale)
            .collect();
        let v_minus = root
            .iter()
            .map(|x| x * scale)
            .chain(root.iter().map(|x| -x * scale))
            .collect();
        Ok(Self { v_plus, v_minus })
    }

    pub fn dim(&self) -> usize {
        self.v_plus.len()
    }
}

/// `A − v₊v₊ᵀ + v₋v₋ᵀ`: Hotelling deflation of the eigenvalues `+1` and `−1`.
pub struct Deflated<'a, O: SymmetricOperator> {
    inner: &'a O,
    pair: &'a DeflationPair,
}

impl<'a, O: SymmetricOperator> Deflated<'a, O> {
    pub fn new(inner: &'a O, pair: &'a DeflationPair) -> Result<Self> {
        if pair.dim() != inner.dim() {
            return Err(Error::DimensionMismatch {
                expected: inner.dim(),
                got: pair.dim(),
            });
        }
        Ok(Self { inner, pair })
    }
}

impl<O: SymmetricOperator> SymmetricOperator for Deflated<'_, O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.inner.apply(x, y);
        let cp = dot(&self.pair.v_plus, x);
        let cm = dot(&self.pair.v_minus, x);
        for ((yi, p), m) in y.iter_mut().zip(&self.pair.v_plus).zip(&self.pair.v_minus) {
            *yi += cm * m - cp * p;
        }
    }

    fn norm_bound(&self) -> f64 {
        self.inner.norm_bound() + 2.0
    }
}

/// Stopping parameters for [`lanczos_nth_magnitude`].
#[derive(Debug, Clone, Copy)]
pub struct LanczosOptions {
    /// Ritz-value stabilization and residual tolerance.
    pub tol: f64,
    /// Iteration cap; `None` means `5 n`.
    pub max_iter: Option<usize>,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: None,
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn orthogonalize(w: &mut [f64], against: &[Vec<f64>]) {
    // Two passes of classical Gram–Schmidt.
    for _ in 0..2 {
        for q in against {
            let c = dot(q, w);
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi -= c * qi;
            }
        }
    }
}

/// Unit vector orthogonal to `against`, drawn from a stream keyed by the
/// operator dimension and the number of prior draws.
fn fresh_direction(n: usize, draw: u64, against: &[Vec<f64>]) -> Option<Vec<f64>> {
    let mut stream = Stream::new(0x4C41_4E43_5A4F_5300 ^ ((n as u64) << 16) ^ draw);
    for _ in 0..8 {
        let mut v: Vec<f64> = (0..n).map(|_| stream.symmetric()).collect();
        orthogonalize(&mut v, against);
        let nv = norm(&v);
        if nv > 1e-8 {
            v.iter_mut().for_each(|x| *x /= nv);
            return Some(v);
        }
    }
    None
}

fn nth_by_magnitude(values: &[f64], nth: usize) -> Option<f64> {
    let mut mags: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    mags.get(nth - 1).copied()
}

/// Residual norm `‖A x − θ x‖` of the Ritz pair closest to `target`.
fn ritz_residual(alphas: &[f64], betas: &[f64], beta_last: f64, target: f64) -> f64 {
    let j = alphas.len();
    let t = DMatrix::from_fn(j, j, |r, c| {
        if r == c {
            alphas[r]
        } else if r + 1 == c {
            betas[r]
        } else if c + 1 == r {
            betas[c]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let idx = (0..j)
        .min_by(|&a, &b| {
            (eig.eigenvalues[a].abs() - target)
                .abs()
                .total_cmp(&(eig.eigenvalues[b].abs() - target).abs())
        })
        .unwrap_or(0);
    (beta_last * eig.eigenvectors[(j - 1, idx)]).abs()
}

/// The `nth` (1-based) largest eigenvalue magnitude of `op`, computed by
/// Lanczos with full reorthogonalization. The starting vector is made
/// orthogonal to `start_orth`. When the Krylov space becomes invariant
/// before the basis is complete, the iteration restarts from a fresh
/// direction orthogonal to the current basis, so eigenvalue multiplicities
/// are recovered.
pub fn lanczos_nth_magnitude<O: SymmetricOperator>(
    op: &O,
    start_orth: &[Vec<f64>],
    nth: usize,
    opts: LanczosOptions,
) -> Result<f64> {
    assert!(nth >= 1, "nth is 1-based");
    let n = op.dim();
    if n == 0 {
        return Ok(0.0);
    }
    let max_iter = opts.max_iter.unwrap_or(5 * n).max(1);
    let scale = op.norm_bound().max(1.0);
    let breakdown = 1e-13 * scale;

    let mut excluded: Vec<Vec<f64>> = start_orth
        .iter()
        .filter_map(|v| {
            let nv = norm(v);
            (nv > 0.0).then(|| v.iter().map(|x| x / nv).collect())
        })
        .collect();
    orthonormalize_in_place(&mut excluded);
    let reachable = n.saturating_sub(excluded.len());
    if reachable == 0 {
        return Ok(0.0);
    }

    let mut draws = 0u64;
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut current = fresh_direction(n, draws, &excluded)
        .ok_or_else(|| Error::EigensolverFailure("could not draw a starting vector".into()))?;
    draws += 1;
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut history: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];

    for _ in 0..max_iter {
        op.apply(&current, &mut w);
        let alpha = dot(&current, &w);
        basis.push(current.clone());
        alphas.push(alpha);

        let mut against = excluded.clone();
        against.extend(basis.iter().cloned());
        orthogonalize(&mut w, &against);
        let beta = norm(&w);

        let ritz = tridiagonal_eigenvalues(&alphas, &betas)?;
        let complete = basis.len() >= reachable;
        let invariant = beta <= breakdown;

        if let Some(theta) = nth_by_magnitude(&ritz, nth) {
            history.push(theta);
            if complete {
                return Ok(theta);
            }
            let h = history.len();
            if h >= 3
                && (history[h - 1] - history[h - 2]).abs() <= opts.tol
                && (history[h - 2] - history[h - 3]).abs() <= opts.tol
                && ritz_residual(&alphas, &betas, beta, theta) <= opts.tol * scale
                && !invariant
            {
                return Ok(theta);
            }
        } else if complete {
            return Ok(0.0);
        }

        if invariant {
            against.truncate(excluded.len());
            against.extend(basis.iter().cloned());
            match fresh_direction(n, draws, &against) {
                Some(v) => {
                    draws += 1;
                    current = v;
                    betas.push(0.0);
                }
                None => {
                    return Ok(nth_by_magnitude(&ritz, nth).unwrap_or(0.0));
                }
            }
        } else {
            current = w.iter().map(|x| x / beta).collect();
            betas.push(beta);
        }
    }
    Err(Error::NoConvergence("Lanczos iteration"))
}

fn orthonormalize_in_place(vs: &mut Vec<Vec<f64>>) {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(vs.len());
    for v in vs.drain(..) {
        let mut v = v;
        orthogonalize(&mut v, &out);
        let nv = norm(&v);
        if nv > 1e-12 {
            v.iter_mut().for_each(|x| *x /= nv);
            out.push(v);
        }
    }
    *vs = out;
}

/// Third largest eigenvalue magnitude of `op`, without deflation.
pub fn lanczos_third_magnitude<O: SymmetricOperator>(op: &O, opts: LanczosOptions) -> Result<f64> {
    lanczos_nth_magnitude(op, &[], 3, opts)
}

/// Largest eigenvalue magnitude of `op` after Hotelling deflation of the
/// given pair. When the pair are exact eigenvectors for `±1` this is the
/// third largest magnitude of the undeflated operator.
pub fn lanczos_third_eigenvalue<O: SymmetricOperator>(
    op: &O,
    deflation: &DeflationPair,
    tol: f64,
    max_iter: Option<usize>,
) -> Result<f64> {
    let deflated = Deflated::new(op, deflation)?;
    let start_orth = [deflation.v_plus.clone(), deflation.v_minus.clone()];
    lanczos_nth_magnitude(&deflated, &start_orth, 1, LanczosOptions { tol, max_iter })
}

/// Spectral radius of `𝒮(L) − Π̄`, where `Π̄` removes the `±1` eigenpairs
/// built from `π`.
pub fn spectral_radius_deflated(l_hat: &DMatrix<f64>, pi_hat: &[f64]) -> Result<f64> {
    if l_hat.nrows() != pi_hat.len() {
        return Err(Error::DimensionMismatch {
            expected: l_hat.nrows(),
            got: pi_hat.len(),
        });
    }
    let op = DilationOperator::new(l_hat.clone())?;
    let pair = DeflationPair::from_stationary(pi_hat)?;
    lanczos_third_eigenvalue(&op, &pair, LanczosOptions::default().tol, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::dense::{dense_nth_magnitude, dense_symmetric_spectrum};
    use approx::assert_abs_diff_eq;

    fn dilation_matrix(b: &DMatrix<f64>) -> DMatrix<f64> {
        let d = b.nrows();
        let mut s = DMatrix::zeros(2 * d, 2 * d);
        for i in 0..d {
            for j in 0..d {
                s[(i, d + j)] = b[(i, j)];
                s[(d + j, i)] = b[(i, j)];
            }
        }
        s
    }

    #[test]
    fn dilation_operator_matches_dense_product() {
        let b = DMatrix::from_row_slice(3, 3, &[0.1, 0.5, 0.4, 0.3, 0.3, 0.4, 0.6, 0.2, 0.2]);
        let op = DilationOperator::new(b.clone()).unwrap();
        let dense = dilation_matrix(&b);
        let x: Vec<f64> = (0..6).map(|i| (i as f64 * 0.7).sin()).collect();
        let mut y = vec![0.0; 6];
        op.apply(&x, &mut y);
        let want = &dense * nalgebra::DVector::from_vec(x);
        for i in 0..6 {
            assert_abs_diff_eq!(y[i], want[i], epsilon = 1e-14);
        }
    }

    #[test]
    fn deflation_pair_is_orthonormal() {
        let pair = DeflationPair::from_stationary(&[0.25, 0.25, 0.5]).unwrap();
        assert_abs_diff_eq!(dot(&pair.v_plus, &pair.v_plus), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(dot(&pair.v_minus, &pair.v_minus), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(dot(&pair.v_plus, &pair.v_minus), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn deflation_pair_rejects_zero_mass() {
        assert!(matches!(
            DeflationPair::from_stationary(&[0.5, 0.0, 0.5]),
            Err(Error::ZeroStationaryEntry(1))
        ));
    }

    #[test]
    fn rank_one_rescaled_matrix_deflates_to_zero() {
        let l = DMatrix::from_element(2, 2, 0.5);
        let rho = spectral_radius_deflated(&l, &[0.5, 0.5]).unwrap();
        assert_abs_diff_eq!(rho, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn two_state_chain_deflates_to_half() {
        let l = DMatrix::from_row_slice(2, 2, &[0.75, 0.25, 0.25, 0.75]);
        let rho = spectral_radius_deflated(&l, &[0.5, 0.5]).unwrap();
        assert_abs_diff_eq!(rho, 0.5, epsilon = 1e-10);
    }

    #[test]
    fn third_magnitude_matches_dense_on_dense_operator() {
        let mut stream = Stream::new(11);
        let n = 12;
        let mut a = DMatrix::from_fn(n, n, |_, _| stream.symmetric());
        a = (&a + a.transpose()) * 0.5;
        let op = DenseOperator::new(a.clone()).unwrap();
        let got = lanczos_third_magnitude(&op, LanczosOptions::default()).unwrap();
        let want = dense_nth_magnitude(&a, 3).unwrap();
        assert_abs_diff_eq!(got, want, epsilon = 1e-8);
    }

    #[test]
    fn multiplicity_is_recovered_after_breakdown() {
        // Spectrum {1, 1, -1, -1}: the third magnitude is 1 even though the
        // Krylov space from one start vector only sees two distinct values.
        let s = dilation_matrix(&DMatrix::identity(2, 2));
        let op = DenseOperator::new(s.clone()).unwrap();
        let got = lanczos_third_magnitude(&op, LanczosOptions::default()).unwrap();
        assert_abs_diff_eq!(got, 1.0, epsilon = 1e-10);
        assert_eq!(dense_symmetric_spectrum(&s).unwrap().len(), 4);
    }
}
