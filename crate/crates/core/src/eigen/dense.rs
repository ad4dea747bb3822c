//! Dense symmetric eigensolver used both as the small-problem production path
//! and as the reference for every iterative spectral computation.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-10;
const RESIDUAL_TOL: f64 = 1e-9;

/// Largest absolute entry of `a - aᵀ`.
pub fn asymmetry(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    worst
}

/// Maximum absolute row sum.
pub fn inf_norm(a: &DMatrix<f64>) -> f64 {
    a.row_iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub(crate) fn check_symmetric(a: &DMatrix<f64>) -> Result<()> {
    if !a.is_square() {
        return Err(Error::InvalidMatrix(format!(
            "expected a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let asym = asymmetry(a);
    if asym > SYMMETRY_TOL * inf_norm(a).max(1.0) {
        return Err(Error::NotSymmetric { asymmetry: asym });
    }
    Ok(())
}

/// Full eigen-decomposition of a symmetric matrix, eigenvalues sorted
/// descending with eigenvectors in matching column order.
pub fn dense_symmetric_eigen(a: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    check_symmetric(a)?;
    let n = a.nrows();
    if n == 0 {
        return Ok((Vec::new(), DMatrix::zeros(0, 0)));
    }
    // Symmetrize exactly so the solver sees a self-adjoint input.
    let sym = (a + a.transpose()) * 0.5;
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, 0)
        .ok_or(Error::NoConvergence("dense symmetric eigensolver"))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);

    let scale = inf_norm(a).max(f64::MIN_POSITIVE);
    let residual = a * &vectors - &vectors * DMatrix::from_diagonal(&values.clone().into());
    let worst = residual.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    if worst > RESIDUAL_TOL * scale.max(1.0) {
        return Err(Error::NoConvergence("dense symmetric eigensolver"));
    }
    Ok((values, vectors))
}

/// Full spectrum of a symmetric matrix, sorted descending by value.
pub fn dense_symmetric_spectrum(a: &DMatrix<f64>) -> Result<Vec<f64>> {
    dense_symmetric_eigen(a).map(|(values, _)| values)
}

/// The `nth` (1-based) largest eigenvalue magnitude of a symmetric matrix.
/// Returns 0 when the matrix has fewer than `nth` eigenvalues.
pub fn dense_nth_magnitude(a: &DMatrix<f64>, nth: usize) -> Result<f64> {
    let mut mags: Vec<f64> = dense_symmetric_spectrum(a)?
        .into_iter()
        .map(f64::abs)
        .collect();
    mags.sort_by(|x, y| y.total_cmp(x));
    Ok(mags.get(nth.saturating_sub(1)).copied().unwrap_or(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn identity_spectrum() {
        let spec = dense_symmetric_spectrum(&DMatrix::identity(3, 3)).unwrap();
        assert_eq!(spec.len(), 3);
        for v in spec {
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn swap_matrix_spectrum() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let spec = dense_symmetric_spectrum(&a).unwrap();
        assert_abs_diff_eq!(spec[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(spec[1], -1.0, epsilon = 1e-14);
    }

    #[test]
    fn dilation_of_two_state_chain() {
        // Rescaled matrix of the symmetric two-state chain with p = 0.25 is the
        // chain itself; its singular values are 1 and 0.5.
        let l = [0.75, 0.25, 0.25, 0.75];
        let mut s = DMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                s[(i, 2 + j)] = l[2 * i + j];
                s[(2 + j, i)] = l[2 * i + j];
            }
        }
        let spec = dense_symmetric_spectrum(&s).unwrap();
        for (got, want) in spec.iter().zip([1.0, 0.5, -0.5, -1.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn rejects_asymmetric_input() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.5, 0.0]);
        assert!(matches!(
            dense_symmetric_spectrum(&a),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn nth_magnitude_handles_short_spectra() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert_eq!(dense_nth_magnitude(&a, 3).unwrap(), 0.0);
        assert_abs_diff_eq!(dense_nth_magnitude(&a, 2).unwrap(), 1.0, epsilon = 1e-14);
    }
}
