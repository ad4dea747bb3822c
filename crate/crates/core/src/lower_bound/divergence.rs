use nalgebra::DMatrix;

use crate::chain::TransitionMatrix;
use crate::eigen::dense_symmetric_eigen;
use crate::error::{Error, Result};
use crate::trajectory::check_distribution;

/// `KL(ν₀‖ν₁) = Σ ν₀ ln(ν₀/ν₁)`; requires `ν₀ ≪ ν₁`.
pub fn kl_divergence(nu0: &[f64], nu1: &[f64]) -> Result<f64> {
    if nu0.len() != nu1.len() {
        return Err(Error::InvalidDistribution(format!(
            "length mismatch: {} vs {}",
            nu0.len(),
            nu1.len()
        )));
    }
    check_distribution(nu0, nu0.len())?;
    check_distribution(nu1, nu1.len())?;
    let mut kl = 0.0;
    for (i, (&p, &q)) in nu0.iter().zip(nu1).enumerate() {
        if p == 0.0 {
            continue;
        }
        if q == 0.0 {
            return Err(Error::AbsoluteContinuityViolation(i));
        }
        kl += p * (p / q).ln();
    }
    Ok(kl.max(0.0))
}

/// Squared Hellinger distance `1 − Σ √(p q)`.
pub fn hellinger(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::InvalidDistribution("length mismatch".into()));
    }
    check_distribution(p, p.len())?;
    check_distribution(q, q.len())?;
    let affinity: f64 = p.iter().zip(q).map(|(a, b)| (a * b).sqrt()).sum();
    Ok((1.0 - affinity).max(0.0))
}

/// KL divergence between length-`m` trajectories of the star chains with
/// spoke weights `p_bar_eps` and `p_bar`, both started from their
/// stationary laws. Only the hub row differs, so the divergence is
/// `(1−α)·KL(p̄_ε‖p̄)·(1 + (m−1)α)`.
pub fn kl_trajectory_star(alpha: f64, p_bar: &[f64], p_bar_eps: &[f64], m: usize) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::ConstraintViolation(format!(
            "hub return probability must lie in (0, 1), got {alpha}"
        )));
    }
    if m == 0 {
        return Err(Error::ConstraintViolation("trajectory length must be positive".into()));
    }
    let step = kl_divergence(p_bar_eps, p_bar)?;
    Ok((1.0 - alpha) * step * (1.0 + (m - 1) as f64 * alpha))
}

/// Entrywise geometric means `√(M₀∘M₁)` and `√(μ₀∘μ₁)`.
pub fn geometric_mean_pair(
    m0: &TransitionMatrix,
    mu0: &[f64],
    m1: &TransitionMatrix,
    mu1: &[f64],
) -> Result<(DMatrix<f64>, Vec<f64>)> {
    let d = m0.dim();
    if m1.dim() != d {
        return Err(Error::InvalidMatrix(format!("dimension mismatch: {d} vs {}", m1.dim())));
    }
    check_distribution(mu0, d)?;
    check_distribution(mu1, d)?;
    let g = m0.entries().zip_map(m1.entries(), |a, b| (a * b).sqrt());
    let root = mu0.iter().zip(mu1).map(|(a, b)| (a * b).sqrt()).collect();
    Ok((g, root))
}

/// Squared Hellinger distance between the laws of length-`m` trajectories
/// `(X₁, …, X_m)` of two chains, via `1 − H² = √μ · G^{m−1} · 1`. The
/// empty trajectory (`m = 0`) gives 0.
pub fn hellinger_trajectory(
    m0: &TransitionMatrix,
    mu0: &[f64],
    m1: &TransitionMatrix,
    mu1: &[f64],
    m: usize,
) -> Result<f64> {
    let (g, root) = geometric_mean_pair(m0, mu0, m1, mu1)?;
    if m == 0 {
        return Ok(0.0);
    }
    let mut row = nalgebra::RowDVector::from_vec(root);
    for _ in 1..m {
        row = &row * &g;
    }
    Ok((1.0 - row.sum()).clamp(0.0, 1.0))
}

const PERRON_TOL: f64 = 1e-15;
const PERRON_MAX_ITER: usize = 1_000_000;

/// Perron root and positive left eigenvector (ℓ1-normalized) of a
/// nonnegative primitive matrix.
pub fn perron_left(g: &DMatrix<f64>) -> Result<(f64, Vec<f64>)> {
    let n = g.nrows();
    if n == 0 || g.ncols() != n || g.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(Error::InvalidMatrix("expected a square nonnegative matrix".into()));
    }
    let (rho, mut u) = if (g - g.transpose()).amax() == 0.0 {
        let (values, vectors) = dense_symmetric_eigen(g)?;
        let v: Vec<f64> = vectors.column(0).iter().copied().collect();
        let sign = if v.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
        (values[0], v.into_iter().map(|x| sign * x).collect::<Vec<_>>())
    } else {
        power_left(g)?
    };
    let total: f64 = u.iter().sum();
    u.iter_mut().for_each(|x| *x /= total);
    if let Some(i) = u.iter().position(|&x| !(x > 1e-14)) {
        return Err(Error::InvariantViolation(format!(
            "Perron vector entry {i} is not positive ({})",
            u[i]
        )));
    }
    Ok((rho, u))
}

fn power_left(g: &DMatrix<f64>) -> Result<(f64, Vec<f64>)> {
    let n = g.nrows();
    let mut u = nalgebra::RowDVector::from_element(n, 1.0 / n as f64);
    for _ in 0..PERRON_MAX_ITER {
        let next = &u * g;
        let rho = next.sum();
        if !(rho > 0.0) {
            return Err(Error::InvariantViolation("matrix annihilates the positive cone".into()));
        }
        let next = next / rho;
        let change = (&next - &u).abs().sum();
        u = next;
        if change <= PERRON_TOL {
            return Ok((rho, u.iter().copied().collect()));
        }
    }
    Err(Error::NoConvergence("Perron power iteration"))
}
