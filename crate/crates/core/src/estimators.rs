//! Point estimators from a single trajectory: the minimum stationary
//! probability, the dilated pseudo-spectral gap, and the absolute spectral
//! gap of a reversible chain.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::eigen::{
    dense_nth_magnitude, dense_symmetric_spectrum, lanczos_nth_magnitude, lanczos_third_magnitude,
    spectral_radius_deflated, DenseOperator, DilationOperator, LanczosOptions, DENSE_CUTOFF,
};
use crate::error::{Error, Result};
use crate::trajectory::{skipped_counts, smoothed_estimates, SkippedCounts, Trajectory};

/// How `|λ₃|` of the dilated rescaled matrix is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GapRoute {
    /// Dense when `2d ≤ DENSE_CUTOFF`, Lanczos otherwise.
    #[default]
    Auto,
    Dense,
    /// Lanczos on the undeflated dilation, third largest magnitude.
    Lanczos,
    /// Lanczos on the dilation with the `±1` pair built from `π̂` removed.
    Deflated,
}

/// `π̂⋆ = (N_min + dα)/(m − 1 + d²α)` from the one-step counts.
pub fn estimate_pimin(traj: &Trajectory, alpha: f64) -> Result<f64> {
    let counts = skipped_counts(traj, 1)?;
    Ok(smoothed_estimates(&counts, alpha)?.pi_min())
}

fn require_positive_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::ConstraintViolation(format!(
            "smoothing must be positive, got {alpha}"
        )))
    }
}

fn dilation(block: &DMatrix<f64>) -> DMatrix<f64> {
    let d = block.nrows();
    let mut s = DMatrix::zeros(2 * d, 2 * d);
    s.view_mut((0, d), (d, d)).copy_from(block);
    s.view_mut((d, 0), (d, d)).copy_from(&block.transpose());
    s
}

/// Third largest eigenvalue magnitude of `[[0, L], [Lᵀ, 0]]`.
pub fn third_magnitude(l: &DMatrix<f64>, pi: &[f64], route: GapRoute) -> Result<f64> {
    let d = l.nrows();
    let route = match route {
        GapRoute::Auto if 2 * d <= DENSE_CUTOFF => GapRoute::Dense,
        GapRoute::Auto => GapRoute::Lanczos,
        r => r,
    };
    match route {
        GapRoute::Dense => dense_nth_magnitude(&dilation(l), 3),
        GapRoute::Lanczos => {
            let op = DilationOperator::new(l.clone())?;
            lanczos_third_magnitude(&op, LanczosOptions::default())
        }
        GapRoute::Deflated => spectral_radius_deflated(l, pi),
        GapRoute::Auto => unreachable!(),
    }
}

/// `1 − |λ₃|` of the dilation of `L̂^{(k,α)}`, clamped to `[0, 1]`.
pub fn spec_gap_dil_rev(counts: &SkippedCounts, alpha: f64) -> Result<f64> {
    spec_gap_dil_rev_with(counts, alpha, GapRoute::Auto)
}

pub fn spec_gap_dil_rev_with(counts: &SkippedCounts, alpha: f64, route: GapRoute) -> Result<f64> {
    require_positive_alpha(alpha)?;
    let est = smoothed_estimates(counts, alpha)?;
    let lambda = third_magnitude(&est.l_hat, &est.pi_hat, route)?;
    Ok((1.0 - lambda).clamp(0.0, 1.0))
}

/// The rescaled block `D T D` assembled the way the reference procedure
/// does: visit weights start at `dα`, transition weights at `α`, and the
/// `k`-skipped sequence is scanned over its left endpoints.
pub fn reference_block(traj: &Trajectory, k: usize, alpha: f64) -> Result<DMatrix<f64>> {
    let m = traj.len();
    if k == 0 || m < 2 || k > m - 1 {
        return Err(Error::SkipTooLarge { k, m });
    }
    let d = traj.dim();
    let skipped: Vec<usize> = traj.states().iter().step_by(k).copied().collect();
    let n = (m - 1) / k + 1;
    let mut visits = vec![d as f64 * alpha; d];
    let mut trans = DMatrix::from_element(d, d, alpha);
    for t in 0..n - 1 {
        visits[skipped[t]] += 1.0;
        trans[(skipped[t], skipped[t + 1])] += 1.0;
    }
    let scale: Vec<f64> = visits.iter().map(|v| v.powf(-0.5)).collect();
    Ok(DMatrix::from_fn(d, d, |i, j| scale[i] * trans[(i, j)] * scale[j]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerSkip {
    pub k: usize,
    pub g_hat: f64,
    pub ratio: f64,
}

/// Output of the dilated pseudo-spectral gap estimator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PssgEstimate {
    pub value: f64,
    pub per_k: Vec<PerSkip>,
    pub k_used: usize,
    pub alpha: f64,
    pub argmax_k: usize,
}

/// `max_{k ≤ K} ĝ_k / k` where `ĝ_k` is [`spec_gap_dil_rev`] on the
/// `k`-skipped counts. Ties go to the smallest `k`.
pub fn estimate_pssg_dilated(traj: &Trajectory, k_max: usize, alpha: f64) -> Result<PssgEstimate> {
    let m = traj.len();
    if k_max == 0 || m < 2 || k_max > m - 1 {
        return Err(Error::SkipTooLarge { k: k_max, m });
    }
    let counts = (1..=k_max)
        .map(|k| skipped_counts(traj, k))
        .collect::<Result<Vec<_>>>()?;
    estimate_pssg_from_counts(&counts, alpha, GapRoute::Auto)
}

/// Same as [`estimate_pssg_dilated`] from precomputed counts for
/// `k = 1..=K`, in order.
pub fn estimate_pssg_from_counts(
    counts: &[SkippedCounts],
    alpha: f64,
    route: GapRoute,
) -> Result<PssgEstimate> {
    require_positive_alpha(alpha)?;
    if counts.is_empty() {
        return Err(Error::SkipTooLarge { k: 0, m: 0 });
    }
    let mut per_k = Vec::with_capacity(counts.len());
    let mut best = (0.0, 1);
    for (idx, c) in counts.iter().enumerate() {
        let k = idx + 1;
        if c.k != k {
            return Err(Error::InvariantViolation(format!(
                "counts at position {idx} are for skip {}, expected {k}",
                c.k
            )));
        }
        let g_hat = spec_gap_dil_rev_with(c, alpha, route)?;
        let ratio = g_hat / k as f64;
        if ratio > best.0 {
            best = (ratio, k);
        }
        per_k.push(PerSkip { k, g_hat, ratio });
    }
    Ok(PssgEstimate {
        value: best.0,
        per_k,
        k_used: counts.len(),
        alpha,
        argmax_k: best.1,
    })
}

/// `K = ⌈(N_min/ε)^{1/3}⌉` clamped to `[1, m − 1]`, from the one-step counts.
pub fn adaptive_k(traj: &Trajectory, eps: f64) -> Result<usize> {
    let counts = skipped_counts(traj, 1)?;
    Ok(adaptive_k_from(counts.n_min, eps, traj.len()))
}

pub fn adaptive_k_from(n_min: u64, eps: f64, m: usize) -> usize {
    let k = (n_min as f64 / eps).cbrt().ceil();
    let upper = m.saturating_sub(1).max(1);
    if k.is_finite() {
        (k as usize).clamp(1, upper)
    } else {
        upper
    }
}

/// Symmetric form `(N_ij + N_ji + 2α)/(2√((N_i + dα)(N_j + dα)))` of the
/// additive reversiblization of the smoothed one-step estimate.
pub fn reversiblized_symmetric(counts: &SkippedCounts, alpha: f64) -> Result<DMatrix<f64>> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::ConstraintViolation(format!(
            "smoothing must be finite and nonnegative, got {alpha}"
        )));
    }
    let d = counts.d;
    if alpha == 0.0 {
        if let Some(i) = counts.n_visits.iter().position(|&n| n == 0) {
            return Err(Error::ZeroCountUnsmoothed(i));
        }
    }
    let mass: Vec<f64> = counts
        .n_visits
        .iter()
        .map(|&n| n as f64 + d as f64 * alpha)
        .collect();
    Ok(DMatrix::from_fn(d, d, |i, j| {
        (counts.trans(i, j) as f64 + counts.trans(j, i) as f64 + 2.0 * alpha)
            / (2.0 * (mass[i] * mass[j]).sqrt())
    }))
}

/// Absolute spectral gap of a symmetric matrix whose top eigenvalue is
/// (close to) one: `1 − max(λ₂, |λ_d|)`, clamped to `[0, 1]`.
pub(crate) fn absolute_gap_symmetric(s: &DMatrix<f64>) -> Result<f64> {
    let d = s.nrows();
    if d < 2 {
        return Ok(1.0);
    }
    let second = if d <= 4 * DENSE_CUTOFF {
        let eig = dense_symmetric_spectrum(s)?;
        eig[1].max(eig[d - 1].abs())
    } else {
        let op = DenseOperator::new(s.clone())?;
        lanczos_nth_magnitude(&op, &[], 2, LanczosOptions::default())?
    };
    Ok((1.0 - second).clamp(0.0, 1.0))
}

/// `γ̂*` of `½(M̂ + M̂*)` built from the one-step counts.
pub fn estimate_asg_reversible(traj: &Trajectory, alpha: f64) -> Result<f64> {
    let counts = skipped_counts(traj, 1)?;
    estimate_asg_from_counts(&counts, alpha)
}

pub fn estimate_asg_from_counts(counts: &SkippedCounts, alpha: f64) -> Result<f64> {
    absolute_gap_symmetric(&reversiblized_symmetric(counts, alpha)?)
}
