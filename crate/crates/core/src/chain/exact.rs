use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::matrix::{
    normalize_rows, step_power, DilatedMatrix, DilationFlavor, RescaledMatrix,
    StationaryDistribution, TransitionMatrix,
};
use crate::eigen::dense_symmetric_spectrum;
use crate::error::{Error, Result};

const LINEAR_SOLVE_MAX_DIM: usize = 2000;
const STATIONARY_TOL: f64 = 1e-13;
/// Residual accepted after refinement when exact rounding prevents reaching
/// [`STATIONARY_TOL`].
const STATIONARY_ACCEPT: f64 = 1e-12;
const POWER_ITER_CAP: usize = 1_000_000;
const REVERSIBILITY_TOL: f64 = 1e-10;
/// Default cap on `t` for [`mixing_time`].
pub const DEFAULT_TMIX_CAP: usize = 1_000_000;
/// Hard cap on the power sweep when the scan cannot otherwise be bounded.
pub const GAP_SWEEP_HARD_CAP: usize = 100_000;

fn residual_l1(m: &DMatrix<f64>, pi: &[f64]) -> f64 {
    let d = pi.len();
    (0..d)
        .map(|j| {
            let s: f64 = (0..d).map(|i| pi[i] * m[(i, j)]).sum();
            (s - pi[j]).abs()
        })
        .sum()
}

fn left_step(m: &DMatrix<f64>, pi: &[f64]) -> Vec<f64> {
    let d = pi.len();
    let mut next: Vec<f64> = (0..d)
        .map(|j| (0..d).map(|i| pi[i] * m[(i, j)]).sum())
        .collect();
    let total: f64 = next.iter().sum();
    next.iter_mut().for_each(|x| *x /= total);
    next
}

fn solve_linear(m: &DMatrix<f64>) -> Option<Vec<f64>> {
    let d = m.nrows();
    let mut a = m.transpose() - DMatrix::identity(d, d);
    for j in 0..d {
        a[(d - 1, j)] = 1.0;
    }
    let mut b = DVector::zeros(d);
    b[d - 1] = 1.0;
    let x = a.lu().solve(&b)?;
    let clipped: Vec<f64> = x.iter().map(|v| v.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    (total > 0.0).then(|| clipped.iter().map(|v| v / total).collect())
}

/// The unique stationary distribution of an ergodic chain.
pub fn stationary_distribution(m: &TransitionMatrix) -> Result<StationaryDistribution> {
    if !m.is_ergodic() {
        return Err(Error::NonErgodic);
    }
    let d = m.dim();
    let entries = m.entries();
    let mut pi = if d <= LINEAR_SOLVE_MAX_DIM {
        solve_linear(entries).unwrap_or_else(|| vec![1.0 / d as f64; d])
    } else {
        vec![1.0 / d as f64; d]
    };
    let budget = if d <= LINEAR_SOLVE_MAX_DIM { 10_000 } else { POWER_ITER_CAP };
    let mut res = residual_l1(entries, &pi);
    let mut best = (res, pi.clone());
    let mut iter = 0;
    while res > STATIONARY_TOL && iter < budget {
        pi = left_step(entries, &pi);
        res = residual_l1(entries, &pi);
        if res < best.0 {
            best = (res, pi.clone());
        }
        iter += 1;
    }
    let (res, pi) = best;
    if res > STATIONARY_ACCEPT || pi.iter().any(|&p| p <= 0.0) {
        return Err(Error::NoConvergence("stationary distribution"));
    }
    StationaryDistribution::new(pi)
}

fn check_pair(m: &TransitionMatrix, pi: &StationaryDistribution) -> Result<()> {
    if m.dim() != pi.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            got: pi.dim(),
        });
    }
    pi.require_positive()
}

/// `M*(i, j) = π_j M(j, i) / π_i`.
pub fn time_reversal(m: &TransitionMatrix, pi: &StationaryDistribution) -> Result<TransitionMatrix> {
    check_pair(m, pi)?;
    let p = pi.probs();
    let d = m.dim();
    let mut rev = DMatrix::from_fn(d, d, |i, j| (p[j] * m.get(j, i) / p[i]).min(1.0));
    normalize_rows(&mut rev);
    TransitionMatrix::new(rev)
}

fn rescale(m: &DMatrix<f64>, pi: &[f64]) -> DMatrix<f64> {
    let d = pi.len();
    let root: Vec<f64> = pi.iter().map(|p| p.sqrt()).collect();
    DMatrix::from_fn(d, d, |i, j| root[i] / root[j] * m[(i, j)])
}

/// `L = D_π^{1/2} M D_π^{−1/2}`.
pub fn rescaled_matrix(m: &TransitionMatrix, pi: &StationaryDistribution) -> Result<RescaledMatrix> {
    check_pair(m, pi)?;
    Ok(RescaledMatrix {
        entries: rescale(m.entries(), pi.probs()),
    })
}

fn block_dilation(top: &DMatrix<f64>, bottom: &DMatrix<f64>) -> DMatrix<f64> {
    let d = top.nrows();
    let mut s = DMatrix::zeros(2 * d, 2 * d);
    s.view_mut((0, d), (d, d)).copy_from(top);
    s.view_mut((d, 0), (d, d)).copy_from(bottom);
    s
}

/// `𝒮_π(M) = [[0, M], [M*, 0]]`.
pub fn dilate(m: &TransitionMatrix, pi: &StationaryDistribution) -> Result<DilatedMatrix> {
    let rev = time_reversal(m, pi)?;
    Ok(DilatedMatrix {
        entries: block_dilation(m.entries(), rev.entries()),
        flavor: DilationFlavor::Stochastic,
    })
}

/// `𝒮(A) = [[0, A], [Aᵀ, 0]]` for a square `A`.
pub fn dilate_sym(a: &DMatrix<f64>) -> Result<DilatedMatrix> {
    if !a.is_square() {
        return Err(Error::InvalidMatrix(format!(
            "dilation block must be square, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(DilatedMatrix {
        entries: block_dilation(a, &a.transpose()),
        flavor: DilationFlavor::Symmetric,
    })
}

/// Largest deviation from detailed balance, `‖D_π M − Mᵀ D_π‖∞`, relative to
/// the largest entry of `D_π M`.
pub fn reversibility_residual(m: &TransitionMatrix, pi: &StationaryDistribution) -> f64 {
    let p = pi.probs();
    let d = m.dim();
    let flow = DMatrix::from_fn(d, d, |i, j| p[i] * m.get(i, j));
    let diff = &flow - flow.transpose();
    let worst = diff
        .row_iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    worst / flow.amax().max(f64::MIN_POSITIVE)
}

pub fn is_reversible(m: &TransitionMatrix, pi: &StationaryDistribution) -> bool {
    reversibility_residual(m, pi) <= REVERSIBILITY_TOL
}

/// `(γ, γ*)` of a reversible chain.
pub fn spectral_gaps(m: &TransitionMatrix, pi: &StationaryDistribution) -> Result<(f64, f64)> {
    check_pair(m, pi)?;
    let residual = reversibility_residual(m, pi);
    if residual > REVERSIBILITY_TOL {
        return Err(Error::NotReversible { residual });
    }
    let l = rescale(m.entries(), pi.probs());
    let sym = (&l + l.transpose()) * 0.5;
    let eig = dense_symmetric_spectrum(&sym)?;
    if eig.len() < 2 {
        return Ok((1.0, 1.0));
    }
    let second = eig[1];
    let last = eig[eig.len() - 1];
    Ok((1.0 - second, 1.0 - second.max(last.abs())))
}

/// `γ((M*)^k M^k)` given `M^k`, evaluated as `1 − λ₂((L^k)ᵀ L^k)`.
fn multiplicative_gap_of_power(mk: &DMatrix<f64>, pi: &[f64]) -> Result<f64> {
    let lk = rescale(mk, pi);
    let gram = lk.transpose() * &lk;
    let eig = dense_symmetric_spectrum(&((&gram + gram.transpose()) * 0.5))?;
    Ok(eig.get(1).map_or(1.0, |l2| 1.0 - l2))
}

/// `γ(𝒮_π(M^k))` given `M^k`, evaluated as `1 − σ₂(L^k)`.
fn dilated_gap_of_power(mk: &DMatrix<f64>, pi: &[f64]) -> Result<f64> {
    let lk = rescale(mk, pi);
    let eig = dense_symmetric_spectrum(&block_dilation(&lk, &lk.transpose()))?;
    Ok(eig.get(1).map_or(1.0, |l2| 1.0 - l2))
}

/// `γ((M*)^k M^k)` for a single power `k ≥ 1`.
pub fn multiplicative_gap(m: &TransitionMatrix, pi: &StationaryDistribution, k: usize) -> Result<f64> {
    check_pair(m, pi)?;
    multiplicative_gap_of_power(m.power(k).entries(), pi.probs())
}

/// `γ(𝒮_π(M^k))` for a single power `k ≥ 1`.
pub fn dilated_gap(m: &TransitionMatrix, pi: &StationaryDistribution, k: usize) -> Result<f64> {
    check_pair(m, pi)?;
    dilated_gap_of_power(m.power(k).entries(), pi.probs())
}

/// Result of maximizing `g(k)/k` over powers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapSweep {
    pub value: f64,
    pub k: usize,
}

fn sweep<F>(m: &TransitionMatrix, pi: &StationaryDistribution, k_max: Option<usize>, gap: F) -> Result<GapSweep>
where
    F: Fn(&DMatrix<f64>, &[f64]) -> Result<f64>,
{
    if !m.is_ergodic() {
        return Err(Error::NonErgodic);
    }
    check_pair(m, pi)?;
    let p = pi.probs();
    let cap = match k_max {
        Some(k) => k.max(1),
        None => {
            let g1 = dilated_gap_of_power(m.entries(), p)?;
            if g1 > 0.0 {
                (10.0 * (1.0 / g1).ceil()).min(GAP_SWEEP_HARD_CAP as f64) as usize
            } else {
                GAP_SWEEP_HARD_CAP
            }
        }
    };
    let mut best = GapSweep { value: 0.0, k: 1 };
    let mut current: Option<DMatrix<f64>> = None;
    for k in 1..=cap {
        if best.value > 0.0 && 1.0 / k as f64 <= best.value {
            break;
        }
        let mk = match current.take() {
            None => m.entries().clone(),
            Some(prev) => step_power(&prev, m.entries()),
        };
        let ratio = gap(&mk, p)?.max(0.0) / k as f64;
        if ratio > best.value {
            best = GapSweep { value: ratio, k };
        }
        current = Some(mk);
    }
    Ok(best)
}

/// `γ_ps = max_k γ((M*)^k M^k)/k` and the smallest maximizing `k`.
/// With `k_max = None` the scan stops once `1/k` cannot beat the current
/// best, and is capped at `10·⌈1/γ(𝒮_π(M))⌉`.
pub fn pseudo_spectral_gap(
    m: &TransitionMatrix,
    pi: &StationaryDistribution,
    k_max: Option<usize>,
) -> Result<GapSweep> {
    sweep(m, pi, k_max, multiplicative_gap_of_power)
}

/// `γ_ps^𝒮 = max_k γ(𝒮_π(M^k))/k`, with the same scan rule as
/// [`pseudo_spectral_gap`].
pub fn dilated_pseudo_spectral_gap(
    m: &TransitionMatrix,
    pi: &StationaryDistribution,
    k_max: Option<usize>,
) -> Result<GapSweep> {
    sweep(m, pi, k_max, dilated_gap_of_power)
}

/// Total-variation distance `½‖μ − ν‖₁`.
pub fn total_variation(mu: &[f64], nu: &[f64]) -> f64 {
    0.5 * mu.iter().zip(nu).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Smallest `t` with `max_i TV(e_i M^t, π) ≤ ξ`.
pub fn mixing_time(m: &TransitionMatrix, xi: f64) -> Result<usize> {
    mixing_time_capped(m, xi, DEFAULT_TMIX_CAP)
}

pub fn mixing_time_capped(m: &TransitionMatrix, xi: f64, cap: usize) -> Result<usize> {
    if !(xi > 0.0 && xi < 0.5) {
        return Err(Error::ConstraintViolation(format!(
            "precision must lie in (0, 1/2), got {xi}"
        )));
    }
    let pi = stationary_distribution(m)?;
    let p = pi.probs();
    let mut mt = m.entries().clone();
    for t in 1..=cap {
        let worst = mt
            .row_iter()
            .map(|r| {
                let row: Vec<f64> = r.iter().copied().collect();
                total_variation(&row, p)
            })
            .fold(0.0, f64::max);
        if worst <= xi {
            return Ok(t);
        }
        mt = step_power(&mt, m.entries());
    }
    Err(Error::Overflow { cap })
}

/// `β(π) = max_{i,j} π_i/π_j`.
pub fn balance(pi: &StationaryDistribution) -> Result<f64> {
    pi.require_positive()?;
    let max = pi.probs().iter().copied().fold(0.0, f64::max);
    Ok(max / pi.pi_min())
}

/// Exact spectral and mixing quantities of a known chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralSummary {
    pub gamma: Option<f64>,
    pub gamma_star: Option<f64>,
    pub gamma_ps: f64,
    pub k_ps: usize,
    pub gamma_ps_dilated: f64,
    pub t_mix: usize,
    pub balance_beta: f64,
    pub pi_min: f64,
    pub reversible: bool,
}

/// Computes every field of [`SpectralSummary`]; `t_mix` is taken at precision `xi`.
pub fn spectral_summary(m: &TransitionMatrix, k_max: Option<usize>, xi: f64) -> Result<SpectralSummary> {
    let pi = stationary_distribution(m)?;
    let reversible = is_reversible(m, &pi);
    let (gamma, gamma_star) = if reversible {
        let (g, gs) = spectral_gaps(m, &pi)?;
        (Some(g), Some(gs))
    } else {
        (None, None)
    };
    let ps = pseudo_spectral_gap(m, &pi, k_max)?;
    let dil = dilated_pseudo_spectral_gap(m, &pi, k_max)?;
    Ok(SpectralSummary {
        gamma,
        gamma_star,
        gamma_ps: ps.value,
        k_ps: ps.k,
        gamma_ps_dilated: dil.value,
        t_mix: mixing_time(m, xi)?,
        balance_beta: balance(&pi)?,
        pi_min: pi.pi_min(),
        reversible,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundMode {
    Reversible,
    Pseudo,
    Dilated,
}

/// Mixing-time sandwich at precision `1/4` implied by the gap selected by `mode`.
pub fn tmix_bounds(summary: &SpectralSummary, pi_min: f64, mode: BoundMode) -> Result<(f64, f64)> {
    let ln2 = std::f64::consts::LN_2;
    let log_term = (1.0 / pi_min).ln() + 2.0 * ln2 + 1.0;
    match mode {
        BoundMode::Reversible => {
            let g = summary
                .gamma_star
                .ok_or(Error::MissingGap("absolute spectral gap"))?;
            Ok(((1.0 / g - 1.0) * ln2, (4.0 / pi_min).ln() / g))
        }
        BoundMode::Pseudo => {
            let g = summary.gamma_ps;
            Ok((1.0 / (2.0 * g), log_term / g))
        }
        BoundMode::Dilated => {
            let g = summary.gamma_ps_dilated;
            Ok((1.0 / (4.0 * g), log_term / g))
        }
    }
}
