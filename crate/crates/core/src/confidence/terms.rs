use serde::Serialize;

use super::tau::tau;
use crate::chain::{dilated_pseudo_spectral_gap, stationary_distribution};
use crate::error::{Error, Result};
use crate::trajectory::{SkippedCounts, SmoothedEstimates};

/// Universal constant in the perturbation bound for stationary distributions.
pub const PERTURBATION_CONSTANT: f64 = 48.0;

/// `4·τ_{δ/d, n}·√(d/N_min)`, or `+∞` when some state is never visited.
pub fn empirical_linf_bound(counts: &SkippedCounts, delta: f64) -> Result<f64> {
    if counts.n_min == 0 {
        return Ok(f64::INFINITY);
    }
    let d = counts.d as f64;
    let t = tau(delta / d, counts.n_steps.max(1), counts.d as u64 + 1)?;
    Ok(4.0 * t * (d / counts.n_min as f64).sqrt())
}

/// `(C/γ)·ln(2√(2/π⋆))` with `C = 48`.
pub fn perturbation_kappa(gap: f64, pi_min: f64) -> Result<f64> {
    if !(gap > 0.0) {
        return Err(Error::DegenerateGap(gap));
    }
    if !(pi_min > 0.0 && pi_min < 1.0) {
        return Err(Error::ConstraintViolation(format!(
            "minimum stationary probability must lie in (0, 1), got {pi_min}"
        )));
    }
    Ok(PERTURBATION_CONSTANT / gap * (2.0 * (2.0 / pi_min).sqrt()).ln())
}

/// Per-skip terms of the empirical confidence bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntervalTerms {
    pub k: usize,
    pub a_hat: f64,
    pub b_hat: f64,
    pub c_hat: f64,
    pub d_hat: f64,
    pub tau: f64,
    /// The gap estimate reported for this skip.
    pub g_hat: f64,
    /// The gap dividing `b̂`.
    pub gap_divisor: f64,
}

/// Raw inputs of the term formulas, with `τ` already evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct TermInputs<'a> {
    pub k: usize,
    pub d: usize,
    pub n_min: f64,
    pub n_max: f64,
    pub n_steps: f64,
    pub alpha: f64,
    pub tau: f64,
    pub gap_divisor: f64,
    pub pi_hat: &'a [f64],
}

/// Evaluates `d̂`, `â`, `b̂`, `ĉ` from their defining formulas.
pub fn terms_from_inputs(inp: &TermInputs<'_>, g_hat: f64) -> Result<IntervalTerms> {
    if !(inp.gap_divisor > 0.0) {
        return Err(Error::DegenerateGap(inp.gap_divisor));
    }
    let d = inp.d as f64;
    let floor = inp.n_min + d * inp.alpha;
    let ceil = inp.n_max + d * inp.alpha;
    let d_hat = 4.0 * inp.tau * (d / floor).sqrt() + 2.0 * inp.alpha * d / floor;
    let a_hat = d.sqrt() * (ceil / floor) * d_hat;
    let log_term = (2.0 * (2.0 * (inp.n_steps + d * d * inp.alpha) / floor).sqrt()).ln();
    let b_hat = PERTURBATION_CONSTANT / inp.gap_divisor * log_term * d_hat;
    let c_hat = 0.5
        * inp
            .pi_hat
            .iter()
            .map(|&p| {
                let slack = p - b_hat;
                let second = if slack > 0.0 { b_hat / slack } else { f64::INFINITY };
                (b_hat / p).max(second)
            })
            .fold(0.0, f64::max);
    Ok(IntervalTerms {
        k: inp.k,
        a_hat,
        b_hat,
        c_hat,
        d_hat,
        tau: inp.tau,
        g_hat,
        gap_divisor: inp.gap_divisor,
    })
}

/// `γ_ps^𝒮` of the smoothed chain `M̂^{(k,α)}`, scanning powers up to
/// `k_max` (or the automatic rule when `None`).
pub fn smoothed_chain_gap(est: &SmoothedEstimates, k_max: Option<usize>) -> Result<f64> {
    let pi = stationary_distribution(&est.m_hat)?;
    Ok(dilated_pseudo_spectral_gap(&est.m_hat, &pi, k_max)?.value)
}

/// Terms for skip `counts.k` of a run with outer `K = k_outer`; `τ` is taken
/// at level `δ/(4dK)` and horizon `⌊(m−1)/k⌋`.
pub fn interval_terms(
    counts: &SkippedCounts,
    est: &SmoothedEstimates,
    gap_emp: f64,
    g_hat: f64,
    delta: f64,
    k_outer: usize,
) -> Result<IntervalTerms> {
    let d = counts.d;
    let t = tau(
        delta / (4.0 * d as f64 * k_outer as f64),
        counts.n_steps.max(1),
        d as u64 + 1,
    )?;
    terms_from_inputs(
        &TermInputs {
            k: counts.k,
            d,
            n_min: counts.n_min as f64,
            n_max: counts.n_max as f64,
            n_steps: counts.n_steps as f64,
            alpha: est.alpha,
            tau: t,
            gap_divisor: gap_emp,
            pi_hat: &est.pi_hat,
        },
        g_hat,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::smoothed_estimates;
    use approx::assert_abs_diff_eq;

    #[test]
    fn linf_bound_examples() {
        let c = SkippedCounts::from_transitions(1, 2, vec![5, 0, 0, 0]).unwrap();
        assert_eq!(empirical_linf_bound(&c, 0.05).unwrap(), f64::INFINITY);

        let c = SkippedCounts::from_transitions(1, 1, vec![40]).unwrap();
        let t = tau(0.05, 40, 2).unwrap();
        assert_abs_diff_eq!(empirical_linf_bound(&c, 0.05).unwrap(), 4.0 * t / 40f64.sqrt(), epsilon = 1e-12);

        let small = SkippedCounts::from_transitions(1, 2, vec![600, 400, 400, 600]).unwrap();
        let large = SkippedCounts::from_transitions(1, 2, vec![2400, 1600, 1600, 2400]).unwrap();
        let ratio = empirical_linf_bound(&large, 0.05).unwrap() / empirical_linf_bound(&small, 0.05).unwrap();
        assert!(ratio > 0.5 && ratio < 0.6, "{ratio}");
    }

    #[test]
    fn kappa_examples() {
        assert_abs_diff_eq!(
            perturbation_kappa(1.0, 0.5).unwrap(),
            48.0 * 4f64.ln(),
            epsilon = 1e-12
        );
        let a = perturbation_kappa(0.2, 0.1).unwrap();
        let b = perturbation_kappa(0.4, 0.1).unwrap();
        assert_abs_diff_eq!(a, 2.0 * b, epsilon = 1e-12);
        assert!(perturbation_kappa(0.5, 1e-300).unwrap() > perturbation_kappa(0.5, 1e-3).unwrap());
        assert_eq!(perturbation_kappa(0.0, 0.5), Err(Error::DegenerateGap(0.0)));
    }

    #[test]
    fn all_zero_counts_with_smoothing() {
        let c = SkippedCounts::from_transitions(1, 2, vec![0; 4]).unwrap();
        let est = smoothed_estimates(&c, 1.0).unwrap();
        let terms = interval_terms(&c, &est, 1.0, 1.0, 0.05, 1).unwrap();
        assert!(terms.d_hat.is_finite() && terms.a_hat.is_finite() && terms.b_hat.is_finite());
        assert_eq!(terms.c_hat, f64::INFINITY);
    }

    #[test]
    fn b_hat_is_linear_in_d_hat() {
        let pi = [0.5, 0.5];
        let base = TermInputs {
            k: 1,
            d: 2,
            n_min: 100.0,
            n_max: 150.0,
            n_steps: 250.0,
            alpha: 0.0,
            tau: 3.0,
            gap_divisor: 0.5,
            pi_hat: &pi,
        };
        let a = terms_from_inputs(&base, 0.0).unwrap();
        let b = terms_from_inputs(&TermInputs { tau: 6.0, ..base.clone() }, 0.0).unwrap();
        assert_abs_diff_eq!(b.d_hat, 2.0 * a.d_hat, epsilon = 1e-12);
        assert_abs_diff_eq!(b.b_hat, 2.0 * a.b_hat, epsilon = 1e-12);
    }

    #[test]
    fn quadrupled_counts_halve_d_hat() {
        let pi = [0.3, 0.7];
        let base = TermInputs {
            k: 1,
            d: 2,
            n_min: 300.0,
            n_max: 700.0,
            n_steps: 1000.0,
            alpha: 0.5,
            tau: 4.0,
            gap_divisor: 0.3,
            pi_hat: &pi,
        };
        let scaled = TermInputs {
            n_min: 1200.0,
            n_max: 2800.0,
            n_steps: 4000.0,
            alpha: 2.0,
            ..base.clone()
        };
        let a = terms_from_inputs(&base, 0.0).unwrap();
        let b = terms_from_inputs(&scaled, 0.0).unwrap();
        // The √-part halves; the smoothing part is scale-free.
        let sqrt_a = 4.0 * 4.0 * (2.0 / 301.0f64).sqrt();
        let sqrt_b = 4.0 * 4.0 * (2.0 / 1204.0f64).sqrt();
        assert_abs_diff_eq!(sqrt_b, sqrt_a / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(a.d_hat - sqrt_a, b.d_hat - sqrt_b, epsilon = 1e-12);
        assert_abs_diff_eq!(a.a_hat / a.d_hat, b.a_hat / b.d_hat, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_divisor() {
        let c = SkippedCounts::from_transitions(1, 2, vec![3, 1, 1, 3]).unwrap();
        let est = smoothed_estimates(&c, 1.0).unwrap();
        assert_eq!(interval_terms(&c, &est, 0.0, 0.0, 0.05, 1), Err(Error::DegenerateGap(0.0)));
    }
}
