use serde::Serialize;
use serde_json::{json, Value};

use super::tau::tau;
use super::terms::{interval_terms, smoothed_chain_gap, terms_from_inputs, IntervalTerms, TermInputs};
use crate::error::{Error, Result};
use crate::estimators::{estimate_asg_from_counts, estimate_pssg_from_counts, GapRoute};
use crate::trajectory::{skipped_counts, smoothed_estimates, SkippedCounts, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    PssgDilated,
    Pimin,
    AsgReversible,
}

/// Ranges implied for the pseudo-spectral gap and the mixing time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Implied {
    /// `[γ̂^𝒮, 2γ̂^𝒮]`.
    pub gamma_ps_point: (f64, f64),
    /// `[lower, 2·upper]` from the interval on `γ^𝒮`.
    pub gamma_ps_interval: (f64, f64),
    /// Mixing-time sandwich at the point estimates.
    pub tmix_point: (f64, f64),
    /// Mixing-time sandwich at the interval endpoints.
    pub tmix_interval: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfidenceReport {
    pub target: Target,
    pub point: f64,
    pub half_width: f64,
    pub lower: f64,
    pub upper: f64,
    pub delta: f64,
    pub alpha: f64,
    pub k_outer: usize,
    pub per_k: Vec<IntervalTerms>,
    /// Which gap divides `b̂`.
    pub gap_divisor: &'static str,
    pub implied: Option<Implied>,
}

impl ConfidenceReport {
    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    /// Whether the interval degenerated to its full clamping range.
    pub fn is_vacuous(&self) -> bool {
        self.half_width.is_infinite()
    }

    pub fn to_json(&self) -> Value {
        let per_k: Vec<Value> = self
            .per_k
            .iter()
            .map(|t| {
                json!({
                    "k": t.k,
                    "a_hat": num(t.a_hat),
                    "b_hat": num(t.b_hat),
                    "c_hat": num(t.c_hat),
                    "d_hat": num(t.d_hat),
                    "tau": num(t.tau),
                    "g_hat": num(t.g_hat),
                    "gap_divisor": num(t.gap_divisor),
                })
            })
            .collect();
        let mut out = json!({
            "target": self.target,
            "point": num(self.point),
            "half_width": num(self.half_width),
            "lower": num(self.lower),
            "upper": num(self.upper),
            "delta": num(self.delta),
            "alpha": num(self.alpha),
            "K": self.k_outer,
            "gap_divisor": self.gap_divisor,
            "per_k": per_k,
        });
        if let Some(imp) = &self.implied {
            out["implied"] = json!({
                "gamma_ps_point": pair(imp.gamma_ps_point),
                "gamma_ps_interval": pair(imp.gamma_ps_interval),
                "tmix_point": pair(imp.tmix_point),
                "tmix_interval": pair(imp.tmix_interval),
            });
        }
        out
    }
}

/// JSON number, with infinities written as the strings `"inf"` / `"-inf"`.
pub fn num(x: f64) -> Value {
    if x == f64::INFINITY {
        Value::from("inf")
    } else if x == f64::NEG_INFINITY {
        Value::from("-inf")
    } else {
        json!(x)
    }
}

fn pair((a, b): (f64, f64)) -> Value {
    json!([num(a), num(b)])
}

fn clamp_interval(point: f64, half: f64, floor: f64, ceil: f64) -> (f64, f64) {
    if half.is_infinite() {
        return (floor, ceil);
    }
    ((point - half).max(floor), (point + half).min(ceil))
}

const DIVISOR_DILATED: &str = "dilated pseudo-spectral gap of the smoothed chain";
const DIVISOR_REVERSIBLE: &str = "absolute spectral gap of the additive reversiblization";

fn validate(alpha: f64, delta: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::ConstraintViolation(format!(
            "smoothing must be positive, got {alpha}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::ConstraintViolation(format!(
            "confidence level must lie in (0, 1), got {delta}"
        )));
    }
    Ok(())
}

/// Mixing-time sandwich implied by a dilated gap and a minimum stationary
/// probability: `1/(4γ) ≤ t_mix ≤ (ln(1/π⋆) + 2 ln 2 + 1)/γ`.
pub fn dilated_tmix_sandwich(gap: f64, pi_min: f64) -> (f64, f64) {
    let numer = (1.0 / pi_min).ln() + 2.0 * std::f64::consts::LN_2 + 1.0;
    let lower = if gap > 0.0 { 1.0 / (4.0 * gap) } else { f64::INFINITY };
    let upper = if gap > 0.0 && pi_min > 0.0 { numer / gap } else { f64::INFINITY };
    (lower, upper)
}

/// Interval for the dilated pseudo-spectral gap from a trajectory.
pub fn pssg_interval(traj: &Trajectory, k_outer: usize, alpha: f64, delta: f64) -> Result<ConfidenceReport> {
    let m = traj.len();
    if k_outer == 0 || m < 2 || k_outer > m - 1 {
        return Err(Error::SkipTooLarge { k: k_outer, m });
    }
    let counts = (1..=k_outer)
        .map(|k| skipped_counts(traj, k))
        .collect::<Result<Vec<_>>>()?;
    pssg_interval_from_counts(&counts, alpha, delta)
}

/// Same as [`pssg_interval`] from counts for `k = 1..=K`, in order.
pub fn pssg_interval_from_counts(
    counts: &[SkippedCounts],
    alpha: f64,
    delta: f64,
) -> Result<ConfidenceReport> {
    validate(alpha, delta)?;
    let estimate = estimate_pssg_from_counts(counts, alpha, GapRoute::Auto)?;
    let k_outer = counts.len();
    let mut per_k = Vec::with_capacity(k_outer);
    let mut worst: f64 = 0.0;
    for (c, row) in counts.iter().zip(&estimate.per_k) {
        let est = smoothed_estimates(c, alpha)?;
        let divisor = smoothed_chain_gap(&est, Some(k_outer))?;
        let terms = interval_terms(c, &est, divisor, row.g_hat, delta, k_outer)?;
        let spread = (terms.a_hat + 2.0 * terms.c_hat + terms.c_hat * terms.c_hat) / c.k as f64;
        worst = worst.max(spread);
        per_k.push(terms);
    }
    let half_width = 1.0 / k_outer as f64 + worst;
    let point = estimate.value;
    let (lower, upper) = clamp_interval(point, half_width, 0.0, 1.0);

    let pimin = pimin_report(&counts[0], alpha, delta, k_outer, Some(k_outer))?;
    let implied = Implied {
        gamma_ps_point: (point, 2.0 * point),
        gamma_ps_interval: (lower, (2.0 * upper).min(1.0)),
        tmix_point: dilated_tmix_sandwich(point, pimin.point),
        tmix_interval: (
            dilated_tmix_sandwich(upper, pimin.upper).0,
            dilated_tmix_sandwich(lower, pimin.lower).1,
        ),
    };
    Ok(ConfidenceReport {
        target: Target::PssgDilated,
        point,
        half_width,
        lower,
        upper,
        delta,
        alpha,
        k_outer,
        per_k,
        gap_divisor: DIVISOR_DILATED,
        implied: Some(implied),
    })
}

fn pimin_report(
    counts: &SkippedCounts,
    alpha: f64,
    delta: f64,
    k_outer: usize,
    divisor_k_max: Option<usize>,
) -> Result<ConfidenceReport> {
    let est = smoothed_estimates(counts, alpha)?;
    let divisor = smoothed_chain_gap(&est, divisor_k_max)?;
    let terms = interval_terms(counts, &est, divisor, divisor, delta, k_outer)?;
    let point = est.pi_min();
    let d = counts.d as f64;
    let floor = d * alpha / (counts.n_steps as f64 + d * d * alpha);
    let (lower, upper) = clamp_interval(point, terms.b_hat, floor, 1.0);
    Ok(ConfidenceReport {
        target: Target::Pimin,
        point,
        half_width: terms.b_hat,
        lower,
        upper,
        delta,
        alpha,
        k_outer,
        per_k: vec![terms],
        gap_divisor: DIVISOR_DILATED,
        implied: None,
    })
}

/// Interval `π̂⋆ ± b̂^{(1,α)}` for the minimum stationary probability.
pub fn pimin_interval(traj: &Trajectory, alpha: f64, delta: f64) -> Result<ConfidenceReport> {
    validate(alpha, delta)?;
    pimin_report(&skipped_counts(traj, 1)?, alpha, delta, 1, None)
}

/// Same as [`pimin_interval`] from one-step counts, as part of a run with
/// outer `K = k_outer` (which enters `τ` and caps the divisor's scan).
pub fn pimin_interval_from_counts(
    counts: &SkippedCounts,
    alpha: f64,
    delta: f64,
    k_outer: usize,
) -> Result<ConfidenceReport> {
    validate(alpha, delta)?;
    if counts.k != 1 {
        return Err(Error::InvariantViolation(format!(
            "minimum stationary probability needs one-step counts, got skip {}",
            counts.k
        )));
    }
    let cap = (k_outer > 1).then_some(k_outer);
    pimin_report(counts, alpha, delta, k_outer.max(1), cap)
}

/// Interval for the absolute spectral gap of a reversible chain.
pub fn reversible_intervals(traj: &Trajectory, alpha: f64, delta: f64) -> Result<ConfidenceReport> {
    reversible_intervals_from_counts(&skipped_counts(traj, 1)?, alpha, delta)
}

pub fn reversible_intervals_from_counts(
    counts: &SkippedCounts,
    alpha: f64,
    delta: f64,
) -> Result<ConfidenceReport> {
    validate(alpha, delta)?;
    let point = estimate_asg_from_counts(counts, alpha)?;
    let est = smoothed_estimates(counts, alpha)?;
    let d = counts.d;
    let t = tau(delta / d as f64, counts.n_steps.max(1), d as u64 + 1)?;
    let terms = terms_from_inputs(
        &TermInputs {
            k: 1,
            d,
            n_min: counts.n_min as f64,
            n_max: counts.n_max as f64,
            n_steps: counts.n_steps as f64,
            alpha,
            tau: t,
            gap_divisor: point,
            pi_hat: &est.pi_hat,
        },
        point,
    )?;
    let half_width = terms.a_hat + 2.0 * terms.c_hat + terms.c_hat * terms.c_hat;
    let (lower, upper) = clamp_interval(point, half_width, 0.0, 1.0);
    Ok(ConfidenceReport {
        target: Target::AsgReversible,
        point,
        half_width,
        lower,
        upper,
        delta,
        alpha,
        k_outer: 1,
        per_k: vec![terms],
        gap_divisor: DIVISOR_REVERSIBLE,
        implied: None,
    })
}
