//! The confidence level `τ_{δ,m} = inf{t > 0 : (1 + ⌈ln(2m/t)⌉₊)·d₊·e^{−t} ≤ δ}`.

use crate::error::{Error, Result};

/// `(1 + ⌈ln(2m/t)⌉₊)·d₊·e^{−t}`, non-increasing and right-continuous in `t`.
pub fn tau_objective(t: f64, m: u64, d_plus: u64) -> f64 {
    let level = (2.0 * m as f64 / t).ln().ceil().max(0.0);
    (1.0 + level) * d_plus as f64 * (-t).exp()
}

/// Smallest `t > 0` with `tau_objective(t, m, d_plus) ≤ δ`.
///
/// The ceiling is constant on the plateaus `[2m·e^{−n}, 2m·e^{−(n−1)})` for
/// `n ≥ 1` and on `[2m, ∞)` for `n = 0`. On plateau `n` the inequality
/// reduces to `t ≥ ln((1 + n)·d₊/δ)`, so the infimum is the smallest feasible
/// plateau candidate.
pub fn tau(delta: f64, m: u64, d_plus: u64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::ConstraintViolation(format!(
            "confidence level must lie in (0, 1), got {delta}"
        )));
    }
    if m == 0 || d_plus < 2 {
        return Err(Error::ConstraintViolation(format!(
            "tau needs m ≥ 1 and d_plus ≥ 2, got m = {m}, d_plus = {d_plus}"
        )));
    }
    let two_m = 2.0 * m as f64;
    let dp = d_plus as f64;
    // Every solution is at least ln(d₊/δ), which bounds the plateaus to scan.
    let t_low = (dp / delta).ln();
    let n_max = ((two_m / t_low).ln().ceil().max(0.0) as u64) + 1;

    let mut best = f64::INFINITY;
    for n in 0..=n_max {
        let (lo, hi) = if n == 0 {
            (two_m, f64::INFINITY)
        } else {
            (two_m * (-(n as f64)).exp(), two_m * (-(n as f64 - 1.0)).exp())
        };
        let candidate = lo.max(((1.0 + n as f64) * dp / delta).ln());
        if candidate < hi && candidate < best {
            best = candidate;
        }
    }
    while tau_objective(best, m, d_plus) > delta {
        best = best.next_up();
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent oracle: bisection on the monotone predicate.
    fn bisect(delta: f64, m: u64, d_plus: u64) -> f64 {
        let (mut lo, mut hi) = (1e-12, 1e4);
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if tau_objective(mid, m, d_plus) <= delta {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    #[test]
    fn matches_bisection_oracle() {
        for &(delta, m, d_plus) in &[
            (0.99, 1, 2),
            (0.9, 1, 2),
            (0.5, 3, 2),
            (0.05, 100, 11),
            (0.01, 1_000_000, 101),
        ] {
            let got = tau(delta, m, d_plus).unwrap();
            let want = bisect(delta, m, d_plus);
            assert!((got - want).abs() <= 1e-10, "{delta} {m} {d_plus}: {got} vs {want}");
        }
    }

    #[test]
    fn monotone_in_delta_and_m() {
        let a = tau(0.2, 1000, 5).unwrap();
        let b = tau(0.05, 1000, 5).unwrap();
        let c = tau(0.05, 1_000_000, 5).unwrap();
        assert!(a <= b && b <= c);
    }

    #[test]
    fn slow_growth_in_m() {
        let small = tau(0.05, 1000, 11).unwrap();
        let large = tau(0.05, 1_000_000, 11).unwrap();
        assert!(large / small <= 2.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(tau(0.0, 10, 3).is_err());
        assert!(tau(1.0, 10, 3).is_err());
        assert!(tau(0.1, 0, 3).is_err());
        assert!(tau(0.1, 10, 1).is_err());
    }

    #[test]
    fn infimum_on_grid() {
        for &delta in &[0.2, 0.05, 0.01] {
            for &m in &[100, 10_000, 1_000_000] {
                for &dp in &[3, 11, 101] {
                    let t = tau(delta, m, dp).unwrap();
                    assert!(tau_objective(t, m, dp) <= delta);
                    assert!(tau_objective(t - 1e-6, m, dp) > delta);
                }
            }
        }
    }
}
