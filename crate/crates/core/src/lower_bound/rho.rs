use serde::Serialize;

use crate::error::{Error, Result};

fn check_pair(a0: f64, a1: f64, d: usize) -> Result<()> {
    if d < 4 {
        return Err(Error::ConstraintViolation(format!("need d ≥ 4, got {d}")));
    }
    for a in [a0, a1] {
        if !(a > 0.0 && a < 0.25) {
            return Err(Error::ConstraintViolation(format!(
                "family parameter must lie in (0, 1/4), got {a}"
            )));
        }
    }
    Ok(())
}

fn check_alpha_eps(alpha: f64, eps: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 0.125 && eps > 0.0 && eps < 0.5) {
        return Err(Error::ConstraintViolation(format!(
            "need 0 < α < 1/8 and 0 < ε < 1/2, got α = {alpha}, ε = {eps}"
        )));
    }
    Ok(())
}

fn hub_root(a0: f64, a1: f64) -> f64 {
    ((1.0 - a0) * (1.0 - a1)).sqrt()
}

/// Perron root of the geometric mean of two symmetric-family matrices with
/// parameters `a0` and `a1`.
pub fn rho_closed_form(a0: f64, a1: f64, d: usize) -> Result<f64> {
    check_pair(a0, a1, d)?;
    let dm1 = (d - 1) as f64;
    let r = hub_root(a0, a1);
    let s = ((0.5 - a0 / dm1) * (0.5 - a1 / dm1)).sqrt();
    let disc = (r - s - 0.5).powi(2) + 4.0 * a0 * a1 / dm1;
    Ok(((r + s + 0.5) + disc.sqrt()) / 2.0)
}

/// `(lower, s, upper)` where `s = √((½ − a0/(d−1))(½ − a1/(d−1)))` and
/// the bounds are `½(1 − (a0+a1)/(d−1) − 2((a0−a1)/(d−1))²)` and
/// `½(1 − (a0+a1)/(d−1))`.
pub fn secondary_square_root_bounds(a0: f64, a1: f64, d: usize) -> Result<(f64, f64, f64)> {
    check_pair(a0, a1, d)?;
    let dm1 = (d - 1) as f64;
    let s = ((0.5 - a0 / dm1) * (0.5 - a1 / dm1)).sqrt();
    let upper = 0.5 * (1.0 - (a0 + a1) / dm1);
    let lower = upper - ((a0 - a1) / dm1).powi(2);
    Ok((lower, s, upper))
}

/// Both sides of the lower bound on the square root in the Perron root:
/// `√((r−1)² + (4a0a1 + (a0+a1)(r−1))/(d−1) + a0a1/(d−1)²)` against
/// `(1−r) + [4a0a1/(1−r) − 1.5(a0+a1)]/(d−1)`.
pub fn main_square_root_sides(a0: f64, a1: f64, d: usize) -> Result<(f64, f64)> {
    check_pair(a0, a1, d)?;
    let dm1 = (d - 1) as f64;
    let r = hub_root(a0, a1);
    let lhs = ((r - 1.0).powi(2)
        + (4.0 * a0 * a1 + (a0 + a1) * (r - 1.0)) / dm1
        + a0 * a1 / (dm1 * dm1))
        .sqrt();
    let rhs = (1.0 - r) + (4.0 * a0 * a1 / (1.0 - r) - 1.5 * (a0 + a1)) / dm1;
    Ok((lhs, rhs))
}

/// `(a0 + a1 − 2a0a1/(1−r), 4ε²α)` for `a0 = α(1−ε)`, `a1 = α(1+ε)`.
pub fn micro_sides(alpha: f64, eps: f64) -> Result<(f64, f64)> {
    check_alpha_eps(alpha, eps)?;
    let (a0, a1) = (alpha * (1.0 - eps), alpha * (1.0 + eps));
    let r = hub_root(a0, a1);
    Ok((a0 + a1 - 2.0 * a0 * a1 / (1.0 - r), 4.0 * eps * eps * alpha))
}

/// The chain of lower bounds on the Perron root for the pair
/// `α(1−ε)`, `α(1+ε)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RhoLowerBounds {
    pub rho: f64,
    /// `1 − [(a0+a1) − 2a0a1/(1−r)]/(d−1) − ½((a0−a1)/(d−1))²`.
    pub intermediate: f64,
    /// `1 − 6αε²/(d−1)`.
    pub coarse: f64,
}

pub fn rho_lower_bounds(alpha: f64, eps: f64, d: usize) -> Result<RhoLowerBounds> {
    check_alpha_eps(alpha, eps)?;
    let (a0, a1) = (alpha * (1.0 - eps), alpha * (1.0 + eps));
    let rho = rho_closed_form(a0, a1, d)?;
    let dm1 = (d - 1) as f64;
    let r = hub_root(a0, a1);
    let intermediate =
        1.0 - ((a0 + a1) - 2.0 * a0 * a1 / (1.0 - r)) / dm1 - 0.5 * ((a0 - a1) / dm1).powi(2);
    let coarse = 1.0 - 6.0 * alpha * eps * eps / dm1;
    Ok(RhoLowerBounds { rho, intermediate, coarse })
}
