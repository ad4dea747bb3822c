use nalgebra::DMatrix;

use crate::chain::TransitionMatrix;
use crate::eigen::dense_symmetric_spectrum;
use crate::error::{Error, Result};
use crate::trajectory::check_distribution;

const SPECTRUM_TOL: f64 = 1e-9;

/// Hub state 0 connected to `d` spokes; each spoke returns to the hub with
/// probability `α` and otherwise stays put.
#[derive(Debug, Clone, PartialEq)]
pub struct StarChain {
    pub alpha: f64,
    pub spoke_dist: Vec<f64>,
    pub matrix: TransitionMatrix,
}

impl StarChain {
    /// `(α, (1−α)p₁, …, (1−α)p_d)`.
    pub fn stationary(&self) -> Vec<f64> {
        std::iter::once(self.alpha)
            .chain(self.spoke_dist.iter().map(|p| (1.0 - self.alpha) * p))
            .collect()
    }

    /// `{1, 1−α (d−1 times), 0}`, descending.
    pub fn spectrum(&self) -> Vec<f64> {
        let d = self.spoke_dist.len();
        let mut s = vec![1.0];
        s.extend(std::iter::repeat_n(1.0 - self.alpha, d - 1));
        s.push(0.0);
        s
    }
}

fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

fn real_spectrum(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let eig = m.clone().complex_eigenvalues();
    if let Some(z) = eig.iter().find(|z| z.im.abs() > SPECTRUM_TOL) {
        return Err(Error::InvariantViolation(format!(
            "expected a real spectrum, found {z}"
        )));
    }
    Ok(sorted_desc(eig.iter().map(|z| z.re).collect()))
}

fn check_close(label: &str, got: &[f64], want: &[f64]) -> Result<()> {
    let worst = got
        .iter()
        .zip(want)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if got.len() != want.len() || worst > SPECTRUM_TOL {
        return Err(Error::InvariantViolation(format!(
            "{label}: deviation {worst:e} from the closed form"
        )));
    }
    Ok(())
}

/// Spectrum of a reversible chain through the symmetric rescaled form when
/// `π > 0`, else through the general real eigenvalues.
fn reversible_spectrum(m: &DMatrix<f64>, pi: &[f64]) -> Result<Vec<f64>> {
    if pi.iter().all(|&p| p > 0.0) {
        let root: Vec<f64> = pi.iter().map(|p| p.sqrt()).collect();
        let n = pi.len();
        let l = DMatrix::from_fn(n, n, |i, j| root[i] / root[j] * m[(i, j)]);
        dense_symmetric_spectrum(&((&l + l.transpose()) * 0.5))
    } else {
        real_spectrum(m)
    }
}

pub fn star_chain(alpha: f64, p_bar: &[f64]) -> Result<StarChain> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::ConstraintViolation(format!(
            "hub return probability must lie in (0, 1), got {alpha}"
        )));
    }
    let d = p_bar.len();
    if d == 0 {
        return Err(Error::InvalidDistribution("no spokes".into()));
    }
    check_distribution(p_bar, d)?;
    let n = d + 1;
    let mut m = DMatrix::zeros(n, n);
    m[(0, 0)] = alpha;
    for (i, p) in p_bar.iter().enumerate() {
        m[(0, i + 1)] = (1.0 - alpha) * p;
        m[(i + 1, 0)] = alpha;
        m[(i + 1, i + 1)] = 1.0 - alpha;
    }
    let chain = StarChain {
        alpha,
        spoke_dist: p_bar.to_vec(),
        matrix: TransitionMatrix::new(m)?,
    };

    let pi = chain.stationary();
    let entries = chain.matrix.entries();
    let drift: f64 = (0..n)
        .map(|j| ((0..n).map(|i| pi[i] * entries[(i, j)]).sum::<f64>() - pi[j]).abs())
        .sum();
    if drift > 1e-12 {
        return Err(Error::InvariantViolation(format!(
            "closed-form stationary law has residual {drift:e}"
        )));
    }
    check_close("star spectrum", &reversible_spectrum(entries, &pi)?, &chain.spectrum())?;
    Ok(chain)
}

/// `p̄ = (β, β, (1−2β)/(d−2), …)` and `p̄_ε = (β+2ε, β−2ε, (1−2β)/(d−2), …)`,
/// for `2ε < β < 1/d`.
pub fn perturbed_pair(beta: f64, eps: f64, d: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if d < 3 {
        return Err(Error::ConstraintViolation(format!("need at least 3 spokes, got {d}")));
    }
    if !(eps >= 0.0 && 2.0 * eps < beta && beta < 1.0 / d as f64) {
        return Err(Error::ConstraintViolation(format!(
            "need 2ε < β < 1/d, got ε = {eps}, β = {beta}, d = {d}"
        )));
    }
    let rest = (1.0 - 2.0 * beta) / (d - 2) as f64;
    let mut p = vec![rest; d];
    let mut q = vec![rest; d];
    p[0] = beta;
    p[1] = beta;
    q[0] = beta + 2.0 * eps;
    q[1] = beta - 2.0 * eps;
    Ok((p, q))
}

/// A member of the symmetric doubly stochastic family.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricFamilyChain {
    pub alpha: f64,
    pub matrix: TransitionMatrix,
}

/// The template matrix: state 0 keeps `1 − α` and spreads `α` over the
/// others; the others keep `½ − α/(d−1)` and share `½` evenly among
/// themselves. Defined for `0 < α < 1/4`, `d ≥ 4`.
pub fn symmetric_template(alpha: f64, d: usize) -> Result<TransitionMatrix> {
    if d < 4 {
        return Err(Error::ConstraintViolation(format!("need d ≥ 4, got {d}")));
    }
    if !(alpha > 0.0 && alpha < 0.25) {
        return Err(Error::ConstraintViolation(format!(
            "α must lie in (0, 1/4), got {alpha}"
        )));
    }
    let leak = alpha / (d - 1) as f64;
    let share = 1.0 / (2.0 * (d - 2) as f64);
    let m = DMatrix::from_fn(d, d, |i, j| match (i, j) {
        (0, 0) => 1.0 - alpha,
        (0, _) | (_, 0) => leak,
        _ if i == j => 0.5 - leak,
        _ => share,
    });
    TransitionMatrix::new(m)
}

/// Eigenvalues `1`, `1 − dα/(d−1)` and `1 − ((d−1)/(2(d−2)) + α/(d−1))`
/// (the last `d−2` times), descending.
pub fn symmetric_family_spectrum(alpha: f64, d: usize) -> Vec<f64> {
    let df = d as f64;
    let first = 1.0 - df * alpha / (df - 1.0);
    let bulk = 1.0 - ((df - 1.0) / (2.0 * (df - 2.0)) + alpha / (df - 1.0));
    let mut s = vec![1.0, first];
    s.extend(std::iter::repeat_n(bulk, d - 2));
    sorted_desc(s)
}

/// Family member for `0 < α < 1/8`, with its spectrum verified.
pub fn symmetric_family(alpha: f64, d: usize) -> Result<SymmetricFamilyChain> {
    if !(alpha > 0.0 && alpha < 0.125) {
        return Err(Error::ConstraintViolation(format!(
            "α must lie in (0, 1/8), got {alpha}"
        )));
    }
    let matrix = symmetric_template(alpha, d)?;
    let got = dense_symmetric_spectrum(matrix.entries())?;
    check_close("symmetric family spectrum", &got, &symmetric_family_spectrum(alpha, d))?;
    Ok(SymmetricFamilyChain { alpha, matrix })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{pseudo_spectral_gap, spectral_gaps, stationary_distribution};
    use approx::assert_abs_diff_eq;

    #[test]
    fn star_examples() {
        let s = star_chain(0.5, &[0.25; 4]).unwrap();
        assert_eq!(s.matrix.dim(), 5);
        let pi = stationary_distribution(&s.matrix).unwrap();
        for (a, b) in pi.probs().iter().zip(s.stationary()) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
        assert!(crate::chain::is_reversible(&s.matrix, &pi));
        let eig = reversible_spectrum(s.matrix.entries(), pi.probs()).unwrap();
        for (g, w) in eig.iter().zip([1.0, 0.5, 0.5, 0.5, 0.0]) {
            assert_abs_diff_eq!(*g, w, epsilon = 1e-12);
        }
    }

    #[test]
    fn star_with_empty_spoke() {
        assert!(star_chain(0.3, &[0.5, 0.5, 0.0]).is_ok());
        assert!(star_chain(1.0, &[0.5, 0.5]).is_err());
        assert!(matches!(star_chain(0.3, &[0.5, 0.6]), Err(Error::InvalidDistribution(_))));
    }

    #[test]
    fn perturbed_pair_examples() {
        let (p, q) = perturbed_pair(0.1, 0.0, 5).unwrap();
        assert_eq!(p, q);
        let (p, q) = perturbed_pair(0.1, 0.02, 5).unwrap();
        assert_abs_diff_eq!(p.iter().sum::<f64>(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(q.iter().sum::<f64>(), 1.0, epsilon = 1e-15);
        let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
        assert_abs_diff_eq!(min(&p) - min(&q), 0.04, epsilon = 1e-15);
        assert!(perturbed_pair(0.1, 0.05, 5).is_err());
        assert!(perturbed_pair(0.3, 0.01, 5).is_err());
    }

    #[test]
    fn symmetric_examples() {
        let f = symmetric_family(0.1, 4).unwrap();
        let pi = stationary_distribution(&f.matrix).unwrap();
        let (g, gs) = spectral_gaps(&f.matrix, &pi).unwrap();
        assert_abs_diff_eq!(g, 2.0 / 15.0, epsilon = 1e-12);
        assert_abs_diff_eq!(gs, g, epsilon = 1e-12);
        let ps = pseudo_spectral_gap(&f.matrix, &pi, None).unwrap().value;
        assert!(gs <= ps + 1e-12 && ps <= 2.0 * gs + 1e-12);
        assert!(symmetric_family(0.2, 4).is_err());
        assert!(symmetric_family(0.1, 3).is_err());
    }
}
