//! Fully empirical confidence intervals for the dilated pseudo-spectral gap,
//! the minimum stationary probability, and the absolute spectral gap of
//! reversible chains.

mod report;
mod tau;
mod terms;

pub use report::{
    dilated_tmix_sandwich, num, pimin_interval, pimin_interval_from_counts, pssg_interval,
    pssg_interval_from_counts, reversible_intervals, reversible_intervals_from_counts,
    ConfidenceReport, Implied, Target,
};
pub use tau::{tau, tau_objective};
pub use terms::{
    empirical_linf_bound, interval_terms, perturbation_kappa, smoothed_chain_gap,
    terms_from_inputs, IntervalTerms, TermInputs, PERTURBATION_CONSTANT,
};
