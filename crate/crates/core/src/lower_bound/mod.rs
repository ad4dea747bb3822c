//! Two-point lower-bound constructions: star chains with perturbed spoke
//! weights, the symmetric family, and the divergences between their
//! trajectory laws.

mod divergence;
mod families;
mod rho;

pub use divergence::{
    geometric_mean_pair, hellinger, hellinger_trajectory, kl_divergence, kl_trajectory_star,
    perron_left,
};
pub use families::{
    perturbed_pair, star_chain, symmetric_family, symmetric_family_spectrum, symmetric_template,
    StarChain, SymmetricFamilyChain,
};
pub use rho::{
    main_square_root_sides, micro_sides, rho_closed_form, rho_lower_bounds,
    secondary_square_root_bounds, RhoLowerBounds,
};
