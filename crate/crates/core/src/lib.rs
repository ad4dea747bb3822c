//! Estimation of the mixing time of an unknown ergodic Markov chain from a
//! single trajectory, through the dilated pseudo-spectral gap.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chain;
pub mod confidence;
pub mod eigen;
pub mod error;
pub mod estimators;
pub mod io;
pub mod lower_bound;
pub mod rng;
pub mod trajectory;

pub use chain::{
    SpectralSummary, StationaryDistribution, TransitionMatrix,
};
pub use error::{Error, Result};
