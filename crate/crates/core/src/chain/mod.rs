//! Exact representations of known chains and their spectral and mixing
//! quantities.

mod exact;
mod matrix;

pub use exact::{
    balance, dilate, dilate_sym, dilated_gap, dilated_pseudo_spectral_gap, is_reversible,
    mixing_time, mixing_time_capped, multiplicative_gap, pseudo_spectral_gap, rescaled_matrix,
    reversibility_residual, spectral_gaps, spectral_summary, stationary_distribution,
    time_reversal, tmix_bounds, total_variation, BoundMode, GapSweep, SpectralSummary,
    DEFAULT_TMIX_CAP, GAP_SWEEP_HARD_CAP,
};
pub use matrix::{
    strongly_connected, DilatedMatrix, DilationFlavor, Powers, RescaledMatrix,
    StationaryDistribution, TransitionMatrix, ROW_SUM_TOL,
};
