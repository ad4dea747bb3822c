//! Trajectories, their simulation from known chains, and the skipped-chain
//! counts and smoothed estimates built from them.

mod counts;
mod simulate;
mod smoothed;

pub use counts::{skipped_counts, CountAccumulator, SkippedCounts};
pub(crate) use simulate::check_distribution;
pub use simulate::{simulate, Trajectory};
pub use smoothed::{smoothed_estimates, SmoothedEstimates};
