//! Covering numbers, capacity, entropy in the two-sided and one-sided
//! conventions, and the identities linking them.
//!
//! Symbolic systems get exact integer counts. Toral systems get sampled
//! bounds: greedy covers from above, separated packings from below.

use serde::{Deserialize, Serialize};

use crate::symbolic::BiSequence;

mod capacity;
mod cover;
mod entropy;
mod fundamental;

pub use capacity::{
    capacity_symbolic, capacity_toral, default_symbolic_scales, default_toral_scales, fit_capacity, fit_line,
    geometric_scales, symbolic_scales, CapacityFit, LineFit, ToralCapacity, DROPPED_SCALES,
};
pub use cover::{
    cov_eps_sample, cov_eps_symbolic, greedy_cover, packing_count, symbolic_cover_report, toral_cover_bounds,
    toral_cover_reports, CoverBounds, CoverEntry, CoverMethod, CoverReport, GridSample,
};
pub use entropy::{
    bowen_ball_volume, entropy_symbolic, entropy_toral, local_unstable_entropy_symbolic,
    local_unstable_entropy_toral, symbolic_dyn_cov, unstable_homogeneity_symbolic, unstable_homogeneity_toral,
    unstable_segment_cover, BowenSampling, EntropyMethod, EntropyReport, GrowthRow, HomogeneityReport,
};
pub use fundamental::{
    check_fundamental_symbolic, check_fundamental_toral, cov_identity_check, cov_identity_toral, dimension_bound,
    ideal_factor, CovIdentityRow, DimensionBound, FundamentalReport, ToralIdentityRow,
};

/// Which subset of a symbolic space a count refers to. Local sets are taken
/// at scale `ξ`: `W^u_ξ(x)` fixes the coordinates `i ≤ 1`, `W^s_ξ(x)` the
/// coordinates `i ≥ −1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Subset {
    Whole,
    LocalUnstable(BiSequence),
    LocalStable(BiSequence),
}
