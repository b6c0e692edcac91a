//! Hausdorff measures of local stable and unstable sets of subshifts via a
//! cylinder dynamic program, the product measure on boxes, and its scaling,
//! homogeneity and Parry comparisons.
//!
//! For the λ-adic metric any set of diameter `< λ^(−m)` lies in a single
//! cylinder, so cylinder covers are optimal and the infimum over covers is
//! exactly the dynamic program.

mod plaque;
mod product;

pub use plaque::{
    hausdorff_estimate, intrinsic_exponent, scaling_check, symbolic_intrinsic_exponent, MeasureMethod, MeasureTree,
    Plaque, PlaqueKind, ScalingReport, CONVERGENCE_DRIFT,
};
pub use product::{
    admissible_words, bowen_box_mass, box_measure, homogeneity_check, level_for_scale, parry_compare,
    point_in_cylinder, toral_box_mass, BoxMeasure, HomogeneityRow, HomogeneityTable, ParryComparison, ParryRow,
    ToralBoxMass, FLATNESS_SLOPE,
};
