//! Evaluation metrics: detection reliability, relative distance stability,
//! joint stability and the RW/CP comparison.

mod comparison;
mod filter;
mod stability;

pub use comparison::{build_comparison, relative_error, ComparisonRow, ComparisonTable, ReDenominator};
pub use filter::{local_variability, moving_mean, percentile, sample_sd, smooth_series, spline_smooth};
pub use stability::{
    analyze, count_false_detects, count_no_detects, distance_stability, joint_stability_sd, spearman, AnalysisParams,
    DistanceBin, JointSd, SdMode, SeriesSet, StabilityReport,
};
