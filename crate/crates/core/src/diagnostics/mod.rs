//! Sector-resolved estimators, cancellation diagnostics and sweeps.

mod concentration;
mod estimates;
mod scaling;
mod sweep;
mod trace;

pub use concentration::{concentration_curve, ConcentrationCurve};
pub use estimates::{
    composed_contrast, exact_sector_estimates, expectation, shot_sector_estimates, structural_form_contrast,
    EstimateMode, RunningStats, SectorEstimates, SectorFields,
};
pub use scaling::{
    bootstrap_median_se, haar_abs_contrasts, haar_scaling_study, linear_fit, ScalingConfig, ScalingPoint,
    ScalingResult, MIN_SCALING_DRAWS,
};
pub use sweep::{
    grover_sweep, shallow_sweep, GroverSweepConfig, ShallowSweepConfig, ShotSummary, SweepPoint, SweepResult,
    SWEEP_K,
};
pub use trace::{cumulative_trace, CumulativeTrace, TraceEntry};
