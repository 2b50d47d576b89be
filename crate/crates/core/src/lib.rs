//! Mixed CAV/manual freeway traffic modeling and dedicated-lane optimization.
//!
//! The library models how the capacity of a freeway lane changes with the
//! penetration rate of connected autonomous vehicles, and determines how many
//! lanes of a congested freeway should be dedicated to CAVs to maximize total
//! throughput:
//!
//! - [`headway`] — per-class-pair headways, the penetration-dependent average
//!   headway of a mixed stream, and the single-lane capacity it implies.
//! - [`allocation`] — throughput evaluation for every candidate number of
//!   dedicated lanes and the enumeration optimizer over them.
//! - [`ring`] — a seeded Monte Carlo verifier that checks the closed-form
//!   headway mix against pair counts sampled on a ring.
//! - [`sweep`] — penetration sweeps and the transition ranges over which each
//!   lane allocation stays optimal.
//! - [`calibrate`] — recovers the demand level that best reproduces a set of
//!   reference transition ranges.

pub mod allocation;
pub mod calibrate;
pub mod error;
pub mod headway;
pub mod ring;
pub mod sweep;

pub use allocation::{
    cav_lane_flow, evaluate_allocation, mixed_lane_capacity, mixed_lane_flow,
    optimize_allocation, residual_penetration, throughputs_tied, AllocationEvaluation,
    FreewayConfig, OptimizationResult, THROUGHPUT_TIE_TOLERANCE,
};
pub use calibrate::{
    calibrate_demand, conflicting_target_pairs, reference_targets, standard_demand_grid,
    CalibrationReport, CalibrationTarget, TargetFit, DEFAULT_DEMAND,
    MISSING_RANGE_RESIDUAL, RESIDUAL_DISCREPANCY_THRESHOLD,
};
pub use error::{DomainError, Result};
pub use headway::{
    average_headway_from_counts, HeadwayProfile, PenetrationRate, Scenario, SECONDS_PER_HOUR,
};
pub use ring::{
    generate_ring, trial_seeds, verify_convergence, ConvergenceReport, PairCounts, RingSample,
    DEFAULT_RING_SIZE, DEFAULT_TOLERANCE, DEFAULT_TRIALS,
};
pub use sweep::{
    default_grid, extract_transition_ranges, grid_with_step, sweep_penetration, SweepPoint,
    SweepSeries, TransitionRange,
};
