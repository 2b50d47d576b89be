//! Managed-lane throughput evaluation and optimization.
//!
//! Dedicating `l_A` of a freeway's `L` lanes to CAVs routes as much CAV
//! demand as fits onto those lanes; whatever CAV demand is left over mixes
//! with the manual traffic on the remaining lanes and lowers (or raises)
//! their capacity through the headway mix. Total throughput is evaluated for
//! every candidate `l_A` and the argmax selected by exhaustive enumeration.

use crate::error::{DomainError, Result};
use crate::headway::{HeadwayProfile, PenetrationRate};

/// Relative tolerance under which two throughput values count as tied.
///
/// The flow chain is built from min/max switches, so candidates that are
/// analytically equal can differ by rounding dust; without a tie band the
/// argmax would flip arbitrarily at regime boundaries.
pub const THROUGHPUT_TIE_TOLERANCE: f64 = 1e-9;

/// True when two throughput values are equal up to the tie tolerance.
pub fn throughputs_tied(a: f64, b: f64) -> bool {
    (a - b).abs() <= THROUGHPUT_TIE_TOLERANCE * 1.0_f64.max(a.abs()).max(b.abs())
}

/// Freeway geometry and demand: lane count, per-lane demand, the headway
/// profile of the vehicle mix, and the fixed capacity of a dedicated CAV
/// lane (defaults to the all-CAV capacity implied by the profile).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreewayConfig {
    lanes: u32,
    demand: f64,
    profile: HeadwayProfile,
    dedicated_capacity: f64,
}

impl FreewayConfig {
    pub fn new(lanes: u32, demand: f64, profile: HeadwayProfile) -> Result<Self> {
        let default_cap = profile.mixed_capacity(PenetrationRate::FULL);
        Self::with_dedicated_capacity(lanes, demand, profile, default_cap)
    }

    pub fn with_dedicated_capacity(
        lanes: u32,
        demand: f64,
        profile: HeadwayProfile,
        dedicated_capacity: f64,
    ) -> Result<Self> {
        if lanes < 1 {
            return Err(DomainError::NoLanes(lanes));
        }
        if !demand.is_finite() || demand < 0.0 {
            return Err(DomainError::InvalidDemand(demand));
        }
        if !dedicated_capacity.is_finite() || dedicated_capacity <= 0.0 {
            return Err(DomainError::InvalidCapacity(dedicated_capacity));
        }
        Ok(Self { lanes, demand, profile, dedicated_capacity })
    }

    pub fn lanes(&self) -> u32 {
        self.lanes
    }

    pub fn demand(&self) -> f64 {
        self.demand
    }

    pub fn profile(&self) -> &HeadwayProfile {
        &self.profile
    }

    pub fn dedicated_capacity(&self) -> f64 {
        self.dedicated_capacity
    }

    /// Total demand across all lanes, veh/hr.
    pub fn total_demand(&self) -> f64 {
        self.lanes as f64 * self.demand
    }
}

/// All flow quantities produced by evaluating one candidate lane allocation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AllocationEvaluation {
    /// Number of lanes dedicated to CAVs.
    pub dedicated_lanes: u32,
    /// Per-lane flow on each dedicated lane, veh/hr/lane.
    pub dedicated_flow: f64,
    /// CAV penetration left in the unallocated lanes.
    pub residual_penetration: PenetrationRate,
    /// Capacity of each unallocated lane at the residual penetration.
    pub mixed_capacity: f64,
    /// Per-lane flow on each unallocated lane, veh/hr/lane.
    pub mixed_flow: f64,
    /// Total freeway throughput, veh/hr; never exceeds total demand.
    pub throughput: f64,
}

/// Outcome of enumerating every candidate allocation.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    /// The throughput argmax; ties resolve toward the smallest lane count.
    pub best: AllocationEvaluation,
    /// One evaluation per candidate, in ascending lane-count order.
    pub candidates: Vec<AllocationEvaluation>,
}

/// Per-lane flow on the dedicated CAV lanes: the CAV share of total demand,
/// capped by the dedicated capacity, spread over the dedicated lanes.
pub fn cav_lane_flow(
    config: &FreewayConfig,
    p: PenetrationRate,
    dedicated: u32,
) -> Result<f64> {
    if dedicated > config.lanes() {
        return Err(DomainError::LaneAllocationOutOfRange {
            dedicated,
            lanes: config.lanes(),
        });
    }
    let cav_demand = p.value() * config.lanes() as f64 * config.demand();
    let supply = dedicated as f64 * config.dedicated_capacity();
    let divisor = if dedicated == 0 { 1.0 } else { dedicated as f64 };
    // The final min only trims rounding dust from the division.
    Ok((cav_demand.min(supply) / divisor).min(config.dedicated_capacity()))
}

/// CAV penetration remaining in the unallocated lanes once the dedicated
/// lanes are filled: excess CAV demand over the remaining total demand.
/// Zero when every CAV fits on the dedicated lanes.
pub fn residual_penetration(
    config: &FreewayConfig,
    p: PenetrationRate,
    dedicated: u32,
    dedicated_flow: f64,
) -> PenetrationRate {
    let dedicated_f = dedicated as f64;
    let excess_cavs =
        (p.value() * config.lanes() as f64 * config.demand() - dedicated_f * config.dedicated_capacity())
            .max(0.0);
    let remaining_demand = (config.total_demand() - dedicated_f * dedicated_flow).max(1.0);
    PenetrationRate::clamped(excess_cavs / remaining_demand)
}

/// Capacity of an unallocated lane at the residual penetration; the same
/// headway-mix capacity as a single mixed lane.
pub fn mixed_lane_capacity(profile: &HeadwayProfile, residual: PenetrationRate) -> f64 {
    profile.mixed_capacity(residual)
}

/// Per-lane flow on the unallocated lanes: the demand they must carry,
/// capped by their mixed capacity. Zero when every lane is dedicated.
pub fn mixed_lane_flow(
    config: &FreewayConfig,
    dedicated: u32,
    dedicated_flow: f64,
    mixed_capacity: f64,
) -> f64 {
    if dedicated >= config.lanes() {
        return 0.0;
    }
    let remaining = (config.total_demand() - dedicated as f64 * dedicated_flow).max(0.0);
    (remaining / (config.lanes() - dedicated) as f64).min(mixed_capacity)
}

/// Evaluates one candidate allocation by chaining dedicated-lane flow,
/// residual penetration, mixed capacity, mixed flow and total throughput.
pub fn evaluate_allocation(
    config: &FreewayConfig,
    p: PenetrationRate,
    dedicated: u32,
) -> Result<AllocationEvaluation> {
    let dedicated_flow = cav_lane_flow(config, p, dedicated)?;
    let residual = residual_penetration(config, p, dedicated, dedicated_flow);
    let mixed_capacity = mixed_lane_capacity(config.profile(), residual);
    let mixed_flow = mixed_lane_flow(config, dedicated, dedicated_flow, mixed_capacity);

    let dedicated_f = dedicated as f64;
    let remaining = (config.total_demand() - dedicated_f * dedicated_flow).max(0.0);
    let mixed_total = remaining.min((config.lanes() - dedicated) as f64 * mixed_capacity);
    // Summing per-lane flows back up can overshoot total demand by an ulp;
    // throughput is capped so the demand bound holds bitwise.
    let throughput = (dedicated_f * dedicated_flow + mixed_total).min(config.total_demand());

    Ok(AllocationEvaluation {
        dedicated_lanes: dedicated,
        dedicated_flow,
        residual_penetration: residual,
        mixed_capacity,
        mixed_flow,
        throughput,
    })
}

/// Solves the lane-allocation problem by evaluating every candidate count of
/// dedicated lanes and returning the throughput argmax. Ties resolve toward
/// the smallest lane count, so free-flow conditions never allocate a lane.
pub fn optimize_allocation(
    config: &FreewayConfig,
    p: PenetrationRate,
) -> Result<OptimizationResult> {
    if config.lanes() < 2 {
        return Err(DomainError::ManagedLaneRequiresTwoLanes(config.lanes()));
    }
    let candidates: Vec<AllocationEvaluation> = (0..=config.lanes())
        .map(|dedicated| evaluate_allocation(config, p, dedicated))
        .collect::<Result<_>>()?;
    let max_throughput = candidates
        .iter()
        .map(|c| c.throughput)
        .fold(f64::NEG_INFINITY, f64::max);
    let best = *candidates
        .iter()
        .find(|c| throughputs_tied(c.throughput, max_throughput))
        .expect("candidate list is non-empty");
    Ok(OptimizationResult { best, candidates })
}
