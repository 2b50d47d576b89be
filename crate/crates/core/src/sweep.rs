//! Penetration-rate sensitivity sweeps.
//!
//! Runs the lane-allocation optimizer over a grid of penetration rates and
//! condenses the result into transition ranges: the maximal contiguous
//! intervals over which each dedicated-lane count stays optimal.

use crate::allocation::{optimize_allocation, FreewayConfig, OptimizationResult};
use crate::error::{DomainError, Result};
use crate::headway::PenetrationRate;

/// One grid point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub p: PenetrationRate,
    pub result: OptimizationResult,
    /// Single mixed lane capacity at `p`, before any allocation.
    pub single_lane_capacity: f64,
    /// Capacity of the unallocated lanes at the optimal allocation.
    pub unallocated_capacity: f64,
}

/// A full sweep: the configuration it was run against and one point per grid
/// value, in grid order.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSeries {
    pub config: FreewayConfig,
    pub points: Vec<SweepPoint>,
}

impl SweepSeries {
    /// Optimal dedicated-lane count at each grid point.
    pub fn optimal_lanes(&self) -> impl Iterator<Item = u32> + '_ {
        self.points.iter().map(|pt| pt.result.best.dedicated_lanes)
    }
}

/// A maximal contiguous run of grid points sharing one optimal lane count,
/// reported as a closed interval at grid resolution. A lane count whose
/// optimality is non-contiguous produces multiple ranges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionRange {
    pub dedicated_lanes: u32,
    pub p_low: PenetrationRate,
    pub p_high: PenetrationRate,
}

/// Builds a penetration grid from 0 to 1 with the given step. Steps that
/// divide 1 evenly produce an exact rational grid ending at 1; other steps
/// walk up from 0 and stop at the last value not exceeding 1.
pub fn grid_with_step(step: f64) -> Result<Vec<PenetrationRate>> {
    if !step.is_finite() || step <= 0.0 || step > 1.0 {
        return Err(DomainError::InvalidGridStep(step));
    }
    let per_unit = (1.0 / step).round();
    if per_unit >= 1.0 && (per_unit * step - 1.0).abs() <= 1e-9 {
        let n = per_unit as usize;
        Ok((0..=n)
            .map(|i| PenetrationRate::clamped(i as f64 / n as f64))
            .collect())
    } else {
        let mut grid = Vec::new();
        let mut i = 0u64;
        loop {
            let value = i as f64 * step;
            if value > 1.0 + 1e-12 {
                break;
            }
            grid.push(PenetrationRate::clamped(value));
            i += 1;
        }
        Ok(grid)
    }
}

/// The default 0.00..=1.00 grid at step 0.01.
pub fn default_grid() -> Vec<PenetrationRate> {
    grid_with_step(0.01).expect("0.01 is a valid step")
}

/// Optimizes the allocation at every grid point.
pub fn sweep_penetration(
    config: &FreewayConfig,
    grid: &[PenetrationRate],
) -> Result<SweepSeries> {
    if grid.is_empty() {
        return Err(DomainError::EmptyGrid);
    }
    if !grid.windows(2).all(|w| w[0].value() < w[1].value()) {
        return Err(DomainError::GridNotIncreasing);
    }
    let points = grid
        .iter()
        .map(|&p| -> Result<SweepPoint> {
            let result = optimize_allocation(config, p)?;
            Ok(SweepPoint {
                p,
                single_lane_capacity: config.profile().mixed_capacity(p),
                unallocated_capacity: result.best.mixed_capacity,
                result,
            })
        })
        .collect::<Result<_>>()?;
    Ok(SweepSeries { config: *config, points })
}

/// Run-length encodes the optimal lane counts of a sweep into transition
/// ranges, in grid order.
pub fn extract_transition_ranges(series: &SweepSeries) -> Vec<TransitionRange> {
    let mut ranges = Vec::new();
    let points = &series.points;
    let mut start = 0;
    for i in 1..=points.len() {
        let run_ended = i == points.len()
            || points[i].result.best.dedicated_lanes != points[start].result.best.dedicated_lanes;
        if run_ended {
            ranges.push(TransitionRange {
                dedicated_lanes: points[start].result.best.dedicated_lanes,
                p_low: points[start].p,
                p_high: points[i - 1].p,
            });
            start = i;
        }
    }
    ranges
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::headway::Scenario;

    fn grid_of(values: &[f64]) -> Vec<PenetrationRate> {
        values.iter().map(|&v| PenetrationRate::new(v).unwrap()).collect()
    }

    #[test]
    fn default_grid_shape() {
        let grid = default_grid();
        assert_eq!(grid.len(), 101);
        assert_eq!(grid[0].value(), 0.0);
        assert_eq!(grid[100].value(), 1.0);
        assert_eq!(grid[29].value(), 0.29);
    }

    #[test]
    fn grid_step_validation_and_irregular_steps() {
        assert!(matches!(
            grid_with_step(0.0),
            Err(DomainError::InvalidGridStep(_))
        ));
        assert!(grid_with_step(1.5).is_err());
        assert!(grid_with_step(-0.1).is_err());

        let grid = grid_with_step(1.0).unwrap();
        assert_eq!(grid.len(), 2);

        // 0.03 does not divide 1; the grid stops at 0.99.
        let grid = grid_with_step(0.03).unwrap();
        assert_eq!(grid.len(), 34);
        assert!(grid.last().unwrap().value() <= 1.0);
    }

    #[test]
    fn sweep_rejects_bad_grids() {
        let config = FreewayConfig::new(2, 5000.0, Scenario::Neutral.profile()).unwrap();
        assert_eq!(
            sweep_penetration(&config, &[]).unwrap_err(),
            DomainError::EmptyGrid
        );
        assert_eq!(
            sweep_penetration(&config, &grid_of(&[0.2, 0.2, 0.4])).unwrap_err(),
            DomainError::GridNotIncreasing
        );
        assert_eq!(
            sweep_penetration(&config, &grid_of(&[0.4, 0.2])).unwrap_err(),
            DomainError::GridNotIncreasing
        );
    }

    #[test]
    fn sweep_requires_managed_lane_geometry() {
        let config = FreewayConfig::new(1, 5000.0, Scenario::Neutral.profile()).unwrap();
        assert_eq!(
            sweep_penetration(&config, &default_grid()).unwrap_err(),
            DomainError::ManagedLaneRequiresTwoLanes(1)
        );
    }

    #[test]
    fn low_demand_never_allocates() {
        for s in Scenario::ALL {
            let config = FreewayConfig::new(2, 1000.0, s.profile()).unwrap();
            let series = sweep_penetration(&config, &default_grid()).unwrap();
            assert!(series.optimal_lanes().all(|l| l == 0));
            let ranges = extract_transition_ranges(&series);
            assert_eq!(ranges.len(), 1);
            assert_eq!(ranges[0].dedicated_lanes, 0);
            assert_eq!(ranges[0].p_low.value(), 0.0);
            assert_eq!(ranges[0].p_high.value(), 1.0);
        }
    }

    #[test]
    fn demand_at_manual_capacity_still_never_allocates() {
        // 3600/1.8 rounds just below 2000, so D = 2000 is microscopically
        // congested at p = 0; the tie band keeps the allocation at zero.
        for demand in [1999.0, 2000.0] {
            for s in Scenario::ALL {
                let config = FreewayConfig::new(2, demand, s.profile()).unwrap();
                let series = sweep_penetration(&config, &default_grid()).unwrap();
                assert!(series.optimal_lanes().all(|l| l == 0));
            }
        }
    }

    #[test]
    fn transition_ranges_run_length_encode() {
        // Synthetic pattern [0, 0, 1, 1, 1, 0] over a six-point grid.
        let config = FreewayConfig::new(2, 5000.0, Scenario::Conservative.profile()).unwrap();
        let series = sweep_penetration(
            &config,
            &grid_of(&[0.0, 0.2, 0.4, 0.6, 0.8, 1.0]),
        )
        .unwrap();
        let pattern: Vec<u32> = series.optimal_lanes().collect();
        assert_eq!(pattern, vec![0, 0, 1, 1, 1, 0]);
        let ranges = extract_transition_ranges(&series);
        assert_eq!(ranges.len(), 3);
        assert_eq!(
            (ranges[0].dedicated_lanes, ranges[0].p_low.value(), ranges[0].p_high.value()),
            (0, 0.0, 0.2)
        );
        assert_eq!(
            (ranges[1].dedicated_lanes, ranges[1].p_low.value(), ranges[1].p_high.value()),
            (1, 0.4, 0.8)
        );
        assert_eq!(
            (ranges[2].dedicated_lanes, ranges[2].p_low.value(), ranges[2].p_high.value()),
            (0, 1.0, 1.0)
        );
    }

    #[test]
    fn ranges_reconstruct_the_optimal_sequence() {
        let config = FreewayConfig::new(4, 5050.0, Scenario::Neutral.profile()).unwrap();
        let series = sweep_penetration(&config, &default_grid()).unwrap();
        let ranges = extract_transition_ranges(&series);
        let mut rebuilt = Vec::new();
        for range in &ranges {
            for pt in &series.points {
                if pt.p.value() >= range.p_low.value() && pt.p.value() <= range.p_high.value() {
                    rebuilt.push(range.dedicated_lanes);
                }
            }
        }
        let original: Vec<u32> = series.optimal_lanes().collect();
        assert_eq!(rebuilt, original);
    }

    #[test]
    fn grid_refinement_moves_boundaries_at_most_one_coarse_step() {
        let config = FreewayConfig::new(2, 5050.0, Scenario::Conservative.profile()).unwrap();
        let coarse = extract_transition_ranges(
            &sweep_penetration(&config, &grid_with_step(0.01).unwrap()).unwrap(),
        );
        let fine = extract_transition_ranges(
            &sweep_penetration(&config, &grid_with_step(0.005).unwrap()).unwrap(),
        );
        // Both sweeps see the same 0 -> 1 -> 0 structure.
        let coarse_pattern: Vec<u32> = coarse.iter().map(|r| r.dedicated_lanes).collect();
        let fine_pattern: Vec<u32> = fine.iter().map(|r| r.dedicated_lanes).collect();
        assert_eq!(coarse_pattern, fine_pattern);
        for (c, f) in coarse.iter().zip(&fine) {
            assert!((c.p_low.value() - f.p_low.value()).abs() <= 0.01 + 1e-12);
            assert!((c.p_high.value() - f.p_high.value()).abs() <= 0.01 + 1e-12);
        }
    }
}
