//! Error type shared across the library.

use thiserror::Error;

/// Raised when an input violates a domain precondition.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("headway must be a strictly positive finite value, got {0}")]
    NonPositiveHeadway(f64),
    #[error("penetration rate must lie in [0, 1], got {0}")]
    PenetrationOutOfRange(f64),
    #[error("unknown scenario '{0}' (expected neutral, conservative or aggressive)")]
    UnknownScenario(String),
    #[error("pair counts must be non-negative, got {0}")]
    NegativeCount(f64),
    #[error("empty vehicle population")]
    EmptyPopulation,
    #[error("lane count must be at least 1, got {0}")]
    NoLanes(u32),
    #[error("demand must be a non-negative finite value, got {0}")]
    InvalidDemand(f64),
    #[error("dedicated-lane capacity must be a strictly positive finite value, got {0}")]
    InvalidCapacity(f64),
    #[error("dedicated lane count {dedicated} exceeds total lane count {lanes}")]
    LaneAllocationOutOfRange { dedicated: u32, lanes: u32 },
    #[error("managed-lane problem requires L >= 2, got {0}")]
    ManagedLaneRequiresTwoLanes(u32),
    #[error("ring must hold at least 2 vehicles, got {0}")]
    RingTooSmall(usize),
    #[error("at least one trial seed is required")]
    NoTrialSeeds,
    #[error("penetration grid is empty")]
    EmptyGrid,
    #[error("penetration grid must be strictly increasing")]
    GridNotIncreasing,
    #[error("grid step must lie in (0, 1], got {0}")]
    InvalidGridStep(f64),
    #[error("demand grid is empty")]
    EmptyDemandGrid,
}

pub type Result<T> = std::result::Result<T, DomainError>;
