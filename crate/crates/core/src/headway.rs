//! Headway mixing math.
//!
//! A mixed stream of CAVs and manual vehicles produces four classes of
//! follower/leader pairs, each with its own mean time headway. This module
//! holds the per-pair headway profile, the average headway of a randomly
//! mixed stream as a function of CAV penetration, and the per-lane capacity
//! that follows from it.

use std::fmt;
use std::str::FromStr;

use crate::error::{DomainError, Result};

/// Seconds per hour; converts reciprocal headways (veh/s) to hourly flows.
pub const SECONDS_PER_HOUR: f64 = 3600.0;

/// Mean time headways for the four follower/leader class pairs, in seconds.
///
/// `h_aa` is a CAV following a CAV, `h_am` a CAV following a manual vehicle,
/// `h_ma` a manual vehicle following a CAV and `h_mm` a manual vehicle
/// following another manual vehicle. All four must be strictly positive; no
/// ordering between them is imposed, so technology assumptions can vary
/// freely.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeadwayProfile {
    h_aa: f64,
    h_am: f64,
    h_ma: f64,
    h_mm: f64,
}

impl HeadwayProfile {
    pub fn new(h_aa: f64, h_am: f64, h_ma: f64, h_mm: f64) -> Result<Self> {
        for h in [h_aa, h_am, h_ma, h_mm] {
            if !h.is_finite() || h <= 0.0 {
                return Err(DomainError::NonPositiveHeadway(h));
            }
        }
        Ok(Self { h_aa, h_am, h_ma, h_mm })
    }

    pub fn h_aa(&self) -> f64 {
        self.h_aa
    }

    pub fn h_am(&self) -> f64 {
        self.h_am
    }

    pub fn h_ma(&self) -> f64 {
        self.h_ma
    }

    pub fn h_mm(&self) -> f64 {
        self.h_mm
    }

    /// Average headway of a randomly mixed stream at CAV penetration `p`.
    ///
    /// The pair classes occur with frequencies p², p(1-p), (1-p)p and (1-p)²,
    /// giving a quadratic interpolation between the all-manual headway at
    /// p = 0 and the all-CAV headway at p = 1 (both endpoints are exact).
    pub fn mixed_headway(&self, p: PenetrationRate) -> f64 {
        let p = p.value();
        let q = 1.0 - p;
        p * p * self.h_aa + p * q * (self.h_am + self.h_ma) + q * q * self.h_mm
    }

    /// Per-lane capacity (veh/hr/lane) of a mixed stream at penetration `p`:
    /// the reciprocal of the mixed headway, scaled to hours.
    pub fn mixed_capacity(&self, p: PenetrationRate) -> f64 {
        SECONDS_PER_HOUR / self.mixed_headway(p)
    }
}

/// Count-weighted average headway over the four pair classes.
///
/// Counts are accepted as non-negative reals so expected pair frequencies can
/// be plugged in directly alongside integer tallies.
pub fn average_headway_from_counts(
    n_aa: f64,
    n_am: f64,
    n_mm: f64,
    n_ma: f64,
    profile: &HeadwayProfile,
) -> Result<f64> {
    for n in [n_aa, n_am, n_mm, n_ma] {
        if !(n >= 0.0) || !n.is_finite() {
            return Err(DomainError::NegativeCount(n));
        }
    }
    let total = n_aa + n_am + n_mm + n_ma;
    if total <= 0.0 {
        return Err(DomainError::EmptyPopulation);
    }
    Ok((n_aa * profile.h_aa + n_am * profile.h_am + n_mm * profile.h_mm + n_ma * profile.h_ma)
        / total)
}

/// Fraction of the vehicle population that is CAV, in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PenetrationRate(f64);

impl PenetrationRate {
    pub const ZERO: Self = Self(0.0);
    pub const FULL: Self = Self(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || !(0.0..=1.0).contains(&value) {
            return Err(DomainError::PenetrationOutOfRange(value));
        }
        Ok(Self(value))
    }

    /// Clamps into [0, 1]. For values a computation already guarantees in
    /// range up to rounding dust.
    pub fn clamped(value: f64) -> Self {
        debug_assert!(!value.is_nan());
        Self(value.clamp(0.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for PenetrationRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Built-in CAV technology scenarios, each bundling a headway profile.
///
/// All three share the all-manual headway of 1.8 s. The aggressive scenario
/// shortens the CAV-after-CAV headway, while the conservative one lengthens
/// the cross-class headways up to the manual value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    Neutral,
    Conservative,
    Aggressive,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::Neutral, Scenario::Conservative, Scenario::Aggressive];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Neutral => "neutral",
            Scenario::Conservative => "conservative",
            Scenario::Aggressive => "aggressive",
        }
    }

    pub fn profile(self) -> HeadwayProfile {
        // Cross-class headways are symmetric in the built-in scenarios.
        let (h_aa, h_cross, h_mm) = match self {
            Scenario::Neutral => (0.45, 1.2, 1.8),
            Scenario::Conservative => (0.45, 1.8, 1.8),
            Scenario::Aggressive => (0.3, 1.2, 1.8),
        };
        HeadwayProfile::new(h_aa, h_cross, h_cross, h_mm).expect("preset headways are positive")
    }
}

impl FromStr for Scenario {
    type Err = DomainError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "neutral" => Ok(Scenario::Neutral),
            "conservative" => Ok(Scenario::Conservative),
            "aggressive" => Ok(Scenario::Aggressive),
            _ => Err(DomainError::UnknownScenario(s.to_string())),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
