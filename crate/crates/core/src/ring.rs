//! Monte Carlo verifier for the headway mix.
//!
//! A single lane observed over a long period behaves like a ring: every
//! vehicle follows exactly one predecessor, so the four pair counts sum to
//! the vehicle count and the two cross-class counts are forced equal. This
//! module draws random CAV/manual sequences on such a ring, tallies the pair
//! counts, and checks that the count-weighted average headway converges to
//! the closed-form mix.
//!
//! Randomness is pinned to the ChaCha8 generator (`rand_chacha`) seeded via
//! `seed_from_u64`, so identical (n, p, seed) inputs reproduce identical
//! sequences on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{DomainError, Result};
use crate::headway::{average_headway_from_counts, HeadwayProfile, PenetrationRate};

/// Default vehicles per ring. The binomial standard error of a pair
/// frequency at this size is about 5e-4, comfortably inside the default
/// tolerance.
pub const DEFAULT_RING_SIZE: usize = 1_000_000;

/// Default number of independent trials.
pub const DEFAULT_TRIALS: usize = 10;

/// Default relative deviation tolerance for convergence checks.
pub const DEFAULT_TOLERANCE: f64 = 0.01;

/// Follower/leader pair tallies over a circular vehicle sequence.
///
/// `aa` counts CAVs following CAVs, `am` CAVs following manual vehicles,
/// `mm` manual vehicles following manual vehicles and `ma` manual vehicles
/// following CAVs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PairCounts {
    pub aa: u64,
    pub am: u64,
    pub mm: u64,
    pub ma: u64,
}

impl PairCounts {
    pub fn total(&self) -> u64 {
        self.aa + self.am + self.mm + self.ma
    }

    fn tally(&mut self, follower_is_cav: bool, leader_is_cav: bool) {
        match (follower_is_cav, leader_is_cav) {
            (true, true) => self.aa += 1,
            (true, false) => self.am += 1,
            (false, false) => self.mm += 1,
            (false, true) => self.ma += 1,
        }
    }
}

/// One generated ring: the inputs that produced it, its pair counts and the
/// count-weighted average headway.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingSample {
    pub n: usize,
    pub seed: u64,
    pub p: PenetrationRate,
    pub counts: PairCounts,
    pub empirical_headway: f64,
}

/// Draws `n` vehicle classes i.i.d. (CAV with probability `p`), counts the
/// follower/leader pairs around the ring and evaluates the count average
/// against the supplied profile.
pub fn generate_ring(
    n: usize,
    p: PenetrationRate,
    seed: u64,
    profile: &HeadwayProfile,
) -> Result<RingSample> {
    if n < 2 {
        return Err(DomainError::RingTooSmall(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let threshold = p.value();
    let mut counts = PairCounts::default();

    let first = rng.random::<f64>() < threshold;
    let mut prev = first;
    for _ in 1..n {
        let current = rng.random::<f64>() < threshold;
        counts.tally(current, prev);
        prev = current;
    }
    // Close the ring: the first vehicle follows the last one.
    counts.tally(first, prev);

    let empirical_headway = average_headway_from_counts(
        counts.aa as f64,
        counts.am as f64,
        counts.mm as f64,
        counts.ma as f64,
        profile,
    )?;
    Ok(RingSample { n, seed, p, counts, empirical_headway })
}

/// Outcome of comparing ring trials against the closed-form mixed headway.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub trials: Vec<RingSample>,
    pub mean_empirical_headway: f64,
    /// Closed-form mixed headway at the same penetration.
    pub expected_headway: f64,
    pub max_relative_deviation: f64,
}

impl ConvergenceReport {
    pub fn within_tolerance(&self, tolerance: f64) -> bool {
        self.max_relative_deviation < tolerance
    }
}

/// Runs one ring trial per seed and reports how far the empirical headways
/// stray from the closed-form value.
pub fn verify_convergence(
    profile: &HeadwayProfile,
    p: PenetrationRate,
    n: usize,
    seeds: &[u64],
) -> Result<ConvergenceReport> {
    if seeds.is_empty() {
        return Err(DomainError::NoTrialSeeds);
    }
    let expected = profile.mixed_headway(p);
    let trials: Vec<RingSample> = seeds
        .iter()
        .map(|&seed| generate_ring(n, p, seed, profile))
        .collect::<Result<_>>()?;
    let mean_empirical_headway =
        trials.iter().map(|t| t.empirical_headway).sum::<f64>() / trials.len() as f64;
    let max_relative_deviation = trials
        .iter()
        .map(|t| (t.empirical_headway - expected).abs() / expected)
        .fold(0.0, f64::max);
    Ok(ConvergenceReport {
        trials,
        mean_empirical_headway,
        expected_headway: expected,
        max_relative_deviation,
    })
}

/// Derives `trials` consecutive seeds from a base seed.
pub fn trial_seeds(base: u64, trials: usize) -> Vec<u64> {
    (0..trials as u64).map(|i| base.wrapping_add(i)).collect()
}
