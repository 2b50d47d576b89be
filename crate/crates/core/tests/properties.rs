//! Property tests for the flow-chain invariants and the enumeration
//! optimizer, over randomized profiles, geometries and demand levels.

use laneopt_core::{
    evaluate_allocation, generate_ring, optimize_allocation, throughputs_tied, FreewayConfig,
    HeadwayProfile, PenetrationRate,
};
use proptest::prelude::*;

fn headway() -> impl Strategy<Value = f64> {
    0.1f64..5.0
}

fn profile() -> impl Strategy<Value = HeadwayProfile> {
    (headway(), headway(), headway(), headway())
        .prop_map(|(aa, am, ma, mm)| HeadwayProfile::new(aa, am, ma, mm).unwrap())
}

fn config() -> impl Strategy<Value = FreewayConfig> {
    (profile(), 1u32..=8, 0.0f64..=20_000.0)
        .prop_map(|(profile, lanes, demand)| FreewayConfig::new(lanes, demand, profile).unwrap())
}

proptest! {
    #[test]
    fn flow_chain_invariants_hold(
        config in config(),
        p_value in 0.0f64..=1.0,
        lane_selector in 0.0f64..1.0,
    ) {
        let p = PenetrationRate::new(p_value).unwrap();
        let dedicated = (lane_selector * (config.lanes() + 1) as f64) as u32;
        let dedicated = dedicated.min(config.lanes());
        let eval = evaluate_allocation(&config, p, dedicated).unwrap();

        let residual = eval.residual_penetration.value();
        prop_assert!((0.0..=1.0).contains(&residual));

        prop_assert!(eval.dedicated_flow >= 0.0);
        prop_assert!(eval.dedicated_flow <= config.dedicated_capacity());
        prop_assert!(eval.mixed_flow >= 0.0);
        prop_assert!(eval.mixed_flow <= eval.mixed_capacity);
        prop_assert!(eval.throughput <= config.total_demand());

        // Throughput decomposes into per-lane flows.
        let reconstructed = (config.lanes() - dedicated) as f64 * eval.mixed_flow
            + dedicated as f64 * eval.dedicated_flow;
        let tolerance = 1e-9f64.max(1e-12 * reconstructed.abs());
        prop_assert!((eval.throughput - reconstructed).abs() <= tolerance);

        // Throughput never exceeds what the lanes can carry.
        let capacity_bound = (config.lanes() - dedicated) as f64 * eval.mixed_capacity
            + dedicated as f64 * config.dedicated_capacity();
        prop_assert!(eval.throughput <= capacity_bound + 1e-9 * capacity_bound.max(1.0));
    }

    #[test]
    fn enumeration_returns_the_argmax_with_smallest_tie(
        profile in profile(),
        lanes in 2u32..=8,
        demand in 0.0f64..=20_000.0,
        p_value in 0.0f64..=1.0,
    ) {
        let config = FreewayConfig::new(lanes, demand, profile).unwrap();
        let p = PenetrationRate::new(p_value).unwrap();
        let result = optimize_allocation(&config, p).unwrap();

        prop_assert_eq!(result.candidates.len(), lanes as usize + 1);
        for (index, candidate) in result.candidates.iter().enumerate() {
            prop_assert_eq!(candidate.dedicated_lanes, index as u32);
            // Independent re-evaluation must agree with the stored candidate.
            let again = evaluate_allocation(&config, p, index as u32).unwrap();
            prop_assert_eq!(again.throughput.to_bits(), candidate.throughput.to_bits());
            // Nothing beats the winner beyond the tie band.
            prop_assert!(
                result.best.throughput >= candidate.throughput
                    || throughputs_tied(result.best.throughput, candidate.throughput)
            );
            // Ties resolve toward the smallest lane count.
            if (candidate.dedicated_lanes) < result.best.dedicated_lanes {
                prop_assert!(!throughputs_tied(candidate.throughput, result.best.throughput));
            }
        }
    }

    #[test]
    fn free_flow_demand_is_served_without_allocation(
        profile in profile(),
        lanes in 2u32..=8,
        p_value in 0.0f64..=1.0,
        demand_fraction in 0.0f64..=1.0,
    ) {
        let p = PenetrationRate::new(p_value).unwrap();
        let demand = demand_fraction * profile.mixed_capacity(p);
        let config = FreewayConfig::new(lanes, demand, profile).unwrap();
        let result = optimize_allocation(&config, p).unwrap();
        prop_assert_eq!(result.best.dedicated_lanes, 0);
        prop_assert_eq!(result.best.throughput.to_bits(), config.total_demand().to_bits());
    }

    #[test]
    fn mixed_headway_stays_inside_profile_envelope(
        profile in profile(),
        p_value in 0.0f64..=1.0,
    ) {
        let p = PenetrationRate::new(p_value).unwrap();
        let h = profile.mixed_headway(p);
        let lo = profile
            .h_aa()
            .min(profile.h_am())
            .min(profile.h_ma())
            .min(profile.h_mm());
        let hi = profile
            .h_aa()
            .max(profile.h_am())
            .max(profile.h_ma())
            .max(profile.h_mm());
        // Quadratic weights sum to one, so the mix is a convex combination.
        prop_assert!(h >= lo - 1e-12 * hi);
        prop_assert!(h <= hi + 1e-12 * hi);
    }

    #[test]
    fn ring_counts_conserve(
        n in 2usize..=512,
        seed in any::<u64>(),
        p_value in 0.0f64..=1.0,
    ) {
        let profile = HeadwayProfile::new(0.45, 1.2, 1.2, 1.8).unwrap();
        let p = PenetrationRate::new(p_value).unwrap();
        let sample = generate_ring(n, p, seed, &profile).unwrap();
        prop_assert_eq!(sample.counts.total(), n as u64);
        prop_assert_eq!(sample.counts.am, sample.counts.ma);
        let replay = generate_ring(n, p, seed, &profile).unwrap();
        prop_assert_eq!(replay.counts, sample.counts);
    }
}
