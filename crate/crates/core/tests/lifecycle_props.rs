mod common;

use drivelife::ingest::FleetRecords;
use drivelife::lifecycle::{censored_cdf, failure_count_distribution, reconstruct, CensoredSample, Terminal};
use proptest::prelude::*;

use common::{family, small_fleet};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn swaps_map_to_failures(seed in any::<u64>(), n in 1usize..40) {
        let fleet = small_fleet(drivelife::Family::Ssd, seed, n);
        let FleetRecords::Ssd(drives) = &fleet.dataset.records else { unreachable!() };
        let swaps = drives.values().flatten().filter(|r| r.swap_event).count();
        let life = reconstruct(&fleet.dataset).unwrap();
        prop_assert_eq!(life.failures.len(), swaps);
        for f in &life.failures {
            prop_assert!(f.swap_day.is_some_and(|s| s > f.day));
        }
    }

    #[test]
    fn timeline_invariants(seed in any::<u64>(), hdd in any::<bool>(), n in 1usize..40) {
        let fleet = small_fleet(family(hdd), seed, n);
        let life = reconstruct(&fleet.dataset).unwrap();
        let terminated = life.periods.iter().filter(|p| p.terminal == Terminal::Failure).count();
        prop_assert_eq!(terminated, life.failures.len());
        for w in life.periods.windows(2) {
            prop_assert!(w[0].start_day <= w[0].end_day);
            if w[0].drive == w[1].drive {
                prop_assert!(w[0].end_day < w[1].start_day);
            }
        }
        for w in life.failures.windows(2) {
            if w[0].drive == w[1].drive {
                prop_assert_eq!(w[1].ordinal, w[0].ordinal + 1);
            } else {
                prop_assert_eq!(w[1].ordinal, 1);
            }
        }
        prop_assert!(life.failures.iter().all(|f| f.age_days >= 0));
        for r in &life.repairs {
            prop_assert!(r.reentry_day.is_none_or(|d| d > r.fail_day));
        }
        let dist = failure_count_distribution(&life.failures, fleet.dataset.drive_count()).unwrap();
        let total: f64 = dist.iter().map(|d| d.share_of_all).sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn censored_cdf_is_bounded_and_monotone(
        values in proptest::collection::vec(0.0f64..500.0, 0..60),
        censored in 0usize..30,
        mut grid in proptest::collection::vec(-10.0f64..600.0, 1..40),
    ) {
        prop_assume!(!values.is_empty() || censored > 0);
        grid.sort_by(f64::total_cmp);
        let sample = CensoredSample { values: values.clone(), censored_count: censored };
        let cdf = censored_cdf(&sample, &grid).unwrap();
        for w in cdf.points.windows(2) {
            prop_assert!(w[0].1 <= w[1].1);
        }
        for &(t, f) in &cdf.points {
            prop_assert!(f <= 1.0 - cdf.censored_mass + 1e-12);
            // brute-force count
            let below = values.iter().filter(|&&v| v <= t).count();
            prop_assert_eq!(f, below as f64 / (values.len() + censored) as f64);
        }
    }
}
