mod common;

use std::collections::BTreeMap;

use drivelife::ingest::write_canonical;
use drivelife::lifecycle::detect_failures;
use drivelife::synthgen::{generate_fleet, verify_fleet, SynthConfig};
use proptest::prelude::*;

use common::{family, small_fleet};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn same_seed_same_bytes(seed in any::<u64>(), hdd in any::<bool>()) {
        let bytes = || {
            let fleet = small_fleet(family(hdd), seed, 15);
            let mut buf = Vec::new();
            write_canonical(&fleet.dataset, &mut buf).unwrap();
            buf
        };
        prop_assert_eq!(bytes(), bytes());
    }

    #[test]
    fn planted_failures_are_recovered(seed in any::<u64>(), hdd in any::<bool>()) {
        let fleet = small_fleet(family(hdd), seed, 30);
        prop_assert!(fleet.dataset.provenance.quarantined.is_empty());
        let detected = detect_failures(&fleet.dataset).unwrap();
        prop_assert_eq!(detected.len(), fleet.truth.len());
        let tol = SynthConfig::for_family(family(hdd)).inactivity.max_days as i64;
        let by_key: BTreeMap<(&str, u32), i64> = detected.iter().map(|f| ((f.drive.as_ref(), f.ordinal), f.day)).collect();
        for t in &fleet.truth {
            let day = by_key.get(&(t.drive.as_ref(), t.ordinal));
            prop_assert!(day.is_some_and(|d| (d - t.failure_day).abs() <= tol), "{:?} detected at {:?}", t, day);
        }
    }
}

#[test]
fn generated_fleet_passes_its_own_checks() {
    for hdd in [false, true] {
        let cfg = SynthConfig { seed: 11, ..SynthConfig::for_family(family(hdd)) };
        let fleet = generate_fleet(&cfg).unwrap();
        let report = verify_fleet(&fleet.dataset, &fleet.truth, &cfg);
        assert!(report.passed, "{:?}", report.failed().collect::<Vec<_>>());
    }
}

#[test]
fn doubled_targets_fail_verification() {
    let cfg = SynthConfig { seed: 12, ..SynthConfig::ssd() };
    let fleet = generate_fleet(&cfg).unwrap();
    let mut doubled = cfg.clone();
    for m in &mut doubled.models {
        m.failure_fraction *= 2.0;
    }
    let report = verify_fleet(&fleet.dataset, &fleet.truth, &doubled);
    assert!(report.failed().any(|c| c.name.contains("failed share")));
}

#[test]
fn infant_multiplier_shows_in_monthly_rates() {
    let mut cfg = SynthConfig { seed: 13, ..SynthConfig::ssd() };
    cfg.infant_hazard_multiplier = 5.0;
    let fleet = generate_fleet(&cfg).unwrap();
    let failures = detect_failures(&fleet.dataset).unwrap();
    let curve = drivelife::charstats::monthly_failure_rate(&failures, &fleet.dataset);
    let rates: Vec<f64> = curve.rates().into_iter().map(|r| r.unwrap_or(0.0)).collect();
    let young = rates[..3].iter().sum::<f64>() / 3.0;
    let old = rates[3..].iter().sum::<f64>() / (rates.len() - 3) as f64;
    assert!(young / old >= 3.0, "young {young} old {old}");
}
