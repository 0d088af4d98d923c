#![allow(dead_code)]

use drivelife::synthgen::{generate_fleet, SynthConfig, SynthFleet};
use drivelife::Family;

/// A fleet small enough to generate inside a proptest case.
pub fn small_fleet(family: Family, seed: u64, n_drives: usize) -> SynthFleet {
    let mut cfg = SynthConfig::for_family(family);
    cfg.n_drives = n_drives;
    cfg.horizon_days = 200;
    cfg.seed = seed;
    // keep failures frequent enough to exercise the tails
    for m in &mut cfg.models {
        m.failure_fraction = m.failure_fraction.max(0.2);
    }
    generate_fleet(&cfg).expect("small fleet config is valid")
}

pub fn family(hdd: bool) -> Family {
    if hdd {
        Family::Hdd
    } else {
        Family::Ssd
    }
}
