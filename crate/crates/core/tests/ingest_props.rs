mod common;

use drivelife::ingest::{parse_canonical, write_canonical};
use proptest::prelude::*;
use rand::seq::SliceRandom;

use common::{family, small_fleet};

fn canonical_csv(ds: &drivelife::FleetDataset) -> String {
    let mut buf = Vec::new();
    write_canonical(ds, &mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn canonical_round_trip(seed in any::<u64>(), hdd in any::<bool>(), n in 1usize..25) {
        let fleet = small_fleet(family(hdd), seed, n);
        let csv = canonical_csv(&fleet.dataset);
        let back = parse_canonical(family(hdd), csv.as_bytes(), "round-trip").unwrap();
        prop_assert_eq!(&back, &fleet.dataset);
        prop_assert_eq!(canonical_csv(&back), csv);
    }

    #[test]
    fn row_order_does_not_matter(seed in any::<u64>(), hdd in any::<bool>(), shuffle_seed in any::<u64>()) {
        let fleet = small_fleet(family(hdd), seed, 8);
        let csv = canonical_csv(&fleet.dataset);
        let mut lines: Vec<&str> = csv.lines().collect();
        let header = lines.remove(0);
        lines.shuffle(&mut drivelife::seed::rng(shuffle_seed));
        let shuffled = format!("{header}\n{}\n", lines.join("\n"));
        let back = parse_canonical(family(hdd), shuffled.as_bytes(), "shuffled").unwrap();
        prop_assert_eq!(back, fleet.dataset);
    }

    #[test]
    fn every_data_row_is_accepted_or_rejected(
        seed in any::<u64>(),
        hdd in any::<bool>(),
        junk in proptest::collection::vec((0usize..10_000, "[a-z,;]{0,12}"), 0..8),
    ) {
        let fleet = small_fleet(family(hdd), seed, 6);
        let csv = canonical_csv(&fleet.dataset);
        let mut lines: Vec<String> = csv.lines().map(String::from).collect();
        for (pos, text) in &junk {
            let at = 1 + pos % lines.len();
            lines.insert(at, text.clone());
        }
        let text = lines.join("\n") + "\n";
        let ds = parse_canonical(family(hdd), text.as_bytes(), "junk").unwrap();
        let prov = &ds.provenance;
        prop_assert!(prov.quarantined.is_empty());
        prop_assert_eq!(prov.rejected_count() + ds.record_count() as u64, prov.data_rows);
    }
}
