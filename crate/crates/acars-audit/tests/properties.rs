//! Property tests for the ingest and parse invariants the pipeline relies on.

use proptest::prelude::*;

use acars_audit::ingest::{dedupe, partition_by_link, AcarsRecord, Direction, Link};
use acars_audit::parse::{parse_frame, serialize_frame, AcarsMessage};

fn link_strategy() -> impl Strategy<Value = Link> {
    prop_oneof![
        Just(Link::VhfPoa),
        Just(Link::Vdlm2),
        Just(Link::SatcomUplink),
        Just(Link::SatcomDownlink),
    ]
}

fn record_strategy() -> impl Strategy<Value = AcarsRecord> {
    (
        "[a-z]{1,8}",
        1i64..10_000,
        link_strategy(),
        // small frame pool so duplicates actually occur
        prop_oneof!["2N123AB.5A 1M01AXY123POS N50.1 E008.6", "[A-Z0-9 .]{0,30}"],
        0u32..3,
    )
        .prop_map(|(id, timestamp, link, raw_frame, capture_errors)| AcarsRecord {
            record_id: id,
            timestamp,
            link,
            frequency_mhz: None,
            direction: Direction::Unknown,
            raw_frame,
            capture_errors,
        })
}

fn message_strategy() -> impl Strategy<Value = AcarsMessage> {
    let graphic = || proptest::char::range('!', '~');
    (
        graphic(),
        "[A-Z0-9-]{1,7}",
        graphic(),
        "[A-Z0-9]{2}",
        proptest::option::of(graphic()),
        proptest::option::of("[A-Z][0-9]{2}[A-Z0-9]"),
        proptest::option::of("[A-Z0-9]{1,6}"),
        "[ -~]{0,80}",
    )
        .prop_map(
            |(mode, registration, tech_ack, label, block_id, msg_no, flight_id, text)| {
                AcarsMessage {
                    mode,
                    registration,
                    tech_ack,
                    label,
                    block_id,
                    msg_no,
                    flight_id,
                    text,
                }
            },
        )
}

proptest! {
    #[test]
    fn dedupe_is_idempotent(records in proptest::collection::vec(record_strategy(), 0..40),
                            window in 0i64..120) {
        let mut sorted = records;
        sorted.sort_by_key(|r| r.timestamp);
        let once = dedupe(sorted, window);
        let twice = dedupe(once.clone(), window);
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn dedupe_keeps_a_subsequence(records in proptest::collection::vec(record_strategy(), 0..40),
                                  window in 0i64..120) {
        let kept = dedupe(records.clone(), window);
        prop_assert!(kept.len() <= records.len());
        let mut it = records.iter();
        for k in &kept {
            prop_assert!(it.any(|r| r == k), "survivor out of order or invented");
        }
    }

    #[test]
    fn partition_is_a_set_partition(records in proptest::collection::vec(record_strategy(), 0..40)) {
        let parts = partition_by_link(records.clone());
        let total: usize = parts.values().map(Vec::len).sum();
        prop_assert_eq!(total, records.len());
        for (link, bucket) in &parts {
            for rec in bucket {
                prop_assert_eq!(rec.link, *link);
            }
        }
    }

    #[test]
    fn serialize_parse_round_trip(msg in message_strategy()) {
        let frame = serialize_frame(&msg).expect("generated message is valid");
        let back = parse_frame(&frame).expect("serialized frame parses");
        prop_assert_eq!(back, msg);
    }

    #[test]
    fn parse_never_panics(raw in "\\PC{0,48}") {
        let _ = parse_frame(&raw);
    }
}
