//! Counts and invariants must not depend on the coordinate on the base, and
//! configurations must survive a JSON round trip.

use fm_elliptic::moebius::n1_upper_bound;
use fm_elliptic::threefold::fiber_product_invariants;
use fm_elliptic::{Moebius, Point, Rational, SurfaceConfig};
use proptest::prelude::*;

fn config(m: u64, xi: i64) -> SurfaceConfig {
    SurfaceConfig::from_json(&format!(
        r#"{{"fibers": [{{"at": "0", "type": "II*"}}, {{"at": "1", "type": "I1"}}, {{"at": "inf", "type": "I1"}}],
            "marked": {{"s": "1", "kind": "I1", "m": {m}, "xi": {{"m": {m}, "coords": [{xi}]}}}},
            "aut_order": 2}}"#
    ))
    .unwrap()
}

fn companion() -> SurfaceConfig {
    SurfaceConfig::from_json(
        r#"{"fibers": [{"at": "1/3", "type": "III*"}, {"at": "-5/7", "type": "III"}], "aut_order": 4}"#,
    )
    .unwrap()
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=5).prop_map(|(n, d)| Rational::new(n.into(), d.into()))
}

fn moebius() -> impl Strategy<Value = Moebius> {
    (
        small_rational(),
        small_rational(),
        small_rational(),
        small_rational(),
    )
        .prop_filter_map("degenerate", |(a, b, c, d)| Moebius::new(a, b, c, d).ok())
}

fn coprime_pair() -> impl Strategy<Value = (u64, i64)> {
    (3u64..=60)
        .prop_flat_map(|m| (Just(m), 1..m as i64))
        .prop_filter("unit", |&(m, a)| num_integer::gcd(m, a as u64) == 1)
}

#[test]
fn json_round_trip() {
    for cfg in [config(22, 3), companion()] {
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(SurfaceConfig::from_json(&text).unwrap(), cfg);
    }
}

#[test]
fn unknown_fields_rejected() {
    let r = SurfaceConfig::from_json(r#"{"fibers": [], "aut_order": 1, "extra": 0}"#);
    assert!(r.is_err());
}

proptest! {
    #[test]
    fn counts_ignore_base_coordinate(f in moebius(), (m, xi) in coprime_pair()) {
        let cfg = config(m, xi);
        let moved = cfg.relabel(|p: &Point| f.apply(p));
        prop_assert_eq!(n1_upper_bound(&moved), n1_upper_bound(&cfg));
        let (a, b) = (cfg.fm_report().unwrap(), moved.fm_report().unwrap());
        prop_assert_eq!(a.fm_count_exact, b.fm_count_exact);
        prop_assert_eq!(a.partner_reps, b.partner_reps);
        prop_assert_eq!(a.lower_bound, b.lower_bound);
    }

    #[test]
    fn fiber_product_ignores_base_coordinate(f in moebius(), (m, xi) in coprime_pair()) {
        let (a, b) = (config(m, xi), companion());
        let before = fiber_product_invariants(&a, &b).unwrap();
        let after = fiber_product_invariants(
            &a.relabel(|p: &Point| f.apply(p)),
            &b.relabel(|p: &Point| f.apply(p)),
        )
        .unwrap();
        prop_assert_eq!(before, after);
    }
}
