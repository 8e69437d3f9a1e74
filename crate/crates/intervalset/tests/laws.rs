use proptest::prelude::*;
use qualred_intervalset::{ratio, Boundary, Interval, IntervalSet, Rational};

fn raw_interval() -> impl Strategy<Value = Option<Interval>> {
    (0i64..=8, 0i64..=8, any::<bool>(), any::<bool>()).prop_map(|(a, b, lc, hc)| {
        let (a, b) = (a.min(b), a.max(b));
        Interval::new(Boundary::new(ratio(a, 4), lc), Boundary::new(ratio(b, 4), hc))
    })
}

fn interval_set() -> impl Strategy<Value = IntervalSet> {
    prop::collection::vec(raw_interval(), 0..5).prop_map(|v| IntervalSet::from_intervals(v.into_iter().flatten()))
}

fn probes() -> Vec<Rational> {
    // quarter grid plus eighth midpoints covers every endpoint and gap
    (-1..=17).map(|k| ratio(k, 8)).collect()
}

fn assert_canonical(s: &IntervalSet) {
    for w in s.parts().windows(2) {
        let (a, b) = (&w[0], &w[1]);
        assert!(a.hi().value <= b.lo().value, "unsorted or overlapping: {s}");
        if a.hi().value == b.lo().value {
            assert!(!a.hi().closed && !b.lo().closed, "mergeable parts: {s}");
        }
    }
    for p in s.parts() {
        assert!(
            p.lo().value < p.hi().value || (p.lo().closed && p.hi().closed),
            "empty part in {s}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn operations_stay_canonical(a in interval_set(), b in interval_set()) {
        for s in [a.union(&b), a.intersect(&b), a.difference(&b), a.closure()] {
            assert_canonical(&s);
        }
    }

    #[test]
    fn membership_matches_pointwise_definition(a in interval_set(), b in interval_set()) {
        let (u, i, d, c) = (a.union(&b), a.intersect(&b), a.difference(&b), a.closure());
        for p in probes() {
            let (ia, ib) = (a.contains(&p), b.contains(&p));
            prop_assert_eq!(u.contains(&p), ia || ib);
            prop_assert_eq!(i.contains(&p), ia && ib);
            prop_assert_eq!(d.contains(&p), ia && !ib);
            let near = a.parts().iter().any(|part| part.lo().value <= p && p <= part.hi().value);
            prop_assert_eq!(c.contains(&p), near);
        }
    }

    #[test]
    fn lattice_laws(a in interval_set(), b in interval_set(), c in interval_set()) {
        prop_assert_eq!(a.union(&b), b.union(&a));
        prop_assert_eq!(a.intersect(&b), b.intersect(&a));
        prop_assert_eq!(a.union(&b).union(&c), a.union(&b.union(&c)));
        prop_assert_eq!(a.intersect(&b).intersect(&c), a.intersect(&b.intersect(&c)));
        prop_assert_eq!(a.union(&a.intersect(&b)), a.clone());
        prop_assert_eq!(a.intersect(&a.union(&b)), a.clone());
        prop_assert_eq!(a.intersect(&b.union(&c)), a.intersect(&b).union(&a.intersect(&c)));
        prop_assert_eq!(a.union(&b.intersect(&c)), a.union(&b).intersect(&a.union(&c)));
    }

    #[test]
    fn de_morgan_within_carrier(a in interval_set(), b in interval_set()) {
        let carrier = a.union(&b).union(&"[0,2]".parse().unwrap());
        let comp = |s: &IntervalSet| s.complement_within(&carrier).unwrap();
        prop_assert_eq!(comp(&a.union(&b)), comp(&a).intersect(&comp(&b)));
        prop_assert_eq!(comp(&a.intersect(&b)), comp(&a).union(&comp(&b)));
    }

    #[test]
    fn closure_is_idempotent_and_extensive(a in interval_set()) {
        let c = a.closure();
        prop_assert_eq!(c.closure(), c.clone());
        prop_assert!(a.is_subset(&c));
    }

    #[test]
    fn text_round_trips(a in interval_set()) {
        let text = a.to_string();
        let back: IntervalSet = text.parse().unwrap();
        prop_assert_eq!(back.to_string(), text);
        prop_assert_eq!(back, a);
    }
}
