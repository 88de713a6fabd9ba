mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use stratmap::metrics::{ccm_sequence, coverage, recognize_strategies, SubmapSet};
use stratmap::{fixtures, Rate, UnitId};

fn comparison_set() -> SubmapSet {
    let km = fixtures::c_course_map();
    SubmapSet::comparison(&km, &UnitId::new("array"), &UnitId::new("pointer")).unwrap()
}

fn arb_visits() -> impl Strategy<Value = Vec<UnitId>> {
    let ids: Vec<UnitId> = fixtures::c_course_map().unit_ids().cloned().collect();
    prop::collection::vec(prop::sample::select(ids), 0..40)
}

#[test]
fn worked_trace_ends_at_known_ccm() {
    let set = comparison_set();
    let curve = ccm_sequence(&fixtures::comparison_trace(), set.members()).unwrap();
    let last = curve.last().unwrap();
    assert_eq!(last.0, vec![Rate::new(1, 2), Rate::new(3, 5), Rate::new(0, 1)]);
}

proptest! {
    #[test]
    fn curves_never_decrease(visits in arb_visits()) {
        let set = comparison_set();
        let curve = ccm_sequence(&visits, set.members()).unwrap();
        prop_assert_eq!(curve.len(), visits.len());
        for w in curve.ccms.windows(2) {
            for (a, b) in w[0].0.iter().zip(&w[1].0) {
                prop_assert!(a <= b);
            }
        }
    }

    #[test]
    fn final_ccm_is_set_coverage(visits in arb_visits()) {
        prop_assume!(!visits.is_empty());
        let set = comparison_set();
        let curve = ccm_sequence(&visits, set.members()).unwrap();
        let visited: BTreeSet<UnitId> = visits.iter().cloned().collect();
        for (j, t) in set.members().iter().enumerate() {
            let want = coverage(&t.submap, &visited).unwrap();
            let direct = Rate::new(
                t.submap.unit_ids.intersection(&visited).count() as u64,
                t.submap.len() as u64,
            );
            prop_assert_eq!(curve.last().unwrap().0[j], want);
            prop_assert_eq!(want, direct);
        }
    }

    #[test]
    fn recognition_agrees_with_final_values(visits in arb_visits(), num in 1u64..=5) {
        let threshold = Rate::new(num, 5);
        let set = comparison_set();
        let curve = ccm_sequence(&visits, set.members()).unwrap();
        let found = recognize_strategies(&curve, threshold).unwrap();
        let crossed: BTreeSet<usize> = match curve.last() {
            Some(last) => (0..3).filter(|j| last.0[*j] >= threshold).collect(),
            None => BTreeSet::new(),
        };
        prop_assert_eq!(found.iter().map(|i| i.component).collect::<BTreeSet<_>>(), crossed);
        for w in found.windows(2) {
            prop_assert!((w[0].crossing_index, w[0].component) < (w[1].crossing_index, w[1].component));
        }
        for inst in &found {
            prop_assert!(curve.ccms[inst.crossing_index - 1].0[inst.component] >= threshold);
            if inst.crossing_index > 1 {
                prop_assert!(curve.ccms[inst.crossing_index - 2].0[inst.component] < threshold);
            }
        }
    }
}
