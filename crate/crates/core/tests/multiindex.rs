use gaussgrid::{combination_coefficients, reduced_margin, smolyak_set, MultiIndex, MultiIndexSet};
use proptest::prelude::*;

/// Downward closure of a few random corners.
fn monotone_set(max_dims: usize, max_level: usize) -> impl Strategy<Value = MultiIndexSet> {
    (1..=max_dims).prop_flat_map(move |dims| {
        prop::collection::vec(prop::collection::vec(0..=max_level, dims), 1..5).prop_map(move |corners| {
            let mut set = MultiIndexSet::new(dims);
            for c in corners {
                let mut box_points: Vec<Vec<usize>> = vec![vec![]];
                for &l in &c {
                    box_points = box_points
                        .into_iter()
                        .flat_map(|v| (0..=l).map(move |j| [v.clone(), vec![j]].concat()))
                        .collect();
                }
                for v in box_points {
                    set.insert(MultiIndex::from_levels(&v));
                }
            }
            set
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn coefficients_sum_to_one(set in monotone_set(5, 4)) {
        prop_assert!(set.is_monotone());
        let c = combination_coefficients(&set).unwrap();
        prop_assert_eq!(c.values().sum::<i64>(), 1);
        prop_assert!(c.keys().all(|k| set.contains(k)));
    }

    #[test]
    fn reduced_margin_extends_monotonically(set in monotone_set(4, 4)) {
        let margin = reduced_margin(&set).unwrap();
        for k in margin.iter() {
            prop_assert!(!set.contains(k));
            prop_assert!(k.backward_neighbors().all(|b| set.contains(&b)));
            let mut bigger = set.clone();
            bigger.insert(k.clone());
            prop_assert!(bigger.is_monotone());
        }
        let mut union = set.clone();
        for k in margin.iter() {
            union.insert(k.clone());
        }
        prop_assert!(union.is_monotone());
        // every admissible forward neighbor is in the reduced margin
        for i in set.iter() {
            for d in 0..set.dimension_bound() {
                let k = i.increment(d);
                if !set.contains(&k) && set.is_admissible(&k) {
                    prop_assert!(margin.contains(&k));
                }
            }
        }
    }

    #[test]
    fn text_round_trip(set in monotone_set(4, 3)) {
        prop_assert_eq!(MultiIndexSet::parse_text(&set.to_text()).unwrap(), set);
    }
}

#[test]
fn smolyak_sets_are_nested() {
    for dims in 1..=5 {
        for w in 0..6 {
            let small = smolyak_set(dims, w);
            let big = smolyak_set(dims, w + 1);
            assert!(small.is_subset(&big) && small.len() < big.len());
            assert!(big.is_monotone());
            assert!(big.iter().all(|k| k.order() <= w + 1));
        }
    }
}
