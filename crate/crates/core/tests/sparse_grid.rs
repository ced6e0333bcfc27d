use std::collections::BTreeMap;
use std::sync::Arc;

use gaussgrid::nodes::level_to_knots;
use gaussgrid::{hermite_tensor_eval, reduced_margin, MultiIndex, MultiIndexSet, NodeFamily, RuleTable, SparseGrid};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn family() -> impl Strategy<Value = NodeFamily> {
    prop::sample::select(NodeFamily::ALL.to_vec())
}

/// Grows a monotone set from the root by admissible forward neighbors.
fn monotone_set(max_dims: usize, max_level: usize) -> impl Strategy<Value = MultiIndexSet> {
    (1..=max_dims).prop_flat_map(move |dims| {
        prop::collection::vec((any::<prop::sample::Index>(), 0..dims), 0..12).prop_map(move |moves| {
            let mut set = MultiIndexSet::root(dims);
            for (pick, d) in moves {
                let members: Vec<MultiIndex> = set.iter().cloned().collect();
                let k = pick.get(&members).increment(d);
                if k.max_level() <= max_level && set.is_admissible(&k) {
                    set.insert(k);
                }
            }
            set.set_dimension_bound(dims);
            set
        })
    })
}

/// Hermite coefficients of a random member of `P_Lambda`.
fn polynomial_in(set: &MultiIndexSet, family: NodeFamily, seed: u64) -> BTreeMap<MultiIndex, f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let members: Vec<&MultiIndex> = set.iter().collect();
    let mut poly = BTreeMap::new();
    for _ in 0..6 {
        let i = members[rng.random_range(0..members.len())];
        let degree = i
            .entries()
            .iter()
            .map(|&(d, l)| (d, rng.random_range(0..level_to_knots(family, l).unwrap())));
        poly.insert(
            MultiIndex::from_pairs(degree.collect::<Vec<_>>()),
            rng.random_range(-1.0..1.0),
        );
    }
    poly
}

fn eval(poly: &BTreeMap<MultiIndex, f64>, xi: &[f64]) -> f64 {
    poly.iter().map(|(k, c)| c * hermite_tensor_eval(k, xi).unwrap()).sum()
}

fn scale(poly: &BTreeMap<MultiIndex, f64>, xi: &[f64]) -> f64 {
    1.0 + poly
        .iter()
        .map(|(k, c)| (c * hermite_tensor_eval(k, xi).unwrap()).abs())
        .sum::<f64>()
}

fn gaussian_points(dims: usize, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (0..dims).map(|_| StandardNormal.sample(&mut rng)).collect())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reproduces_polynomials_in_the_span(set in monotone_set(4, 4), family in family(), seed in any::<u64>()) {
        let poly = polynomial_in(&set, family, seed);
        let grid = SparseGrid::<f64>::build(&set, family).unwrap();
        let values = grid.sample(|xi| eval(&poly, xi));
        for xi in gaussian_points(set.dimension_bound(), 20, seed ^ 1) {
            let err = (grid.evaluate(&values, &xi).unwrap() - eval(&poly, &xi)).abs();
            prop_assert!(err <= 1e-9 * scale(&poly, &xi), "error {}", err);
        }
    }

    #[test]
    fn details_outside_the_set_vanish(set in monotone_set(3, 3), family in family(), seed in any::<u64>()) {
        let poly = polynomial_in(&set, family, seed);
        let grid = SparseGrid::<f64>::build(&set, family).unwrap();
        let values = grid.sample(|xi| eval(&poly, xi));
        let margin = reduced_margin(&set).unwrap();
        let points = gaussian_points(set.dimension_bound(), 10, seed ^ 2);
        for k in margin.iter().take(4) {
            let mut bigger = set.clone();
            bigger.insert(k.clone());
            let g2 = SparseGrid::<f64>::build(&bigger, family).unwrap();
            let v2 = g2.sample(|xi| eval(&poly, xi));
            for xi in &points {
                let d = (g2.evaluate(&v2, xi).unwrap() - grid.evaluate(&values, xi).unwrap()).abs();
                prop_assert!(d <= 1e-9 * scale(&poly, xi));
            }
        }
    }

    #[test]
    fn nested_grids_interpolate(set in monotone_set(4, 4), nested in prop::sample::select(vec![NodeFamily::GaussianLeja, NodeFamily::GenzKeister]), seed in any::<u64>()) {
        let grid = SparseGrid::<f64>::build(&set, nested).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values: Vec<f64> = (0..grid.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        for p in 0..grid.len() {
            let at = grid.evaluate(&values, &grid.point(p)).unwrap();
            prop_assert!((at - values[p]).abs() < 1e-9);
        }
    }

    #[test]
    fn counting_strategies(set in monotone_set(4, 4)) {
        for family in NodeFamily::ALL {
            let c = SparseGrid::<f64>::build(&set, family).unwrap().counts();
            prop_assert!(c.incremental >= c.combitec);
            if family.is_nested() {
                prop_assert_eq!(c.incremental, c.combitec);
            }
        }
    }
}

#[test]
fn a_shared_table_gives_the_same_grid() {
    let set = MultiIndexSet::parse_text("1 1\n2 1\n1 2\n3 1\n2 2").unwrap();
    for family in NodeFamily::ALL {
        let table = Arc::new(RuleTable::with_levels(family, 4).unwrap());
        let a = SparseGrid::<f64>::build_with_table(&set, table).unwrap();
        let b = SparseGrid::<f64>::build(&set, family).unwrap();
        assert_eq!(a.points(), b.points());
        assert_eq!(a.quadrature_weights(), b.quadrature_weights());
    }
}

#[test]
fn hermite_norm_matches_monte_carlo() {
    let set = MultiIndexSet::parse_text("1 1 1\n2 1 1\n3 1 1\n1 2 1\n2 2 1\n1 1 2\n1 3 1").unwrap();
    let f = |xi: &[f64]| (0.4 * xi[0] - 0.3 * xi[1] + 0.2 * xi[2]).exp();
    for family in NodeFamily::ALL {
        let grid = SparseGrid::<f64>::build(&set, family).unwrap();
        let values = grid.sample(f);
        let norm = grid.to_hermite(&values).unwrap().norm();
        let samples = gaussian_points(3, 100_000, 11);
        let mc = (grid
            .evaluate_many(&values, &samples)
            .unwrap()
            .iter()
            .map(|v| v * v)
            .sum::<f64>()
            / samples.len() as f64)
            .sqrt();
        assert!((norm - mc).abs() / mc < 0.02, "{family}: {norm} vs {mc}");
    }
}
