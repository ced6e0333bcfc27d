use std::collections::{BTreeMap, HashSet};
use std::sync::{Arc, Mutex};

use gaussgrid::adaptive::probe_column;
use gaussgrid::{
    reduced_margin, run_a_posteriori, run_a_posteriori_with, AdaptiveConfig, FnModel, MultiIndex, MultiIndexSet,
    NodeFamily, PointKey, RuleTable, SparseGrid,
};

fn model(xi: &[f64]) -> f64 {
    (0.6 * xi[0] - 0.35 * xi[1] + 0.15 * xi[2]).exp() / (1.0 + 0.1 * xi[0] * xi[0])
}

/// Plain dimension-adaptive selection over all three dimensions, written
/// against the public grid API only. Returns the selected indices and the
/// work after each step.
fn plain_gerstner_griebel(config: &AdaptiveConfig) -> Vec<(MultiIndex, usize)> {
    let dims = 3;
    let mut table = RuleTable::<f64>::with_levels(config.family, 1).unwrap();
    let probes: Vec<Vec<f64>> = (0..dims)
        .map(|d| probe_column(config.probe_seed, d, config.probe_samples))
        .collect();
    let mut seen: HashSet<PointKey> = HashSet::from([PointKey::default()]);
    let indicator = |i: &MultiIndex, table: &mut RuleTable<f64>, seen: &mut HashSet<PointKey>| {
        table.ensure_level(i.max_level()).unwrap();
        let detail = SparseGrid::detail(i, Arc::new(table.clone())).unwrap();
        seen.extend(detail.points().iter().cloned());
        let values = detail.sample(|xi| {
            let mut x = xi.to_vec();
            x.resize(dims, 0.0);
            model(&x)
        });
        let len = detail.dimension();
        let ms = (0..config.probe_samples)
            .map(|s| {
                let xi: Vec<f64> = (0..len).map(|d| probes[d][s]).collect();
                detail.evaluate(&values, &xi).unwrap().powi(2)
            })
            .sum::<f64>()
            / config.probe_samples as f64;
        ms.sqrt()
    };
    let scale = model(&[0.0; 3]).abs();
    let mut active = MultiIndexSet::root(dims);
    let mut margin: BTreeMap<MultiIndex, f64> = BTreeMap::new();
    let mut selected = MultiIndex::zero();
    let mut steps = Vec::new();
    loop {
        for k in reduced_margin(&active).unwrap().iter() {
            let too_deep = config.family.max_level().is_some_and(|m| k.max_level() > m);
            if !too_deep && !margin.contains_key(k) {
                let v = indicator(k, &mut table, &mut seen);
                margin.insert(k.clone(), v);
            }
        }
        steps.push((selected.clone(), seen.len()));
        if seen.len() >= config.budget {
            return steps;
        }
        let mut best: Option<(&MultiIndex, f64)> = None;
        for (k, &v) in &margin {
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((k, v));
            }
        }
        let Some((k, v)) = best.map(|(k, v)| (k.clone(), v)) else {
            return steps;
        };
        if v <= config.tolerance * scale {
            return steps;
        }
        margin.remove(&k);
        active.insert(k.clone());
        selected = k;
    }
}

#[test]
fn wide_buffer_is_plain_gerstner_griebel() {
    for family in NodeFamily::ALL {
        let config = AdaptiveConfig::new(family, 150, 3);
        let f = FnModel::new(3, model);
        let state = run_a_posteriori(&f, config.clone()).unwrap();
        let wider = run_a_posteriori(
            &f,
            AdaptiveConfig {
                buffer_size: 10,
                ..config.clone()
            },
        )
        .unwrap();
        assert_eq!(state.trace, wider.trace, "{family}");

        let reference = plain_gerstner_griebel(&config);
        let ours: Vec<(MultiIndex, usize)> = state
            .trace
            .iter()
            .map(|r| (r.selected.clone(), r.g_set.incremental))
            .collect();
        assert_eq!(ours.len(), reference.len(), "{family}");
        assert_eq!(ours, reference, "{family}");
    }
}

#[test]
fn every_iteration_keeps_the_invariants() {
    let f = FnModel::new(6, |xi: &[f64]| {
        (xi.iter()
            .enumerate()
            .map(|(m, x)| x / (m as f64 + 1.0).powi(2))
            .sum::<f64>())
        .cos()
    });
    let mut previous_margin: Option<BTreeMap<MultiIndex, f64>> = None;
    let state = run_a_posteriori_with(&f, AdaptiveConfig::new(NodeFamily::GaussianLeja, 300, 2), |s| {
        let last = s.trace.last().unwrap();
        assert!(s.active_set().is_monotone());
        assert!(s.active_set().contains(&last.selected));
        if let Some(m) = &previous_margin {
            assert!(m.contains_key(&last.selected));
        }
        let g = s.g_set();
        assert!(g.is_monotone() && s.active_set().is_subset(&g));
        assert!(s.introduced_dims() <= s.active_set().active_dim_count() + 2);
        previous_margin = Some(s.indicators());
        Ok(())
    })
    .unwrap();
    assert!(state.work() >= 300);
}

#[test]
fn work_counts_distinct_evaluations() {
    for family in NodeFamily::ALL {
        let calls = Mutex::new(Vec::<Vec<u64>>::new());
        let f = FnModel::new(4, |xi: &[f64]| {
            calls.lock().unwrap().push(xi.iter().map(|v| v.to_bits()).collect());
            (0.5 * xi[0] + 0.25 * xi[1] * xi[2] - 0.125 * xi[3]).sin()
        });
        let state = run_a_posteriori(&f, AdaptiveConfig::new(family, 200, 2)).unwrap();
        let calls = calls.into_inner().unwrap();
        let distinct: HashSet<&Vec<u64>> = calls.iter().collect();
        assert_eq!(distinct.len(), calls.len(), "{family}: repeated evaluation");
        assert_eq!(state.work(), calls.len(), "{family}");
        assert_eq!(state.trace.last().unwrap().g_set.incremental, state.work(), "{family}");
    }
}

#[test]
fn traces_are_reproducible() {
    let run = || {
        let f = FnModel::new(8, |xi: &[f64]| {
            xi.iter()
                .enumerate()
                .map(|(m, x)| (x / (m as f64 + 2.0)).exp())
                .product::<f64>()
        });
        run_a_posteriori(&f, AdaptiveConfig::new(NodeFamily::GaussHermite, 250, 3))
            .unwrap()
            .trace
    };
    let first = run();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    assert_eq!(first, pool.install(run));
    assert_eq!(first, run());
}
