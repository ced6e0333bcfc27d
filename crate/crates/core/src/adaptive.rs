//! Dimension-adaptive index-set construction.
//!
//! [`run_a_posteriori`] is the Gerstner-Griebel algorithm with a buffer of
//! inactive variables: dimensions enter the candidate pool in expansion
//! order, and a fresh one is added whenever a buffered dimension becomes
//! active, so that exactly `buffer_size` untouched dimensions are probed.
//! [`a_priori_set`] builds sets greedily from field magnitudes.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::FieldExpansion;
use crate::multiindex::{MultiIndex, MultiIndexSet};
use crate::nodes::{NodeFamily, RuleTable};
use crate::pde::{FemSolution, LognormalProblem};
use crate::sparse_grid::{GridValue, PointCounts, PointKey, SparseGrid};

/// A deterministic map from parameter vectors to values.
///
/// `xi` covers the leading dimensions; missing trailing coordinates are 0.
pub trait CollocationModel: Sync {
    type Value: GridValue<f64>;

    fn evaluate(&self, xi: &[f64]) -> Result<Self::Value>;

    /// Number of parameters the model accepts.
    fn dimension(&self) -> usize;
}

/// A scalar function of a finite number of parameters.
pub struct FnModel<F> {
    f: F,
    dimension: usize,
}

impl<F> FnModel<F>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    pub fn new(dimension: usize, f: F) -> Self {
        Self { f, dimension }
    }
}

impl<F> CollocationModel for FnModel<F>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    type Value = f64;

    fn evaluate(&self, xi: &[f64]) -> Result<f64> {
        if xi.len() >= self.dimension {
            return Ok((self.f)(&xi[..self.dimension]));
        }
        let mut padded = xi.to_vec();
        padded.resize(self.dimension, 0.0);
        Ok((self.f)(&padded))
    }

    fn dimension(&self) -> usize {
        self.dimension
    }
}

impl CollocationModel for LognormalProblem {
    type Value = FemSolution<f64>;

    fn evaluate(&self, xi: &[f64]) -> Result<FemSolution<f64>> {
        self.solve(xi)
    }

    fn dimension(&self) -> usize {
        self.field.truncation
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Profit {
    /// Select by the raw indicator.
    Error,
    /// Select by indicator divided by the number of new points.
    ErrorPerWork,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdaptiveConfig {
    pub family: NodeFamily,
    /// Stop once this many model evaluations have been spent.
    pub budget: usize,
    pub buffer_size: usize,
    pub probe_samples: usize,
    pub probe_seed: u64,
    pub profit: Profit,
    /// Stop when every indicator is below `tolerance * |f(0)|`.
    pub tolerance: f64,
}

impl AdaptiveConfig {
    pub fn new(family: NodeFamily, budget: usize, buffer_size: usize) -> Self {
        Self {
            family,
            budget,
            buffer_size,
            probe_samples: 200,
            probe_seed: 0x5eed,
            profit: Profit::Error,
            tolerance: 1e-12,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRecord {
    pub iteration: usize,
    pub selected: MultiIndex,
    /// Largest level of the selected index, 1-based.
    pub max_component: usize,
    pub active_dims: usize,
    pub margin_size: usize,
    pub i_set: PointCounts,
    pub g_set: PointCounts,
    pub error_estimate: f64,
}

pub const TRACE_HEADER: &str = "iteration,selected_index,max_component,active_dims,margin_size,work_incremental_Iset,work_incremental_Gset,work_combitec_Iset,work_combitec_Gset,error_estimate";

/// Trace rows in CSV form (header included).
pub fn trace_csv(trace: &[TraceRecord], width: usize) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for r in trace {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{:e}",
            r.iteration,
            r.selected.to_text(width.max(r.selected.dim_extent())),
            r.max_component,
            r.active_dims,
            r.margin_size,
            r.i_set.incremental,
            r.g_set.incremental,
            r.i_set.combitec,
            r.g_set.combitec,
            r.error_estimate
        );
    }
    out
}

#[derive(Clone, Debug)]
struct Candidate {
    indicator: f64,
    profit: f64,
}

/// State of an a-posteriori run.
pub struct AdaptiveState<V> {
    pub config: AdaptiveConfig,
    active: MultiIndexSet,
    margin: BTreeMap<MultiIndex, Candidate>,
    saturated: Vec<MultiIndex>,
    introduced: usize,
    max_dims: usize,
    table: Arc<RuleTable<f64>>,
    cache: HashMap<PointKey, V>,
    probes: Vec<Vec<f64>>,
    scale: f64,
    pub trace: Vec<TraceRecord>,
}

impl<V: GridValue<f64>> AdaptiveState<V> {
    pub fn active_set(&self) -> &MultiIndexSet {
        &self.active
    }

    /// Indicators of the evaluated reduced-margin indices.
    pub fn indicators(&self) -> BTreeMap<MultiIndex, f64> {
        self.margin.iter().map(|(k, c)| (k.clone(), c.indicator)).collect()
    }

    /// Forward neighbors dropped because the rule has no higher level.
    pub fn saturated(&self) -> &[MultiIndex] {
        &self.saturated
    }

    /// Dimensions introduced so far (active ones plus the buffer).
    pub fn introduced_dims(&self) -> usize {
        self.introduced
    }

    /// Distinct model evaluations so far.
    pub fn work(&self) -> usize {
        self.cache.len()
    }

    pub fn table(&self) -> &Arc<RuleTable<f64>> {
        &self.table
    }

    /// Active set together with every evaluated margin index.
    pub fn g_set(&self) -> MultiIndexSet {
        let mut g = self.active.clone();
        for k in self.margin.keys() {
            g.insert(k.clone());
        }
        g.set_dimension_bound(self.introduced);
        g
    }

    /// Grid on `set` (a subset of the G-set) with values from the cache.
    pub fn grid_with_values(&self, set: &MultiIndexSet) -> Result<(SparseGrid<f64>, Vec<V>)> {
        let grid = SparseGrid::build_with_table(set, self.table.clone())?;
        let values = grid
            .points()
            .iter()
            .map(|k| {
                self.cache
                    .get(k)
                    .cloned()
                    .ok_or_else(|| Error::InvalidArgument("grid point was never evaluated".into()))
            })
            .collect::<Result<Vec<V>>>()?;
        Ok((grid, values))
    }

    pub fn error_estimate(&self) -> f64 {
        self.margin.values().map(|c| c.indicator).sum()
    }

    fn probe(&self, s: usize, len: usize) -> Vec<f64> {
        (0..len).map(|d| self.probes[d][s]).collect()
    }

    fn ensure_probe_columns(&mut self, dims: usize) {
        while self.probes.len() < dims {
            let d = self.probes.len();
            self.probes
                .push(probe_column(self.config.probe_seed, d, self.config.probe_samples));
        }
    }

    fn evaluate_points<M: CollocationModel<Value = V>>(&mut self, model: &M, keys: &[PointKey]) -> Result<usize> {
        let mut fresh: Vec<PointKey> = Vec::new();
        for k in keys {
            if !self.cache.contains_key(k) && !fresh.contains(k) {
                fresh.push(k.clone());
            }
        }
        let table = &self.table;
        let values: Vec<V> = fresh
            .par_iter()
            .map(|k| model.evaluate(&k.dense(table, 0)))
            .collect::<Result<_>>()?;
        let n = fresh.len();
        for (k, v) in fresh.into_iter().zip(values) {
            self.cache.insert(k, v);
        }
        Ok(n)
    }

    /// RMS over the probe set of `||Delta_i f||`; evaluates missing points.
    fn compute_indicator<M: CollocationModel<Value = V>>(&mut self, model: &M, i: &MultiIndex) -> Result<Candidate> {
        if self.table.max_level().is_none_or(|m| m < i.max_level()) {
            Arc::make_mut(&mut self.table).ensure_level(i.max_level())?;
        }
        let detail = SparseGrid::detail(i, self.table.clone())?;
        let new_points = self.evaluate_points(model, detail.points())?;
        let values: Vec<V> = detail.points().iter().map(|k| self.cache[k].clone()).collect();
        let len = detail.dimension();
        self.ensure_probe_columns(len);
        let sq: Vec<f64> = (0..self.config.probe_samples)
            .into_par_iter()
            .map(|s| {
                let xi = self.probe(s, len);
                let w = detail.interpolation_weights(&xi).expect("probe covers every dimension");
                let v = SparseGrid::combine(&w, &values).norm();
                v * v
            })
            .collect();
        let indicator = (sq.iter().sum::<f64>() / sq.len().max(1) as f64).sqrt();
        let profit = match self.config.profit {
            Profit::Error => indicator,
            Profit::ErrorPerWork => indicator / new_points.max(1) as f64,
        };
        Ok(Candidate { indicator, profit })
    }

    fn add_candidate<M: CollocationModel<Value = V>>(&mut self, model: &M, k: MultiIndex) -> Result<()> {
        if self.active.contains(&k) || self.margin.contains_key(&k) || !self.active.is_admissible(&k) {
            return Ok(());
        }
        if let Some(max) = self.config.family.max_level() {
            if k.max_level() > max {
                if !self.saturated.contains(&k) {
                    self.saturated.push(k);
                }
                return Ok(());
            }
        }
        let c = self.compute_indicator(model, &k)?;
        self.margin.insert(k, c);
        Ok(())
    }

    fn introduce_dims<M: CollocationModel<Value = V>>(&mut self, model: &M) -> Result<()> {
        let active = self.active.active_dim_count();
        while self.introduced < self.max_dims && self.introduced - active.min(self.introduced) < self.config.buffer_size
        {
            let d = self.introduced;
            self.introduced += 1;
            self.active.set_dimension_bound(self.introduced);
            self.add_candidate(model, MultiIndex::unit(d))?;
        }
        Ok(())
    }

    fn record(&mut self, selected: MultiIndex) -> Result<()> {
        let i_counts = point_counts(&self.active, &self.table)?;
        let g_counts = point_counts(&self.g_set(), &self.table)?;
        self.trace.push(TraceRecord {
            iteration: self.trace.len(),
            max_component: selected.max_level() + 1,
            selected,
            active_dims: self.active.active_dim_count(),
            margin_size: self.margin.len(),
            i_set: i_counts,
            g_set: g_counts,
            error_estimate: self.error_estimate(),
        });
        Ok(())
    }

    fn best(&self) -> Option<(MultiIndex, Candidate)> {
        // BTreeMap iterates in graded-lex order, so strict comparison keeps the first of ties
        let mut best: Option<(&MultiIndex, &Candidate)> = None;
        for (k, c) in &self.margin {
            if best.is_none_or(|(_, b)| c.profit > b.profit) {
                best = Some((k, c));
            }
        }
        best.map(|(k, c)| (k.clone(), c.clone()))
    }
}

/// Counts of the sparse grid on `set` without storing it.
pub fn point_counts(set: &MultiIndexSet, table: &Arc<RuleTable<f64>>) -> Result<PointCounts> {
    Ok(SparseGrid::build_with_table(set, table.clone())?.counts())
}

/// Standard normal probe coordinates for dimension `dim`.
pub fn probe_column(seed: u64, dim: usize, samples: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(dim as u64);
    (0..samples).map(|_| StandardNormal.sample(&mut rng)).collect()
}

/// Runs the buffered Gerstner-Griebel algorithm until the evaluation
/// budget is spent. `on_iteration` sees the state after every step.
pub fn run_a_posteriori_with<M, F>(
    model: &M,
    config: AdaptiveConfig,
    mut on_iteration: F,
) -> Result<AdaptiveState<M::Value>>
where
    M: CollocationModel,
    F: FnMut(&AdaptiveState<M::Value>) -> Result<()>,
{
    if config.budget == 0 || config.buffer_size == 0 {
        return Err(Error::InvalidArgument("budget and buffer size must be positive".into()));
    }
    let table = Arc::new(RuleTable::with_levels(config.family, 1)?);
    let mut state = AdaptiveState {
        active: MultiIndexSet::root(0),
        margin: BTreeMap::new(),
        saturated: Vec::new(),
        introduced: 0,
        max_dims: model.dimension(),
        table,
        cache: HashMap::new(),
        probes: Vec::new(),
        scale: 1.0,
        trace: Vec::new(),
        config,
    };
    state.evaluate_points(model, &[PointKey::default()])?;
    state.scale = state.cache[&PointKey::default()].norm().max(f64::MIN_POSITIVE);
    state.introduce_dims(model)?;
    state.record(MultiIndex::zero())?;
    on_iteration(&state)?;

    while state.work() < state.config.budget {
        let Some((selected, cand)) = state.best() else { break };
        if cand.indicator <= state.config.tolerance * state.scale {
            break;
        }
        state.margin.remove(&selected);
        state.active.insert(selected.clone());
        state.introduce_dims(model)?;
        for d in 0..state.introduced {
            state.add_candidate(model, selected.increment(d))?;
        }
        state.record(selected)?;
        on_iteration(&state)?;
    }
    Ok(state)
}

pub fn run_a_posteriori<M: CollocationModel>(model: &M, config: AdaptiveConfig) -> Result<AdaptiveState<M::Value>> {
    run_a_posteriori_with(model, config, |_| Ok(()))
}

/// The `n` indices of largest profit `prod_m r_m^{k_m}`, `r_m =
/// min(1/2, g_m / 2)` with `g_m = sup |phi_m|`, added greedily so that the
/// set stays monotone. Ties go to the graded-lex smaller index.
pub fn a_priori_set(field: &FieldExpansion, n: usize) -> Result<MultiIndexSet> {
    if n == 0 {
        return Err(Error::InvalidArgument("a-priori set needs at least one index".into()));
    }
    let dims = field.truncation;
    let log_r: Vec<f64> = (1..=dims).map(|m| (0.5f64).min(field.sup_norm(m) / 2.0).ln()).collect();
    // unused dimensions in the order they would be opened
    let mut order: Vec<usize> = (0..dims).collect();
    order.sort_by(|&a, &b| {
        log_r[b]
            .partial_cmp(&log_r[a])
            .expect("finite magnitudes")
            .then(a.cmp(&b))
    });
    let mut next_new = 0;

    let log_profit = |k: &MultiIndex| -> f64 { k.entries().iter().map(|&(d, l)| l as f64 * log_r[d]).sum() };
    let mut set = MultiIndexSet::root(0);
    let mut used: Vec<usize> = Vec::new();
    let mut candidates: BTreeMap<MultiIndex, f64> = BTreeMap::new();
    let push_neighbors =
        |k: &MultiIndex, set: &MultiIndexSet, used: &[usize], cands: &mut BTreeMap<MultiIndex, f64>| {
            for &d in used {
                let c = k.increment(d);
                if !set.contains(&c) && set.is_admissible(&c) {
                    cands.insert(c.clone(), log_profit(&c));
                }
            }
        };
    while set.len() < n {
        if next_new < order.len() {
            let d = order[next_new];
            let e = MultiIndex::unit(d);
            candidates.entry(e.clone()).or_insert_with(|| log_profit(&e));
        }
        let mut best: Option<(&MultiIndex, f64)> = None;
        for (k, &p) in &candidates {
            if best.is_none_or(|(_, b)| p > b) {
                best = Some((k, p));
            }
        }
        let Some((k, _)) = best.map(|(k, p)| (k.clone(), p)) else {
            break;
        };
        candidates.remove(&k);
        if k.support_len() == 1 && k.order() == 1 && !used.contains(&k.entries()[0].0) {
            used.push(k.entries()[0].0);
            next_new += 1;
        }
        set.insert(k.clone());
        push_neighbors(&k, &set, &used, &mut candidates);
        // indices waiting on the newly opened dimension
        if k.order() == 1 {
            let d = k.entries()[0].0;
            let members: Vec<MultiIndex> = set.iter().cloned().collect();
            for m in members {
                let c = m.increment(d);
                if !set.contains(&c) && set.is_admissible(&c) {
                    candidates.insert(c.clone(), log_profit(&c));
                }
            }
        }
    }
    set.set_dimension_bound(set.active_dims());
    Ok(set)
}
