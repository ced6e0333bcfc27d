//! Sparse interpolation and quadrature in combination-technique form.
//!
//! A [`SparseGrid`] stores the tensor terms `(i, c(i; set))` of a monotone
//! index set and the deduplicated union of their tensor grids. Evaluation
//! first reduces the operator to one weight per collocation point, so the
//! combination with stored values costs a single pass over the data; this
//! matters when values are finite-element vectors.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hermite::{hermite_values_into, HermiteExpansion};
use crate::multiindex::{combination_coefficients, MultiIndex, MultiIndexSet};
use crate::nodes::{gauss_hermite, NodeFamily, RuleTable};
use crate::scalar::Scalar;

/// Values that sparse operators can combine linearly.
pub trait GridValue<T: Scalar>: Clone + Send + Sync {
    /// Additive identity with the same shape as `self`.
    fn zeroed_like(&self) -> Self;
    /// `self += weight * other`.
    fn add_scaled(&mut self, weight: T, other: &Self);
    /// Value-space norm (absolute value for scalars).
    fn norm(&self) -> T;
}

impl<T: Scalar> GridValue<T> for T {
    fn zeroed_like(&self) -> Self {
        T::zero()
    }

    fn add_scaled(&mut self, weight: T, other: &Self) {
        *self += weight * *other;
    }

    fn norm(&self) -> T {
        self.abs()
    }
}

/// A collocation point as sparse `(dimension, node id)` pairs; dimensions
/// at the origin (node id 0) are omitted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointKey(Vec<(u32, u32)>);

impl PointKey {
    pub fn entries(&self) -> &[(u32, u32)] {
        &self.0
    }

    /// Nonzero coordinates as `(dimension, value)` pairs.
    pub fn coordinates<T: Scalar>(&self, table: &RuleTable<T>) -> Vec<(usize, T)> {
        self.0
            .iter()
            .map(|&(d, id)| (d as usize, table.node_value(id)))
            .collect()
    }

    /// Dense coordinate vector of length at least `len`.
    pub fn dense<T: Scalar>(&self, table: &RuleTable<T>, len: usize) -> Vec<T> {
        let extent = self.0.last().map_or(0, |&(d, _)| d as usize + 1);
        let mut xi = vec![T::zero(); len.max(extent)];
        for &(d, id) in &self.0 {
            xi[d as usize] = table.node_value(id);
        }
        xi
    }
}

/// Cost metric for a grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountStrategy {
    /// Every point of the union of all tensor grids of the set.
    Incremental,
    /// Only points of tensor grids with a nonzero combination coefficient.
    Combitec,
}

impl FromStr for CountStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "incremental" => Ok(CountStrategy::Incremental),
            "combitec" => Ok(CountStrategy::Combitec),
            other => Err(Error::InvalidArgument(format!("unknown count strategy {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PointCounts {
    pub incremental: usize,
    pub combitec: usize,
}

impl PointCounts {
    pub fn get(&self, strategy: CountStrategy) -> usize {
        match strategy {
            CountStrategy::Incremental => self.incremental,
            CountStrategy::Combitec => self.combitec,
        }
    }
}

/// One tensor operator `c * U_i` of a combination.
#[derive(Clone, Debug)]
pub struct TensorTerm {
    pub index: MultiIndex,
    pub coefficient: i64,
    // positions in the grid's dimension list, one per support dimension
    slots: Vec<usize>,
    // global point ids in tensor order (first support dimension slowest)
    point_ids: Vec<usize>,
}

impl TensorTerm {
    pub fn point_ids(&self) -> &[usize] {
        &self.point_ids
    }
}

#[derive(Clone, Debug)]
pub struct SparseGrid<T> {
    index_set: MultiIndexSet,
    table: Arc<RuleTable<T>>,
    terms: Vec<TensorTerm>,
    points: Vec<PointKey>,
    lookup: HashMap<PointKey, usize>,
    counts: PointCounts,
    // (dimension, highest level) for every dimension active in the set
    dims: Vec<(usize, usize)>,
}

/// Keys of the tensor grid `Xi^(i)` in tensor order.
pub fn tensor_keys<T: Scalar>(i: &MultiIndex, table: &RuleTable<T>) -> Vec<PointKey> {
    let mut keys = vec![Vec::new()];
    for &(dim, level) in i.entries() {
        let ids = &table.level(level).ids;
        let mut next = Vec::with_capacity(keys.len() * ids.len());
        for key in &keys {
            for &id in ids {
                let mut k: Vec<(u32, u32)> = key.clone();
                if id != 0 {
                    k.push((dim as u32, id));
                }
                next.push(k);
            }
        }
        keys = next;
    }
    keys.into_iter().map(PointKey).collect()
}

/// Dense tensor grid `Xi^(i)` over `dims` coordinates (or more if `i` needs
/// them); dimensions outside the support sit at the level-0 node.
pub fn tensor_points<T: Scalar>(i: &MultiIndex, family: NodeFamily, dims: usize) -> Result<Vec<Vec<T>>> {
    let table = RuleTable::<T>::with_levels(family, i.max_level())?;
    let len = dims.max(i.dim_extent());
    Ok(tensor_keys(i, &table).iter().map(|k| k.dense(&table, len)).collect())
}

impl<T: Scalar> SparseGrid<T> {
    /// Sparse grid of the monotone set `set`.
    pub fn build(set: &MultiIndexSet, family: NodeFamily) -> Result<Self> {
        let top = set.iter().map(MultiIndex::max_level).max().unwrap_or(0);
        let table = RuleTable::with_levels(family, top)?;
        Self::build_with_table(set, Arc::new(table))
    }

    /// As [`SparseGrid::build`], reusing (and if needed extending) `table`.
    pub fn build_with_table(set: &MultiIndexSet, table: Arc<RuleTable<T>>) -> Result<Self> {
        let coefficients = combination_coefficients(set)?;
        let terms = coefficients.into_iter().filter(|&(_, c)| c != 0).collect();
        Self::assemble(set.clone(), terms, table)
    }

    /// The detail operator `Delta_i = sum_e (-1)^|e| U_{i-e}`, `e` over the
    /// 0/1 vectors supported on the support of `i`.
    pub fn detail(i: &MultiIndex, table: Arc<RuleTable<T>>) -> Result<Self> {
        let support: Vec<usize> = i.support().collect();
        let mut terms = Vec::with_capacity(1 << support.len());
        for mask in 0u64..(1u64 << support.len()) {
            let mut k = i.clone();
            for (bit, &d) in support.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    k = k.decrement(d).expect("dimension in support");
                }
            }
            let sign = if mask.count_ones() % 2 == 0 { 1 } else { -1 };
            terms.push((k, sign));
        }
        let set = MultiIndexSet::from_indices(terms.iter().map(|(k, _)| k.clone()), i.dim_extent());
        Self::assemble(set, terms, table)
    }

    fn assemble(index_set: MultiIndexSet, terms: Vec<(MultiIndex, i64)>, mut table: Arc<RuleTable<T>>) -> Result<Self> {
        let top = index_set.iter().map(MultiIndex::max_level).max().unwrap_or(0);
        if table.max_level().is_none_or(|m| m < top) {
            Arc::make_mut(&mut table).ensure_level(top)?;
        }
        let mut max_level: BTreeMap<usize, usize> = BTreeMap::new();
        for k in &index_set {
            for &(d, l) in k.entries() {
                let e = max_level.entry(d).or_insert(0);
                *e = (*e).max(l);
            }
        }
        let dims: Vec<(usize, usize)> = max_level.into_iter().collect();
        let slot_of: HashMap<usize, usize> = dims.iter().enumerate().map(|(s, &(d, _))| (d, s)).collect();

        let mut points = Vec::new();
        let mut lookup: HashMap<PointKey, usize> = HashMap::new();
        let mut intern = |key: PointKey, points: &mut Vec<PointKey>| -> usize {
            *lookup.entry(key.clone()).or_insert_with(|| {
                points.push(key);
                points.len() - 1
            })
        };

        let term_coeffs: HashMap<&MultiIndex, i64> = terms.iter().map(|(k, c)| (k, *c)).collect();
        let mut combitec: Vec<bool> = Vec::new();
        let mut built: HashMap<MultiIndex, Vec<usize>> = HashMap::new();
        for k in &index_set {
            let ids: Vec<usize> = tensor_keys(k, &table)
                .into_iter()
                .map(|key| intern(key, &mut points))
                .collect();
            if term_coeffs.contains_key(k) {
                combitec.resize(points.len(), false);
                for &p in &ids {
                    combitec[p] = true;
                }
                built.insert(k.clone(), ids);
            }
        }
        let terms = terms
            .into_iter()
            .map(|(index, coefficient)| {
                let point_ids = built.remove(&index).expect("every term index is in the set");
                let slots = index.support().map(|d| slot_of[&d]).collect();
                TensorTerm {
                    index,
                    coefficient,
                    slots,
                    point_ids,
                }
            })
            .collect();
        let counts = PointCounts {
            incremental: points.len(),
            combitec: combitec.iter().filter(|&&b| b).count(),
        };
        Ok(Self {
            index_set,
            table,
            terms,
            points,
            lookup,
            counts,
            dims,
        })
    }

    pub fn index_set(&self) -> &MultiIndexSet {
        &self.index_set
    }

    pub fn family(&self) -> NodeFamily {
        self.table.family()
    }

    pub fn table(&self) -> &Arc<RuleTable<T>> {
        &self.table
    }

    pub fn terms(&self) -> &[TensorTerm] {
        &self.terms
    }

    pub fn points(&self) -> &[PointKey] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn counts(&self) -> PointCounts {
        self.counts
    }

    pub fn point_id(&self, key: &PointKey) -> Option<usize> {
        self.lookup.get(key).copied()
    }

    /// Number of coordinates a parameter vector needs.
    pub fn dimension(&self) -> usize {
        self.dims.last().map_or(0, |&(d, _)| d + 1)
    }

    /// Largest number of dimensions active in a single tensor term.
    pub fn max_term_dimension(&self) -> usize {
        self.terms.iter().map(|t| t.index.support_len()).max().unwrap_or(0)
    }

    /// Dense coordinates of point `p` (length [`SparseGrid::dimension`]).
    pub fn point(&self, p: usize) -> Vec<T> {
        self.points[p].dense(&self.table, self.dimension())
    }

    /// Samples `f` at every collocation point, in point order.
    pub fn sample<V, F>(&self, f: F) -> Vec<V>
    where
        V: Send,
        F: Fn(&[T]) -> V + Sync,
    {
        (0..self.points.len())
            .into_par_iter()
            .map(|p| f(&self.point(p)))
            .collect()
    }

    fn check_values<V>(&self, values: &[V]) -> Result<()> {
        if values.len() != self.points.len() {
            return Err(Error::Misaligned {
                got: values.len(),
                expected: self.points.len(),
            });
        }
        Ok(())
    }

    fn accumulate<'a, F>(&self, out: &mut [T], factor: F)
    where
        F: Fn(usize, usize) -> &'a [T],
        T: 'a,
    {
        let mut buf = Vec::new();
        let mut next = Vec::new();
        for term in &self.terms {
            buf.clear();
            buf.push(T::of(term.coefficient as f64));
            for (&slot, &(_, level)) in term.slots.iter().zip(term.index.entries()) {
                let b = factor(slot, level);
                next.clear();
                for &a in &buf {
                    next.extend(b.iter().map(|&v| a * v));
                }
                std::mem::swap(&mut buf, &mut next);
            }
            for (&p, &w) in term.point_ids.iter().zip(&buf) {
                out[p] += w;
            }
        }
    }

    /// Weights `w_p(xi)` with `U f(xi) = sum_p w_p(xi) f(p)`.
    pub fn interpolation_weights(&self, xi: &[T]) -> Result<Vec<T>> {
        let mut bases: Vec<Vec<Vec<T>>> = Vec::with_capacity(self.dims.len());
        for &(d, top) in &self.dims {
            let x = *xi.get(d).ok_or(Error::MissingCoordinate { dim: d, got: xi.len() })?;
            bases.push((0..=top).map(|l| self.table.level(l).bary.basis(x)).collect());
        }
        let mut out = vec![T::zero(); self.points.len()];
        self.accumulate(&mut out, |slot, level| bases[slot][level].as_slice());
        Ok(out)
    }

    /// Weights `q_p` with `integral of U f dmu = sum_p q_p f(p)`.
    pub fn quadrature_weights(&self) -> Vec<T> {
        let mut out = vec![T::zero(); self.points.len()];
        let table = &self.table;
        self.accumulate(&mut out, |_, level| table.level(level).rule.weights.as_slice());
        out
    }

    /// `sum_p weights[p] * values[p]`, skipping zero weights.
    pub fn combine<V: GridValue<T>>(weights: &[T], values: &[V]) -> V {
        let mut acc = values[0].zeroed_like();
        for (&w, v) in weights.iter().zip(values) {
            if w != T::zero() {
                acc.add_scaled(w, v);
            }
        }
        acc
    }

    /// Sparse interpolant of `values` at `xi`.
    pub fn evaluate<V: GridValue<T>>(&self, values: &[V], xi: &[T]) -> Result<V> {
        self.check_values(values)?;
        let w = self.interpolation_weights(xi)?;
        Ok(Self::combine(&w, values))
    }

    /// [`SparseGrid::evaluate`] over many parameter vectors, in parallel.
    pub fn evaluate_many<V: GridValue<T>>(&self, values: &[V], samples: &[Vec<T>]) -> Result<Vec<V>> {
        self.check_values(values)?;
        samples
            .par_iter()
            .map(|xi| Ok(Self::combine(&self.interpolation_weights(xi)?, values)))
            .collect()
    }

    /// Sparse quadrature of `values` against the standard Gaussian measure.
    pub fn quadrature<V: GridValue<T>>(&self, values: &[V]) -> Result<V> {
        self.check_values(values)?;
        Ok(Self::combine(&self.quadrature_weights(), values))
    }

    /// Hermite coefficients of the interpolant of vector-valued data.
    pub fn to_hermite_values<V: GridValue<T>>(&self, values: &[V]) -> Result<BTreeMap<MultiIndex, V>> {
        self.check_values(values)?;
        let top = self.dims.iter().map(|&(_, l)| l).max().unwrap_or(0);
        let projections: Vec<Vec<Vec<T>>> = (0..=top).map(|l| self.projection_matrix(l)).collect::<Result<_>>()?;
        let mut out: BTreeMap<MultiIndex, V> = BTreeMap::new();
        for term in &self.terms {
            let entries = term.index.entries();
            let mut data: Vec<V> = term.point_ids.iter().map(|&p| values[p].clone()).collect();
            let shape: Vec<usize> = entries.iter().map(|&(_, l)| self.table.level(l).rule.len()).collect();
            for (axis, &(_, level)) in entries.iter().enumerate() {
                let p = &projections[level];
                let n = shape[axis];
                let inner: usize = shape[axis + 1..].iter().product();
                let outer = data.len() / (n * inner);
                let mut next = Vec::with_capacity(data.len());
                for o in 0..outer {
                    for k in 0..n {
                        for r in 0..inner {
                            let mut acc = data[0].zeroed_like();
                            for (j, row) in p.iter().enumerate() {
                                acc.add_scaled(row[k], &data[(o * n + j) * inner + r]);
                            }
                            next.push(acc);
                        }
                    }
                }
                data = next;
            }
            let scale = T::of(term.coefficient as f64);
            let mut degrees = vec![0usize; entries.len()];
            for v in data {
                let k = MultiIndex::from_pairs(entries.iter().zip(&degrees).map(|(&(d, _), &g)| (d, g)));
                match out.get_mut(&k) {
                    Some(acc) => acc.add_scaled(scale, &v),
                    None => {
                        let mut acc = v.zeroed_like();
                        acc.add_scaled(scale, &v);
                        out.insert(k, acc);
                    }
                }
                for axis in (0..degrees.len()).rev() {
                    degrees[axis] += 1;
                    if degrees[axis] < shape[axis] {
                        break;
                    }
                    degrees[axis] = 0;
                }
            }
        }
        Ok(out)
    }

    /// Hermite expansion of the interpolant of scalar data.
    pub fn to_hermite(&self, values: &[T]) -> Result<HermiteExpansion<T>> {
        Ok(HermiteExpansion::from_terms(self.to_hermite_values(values)?))
    }

    /// Hermite expansion holding the value-space norm of each coefficient.
    pub fn to_hermite_norms<V: GridValue<T>>(&self, values: &[V]) -> Result<HermiteExpansion<T>> {
        Ok(HermiteExpansion::from_terms(
            self.to_hermite_values(values)?.into_iter().map(|(k, v)| (k, v.norm())),
        ))
    }

    // P[j][k] = integral of L_j H_k dmu for the level-`level` rule
    fn projection_matrix(&self, level: usize) -> Result<Vec<Vec<T>>> {
        let lr = self.table.level(level);
        let n = lr.rule.len();
        let gh = gauss_hermite::<T>(n)?;
        let mut p = vec![vec![T::zero(); n]; n];
        let mut h = vec![T::zero(); n];
        for (&x, &w) in gh.nodes.iter().zip(&gh.weights) {
            let l = lr.bary.basis(x);
            hermite_values_into(x, &mut h);
            for (j, row) in p.iter_mut().enumerate() {
                for (k, v) in row.iter_mut().enumerate() {
                    *v += w * l[j] * h[k];
                }
            }
        }
        Ok(p)
    }

    /// CSV with header `dim1,...,dimM` and one row per point.
    pub fn points_csv(&self) -> String {
        let m = self.dimension().max(1);
        let mut out = (1..=m).map(|d| format!("dim{d}")).collect::<Vec<_>>().join(",");
        out.push('\n');
        for p in 0..self.points.len() {
            let row: Vec<String> = self.points[p]
                .dense(&self.table, m)
                .iter()
                .map(|x| format!("{x}"))
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// CSV with header `index,coefficient`; indices as 1-based levels.
    pub fn terms_csv(&self) -> String {
        let m = self.dimension().max(1);
        let mut out = String::from("index,coefficient\n");
        for t in &self.terms {
            let _ = writeln!(out, "{},{}", t.index.to_text(m), t.coefficient);
        }
        out
    }
}

/// `(N, sqrt(sum_{j > N} f_(j)^2))` after sorting `|f_k|` descending; ties
/// keep graded-lex order.
pub fn best_n_term_curve<T: Scalar>(expansion: &HermiteExpansion<T>) -> Vec<(usize, T)> {
    let mut mags: Vec<T> = expansion.terms().values().map(|v| v.abs()).collect();
    mags.sort_by(|a, b| b.partial_cmp(a).expect("finite coefficients"));
    tail_curve(&mags)
}

/// Tail norms in the expansion's own (graded-lex) order.
pub fn unsorted_tail_curve<T: Scalar>(expansion: &HermiteExpansion<T>) -> Vec<(usize, T)> {
    let mags: Vec<T> = expansion.terms().values().map(|v| v.abs()).collect();
    tail_curve(&mags)
}

fn tail_curve<T: Scalar>(mags: &[T]) -> Vec<(usize, T)> {
    let mut tails = vec![T::zero(); mags.len() + 1];
    for j in (0..mags.len()).rev() {
        tails[j] = tails[j + 1] + mags[j] * mags[j];
    }
    tails.into_iter().enumerate().map(|(n, s)| (n, s.sqrt())).collect()
}
