//! Finitely supported multi-indices and downward-closed index sets.
//!
//! A [`MultiIndex`] stores only its nonzero entries, so two indices that
//! differ only by trailing zeros compare equal. Dimensions are 0-based and
//! index directly into parameter vectors; levels are 0-based. The text
//! format ([`MultiIndexSet::to_text`]) writes 1-based levels.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

/// A finitely supported sequence of non-negative levels.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MultiIndex {
    // (dimension, level) pairs, sorted by dimension, level > 0
    entries: Vec<(usize, usize)>,
}

impl MultiIndex {
    /// The zero index.
    pub fn zero() -> Self {
        Self::default()
    }

    /// Builds an index from dense levels `(k_0, k_1, ...)`.
    pub fn from_levels(levels: &[usize]) -> Self {
        let entries = levels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > 0)
            .map(|(d, &l)| (d, l))
            .collect();
        Self { entries }
    }

    /// Builds an index from `(dimension, level)` pairs in any order.
    /// Zero levels are dropped; repeated dimensions keep the last level.
    pub fn from_pairs<I: IntoIterator<Item = (usize, usize)>>(pairs: I) -> Self {
        let map: BTreeMap<usize, usize> = pairs.into_iter().collect();
        Self {
            entries: map.into_iter().filter(|&(_, l)| l > 0).collect(),
        }
    }

    /// Unit index `e_dim`.
    pub fn unit(dim: usize) -> Self {
        Self {
            entries: vec![(dim, 1)],
        }
    }

    pub fn get(&self, dim: usize) -> usize {
        match self.entries.binary_search_by_key(&dim, |&(d, _)| d) {
            Ok(pos) => self.entries[pos].1,
            Err(_) => 0,
        }
    }

    /// Nonzero `(dimension, level)` pairs in increasing dimension order.
    pub fn entries(&self) -> &[(usize, usize)] {
        &self.entries
    }

    /// Dimensions with a nonzero level.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|&(d, _)| d)
    }

    /// `|k|_0`, the number of nonzero entries.
    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// `|k|_1`.
    pub fn order(&self) -> usize {
        self.entries.iter().map(|&(_, l)| l).sum()
    }

    pub fn max_level(&self) -> usize {
        self.entries.iter().map(|&(_, l)| l).max().unwrap_or(0)
    }

    /// One past the largest nonzero dimension (0 for the zero index).
    pub fn dim_extent(&self) -> usize {
        self.entries.last().map_or(0, |&(d, _)| d + 1)
    }

    pub fn with_level(&self, dim: usize, level: usize) -> Self {
        let mut entries = self.entries.clone();
        match entries.binary_search_by_key(&dim, |&(d, _)| d) {
            Ok(pos) if level == 0 => {
                entries.remove(pos);
            }
            Ok(pos) => entries[pos].1 = level,
            Err(_) if level == 0 => {}
            Err(pos) => entries.insert(pos, (dim, level)),
        }
        Self { entries }
    }

    /// `k + e_dim`.
    pub fn increment(&self, dim: usize) -> Self {
        self.with_level(dim, self.get(dim) + 1)
    }

    /// `k - e_dim`, or `None` when `k_dim = 0`.
    pub fn decrement(&self, dim: usize) -> Option<Self> {
        let l = self.get(dim);
        (l > 0).then(|| self.with_level(dim, l - 1))
    }

    /// All `k - e_m` for `m` in the support.
    pub fn backward_neighbors(&self) -> impl Iterator<Item = MultiIndex> + '_ {
        self.support().filter_map(move |d| self.decrement(d))
    }

    /// Dense levels over the first `len` dimensions.
    pub fn to_levels(&self, len: usize) -> Vec<usize> {
        let mut v = vec![0; len.max(self.dim_extent())];
        for &(d, l) in &self.entries {
            v[d] = l;
        }
        v
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.entries.iter().all(|&(d, l)| other.get(d) >= l)
    }

    /// Componentwise sum.
    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        let mut map: BTreeMap<usize, usize> = self.entries.iter().copied().collect();
        for &(d, l) in &other.entries {
            *map.entry(d).or_insert(0) += l;
        }
        Self {
            entries: map.into_iter().collect(),
        }
    }

    /// Space-separated 1-based levels over `len` dimensions.
    pub fn to_text(&self, len: usize) -> String {
        self.to_levels(len)
            .iter()
            .map(|l| (l + 1).to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Parses space-separated 1-based levels.
    pub fn parse_text(line: &str) -> Result<Self> {
        let levels = line
            .split_whitespace()
            .map(|tok| match tok.parse::<usize>() {
                Ok(v) if v >= 1 => Ok(v - 1),
                _ => Err(Error::InvalidArgument(format!("expected a 1-based level, got {tok:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_levels(&levels))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, l) in self.to_levels(self.dim_extent()).iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

/// Graded lexicographic order: by `|k|_1`, then the index with the larger
/// level in the first differing dimension comes first. Under this order
/// `e_0 < e_1 < e_2 < ...`.
impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order().cmp(&other.order()).then_with(|| {
            let (mut a, mut b) = (self.entries.iter(), other.entries.iter());
            loop {
                match (a.next(), b.next()) {
                    (None, None) => return Ordering::Equal,
                    // equal order, so a remaining entry on one side only is impossible
                    (Some(_), None) => return Ordering::Less,
                    (None, Some(_)) => return Ordering::Greater,
                    (Some(&(da, la)), Some(&(db, lb))) => {
                        if da != db {
                            // the side holding the lower dimension has the larger level there
                            return da.cmp(&db);
                        }
                        if la != lb {
                            return lb.cmp(&la);
                        }
                    }
                }
            }
        })
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A finite set of distinct multi-indices in graded-lex order.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MultiIndexSet {
    indices: BTreeSet<MultiIndex>,
    dimension_bound: usize,
}

impl MultiIndexSet {
    /// Empty set over `dimension_bound` dimensions.
    pub fn new(dimension_bound: usize) -> Self {
        Self {
            indices: BTreeSet::new(),
            dimension_bound,
        }
    }

    /// Collects indices; the dimension bound grows to cover every member.
    pub fn from_indices<I: IntoIterator<Item = MultiIndex>>(indices: I, dimension_bound: usize) -> Self {
        let mut set = Self::new(dimension_bound);
        for k in indices {
            set.insert(k);
        }
        set
    }

    /// The singleton `{0}`.
    pub fn root(dimension_bound: usize) -> Self {
        Self::from_indices([MultiIndex::zero()], dimension_bound)
    }

    pub fn insert(&mut self, k: MultiIndex) -> bool {
        self.dimension_bound = self.dimension_bound.max(k.dim_extent());
        self.indices.insert(k)
    }

    pub fn remove(&mut self, k: &MultiIndex) -> bool {
        self.indices.remove(k)
    }

    pub fn contains(&self, k: &MultiIndex) -> bool {
        self.indices.contains(k)
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &MultiIndex> + '_ {
        self.indices.iter()
    }

    pub fn dimension_bound(&self) -> usize {
        self.dimension_bound
    }

    pub fn set_dimension_bound(&mut self, bound: usize) {
        self.dimension_bound = bound.max(self.active_dims());
    }

    /// One past the largest dimension used by any member.
    pub fn active_dims(&self) -> usize {
        self.indices.iter().map(MultiIndex::dim_extent).max().unwrap_or(0)
    }

    /// Number of distinct dimensions carrying a nonzero level somewhere.
    pub fn active_dim_count(&self) -> usize {
        self.indices
            .iter()
            .flat_map(|k| k.support())
            .collect::<BTreeSet<_>>()
            .len()
    }

    pub fn is_subset(&self, other: &MultiIndexSet) -> bool {
        self.indices.is_subset(&other.indices)
    }

    /// Downward closedness: every backward neighbor of a member is a member.
    pub fn is_monotone(&self) -> bool {
        self.indices
            .iter()
            .all(|k| k.backward_neighbors().all(|b| self.indices.contains(&b)))
    }

    /// Whether `k` could be added while keeping the set monotone.
    pub fn is_admissible(&self, k: &MultiIndex) -> bool {
        k.backward_neighbors().all(|b| self.indices.contains(&b))
    }

    /// One index per line, space-separated 1-based levels over the dimension bound.
    pub fn to_text(&self) -> String {
        let width = self.dimension_bound.max(1);
        let mut out = String::new();
        for k in &self.indices {
            out.push_str(&k.to_text(width));
            out.push('\n');
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut bound = 0;
        let mut indices = Vec::new();
        for line in text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
        {
            bound = bound.max(line.split_whitespace().count());
            indices.push(MultiIndex::parse_text(line)?);
        }
        Ok(Self::from_indices(indices, bound))
    }
}

impl<'a> IntoIterator for &'a MultiIndexSet {
    type Item = &'a MultiIndex;
    type IntoIter = std::collections::btree_set::Iter<'a, MultiIndex>;

    fn into_iter(self) -> Self::IntoIter {
        self.indices.iter()
    }
}

pub fn is_monotone(set: &MultiIndexSet) -> bool {
    set.is_monotone()
}

/// `{k in N_0^M : |k|_1 <= w}`.
pub fn smolyak_set(dims: usize, w: usize) -> MultiIndexSet {
    let mut set = MultiIndexSet::new(dims);
    let mut levels = vec![0usize; dims];
    fill_simplex(&mut levels, 0, w, &mut set);
    set
}

fn fill_simplex(levels: &mut Vec<usize>, dim: usize, budget: usize, set: &mut MultiIndexSet) {
    if dim == levels.len() {
        set.insert(MultiIndex::from_levels(levels));
        return;
    }
    for l in 0..=budget {
        levels[dim] = l;
        fill_simplex(levels, dim + 1, budget - l, set);
    }
    levels[dim] = 0;
}

/// Indices outside `set` whose backward neighbors all lie in `set`,
/// over the set's dimension bound.
pub fn reduced_margin(set: &MultiIndexSet) -> Result<MultiIndexSet> {
    if !set.is_monotone() {
        return Err(Error::NotMonotone);
    }
    let bound = set.dimension_bound();
    let mut margin = MultiIndexSet::new(bound);
    if set.is_empty() {
        margin.insert(MultiIndex::zero());
        return Ok(margin);
    }
    for k in set {
        for d in 0..bound {
            let cand = k.increment(d);
            if !set.contains(&cand) && set.is_admissible(&cand) {
                margin.insert(cand);
            }
        }
    }
    Ok(margin)
}

/// Combination-technique coefficients
/// `c(i; set) = sum over e in {0,1}^dims with i + e in set of (-1)^|e|`
/// for every member, zeros included.
pub fn combination_coefficients(set: &MultiIndexSet) -> Result<BTreeMap<MultiIndex, i64>> {
    if !set.is_monotone() {
        return Err(Error::NotMonotone);
    }
    Ok(set.iter().map(|i| (i.clone(), coefficient_of(set, i))).collect())
}

/// Coefficient of a single member; `set` must be monotone.
pub(crate) fn coefficient_of(set: &MultiIndexSet, i: &MultiIndex) -> i64 {
    // i + e in set forces i + e_m in set for each m in e, so only those
    // dimensions can appear in e
    let dims: Vec<usize> = (0..set.dimension_bound())
        .filter(|&d| set.contains(&i.increment(d)))
        .collect();
    let mut total = 0i64;
    signed_subsets(set, i, &dims, 0, 1, &mut total);
    total
}

fn signed_subsets(set: &MultiIndexSet, current: &MultiIndex, dims: &[usize], start: usize, sign: i64, total: &mut i64) {
    *total += sign;
    for (pos, &d) in dims.iter().enumerate().skip(start) {
        let next = current.increment(d);
        if set.contains(&next) {
            signed_subsets(set, &next, dims, pos + 1, -sign, total);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(levels: &[usize]) -> MultiIndex {
        MultiIndex::from_levels(levels)
    }

    fn set_of(list: &[&[usize]], bound: usize) -> MultiIndexSet {
        MultiIndexSet::from_indices(list.iter().map(|l| idx(l)), bound)
    }

    #[test]
    fn zeros_are_normalized_away() {
        assert_eq!(idx(&[1, 0, 0]), idx(&[1]));
        assert_eq!(idx(&[0, 0]), MultiIndex::zero());
        assert_eq!(idx(&[0, 2]).entries(), &[(1, 2)]);
    }

    #[test]
    fn graded_lex_order() {
        let mut v = vec![
            idx(&[0, 1]),
            idx(&[1, 1]),
            idx(&[0, 0]),
            idx(&[1, 0]),
            idx(&[2, 0]),
            idx(&[0, 2]),
        ];
        v.sort();
        assert_eq!(
            v,
            vec![
                idx(&[0, 0]),
                idx(&[1, 0]),
                idx(&[0, 1]),
                idx(&[2, 0]),
                idx(&[1, 1]),
                idx(&[0, 2])
            ]
        );
        assert!(MultiIndex::unit(0) < MultiIndex::unit(1));
        assert!(MultiIndex::unit(3) < MultiIndex::unit(7));
    }

    #[test]
    fn monotone_examples() {
        assert!(is_monotone(&set_of(&[&[0, 0]], 2)));
        assert!(is_monotone(&set_of(&[&[0, 0], &[1, 0], &[0, 1]], 2)));
        assert!(!is_monotone(&set_of(&[&[1, 0]], 2)));
    }

    #[test]
    fn smolyak_examples() {
        let s = smolyak_set(1, 2);
        assert_eq!(
            s.iter().cloned().collect::<Vec<_>>(),
            vec![idx(&[0]), idx(&[1]), idx(&[2])]
        );
        let s = smolyak_set(2, 1);
        assert_eq!(
            s.iter().cloned().collect::<Vec<_>>(),
            vec![idx(&[0, 0]), idx(&[1, 0]), idx(&[0, 1])]
        );
        assert_eq!(smolyak_set(2, 2).len(), 6);
        assert_eq!(smolyak_set(4, 3).len(), 35);
    }

    #[test]
    fn reduced_margin_examples() {
        let m = reduced_margin(&set_of(&[&[0, 0]], 2)).unwrap();
        assert_eq!(m, set_of(&[&[1, 0], &[0, 1]], 2));
        let m = reduced_margin(&set_of(&[&[0], &[1]], 1)).unwrap();
        assert_eq!(m, set_of(&[&[2]], 1));
        // (1,1) has backward neighbor (0,1) outside the set
        let m = reduced_margin(&set_of(&[&[0, 0], &[1, 0]], 2)).unwrap();
        assert_eq!(m, set_of(&[&[2, 0], &[0, 1]], 2));
        assert_eq!(reduced_margin(&set_of(&[&[1, 0]], 2)), Err(Error::NotMonotone));
    }

    #[test]
    fn combination_examples() {
        let c = combination_coefficients(&set_of(&[&[0]], 1)).unwrap();
        assert_eq!(c[&idx(&[0])], 1);

        let c = combination_coefficients(&set_of(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]], 2)).unwrap();
        assert_eq!(c[&idx(&[1, 1])], 1);
        assert_eq!(c[&idx(&[1, 0])], 0);
        assert_eq!(c[&idx(&[0, 1])], 0);
        assert_eq!(c[&idx(&[0, 0])], 0);

        let c = combination_coefficients(&smolyak_set(2, 1)).unwrap();
        assert_eq!(c[&idx(&[0, 0])], -1);
        assert_eq!(c[&idx(&[1, 0])], 1);
        assert_eq!(c[&idx(&[0, 1])], 1);

        assert_eq!(
            combination_coefficients(&set_of(&[&[0, 1]], 2)),
            Err(Error::NotMonotone)
        );
    }

    #[test]
    fn text_round_trip_uses_one_based_levels() {
        let s = smolyak_set(2, 1);
        let text = s.to_text();
        assert_eq!(text, "1 1\n2 1\n1 2\n");
        assert_eq!(MultiIndexSet::parse_text(&text).unwrap(), s);
        assert!(MultiIndex::parse_text("0 1").is_err());
    }
}
