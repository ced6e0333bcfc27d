//! Univariate node families for the standard Gaussian measure.
//!
//! Every family maps a level `k` to a node set `Xi^(k)` with quadrature
//! weights. Gauss-Hermite sets are disjoint across levels (apart from the
//! origin); Gaussian Leja and Genz-Keister sets are nested.

mod gauss_hermite;
mod genz_keister;
mod leja;

use std::fmt;
use std::str::FromStr;

pub use gauss_hermite::{gauss_hermite, gauss_hermite_f64, MAX_GAUSS_HERMITE_NODES};
pub use genz_keister::{
    genz_keister, parse_genz_keister_table, write_genz_keister_table, GenzKeisterLevel, GENZ_KEISTER_MAX_LEVEL,
};
pub use leja::{gaussian_leja, leja_objective, LejaSearch, MAX_LEJA_NODES};

use crate::barycentric::Barycentric;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Coordinates closer than this are treated as the same node.
pub const NODE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeFamily {
    GaussHermite,
    GaussianLeja,
    GenzKeister,
}

impl NodeFamily {
    pub const ALL: [NodeFamily; 3] = [
        NodeFamily::GaussHermite,
        NodeFamily::GaussianLeja,
        NodeFamily::GenzKeister,
    ];

    pub fn is_nested(self) -> bool {
        !matches!(self, NodeFamily::GaussHermite)
    }

    /// Largest supported level, if bounded.
    pub fn max_level(self) -> Option<usize> {
        match self {
            NodeFamily::GaussHermite => Some(MAX_GAUSS_HERMITE_NODES - 1),
            NodeFamily::GaussianLeja => Some(MAX_LEJA_NODES - 1),
            NodeFamily::GenzKeister => Some(GENZ_KEISTER_MAX_LEVEL),
        }
    }

    /// Short label used in CSV output.
    pub fn short_name(self) -> &'static str {
        match self {
            NodeFamily::GaussHermite => "GH",
            NodeFamily::GaussianLeja => "LJ",
            NodeFamily::GenzKeister => "GK",
        }
    }
}

impl fmt::Display for NodeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NodeFamily::GaussHermite => "gauss-hermite",
            NodeFamily::GaussianLeja => "gaussian-leja",
            NodeFamily::GenzKeister => "genz-keister",
        })
    }
}

impl FromStr for NodeFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "gh" | "gauss-hermite" | "gausshermite" | "hermite" => Ok(NodeFamily::GaussHermite),
            "lj" | "leja" | "gaussian-leja" | "gaussianleja" => Ok(NodeFamily::GaussianLeja),
            "gk" | "genz-keister" | "genzkeister" => Ok(NodeFamily::GenzKeister),
            other => Err(Error::InvalidArgument(format!("unknown node family {other:?}"))),
        }
    }
}

/// Nodes (ascending) and quadrature weights of one level of a family.
#[derive(Clone, Debug, PartialEq)]
pub struct UnivariateRule<T> {
    pub family: NodeFamily,
    pub level: usize,
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
    /// Polynomial exactness degree when known (GH: 2n - 1, GK: tabulated).
    pub exactness: Option<usize>,
}

impl<T: Scalar> UnivariateRule<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(T) -> T>(&self, f: F) -> T {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    pub fn cast<U: Scalar>(&self) -> UnivariateRule<U> {
        UnivariateRule {
            family: self.family,
            level: self.level,
            nodes: self.nodes.iter().map(|x| U::of(x.as_f64())).collect(),
            weights: self.weights.iter().map(|w| U::of(w.as_f64())).collect(),
            exactness: self.exactness,
        }
    }
}

/// Number of nodes at `level`.
pub fn level_to_knots(family: NodeFamily, level: usize) -> Result<usize> {
    match family {
        NodeFamily::GaussHermite | NodeFamily::GaussianLeja => Ok(level + 1),
        NodeFamily::GenzKeister => genz_keister::cardinality(level),
    }
}

/// The rule of `family` at `level`.
pub fn rule<T: Scalar>(family: NodeFamily, level: usize) -> Result<UnivariateRule<T>> {
    match family {
        NodeFamily::GaussHermite => {
            let mut r = gauss_hermite::<T>(level + 1)?;
            r.level = level;
            Ok(r)
        }
        NodeFamily::GaussianLeja => {
            let mut nodes: Vec<T> = gaussian_leja(level + 1)?.into_iter().map(T::of).collect();
            nodes.sort_by(|a, b| a.partial_cmp(b).expect("finite nodes"));
            let weights = lagrange_quadrature_weights(&nodes)?;
            Ok(UnivariateRule {
                family,
                level,
                nodes,
                weights,
                exactness: Some(level),
            })
        }
        NodeFamily::GenzKeister => genz_keister(level),
    }
}

/// `w_i = integral of L_i against N(0,1)`, integrated exactly with a
/// Gauss-Hermite rule with as many nodes as `nodes`.
pub fn lagrange_quadrature_weights<T: Scalar>(nodes: &[T]) -> Result<Vec<T>> {
    let n = nodes.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let gh = gauss_hermite::<T>(n)?;
    let bary = Barycentric::new(nodes);
    let mut weights = vec![T::zero(); n];
    let mut basis = vec![T::zero(); n];
    for (&x, &w) in gh.nodes.iter().zip(&gh.weights) {
        bary.basis_into(x, &mut basis);
        for (acc, &l) in weights.iter_mut().zip(&basis) {
            *acc += w * l;
        }
    }
    Ok(weights)
}

/// One level of a [`RuleTable`]: the rule, its interpolation data, and the
/// canonical node ids shared across levels.
#[derive(Clone, Debug)]
pub struct LevelRule<T> {
    pub rule: UnivariateRule<T>,
    pub bary: Barycentric<T>,
    pub ids: Vec<u32>,
}

/// Rules of one family for levels `0..=max_level`, with node ids such that
/// coinciding nodes of different levels share an id. Id 0 is the origin.
#[derive(Clone, Debug)]
pub struct RuleTable<T> {
    family: NodeFamily,
    levels: Vec<LevelRule<T>>,
    unique: Vec<T>,
}

impl<T: Scalar> RuleTable<T> {
    pub fn new(family: NodeFamily) -> Self {
        Self {
            family,
            levels: Vec::new(),
            unique: Vec::new(),
        }
    }

    pub fn with_levels(family: NodeFamily, max_level: usize) -> Result<Self> {
        let mut table = Self::new(family);
        table.ensure_level(max_level)?;
        Ok(table)
    }

    pub fn family(&self) -> NodeFamily {
        self.family
    }

    pub fn max_level(&self) -> Option<usize> {
        self.levels.len().checked_sub(1)
    }

    /// Builds levels up to and including `level`.
    pub fn ensure_level(&mut self, level: usize) -> Result<()> {
        while self.levels.len() <= level {
            let next = self.levels.len();
            let rule = rule::<T>(self.family, next)?;
            let tol = T::of(NODE_TOLERANCE);
            let ids = rule
                .nodes
                .iter()
                .map(|&x| match self.unique.iter().position(|&u| (u - x).abs() <= tol) {
                    Some(id) => id as u32,
                    None => {
                        self.unique.push(x);
                        (self.unique.len() - 1) as u32
                    }
                })
                .collect();
            let bary = Barycentric::new(&rule.nodes);
            self.levels.push(LevelRule { rule, bary, ids });
        }
        Ok(())
    }

    /// Panics if `level` has not been built; see [`RuleTable::ensure_level`].
    pub fn level(&self, level: usize) -> &LevelRule<T> {
        &self.levels[level]
    }

    pub fn node_value(&self, id: u32) -> T {
        self.unique[id as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn knot_counts() {
        assert_eq!(level_to_knots(NodeFamily::GaussHermite, 3), Ok(4));
        assert_eq!(level_to_knots(NodeFamily::GenzKeister, 2), Ok(9));
        assert_eq!(level_to_knots(NodeFamily::GaussianLeja, 0), Ok(1));
        let gk: Vec<usize> = (0..=4)
            .map(|k| level_to_knots(NodeFamily::GenzKeister, k).unwrap())
            .collect();
        assert_eq!(gk, vec![1, 3, 9, 19, 35]);
        assert!(matches!(
            level_to_knots(NodeFamily::GenzKeister, 5),
            Err(Error::RuleExhausted { level: 5, .. })
        ));
    }

    #[test]
    fn lagrange_weights_examples() {
        assert_eq!(lagrange_quadrature_weights(&[0.0]).unwrap(), vec![1.0]);
        let w = lagrange_quadrature_weights(&[-1.0f64, 1.0]).unwrap();
        assert!((w[0] - 0.5).abs() < 1e-15 && (w[1] - 0.5).abs() < 1e-15);
        let w = lagrange_quadrature_weights(&[0.0, 2f64.sqrt()]).unwrap();
        assert!((w[0] - 1.0).abs() < 1e-15 && w[1].abs() < 1e-15);
    }

    #[test]
    fn weights_sum_to_one_for_every_family() {
        for family in NodeFamily::ALL {
            for level in 0..=4 {
                let r = rule::<f64>(family, level).unwrap();
                let s: f64 = r.weights.iter().sum();
                assert!((s - 1.0).abs() < 1e-12, "{family} level {level}: {s}");
                assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
            }
        }
        for level in [20, 60, 149] {
            let r = rule::<f64>(NodeFamily::GaussianLeja, level).unwrap();
            let s: f64 = r.weights.iter().sum();
            assert!((s - 1.0).abs() < 1e-12, "leja level {level}: {s}");
        }
    }

    #[test]
    fn rule_table_shares_ids_for_nested_nodes() {
        let t = RuleTable::<f64>::with_levels(NodeFamily::GaussianLeja, 5).unwrap();
        for l in 1..=5 {
            let prev: Vec<u32> = t.level(l - 1).ids.clone();
            assert!(prev.iter().all(|id| t.level(l).ids.contains(id)));
        }
        let gk = RuleTable::<f64>::with_levels(NodeFamily::GenzKeister, 4).unwrap();
        assert_eq!(gk.level(4).ids.iter().max(), Some(&34));
        let gh = RuleTable::<f64>::with_levels(NodeFamily::GaussHermite, 4).unwrap();
        // origin shared by the odd-sized rules only
        assert_eq!(gh.level(0).ids, vec![0]);
        assert!(gh.level(2).ids.contains(&0));
        assert!(!gh.level(1).ids.contains(&0));
        assert_eq!(gh.node_value(0), 0.0);
    }

    #[test]
    fn family_parsing() {
        assert_eq!("leja".parse::<NodeFamily>(), Ok(NodeFamily::GaussianLeja));
        assert_eq!("GH".parse::<NodeFamily>(), Ok(NodeFamily::GaussHermite));
        assert_eq!("genz_keister".parse::<NodeFamily>(), Ok(NodeFamily::GenzKeister));
        assert!("clenshaw-curtis".parse::<NodeFamily>().is_err());
    }
}
