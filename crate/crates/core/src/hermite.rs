//! Orthonormal probabilists' Hermite polynomials and Hermite expansions.

use std::collections::BTreeMap;

use crate::barycentric::Barycentric;
use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;
use crate::nodes::{gauss_hermite_f64, rule, NodeFamily, MAX_GAUSS_HERMITE_NODES};
use crate::scalar::Scalar;

/// `H_k(x)`, normalized so that `E[H_j H_k] = delta_jk` under N(0,1).
pub fn hermite_eval<T: Scalar>(k: usize, x: T) -> T {
    let mut values = vec![T::zero(); k + 1];
    hermite_values_into(x, &mut values);
    values[k]
}

/// Writes `H_0(x), ..., H_{n-1}(x)` into `out`.
pub fn hermite_values_into<T: Scalar>(x: T, out: &mut [T]) {
    let n = out.len();
    if n == 0 {
        return;
    }
    out[0] = T::one();
    if n > 1 {
        out[1] = x;
    }
    for k in 1..n.saturating_sub(1) {
        let kf = T::of_usize(k);
        out[k + 1] = (x * out[k] - kf.sqrt() * out[k - 1]) / (kf + T::one()).sqrt();
    }
}

/// `prod_m H_{k_m}(xi_m)` over the support of `k`.
pub fn hermite_tensor_eval<T: Scalar>(k: &MultiIndex, xi: &[T]) -> Result<T> {
    let mut product = T::one();
    for &(dim, level) in k.entries() {
        let x = *xi.get(dim).ok_or(Error::MissingCoordinate { dim, got: xi.len() })?;
        product *= hermite_eval(level, x);
    }
    Ok(product)
}

/// A finite expansion `sum_k f_k H_k` in tensorized Hermite polynomials.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct HermiteExpansion<T> {
    terms: BTreeMap<MultiIndex, T>,
}

impl<T: Scalar> HermiteExpansion<T> {
    pub fn new() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn from_terms<I: IntoIterator<Item = (MultiIndex, T)>>(terms: I) -> Self {
        let mut e = Self::new();
        for (k, v) in terms {
            e.add(k, v);
        }
        e
    }

    /// Adds `value` to the coefficient of `k`.
    pub fn add(&mut self, k: MultiIndex, value: T) {
        *self.terms.entry(k).or_insert_with(T::zero) += value;
    }

    pub fn coefficient(&self, k: &MultiIndex) -> T {
        self.terms.get(k).copied().unwrap_or_else(T::zero)
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, T> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Drops coefficients with `|f_k| <= threshold`.
    pub fn prune(&mut self, threshold: T) {
        self.terms.retain(|_, v| v.abs() > threshold);
    }

    /// `L^2_mu` norm, i.e. the l2 norm of the coefficients.
    pub fn norm(&self) -> T {
        self.terms.values().map(|&v| v * v).sum::<T>().sqrt()
    }

    pub fn evaluate(&self, xi: &[T]) -> Result<T> {
        let mut total = T::zero();
        for (k, &f) in &self.terms {
            total += f * hermite_tensor_eval(k, xi)?;
        }
        Ok(total)
    }
}

/// `max_i ||Delta_i H_k||` for `k = 0..=k_max`, with the maximizing level.
///
/// `Delta_i = U_i - U_{i-1}` is the univariate detail operator of `family`.
/// Squared norms are integrated exactly with a Gauss-Hermite rule.
pub fn delta_norm_profile(family: NodeFamily, k_max: usize) -> Result<Vec<(usize, f64, usize)>> {
    let max_level = family.max_level().unwrap_or(usize::MAX);
    let top = (k_max + 1).min(max_level);
    let mut interpolants = Vec::with_capacity(top + 1);
    for level in 0..=top {
        let r = rule::<f64>(family, level)?;
        interpolants.push(Barycentric::new(&r.nodes));
    }
    let mut rows = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let mut best = (0.0f64, 0usize);
        let i_max = (k + 1).min(top);
        for i in 0..=i_max {
            let degree = interpolants[i].len().max(k + 1);
            let n = (degree + 1).min(MAX_GAUSS_HERMITE_NODES);
            let gh = gauss_hermite_f64(n)?;
            let detail = |x: f64| {
                let at = |bary: &Barycentric<f64>| {
                    let vals: Vec<f64> = bary.nodes().iter().map(|&t| hermite_eval(k, t)).collect();
                    bary.interpolate(&vals, x)
                };
                let fine = at(&interpolants[i]);
                if i == 0 {
                    fine
                } else {
                    fine - at(&interpolants[i - 1])
                }
            };
            let sq: f64 = gh.integrate(|x| detail(x).powi(2));
            let norm = sq.max(0.0).sqrt();
            if norm > best.0 {
                best = (norm, i);
            }
        }
        rows.push((k, best.0, best.1));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn univariate_values() {
        assert_eq!(hermite_eval(0, 3.7), 1.0);
        assert!(hermite_eval(2, 1.0f64).abs() < 1e-15);
        assert!((hermite_eval(2, 2.0f64) - 3.0 / 2f64.sqrt()).abs() < 1e-14);
        assert_eq!(hermite_eval(1, -0.25f32), -0.25);
    }

    #[test]
    fn tensor_values() {
        assert_eq!(hermite_tensor_eval(&MultiIndex::zero(), &[0.3f64]), Ok(1.0));
        assert_eq!(
            hermite_tensor_eval(&MultiIndex::from_levels(&[1, 1]), &[2.0, 3.0]),
            Ok(6.0)
        );
        let v = hermite_tensor_eval(&MultiIndex::from_levels(&[2, 0, 1]), &[1.0f64, 9.0, 2.0]).unwrap();
        assert!(v.abs() < 1e-15);
        assert_eq!(
            hermite_tensor_eval(&MultiIndex::from_levels(&[0, 0, 1]), &[1.0f64]),
            Err(Error::MissingCoordinate { dim: 2, got: 1 })
        );
    }

    #[test]
    fn orthonormal_gram_matrix() {
        let gh = gauss_hermite_f64(40).unwrap();
        for j in 0..=12 {
            for k in 0..=12 {
                let g = gh.integrate(|x| hermite_eval(j, x) * hermite_eval(k, x));
                let expect = if j == k { 1.0 } else { 0.0 };
                assert!((g - expect).abs() < 1e-10, "({j},{k}): {g}");
            }
        }
    }

    #[test]
    fn expansion_norm_and_evaluation() {
        let e = HermiteExpansion::from_terms([(MultiIndex::zero(), 3.0f64), (MultiIndex::unit(0), 4.0)]);
        assert!((e.norm() - 5.0).abs() < 1e-15);
        assert!((e.evaluate(&[0.5]).unwrap() - 5.0).abs() < 1e-15);
    }

    #[test]
    fn profile_small_cases() {
        let p = delta_norm_profile(NodeFamily::GaussHermite, 1).unwrap();
        assert!((p[0].1 - 1.0).abs() < 1e-14 && p[0].2 == 0);
        assert!((p[1].1 - 1.0).abs() < 1e-14 && p[1].2 == 1);
        let p = delta_norm_profile(NodeFamily::GaussianLeja, 0).unwrap();
        assert!((p[0].1 - 1.0).abs() < 1e-14);
    }
}
