//! Barycentric (second-kind) Lagrange interpolation on arbitrary distinct nodes.

use crate::scalar::Scalar;

/// Nodes together with their barycentric weights.
#[derive(Clone, Debug)]
pub struct Barycentric<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Scalar> Barycentric<T> {
    /// `nodes` must be pairwise distinct.
    pub fn new(nodes: &[T]) -> Self {
        let n = nodes.len();
        // log-magnitudes keep the products finite for long Leja prefixes
        let mut log_mag = vec![T::zero(); n];
        let mut negative = vec![false; n];
        for j in 0..n {
            for k in 0..n {
                if j != k {
                    let diff = nodes[j] - nodes[k];
                    log_mag[j] -= diff.abs().ln();
                    negative[j] ^= diff < T::zero();
                }
            }
        }
        let top = log_mag.iter().copied().fold(T::neg_infinity(), T::max);
        let weights = log_mag
            .iter()
            .zip(&negative)
            .map(|(&lm, &neg)| {
                let w = (lm - top).exp();
                if neg {
                    -w
                } else {
                    w
                }
            })
            .collect();
        Self {
            nodes: nodes.to_vec(),
            weights,
        }
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Values of all Lagrange fundamental polynomials at `x`, written into `out`.
    pub fn basis_into(&self, x: T, out: &mut [T]) {
        debug_assert_eq!(out.len(), self.nodes.len());
        if self.nodes.len() == 1 {
            out[0] = T::one();
            return;
        }
        if let Some(hit) = self.nodes.iter().position(|&node| node == x) {
            out.iter_mut().for_each(|v| *v = T::zero());
            out[hit] = T::one();
            return;
        }
        let mut total = T::zero();
        for ((o, &node), &w) in out.iter_mut().zip(&self.nodes).zip(&self.weights) {
            let t = w / (x - node);
            *o = t;
            total += t;
        }
        for o in out.iter_mut() {
            *o /= total;
        }
    }

    pub fn basis(&self, x: T) -> Vec<T> {
        let mut out = vec![T::zero(); self.nodes.len()];
        self.basis_into(x, &mut out);
        out
    }

    /// Interpolant of `values` (one per node) evaluated at `x`.
    pub fn interpolate(&self, values: &[T], x: T) -> T {
        self.basis(x).iter().zip(values).map(|(&l, &v)| l * v).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_polynomials_up_to_degree() {
        let nodes = [-1.3, 0.0, 0.4, 2.0, 3.5];
        let bary = Barycentric::new(&nodes);
        let p = |x: f64| 1.0 - 2.0 * x + 0.5 * x.powi(3) - 0.1 * x.powi(4);
        let vals: Vec<f64> = nodes.iter().map(|&x| p(x)).collect();
        for &x in &[-2.0, -0.7, 0.1, 1.9, 5.0] {
            assert!((bary.interpolate(&vals, x) - p(x)).abs() < 1e-11);
        }
    }

    #[test]
    fn cardinal_at_nodes_and_partition_of_unity() {
        let nodes = [0.0f64, 1.0, -2.0];
        let bary = Barycentric::new(&nodes);
        assert_eq!(bary.basis(1.0), vec![0.0, 1.0, 0.0]);
        let s: f64 = bary.basis(0.3).iter().sum();
        assert!((s - 1.0).abs() < 1e-15);
    }
}
