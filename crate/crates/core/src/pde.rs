//! Piecewise-linear finite elements for `-(a u')' = f` on (0, 1) with
//! homogeneous Dirichlet conditions.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::field::FieldExpansion;
use crate::linalg::solve_tridiagonal;
use crate::scalar::Scalar;
use crate::sparse_grid::GridValue;

/// Interior nodal values on a uniform mesh of `mesh_n` elements.
#[derive(Clone, Debug, PartialEq)]
pub struct FemSolution<T> {
    pub mesh_n: usize,
    pub nodal_values: Vec<T>,
}

impl<T: Scalar> FemSolution<T> {
    pub fn zeros(mesh_n: usize) -> Self {
        Self {
            mesh_n,
            nodal_values: vec![T::zero(); mesh_n.saturating_sub(1)],
        }
    }

    pub fn from_fn<F: Fn(T) -> T>(mesh_n: usize, f: F) -> Self {
        let h = T::one() / T::of_usize(mesh_n);
        Self {
            mesh_n,
            nodal_values: (1..mesh_n).map(|i| f(T::of_usize(i) * h)).collect(),
        }
    }

    /// Value at mesh node `i` in `0..=mesh_n`, boundary included.
    pub fn node(&self, i: usize) -> T {
        if i == 0 || i == self.mesh_n {
            T::zero()
        } else {
            self.nodal_values[i - 1]
        }
    }

    /// Piecewise-linear interpolation at `x` in `[0, 1]`.
    pub fn value_at(&self, x: T) -> T {
        let n = T::of_usize(self.mesh_n);
        let t = (x * n).max(T::zero()).min(n);
        let i = t.floor().to_usize().unwrap_or(0).min(self.mesh_n - 1);
        let frac = t - T::of_usize(i);
        self.node(i) * (T::one() - frac) + self.node(i + 1) * frac
    }

    /// Linear interpolation onto a uniform mesh of `mesh_n` elements.
    pub fn prolong(&self, mesh_n: usize) -> Self {
        if mesh_n == self.mesh_n {
            return self.clone();
        }
        let h = T::one() / T::of_usize(mesh_n);
        Self {
            mesh_n,
            nodal_values: (1..mesh_n).map(|i| self.value_at(T::of_usize(i) * h)).collect(),
        }
    }

    /// `|u|_{H^1_0} = sqrt(sum_e h (slope_e)^2)`.
    pub fn h1_seminorm(&self) -> T {
        let n = T::of_usize(self.mesh_n);
        let mut s = T::zero();
        for i in 0..self.mesh_n {
            let d = self.node(i + 1) - self.node(i);
            s += d * d;
        }
        (s * n).sqrt()
    }

    /// CSV with header `x,u`, boundary nodes included.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,u\n");
        for i in 0..=self.mesh_n {
            let x = i as f64 / self.mesh_n as f64;
            let _ = writeln!(out, "{x},{}", self.node(i));
        }
        out
    }
}

/// `|u1 - u2|_{H^1_0}`, prolonging the coarser solution when meshes differ.
pub fn h1_distance<T: Scalar>(u1: &FemSolution<T>, u2: &FemSolution<T>) -> T {
    let n = u1.mesh_n.max(u2.mesh_n);
    let (a, b) = (u1.prolong(n), u2.prolong(n));
    let nf = T::of_usize(n);
    let mut s = T::zero();
    for i in 0..n {
        let d = (a.node(i + 1) - a.node(i)) - (b.node(i + 1) - b.node(i));
        s += d * d;
    }
    (s * nf).sqrt()
}

impl<T: Scalar> GridValue<T> for FemSolution<T> {
    fn zeroed_like(&self) -> Self {
        Self::zeros(self.mesh_n)
    }

    fn add_scaled(&mut self, weight: T, other: &Self) {
        assert_eq!(self.mesh_n, other.mesh_n, "FEM solutions on different meshes");
        for (a, &b) in self.nodal_values.iter_mut().zip(&other.nodal_values) {
            *a += weight * b;
        }
    }

    fn norm(&self) -> T {
        self.h1_seminorm()
    }
}

/// The two Gauss points of every element, in element order.
pub fn gauss_points<T: Scalar>(mesh_n: usize) -> Vec<T> {
    let h = T::one() / T::of_usize(mesh_n);
    let half = T::of(0.5);
    let off = T::of(0.5 / 3f64.sqrt());
    let mut xs = Vec::with_capacity(2 * mesh_n);
    for e in 0..mesh_n {
        let mid = (T::of_usize(e) + half) * h;
        xs.push(mid - off * h);
        xs.push(mid + off * h);
    }
    xs
}

/// Solves with the coefficient given at [`gauss_points`].
pub fn solve_with_gauss_values<T: Scalar>(a_at_gauss: &[T], f: T, mesh_n: usize) -> Result<FemSolution<T>> {
    if mesh_n < 2 {
        return Err(Error::InvalidArgument(format!("mesh_n = {mesh_n}, need at least 2")));
    }
    if a_at_gauss.len() != 2 * mesh_n {
        return Err(Error::Misaligned {
            got: a_at_gauss.len(),
            expected: 2 * mesh_n,
        });
    }
    if let Some(k) = a_at_gauss.iter().position(|&v| !(v > T::zero()) || !v.is_finite()) {
        let x = gauss_points::<f64>(mesh_n)[k];
        return Err(Error::NonPositiveCoefficient {
            x,
            value: a_at_gauss[k].as_f64(),
        });
    }
    let nf = T::of_usize(mesh_n);
    let h = T::one() / nf;
    // element stiffness a_e / h with a_e the 2-point Gauss mean
    let k: Vec<T> = a_at_gauss.chunks(2).map(|g| (g[0] + g[1]) * T::of(0.5) * nf).collect();
    let interior = mesh_n - 1;
    let diag: Vec<T> = (0..interior).map(|i| k[i] + k[i + 1]).collect();
    let off: Vec<T> = (1..interior).map(|i| -k[i]).collect();
    let rhs = vec![f * h; interior];
    let nodal_values = solve_tridiagonal(&off, &diag, &off, &rhs)?;
    Ok(FemSolution { mesh_n, nodal_values })
}

/// Galerkin solution of `-(a u')' = f` on a uniform mesh.
pub fn solve<T: Scalar, A: Fn(T) -> T>(a: A, f: T, mesh_n: usize) -> Result<FemSolution<T>> {
    if mesh_n < 2 {
        return Err(Error::InvalidArgument(format!("mesh_n = {mesh_n}, need at least 2")));
    }
    let values: Vec<T> = gauss_points::<T>(mesh_n).into_iter().map(a).collect();
    solve_with_gauss_values(&values, f, mesh_n)
}

/// `-(exp(log a) u')' = f` with `log a` given by a field expansion.
#[derive(Clone, Debug)]
pub struct LognormalProblem {
    pub field: FieldExpansion,
    pub rhs: f64,
    pub mesh_n: usize,
    gauss: Vec<f64>,
}

impl LognormalProblem {
    pub fn new(field: FieldExpansion, rhs: f64, mesh_n: usize) -> Self {
        Self {
            field,
            rhs,
            mesh_n,
            gauss: gauss_points(mesh_n),
        }
    }

    /// Solves at the parameter `xi`; coordinates beyond `xi.len()` are 0.
    pub fn solve(&self, xi: &[f64]) -> Result<FemSolution<f64>> {
        let mut a = vec![0.0; self.gauss.len()];
        self.field.log_a_many(xi, &self.gauss, &mut a)?;
        for v in a.iter_mut() {
            *v = v.exp();
        }
        solve_with_gauss_values(&a, self.rhs, self.mesh_n)
    }
}
