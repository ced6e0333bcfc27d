use super::{NodeFamily, UnivariateRule};
use crate::error::{Error, Result};
use crate::linalg::symmetric_tridiagonal_eigenvalues;
use crate::scalar::Scalar;

pub const MAX_GAUSS_HERMITE_NODES: usize = 200;

/// `n`-point Gauss-Hermite rule for the standard Gaussian measure, in `T`.
pub fn gauss_hermite<T: Scalar>(n: usize) -> Result<UnivariateRule<T>> {
    Ok(gauss_hermite_f64(n)?.cast())
}

/// `n`-point Gauss-Hermite rule: nodes are the zeros of the degree-`n`
/// probabilists' Hermite polynomial.
///
/// The Jacobi matrix of the probabilists' recurrence (zero diagonal,
/// off-diagonals `sqrt(m)`) gives the nodes; each is polished by Newton's
/// method on the orthonormal recurrence. Weights come from the Christoffel
/// function `1 / sum_k H_k(x)^2`, which keeps full relative accuracy in the
/// tails where eigenvector-based weights do not.
pub fn gauss_hermite_f64(n: usize) -> Result<UnivariateRule<f64>> {
    if !(1..=MAX_GAUSS_HERMITE_NODES).contains(&n) {
        return Err(Error::NodeCount {
            n,
            min: 1,
            max: MAX_GAUSS_HERMITE_NODES,
        });
    }
    let diag = vec![0.0; n];
    let off: Vec<f64> = (1..n).map(|m| (m as f64).sqrt()).collect();
    let mut nodes = symmetric_tridiagonal_eigenvalues(&diag, &off)?;

    for x in nodes.iter_mut() {
        for _ in 0..4 {
            let (p, dp) = orthonormal_hermite_and_derivative(n, *x);
            if dp == 0.0 {
                break;
            }
            let step = p / dp;
            *x -= step;
            if step.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
    }
    nodes.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));

    // exact reflection symmetry
    for i in 0..n / 2 {
        let a = 0.5 * (nodes[n - 1 - i] - nodes[i]);
        nodes[i] = -a;
        nodes[n - 1 - i] = a;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }

    let mut weights: Vec<f64> = nodes.iter().map(|&x| christoffel(n, x)).collect();
    for i in 0..n / 2 {
        let w = 0.5 * (weights[i] + weights[n - 1 - i]);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }

    if nodes.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Convergence(format!(
            "Gauss-Hermite nodes for n = {n} are not distinct after refinement"
        )));
    }

    Ok(UnivariateRule {
        family: NodeFamily::GaussHermite,
        level: n - 1,
        nodes,
        weights,
        exactness: Some(2 * n - 1),
    })
}

/// Orthonormal `H_n(x)` and its derivative `sqrt(n) H_{n-1}(x)`.
fn orthonormal_hermite_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        let kf = k as f64;
        let next = (x * cur - kf.sqrt() * prev) / (kf + 1.0).sqrt();
        prev = cur;
        cur = next;
    }
    (cur, (n as f64).sqrt() * prev)
}

fn christoffel(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    let mut sum = 1.0;
    for k in 0..n - 1 {
        let kf = k as f64;
        let next = (x * cur - kf.sqrt() * prev) / (kf + 1.0).sqrt();
        prev = cur;
        cur = next;
        sum += cur * cur;
    }
    1.0 / sum
}
