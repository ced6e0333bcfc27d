use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};

pub const MAX_LEJA_NODES: usize = 150;

const SEARCH_HALF_WIDTH: f64 = 40.0;
const GRID_POINTS: usize = 200_001;
const TIE_TOLERANCE: f64 = 1e-12;
// local grid maxima this close to the best are refined before choosing
const REFINE_SLACK: f64 = 1e-3;

/// `ln(sqrt(rho(x)) * prod |x - xi_i|)` with `rho` the standard Gaussian
/// density up to its normalizing constant.
pub fn leja_objective(x: f64, nodes: &[f64]) -> f64 {
    -0.25 * x * x + nodes.iter().map(|&xi| (x - xi).abs().ln()).sum::<f64>()
}

fn objective_slope(x: f64, nodes: &[f64]) -> f64 {
    -0.5 * x + nodes.iter().map(|&xi| 1.0 / (x - xi)).sum::<f64>()
}

/// Incremental Gaussian Leja generator.
///
/// Keeps the log-objective on a uniform candidate grid and updates it with
/// one logarithm per grid point and new node. The best grid cells are then
/// refined by bisection on the derivative, which is monotone between
/// consecutive nodes.
#[derive(Clone, Debug)]
pub struct LejaSearch {
    grid: Vec<f64>,
    log_objective: Vec<f64>,
    nodes: Vec<f64>,
}

impl Default for LejaSearch {
    fn default() -> Self {
        Self::new()
    }
}

impl LejaSearch {
    /// Starts the sequence at `xi_0 = 0`.
    pub fn new() -> Self {
        let h = 2.0 * SEARCH_HALF_WIDTH / (GRID_POINTS - 1) as f64;
        let mid = (GRID_POINTS - 1) / 2;
        let grid: Vec<f64> = (0..GRID_POINTS).map(|j| (j as f64 - mid as f64) * h).collect();
        let log_objective = grid.iter().map(|&x| -0.25 * x * x).collect();
        let mut search = Self {
            grid,
            log_objective,
            nodes: Vec::with_capacity(MAX_LEJA_NODES),
        };
        search.push(0.0);
        search
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    fn push(&mut self, xi: f64) {
        for (v, &x) in self.log_objective.iter_mut().zip(&self.grid) {
            *v += (x - xi).abs().ln();
        }
        self.nodes.push(xi);
    }

    /// Appends the next node and returns it.
    pub fn next_node(&mut self) -> Result<f64> {
        let v = &self.log_objective;
        let best = v
            .iter()
            .copied()
            .filter(|x| x.is_finite())
            .fold(f64::NEG_INFINITY, f64::max);
        if !best.is_finite() {
            return Err(Error::Convergence(
                "Leja objective has no finite value on the grid".into(),
            ));
        }
        let mut candidates: Vec<(f64, f64)> = Vec::new();
        let last = v.len() - 1;
        for j in 0..=last {
            if v[j] < best - REFINE_SLACK {
                continue;
            }
            let left = if j == 0 { f64::NEG_INFINITY } else { v[j - 1] };
            let right = if j == last { f64::NEG_INFINITY } else { v[j + 1] };
            if v[j] >= left && v[j] >= right {
                let lo = self.grid[j.saturating_sub(1)];
                let hi = self.grid[(j + 1).min(last)];
                let x = self.refine(lo, hi, self.grid[j]);
                candidates.push((x, leja_objective(x, &self.nodes)));
            }
        }
        let top = candidates.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
        let tol = TIE_TOLERANCE * top.abs().max(1.0);
        let (x, _) = candidates
            .iter()
            .copied()
            .filter(|c| c.1 >= top - tol)
            .max_by(|a, b| a.0.partial_cmp(&b.0).expect("finite candidates"))
            .expect("at least one candidate");
        if x.abs() >= SEARCH_HALF_WIDTH {
            return Err(Error::Convergence(format!("Leja node {x} reached the search boundary")));
        }
        self.push(x);
        Ok(x)
    }

    fn refine(&self, lo: f64, hi: f64, fallback: f64) -> f64 {
        // shrink the bracket away from any node it straddles
        let (mut a, mut b) = (lo, hi);
        for &xi in &self.nodes {
            if xi > a && xi < b {
                if xi < fallback {
                    a = xi;
                } else {
                    b = xi;
                }
            }
        }
        let nudge = |x: f64| if self.nodes.contains(&x) { None } else { Some(x) };
        let (sa, sb) = match (nudge(a), nudge(b)) {
            (Some(a), Some(b)) => (objective_slope(a, &self.nodes), objective_slope(b, &self.nodes)),
            _ => (f64::INFINITY, f64::NEG_INFINITY),
        };
        if !(sa > 0.0 && sb < 0.0) && sa.is_finite() && sb.is_finite() {
            return fallback;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if objective_slope(m, &self.nodes) > 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }
}

fn cache() -> &'static Mutex<LejaSearch> {
    static CACHE: OnceLock<Mutex<LejaSearch>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(LejaSearch::new()))
}

/// First `n` Gaussian Leja nodes in generation order, `xi_0 = 0`.
///
/// Results are cached process-wide; longer requests extend the cached
/// sequence, so every result is a prefix of every longer one.
pub fn gaussian_leja(n: usize) -> Result<Vec<f64>> {
    if !(1..=MAX_LEJA_NODES).contains(&n) {
        return Err(Error::NodeCount {
            n,
            min: 1,
            max: MAX_LEJA_NODES,
        });
    }
    let mut search = cache().lock().unwrap_or_else(|e| e.into_inner());
    while search.nodes().len() < n {
        search.next_node()?;
    }
    Ok(search.nodes()[..n].to_vec())
}
