//! CSV tables for nodes, field realizations and the auxiliary studies.

use std::fmt::Write as _;

use anyhow::Result;
use gaussgrid::field::kappa_tau_many;
use gaussgrid::hermite::delta_norm_profile;
use gaussgrid::nodes::rule;
use gaussgrid::{FieldExpansion, NodeFamily};
use rand_distr::{Distribution, StandardNormal};

use crate::mc::substream;

/// `level,index,node,weight` for levels `0..=max_level` (written 1-based).
pub fn nodes_csv(family: NodeFamily, max_level: usize) -> Result<String> {
    let mut out = String::from("level,index,node,weight\n");
    for level in 0..=max_level {
        let r = rule::<f64>(family, level)?;
        for (j, (x, w)) in r.nodes.iter().zip(&r.weights).enumerate() {
            let _ = writeln!(out, "{},{j},{x:e},{w:e}", level + 1);
        }
    }
    Ok(out)
}

/// Realizations of `log a` on a uniform grid: `path,x,log_a`.
pub fn field_paths_csv(field: &FieldExpansion, paths: usize, points: usize, seed: u64) -> Result<String> {
    let xs: Vec<f64> = (0..points).map(|i| i as f64 / (points - 1).max(1) as f64).collect();
    let mut out = String::from("path,x,log_a\n");
    let mut values = vec![0.0; points];
    for p in 0..paths {
        let mut rng = substream(seed, p as u64);
        let xi: Vec<f64> = (0..field.truncation).map(|_| StandardNormal.sample(&mut rng)).collect();
        field.log_a_many(&xi, &xs, &mut values)?;
        for (x, v) in xs.iter().zip(&values) {
            let _ = writeln!(out, "{p},{x},{v:e}");
        }
    }
    Ok(out)
}

/// `x,kappa` at `points` log-spaced locations in `[x_min, x_max]`.
pub fn kappa_table(p: f64, truncation: usize, x_min: f64, x_max: f64, points: usize) -> Vec<(f64, f64)> {
    let (a, b) = (x_min.ln(), x_max.ln());
    let xs: Vec<f64> = (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1).max(1) as f64).exp())
        .collect();
    let k = kappa_tau_many(p, truncation, &xs);
    xs.into_iter().zip(k).collect()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.abs().ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let num: f64 = logs.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = logs.iter().map(|&(x, _)| (x - mx).powi(2)).sum();
    num / den
}

pub fn kappa_csv(p: f64, truncation: usize, table: &[(f64, f64)]) -> String {
    let mut out = String::from("p,truncation,x,kappa\n");
    for &(x, k) in table {
        let _ = writeln!(out, "{p},{truncation},{x:e},{k:e}");
    }
    out
}

/// `k,max_norm,argmax_level,bound` with `bound = 1 + 2k`.
pub fn delta_norms_csv(family: NodeFamily, k_max: usize) -> Result<String> {
    let mut out = String::from("k,max_norm,argmax_level,bound\n");
    for (k, norm, level) in delta_norm_profile(family, k_max)? {
        let _ = writeln!(out, "{k},{norm:e},{},{}", level + 1, 1 + 2 * k);
    }
    Ok(out)
}
