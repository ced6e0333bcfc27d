//! Smolyak sweeps for scalar test functions.

use std::fmt::Write as _;
use std::sync::Arc;

use anyhow::Result;
use gaussgrid::{smolyak_set, CountStrategy, Error, NodeFamily, RuleTable, SparseGrid};

use crate::config::ExperimentConfig;
use crate::functions::BoundFunction;
use crate::mc::{gaussian_batches, mc_l2_error_on};

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub w: usize,
    pub incremental: usize,
    pub combitec: usize,
    pub error: f64,
    /// `median_k Err_k` for interpolation; `error^2` for quadrature.
    pub mean_square: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepCurve {
    pub function: String,
    pub family: NodeFamily,
    pub rows: Vec<SweepRow>,
    /// First level the family could not build.
    pub exhausted_at: Option<usize>,
}

enum Target<'a> {
    Quadrature,
    Interpolation(&'a [Vec<Vec<f64>>]),
}

/// Grids on `smolyak_set(dims, w)` for `w = 0..=w_max`, stopping at rule
/// exhaustion or once a grid exceeds `max_points`.
fn sweep(f: &BoundFunction, family: NodeFamily, w_max: usize, max_points: usize, target: Target) -> Result<SweepCurve> {
    let dims = f.dims();
    let mut table = Arc::new(RuleTable::<f64>::new(family));
    let mut curve = SweepCurve {
        function: String::new(),
        family,
        rows: Vec::new(),
        exhausted_at: None,
    };
    let exact = matches!(target, Target::Quadrature).then(|| f.integral());
    for w in 0..=w_max {
        let set = smolyak_set(dims, w);
        let grid = match SparseGrid::build_with_table(&set, table.clone()) {
            Ok(g) => g,
            Err(Error::RuleExhausted { .. }) => {
                curve.exhausted_at = Some(w);
                break;
            }
            Err(e) => return Err(e.into()),
        };
        table = grid.table().clone();
        if grid.len() > max_points {
            break;
        }
        let values = grid.sample(|xi| f.eval(xi));
        let counts = grid.counts();
        let (error, mean_square) = match &target {
            Target::Quadrature => {
                let err = (grid.quadrature(&values)? - exact.expect("set for quadrature")).abs();
                (err, err * err)
            }
            Target::Interpolation(batches) => {
                let mc = mc_l2_error_on(
                    batches,
                    |xi| grid.evaluate(&values, xi).expect("sample covers every dimension"),
                    |xi| f.eval(xi),
                );
                (mc.error, mc.median_mean_square)
            }
        };
        curve.rows.push(SweepRow {
            w,
            incremental: counts.incremental,
            combitec: counts.combitec,
            error,
            mean_square,
        });
    }
    Ok(curve)
}

pub fn quadrature_sweep(f: &BoundFunction, family: NodeFamily, w_max: usize, max_points: usize) -> Result<SweepCurve> {
    sweep(f, family, w_max, max_points, Target::Quadrature)
}

pub fn interpolation_sweep(
    f: &BoundFunction,
    family: NodeFamily,
    w_max: usize,
    max_points: usize,
    batches: &[Vec<Vec<f64>>],
) -> Result<SweepCurve> {
    sweep(f, family, w_max, max_points, Target::Interpolation(batches))
}

pub fn run_quadrature_bench(cfg: &ExperimentConfig) -> Result<Vec<SweepCurve>> {
    let mut out = Vec::new();
    for nf in &cfg.functions {
        let f = nf.function.bind(cfg.dims);
        for family in cfg.grid.families()? {
            let mut c = quadrature_sweep(&f, family, cfg.grid.w_max, cfg.grid.max_points)?;
            c.function = nf.name.clone();
            out.push(c);
        }
    }
    Ok(out)
}

/// Every function and family sees the same Monte Carlo samples.
pub fn run_interpolation_bench(cfg: &ExperimentConfig) -> Result<Vec<SweepCurve>> {
    let (k, p) = cfg.mc_shape();
    let batches = gaussian_batches(cfg.dims, k, p, cfg.seed()?);
    let mut out = Vec::new();
    for nf in &cfg.functions {
        let f = nf.function.bind(cfg.dims);
        for family in cfg.grid.families()? {
            let mut c = interpolation_sweep(&f, family, cfg.grid.w_max, cfg.grid.max_points, &batches)?;
            c.function = nf.name.clone();
            out.push(c);
        }
    }
    Ok(out)
}

/// CSV of sweep curves. With `count` set, a single `points` column holds
/// that strategy's count.
pub fn sweep_csv(curves: &[SweepCurve], count: Option<CountStrategy>) -> String {
    let mut out = String::new();
    match count {
        None => out.push_str("function,family,w,points_incremental,points_combitec,error,mean_square,exhausted\n"),
        Some(_) => out.push_str("function,family,w,points,error,mean_square,exhausted\n"),
    }
    for c in curves {
        let fam = c.family.short_name();
        for r in &c.rows {
            let points = match count {
                None => format!("{},{}", r.incremental, r.combitec),
                Some(CountStrategy::Incremental) => r.incremental.to_string(),
                Some(CountStrategy::Combitec) => r.combitec.to_string(),
            };
            let _ = writeln!(
                out,
                "{},{fam},{},{points},{:e},{:e},false",
                c.function, r.w, r.error, r.mean_square
            );
        }
        if let Some(w) = c.exhausted_at {
            let blanks = if count.is_none() { ",,,," } else { ",,," };
            let _ = writeln!(out, "{},{fam},{w}{blanks},true", c.function);
        }
    }
    out
}
