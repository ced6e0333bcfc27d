//! Collocation of the lognormal diffusion problem and its error curves.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::{Arc, Mutex, OnceLock};

use anyhow::{bail, Result};
use gaussgrid::adaptive::trace_csv;
use gaussgrid::sparse_grid::unsorted_tail_curve;
use gaussgrid::{
    a_priori_set, best_n_term_curve, h1_distance, run_a_posteriori_with, AdaptiveConfig, AdaptiveState, Error,
    FemSolution, FieldExpansion, LognormalProblem, MultiIndexSet, NodeFamily, PointKey, Profit, RuleTable, SparseGrid,
    TraceRecord,
};
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, ExperimentKind, Strategy};
use crate::curve::ErrorCurve;
use crate::mc::substream;

pub const A_PRIORI: &str = "a-priori";
pub const I_SET: &str = "a-posteriori-I-set";
pub const G_SET: &str = "a-posteriori-G-set";

/// Label of a curve, e.g. `a-posteriori-I-set-incremental`.
pub fn label(construction: &str, combitec: bool) -> String {
    format!("{construction}-{}", if combitec { "combitec" } else { "incremental" })
}

/// Direct solves at Gaussian samples of the full-length field.
#[derive(Debug)]
pub struct ReferenceSet {
    pub samples: Vec<Vec<f64>>,
    pub solutions: Vec<FemSolution<f64>>,
    /// Draws rejected because the coefficient over- or underflowed.
    pub resampled: usize,
}

impl ReferenceSet {
    /// Sample `i` comes from substream `i` of `seed`; a rejected draw is
    /// replaced by the next vector of the same substream.
    pub fn generate(problem: &LognormalProblem, n: usize, seed: u64) -> Result<Self> {
        let dims = problem.field.truncation;
        let drawn: Vec<(Vec<f64>, FemSolution<f64>, usize)> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut rng = substream(seed, i as u64);
                let mut rejected = 0;
                loop {
                    let xi: Vec<f64> = (0..dims).map(|_| StandardNormal.sample(&mut rng)).collect();
                    match problem.solve(&xi) {
                        Ok(u) => return Ok((xi, u, rejected)),
                        Err(Error::NonPositiveCoefficient { .. }) if rejected < 100 => rejected += 1,
                        Err(e) => return Err(e),
                    }
                }
            })
            .collect::<gaussgrid::Result<_>>()?;
        let mut set = ReferenceSet {
            samples: Vec::with_capacity(n),
            solutions: Vec::with_capacity(n),
            resampled: 0,
        };
        for (xi, u, r) in drawn {
            set.samples.push(xi);
            set.solutions.push(u);
            set.resampled += r;
        }
        Ok(set)
    }

    /// `(sqrt(mean), mean)` of `|u - U u|^2_{H^1_0}` over the samples.
    pub fn error(&self, grid: &SparseGrid<f64>, values: &[FemSolution<f64>]) -> Result<(f64, f64)> {
        let sq: Vec<f64> = self
            .samples
            .par_iter()
            .zip(&self.solutions)
            .map(|(xi, u)| {
                let approx = grid.evaluate(values, xi)?;
                let d = h1_distance(&approx, u);
                Ok(d * d)
            })
            .collect::<gaussgrid::Result<_>>()?;
        let mean = sq.iter().sum::<f64>() / sq.len().max(1) as f64;
        Ok((mean.sqrt(), mean))
    }
}

type ReferenceKey = (String, u64, usize, u64, usize, u64, usize, u64);

fn reference_cache() -> &'static Mutex<HashMap<ReferenceKey, Arc<ReferenceSet>>> {
    static CACHE: OnceLock<Mutex<HashMap<ReferenceKey, Arc<ReferenceSet>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// [`ReferenceSet::generate`], memoized for the lifetime of the process.
pub fn reference_set(problem: &LognormalProblem, n: usize, seed: u64) -> Result<Arc<ReferenceSet>> {
    let f = &problem.field;
    let key = (
        f.kind.to_string(),
        f.sigma.to_bits(),
        f.truncation,
        f.lc_scale.to_bits(),
        problem.mesh_n,
        problem.rhs.to_bits(),
        n,
        seed,
    );
    let mut cache = reference_cache().lock().expect("reference cache poisoned");
    if let Some(r) = cache.get(&key) {
        return Ok(r.clone());
    }
    let r = Arc::new(ReferenceSet::generate(problem, n, seed)?);
    cache.insert(key, r.clone());
    Ok(r)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PdeSettings {
    /// Parametrization of `log a`; its truncation is also the reference one.
    pub field: FieldExpansion,
    pub family: NodeFamily,
    pub a_priori: bool,
    pub a_posteriori: bool,
    pub budget: usize,
    pub buffer: usize,
    pub profit: Profit,
    pub probe_samples: usize,
    pub probe_seed: u64,
    pub mesh_n: usize,
    pub rhs: f64,
    pub n_ref: usize,
    pub seed: u64,
    pub checkpoint_ratio: f64,
}

impl PdeSettings {
    pub fn new(field: FieldExpansion, family: NodeFamily, seed: u64) -> Self {
        Self {
            field,
            family,
            a_priori: false,
            a_posteriori: true,
            budget: 2000,
            buffer: 5,
            profit: Profit::Error,
            probe_samples: 200,
            probe_seed: 0x5eed,
            mesh_n: 256,
            rhs: 1.0,
            n_ref: 1000,
            seed,
            checkpoint_ratio: 1.25,
        }
    }

    /// One settings value per family listed in `cfg`.
    pub fn from_config(cfg: &ExperimentConfig) -> Result<Vec<Self>> {
        let Some(field) = &cfg.field else {
            bail!("PDE experiments need a [field] section")
        };
        let field = field.expansion()?;
        let seed = cfg.seed()?;
        let g = &cfg.grid;
        let (a_priori, a_posteriori) = match g.strategy {
            _ if cfg.experiment == ExperimentKind::Bnt => (false, true),
            Strategy::APriori => (true, false),
            Strategy::APosteriori => (false, true),
            Strategy::Both => (true, true),
            Strategy::Smolyak => bail!("PDE runs use the a-priori or a-posteriori strategy"),
        };
        g.families()?
            .into_iter()
            .map(|family| {
                Ok(Self {
                    a_priori,
                    a_posteriori,
                    budget: g.budget,
                    buffer: g.buffer,
                    profit: g.profit()?,
                    probe_samples: g.probe_samples,
                    probe_seed: g.probe_seed,
                    mesh_n: cfg.pde.mesh_n,
                    rhs: cfg.pde.rhs,
                    n_ref: cfg.mc.samples.unwrap_or(1000),
                    checkpoint_ratio: g.checkpoint_ratio,
                    ..Self::new(field.clone(), family, seed)
                })
            })
            .collect()
    }

    pub fn problem(&self) -> LognormalProblem {
        LognormalProblem::new(self.field.clone(), self.rhs, self.mesh_n)
    }
}

#[derive(Debug)]
pub struct PdeOutcome {
    pub family: NodeFamily,
    /// Error against point count for every construction and counting.
    pub curves: Vec<ErrorCurve>,
    /// I-set error against the number of indices in the set.
    pub index_curve: ErrorCurve,
    pub trace: Vec<TraceRecord>,
    /// Final a-posteriori I-set grid with its values.
    pub final_grid: Option<(SparseGrid<f64>, Vec<FemSolution<f64>>)>,
    pub max_term_dimension: usize,
    pub introduced_dims: usize,
    pub reference_resampled: usize,
    pub reference_draws: usize,
}

impl PdeOutcome {
    pub fn curve(&self, label: &str) -> Option<&ErrorCurve> {
        self.curves.iter().find(|c| c.label == label)
    }

    pub fn trace_csv(&self) -> String {
        trace_csv(&self.trace, self.introduced_dims)
    }
}

struct Checkpoints<'a> {
    reference: &'a ReferenceSet,
    next: usize,
    ratio: f64,
    i_inc: ErrorCurve,
    i_ct: ErrorCurve,
    g_inc: ErrorCurve,
    g_ct: ErrorCurve,
    index: ErrorCurve,
    last_work: Option<usize>,
}

impl<'a> Checkpoints<'a> {
    fn new(reference: &'a ReferenceSet, family: NodeFamily, ratio: f64) -> Self {
        let fam = family.short_name().to_string();
        Self {
            reference,
            next: 0,
            ratio,
            i_inc: ErrorCurve::new(label(I_SET, false), fam.clone()),
            i_ct: ErrorCurve::new(label(I_SET, true), fam.clone()),
            g_inc: ErrorCurve::new(label(G_SET, false), fam.clone()),
            g_ct: ErrorCurve::new(label(G_SET, true), fam.clone()),
            index: ErrorCurve::new(format!("{I_SET}-indices"), fam),
            last_work: None,
        }
    }

    fn record(&mut self, state: &AdaptiveState<FemSolution<f64>>) -> gaussgrid::Result<()> {
        let work = state.work();
        self.last_work = Some(work);
        self.next = (work + 1).max((work as f64 * self.ratio).ceil() as usize);
        let map = |e: anyhow::Error| Error::InvalidArgument(e.to_string());
        let (grid, values) = state.grid_with_values(state.active_set())?;
        let counts = grid.counts();
        let (err, ms) = self.reference.error(&grid, &values).map_err(map)?;
        self.i_inc.push(counts.incremental, err, ms);
        self.i_ct.push(counts.combitec, err, ms);
        self.index.push(state.active_set().len(), err, ms);
        let g_set = state.g_set();
        let (grid, values) = state.grid_with_values(&g_set)?;
        let counts = grid.counts();
        let (err, ms) = self.reference.error(&grid, &values).map_err(map)?;
        self.g_inc.push(counts.incremental, err, ms);
        self.g_ct.push(counts.combitec, err, ms);
        Ok(())
    }
}

/// Runs the configured constructions for one node family.
pub fn run_pde_bench(s: &PdeSettings) -> Result<PdeOutcome> {
    let problem = s.problem();
    let reference = reference_set(&problem, s.n_ref, s.seed)?;
    let family_name = s.family.short_name().to_string();
    let mut out = PdeOutcome {
        family: s.family,
        curves: Vec::new(),
        index_curve: ErrorCurve::new(format!("{I_SET}-indices"), family_name.clone()),
        trace: Vec::new(),
        final_grid: None,
        max_term_dimension: 0,
        introduced_dims: 0,
        reference_resampled: reference.resampled,
        reference_draws: reference.resampled + reference.samples.len(),
    };
    if s.a_priori {
        let (inc, ct) = a_priori_curves(s, &problem, &reference)?;
        out.curves.push(inc);
        out.curves.push(ct);
    }
    if s.a_posteriori {
        let mut config = AdaptiveConfig::new(s.family, s.budget, s.buffer);
        config.profit = s.profit;
        config.probe_samples = s.probe_samples;
        config.probe_seed = s.probe_seed;
        let mut cp = Checkpoints::new(&reference, s.family, s.checkpoint_ratio);
        let state = run_a_posteriori_with(&problem, config, |st| {
            if st.work() >= cp.next {
                cp.record(st)?;
            }
            Ok(())
        })?;
        if cp.last_work != Some(state.work()) {
            cp.record(&state)?;
        }
        let grid = state.grid_with_values(state.active_set())?;
        out.max_term_dimension = grid.0.max_term_dimension();
        out.final_grid = Some(grid);
        out.introduced_dims = state.introduced_dims();
        out.trace = state.trace;
        out.index_curve = cp.index;
        out.curves.extend([cp.i_inc, cp.g_inc, cp.i_ct, cp.g_ct]);
    }
    Ok(out)
}

/// A-priori sets of growing size until the grid would exceed the budget.
fn a_priori_curves(
    s: &PdeSettings,
    problem: &LognormalProblem,
    reference: &ReferenceSet,
) -> Result<(ErrorCurve, ErrorCurve)> {
    let fam = s.family.short_name();
    let mut inc = ErrorCurve::new(label(A_PRIORI, false), fam);
    let mut ct = ErrorCurve::new(label(A_PRIORI, true), fam);
    let mut table = Arc::new(RuleTable::<f64>::new(s.family));
    let mut cache: HashMap<PointKey, FemSolution<f64>> = HashMap::new();
    let mut n = 1usize;
    loop {
        let set: MultiIndexSet = a_priori_set(&s.field, n)?;
        let grid = match SparseGrid::build_with_table(&set, table.clone()) {
            Ok(g) => g,
            Err(Error::RuleExhausted { .. }) => {
                inc.exhausted = true;
                ct.exhausted = true;
                break;
            }
            Err(e) => return Err(e.into()),
        };
        table = grid.table().clone();
        if grid.len() > s.budget {
            break;
        }
        let fresh: Vec<&PointKey> = grid.points().iter().filter(|k| !cache.contains_key(*k)).collect();
        let solved: Vec<FemSolution<f64>> = fresh
            .par_iter()
            .map(|k| problem.solve(&k.dense(&table, 0)))
            .collect::<gaussgrid::Result<_>>()?;
        for (k, u) in fresh.into_iter().zip(solved) {
            cache.insert(k.clone(), u);
        }
        let values: Vec<FemSolution<f64>> = grid.points().iter().map(|k| cache[k].clone()).collect();
        let (err, ms) = reference.error(&grid, &values)?;
        let counts = grid.counts();
        inc.push(counts.incremental, err, ms);
        ct.push(counts.combitec, err, ms);
        if set.len() < n {
            break;
        }
        n = (n + 1).max((n as f64 * s.checkpoint_ratio).ceil() as usize);
    }
    Ok((inc, ct))
}

/// Best-N-term data of a finished run.
#[derive(Clone, Debug, PartialEq)]
pub struct BntCurves {
    /// `(N, tail)` after sorting the coefficient norms.
    pub best: Vec<(usize, f64)>,
    /// `(N, tail)` in graded-lex order.
    pub unsorted: Vec<(usize, f64)>,
}

pub fn bnt_curves(grid: &SparseGrid<f64>, values: &[FemSolution<f64>]) -> Result<BntCurves> {
    let expansion = grid.to_hermite_norms(values)?;
    Ok(BntCurves {
        best: best_n_term_curve(&expansion),
        unsorted: unsorted_tail_curve(&expansion),
    })
}

pub fn bnt_csv(family: NodeFamily, bnt: &BntCurves, index_curve: &ErrorCurve) -> String {
    let fam = family.short_name();
    let mut out = String::from("family,label,n,error\n");
    for &(n, e) in &bnt.best {
        let _ = writeln!(out, "{fam},best-n-term,{n},{e:e}");
    }
    for &(n, e) in &bnt.unsorted {
        let _ = writeln!(out, "{fam},unsorted-tail,{n},{e:e}");
    }
    for p in &index_curve.points {
        let _ = writeln!(out, "{fam},sparse-grid,{},{:e}", p.work, p.error);
    }
    out
}
