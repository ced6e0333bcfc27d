use std::io::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use gaussgrid::field::FieldKindName;
use gaussgrid::{CountStrategy, FieldExpansion, NodeFamily};
use gaussgrid_bench::config::{ExperimentConfig, ExperimentKind};
use gaussgrid_bench::curve::{curves_csv, CURVE_HEADER};
use gaussgrid_bench::pde::{bnt_csv, bnt_curves, run_pde_bench, PdeSettings};
use gaussgrid_bench::scalar::{run_interpolation_bench, run_quadrature_bench, sweep_csv};
use gaussgrid_bench::tables;

#[derive(Parser)]
#[command(
    name = "gaussgrid",
    version,
    about = "Sparse-grid collocation experiments with CSV output"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a config file.
    #[command(subcommand)]
    Bench(BenchCommand),
    /// Random field realizations and the kappa study.
    #[command(subcommand)]
    Field(FieldCommand),
    /// Univariate node tables.
    #[command(subcommand)]
    Nodes(NodesCommand),
    /// Norms of univariate detail operators on Hermite polynomials.
    #[command(subcommand)]
    Profile(ProfileCommand),
}

#[derive(Args)]
struct BenchArgs {
    /// TOML experiment file.
    #[arg(long)]
    config: PathBuf,
    /// Overrides `mc.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Restrict point counts to one strategy (incremental or combitec).
    #[arg(long)]
    count: Option<String>,
    /// Output CSV; defaults to the config's `output`, then stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the adaptive trace (PDE runs).
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Subcommand)]
enum BenchCommand {
    Quad(BenchArgs),
    Interp(BenchArgs),
    Pde(BenchArgs),
    Bnt(BenchArgs),
}

#[derive(Subcommand)]
enum FieldCommand {
    Paths {
        #[arg(long, default_value = "kl")]
        kind: String,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        #[arg(long, default_value_t = 3.0)]
        sigma: f64,
        #[arg(long, default_value_t = 1000)]
        truncation: usize,
        #[arg(long, default_value_t = 30)]
        paths: usize,
        #[arg(long, default_value_t = 513)]
        points: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Kappa {
        #[arg(long, default_value_t = 3.0)]
        p: f64,
        #[arg(long, default_value_t = 10_000_000)]
        truncation: usize,
        #[arg(long, default_value_t = 1e-6)]
        x_min: f64,
        #[arg(long, default_value_t = 1e-3)]
        x_max: f64,
        #[arg(long, default_value_t = 25)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum NodesCommand {
    Dump {
        #[arg(long)]
        family: String,
        /// Highest level, 1-based.
        #[arg(long, default_value_t = 5)]
        levels: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ProfileCommand {
    DeltaNorms {
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 39)]
        k_max: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => Ok(std::io::stdout().write_all(text.as_bytes())?),
    }
}

fn load(args: &BenchArgs, expected: ExperimentKind) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if cfg.experiment != expected {
        bail!("config describes a {:?} experiment", cfg.experiment);
    }
    if let Some(seed) = args.seed {
        cfg.mc.seed = Some(seed);
    }
    if let Some(count) = &args.count {
        cfg.count = Some(count.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn output_path(args: &BenchArgs, cfg: &ExperimentConfig) -> Option<PathBuf> {
    args.out.clone().or_else(|| cfg.output.as_ref().map(PathBuf::from))
}

fn scalar(args: &BenchArgs, kind: ExperimentKind) -> Result<()> {
    let cfg = load(args, kind)?;
    let curves = match kind {
        ExperimentKind::Quad => run_quadrature_bench(&cfg)?,
        _ => run_interpolation_bench(&cfg)?,
    };
    let csv = format!("{}\n{}", cfg.comment_line(), sweep_csv(&curves, cfg.count_strategy()?));
    emit(output_path(args, &cfg).as_ref(), &csv)
}

fn bench(cmd: BenchCommand) -> Result<()> {
    match cmd {
        BenchCommand::Quad(args) => scalar(&args, ExperimentKind::Quad),
        BenchCommand::Interp(args) => scalar(&args, ExperimentKind::Interp),
        BenchCommand::Pde(args) => {
            let cfg = load(&args, ExperimentKind::Pde)?;
            let count = cfg.count_strategy()?;
            let mut body = String::new();
            let mut traces = String::new();
            for s in PdeSettings::from_config(&cfg)? {
                let run = run_pde_bench(&s)?;
                let curves: Vec<_> = run
                    .curves
                    .into_iter()
                    .filter(|c| match count {
                        None => true,
                        Some(CountStrategy::Incremental) => c.label.ends_with("incremental"),
                        Some(CountStrategy::Combitec) => c.label.ends_with("combitec"),
                    })
                    .collect();
                body.push_str(&curves_csv(&curves));
                if !run.trace.is_empty() {
                    traces.push_str(&format!("# family {}\n", s.family.short_name()));
                    traces.push_str(&gaussgrid::adaptive::trace_csv(&run.trace, run.introduced_dims));
                }
                eprintln!(
                    "{}: reference draws {}, resampled {}, max tensor dimension {}",
                    s.family, run.reference_draws, run.reference_resampled, run.max_term_dimension
                );
            }
            let csv = format!("{}\n{CURVE_HEADER}\n{body}", cfg.comment_line());
            emit(output_path(&args, &cfg).as_ref(), &csv)?;
            if let Some(path) = &args.trace {
                emit(Some(path), &format!("{}\n{traces}", cfg.comment_line()))?;
            }
            Ok(())
        }
        BenchCommand::Bnt(args) => {
            let cfg = load(&args, ExperimentKind::Bnt)?;
            let mut csv = cfg.comment_line();
            csv.push('\n');
            let mut header = true;
            for mut s in PdeSettings::from_config(&cfg)? {
                s.a_priori = false;
                s.a_posteriori = true;
                let run = run_pde_bench(&s)?;
                let (grid, values) = run
                    .final_grid
                    .as_ref()
                    .context("the a-posteriori run produced no grid")?;
                let table = bnt_csv(s.family, &bnt_curves(grid, values)?, &run.index_curve);
                let skip = if header { 0 } else { 1 };
                header = false;
                for line in table.lines().skip(skip) {
                    csv.push_str(line);
                    csv.push('\n');
                }
            }
            emit(output_path(&args, &cfg).as_ref(), &csv)
        }
    }
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Bench(cmd) => bench(cmd),
        Command::Field(FieldCommand::Paths {
            kind,
            q,
            sigma,
            truncation,
            paths,
            points,
            seed,
            out,
        }) => {
            let field = match kind.parse::<FieldKindName>()? {
                FieldKindName::Kl => FieldExpansion::karhunen_loeve(q, sigma, truncation),
                FieldKindName::Lc => FieldExpansion::levy_ciesielski(sigma, truncation),
                FieldKindName::Haar => FieldExpansion::haar_chalf(q, 4096, sigma, truncation),
            };
            if points < 2 {
                bail!("need at least two points");
            }
            let csv = format!(
                "# field {} sigma={sigma} truncation={truncation} seed={seed}\n{}",
                field.kind,
                tables::field_paths_csv(&field, paths, points, seed)?
            );
            emit(out.as_ref(), &csv)
        }
        Command::Field(FieldCommand::Kappa {
            p,
            truncation,
            x_min,
            x_max,
            points,
            out,
        }) => {
            if !(0.0 < x_min && x_min < x_max && x_max <= 1.0) || points < 2 {
                bail!("need 0 < x_min < x_max <= 1 and at least two points");
            }
            let table = tables::kappa_table(p, truncation, x_min, x_max, points);
            let csv = format!(
                "# kappa p={p} truncation={truncation} slope={:.6}\n{}",
                tables::log_log_slope(&table),
                tables::kappa_csv(p, truncation, &table)
            );
            emit(out.as_ref(), &csv)
        }
        Command::Nodes(NodesCommand::Dump { family, levels, out }) => {
            let family: NodeFamily = family.parse()?;
            if levels == 0 {
                bail!("levels are 1-based");
            }
            emit(out.as_ref(), &tables::nodes_csv(family, levels - 1)?)
        }
        Command::Profile(ProfileCommand::DeltaNorms { family, k_max, out }) => {
            let family: NodeFamily = family.parse()?;
            emit(out.as_ref(), &tables::delta_norms_csv(family, k_max)?)
        }
    }
}
