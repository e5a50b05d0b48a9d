use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use weighted_sums::harness::check::run_check;
use weighted_sums::harness::config::{ExperimentConfig, ExperimentKind};
use weighted_sums::harness::report::{read_points, write_check_csv, write_fit_csv, write_json, write_sweep_csv};
use weighted_sums::harness::sweeps::{run_config, SweepResult};
use weighted_sums::harness::fit_rate;
use weighted_sums::Error;

#[derive(Parser)]
#[command(name = "wsum", version, about = "Exact weighted lattice sums, approximants and bound factors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Experiment config (JSON); flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Comma-separated, strictly increasing.
    #[arg(long, global = true, value_delimiter = ',')]
    n_grid: Option<Vec<u64>>,
    #[arg(long, global = true)]
    tail_tol: Option<f64>,
    /// Write JSON instead of CSV.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// The two-block worked example: prerequisites, distances, bound factors.
    Example,
    /// Markov binomial sums against signed compound-Poisson measures.
    Markov,
    /// Iid sums against moment-matched negative binomials.
    Nb,
    /// Seeded inequality suite; exit code 2 on any failure.
    Check {
        /// Instances per check.
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
    /// Poisson(n) plus Bernoulli(1/3) against Poisson(n) plus Bernoulli(1/4).
    DemoIntro,
    /// Log-log rate fit of a CSV column against its `n` column.
    Fit {
        input: PathBuf,
        #[arg(long, default_value = "distance")]
        column: String,
    },
}

fn config_for(common: &Common, kinds: &[ExperimentKind], default: ExperimentConfig) -> anyhow::Result<ExperimentConfig> {
    let mut config = match &common.config {
        Some(path) => ExperimentConfig::load(path).with_context(|| format!("loading {}", path.display()))?,
        None => default,
    };
    if !kinds.contains(&config.kind) {
        bail!("config kind {:?} does not fit this subcommand", config.kind);
    }
    if let Some(grid) = &common.n_grid {
        config.n_grid = grid.clone();
    }
    if let Some(tol) = common.tail_tol {
        config.tail_tol = tol;
    }
    if let Some(seed) = common.seed {
        config.seed = Some(seed);
    }
    if common.out.is_some() {
        config.output = common.out.clone();
    }
    config.validate()?;
    Ok(config)
}

fn sink(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit_sweep(result: &SweepResult, path: Option<&Path>, json: bool) -> anyhow::Result<()> {
    let mut out = sink(path)?;
    if json {
        write_json(result, &mut out)?;
    } else {
        write_sweep_csv(result, &mut out)?;
    }
    out.flush()?;
    if let Some(p) = &result.prerequisites {
        eprintln!(
            "prerequisites: beta4+ = {}, u = {}, franken = {}, verified = {}",
            p.beta4_plus, p.u, p.franken, p.verified
        );
    }
    if let Some(fit) = &result.distance_fit {
        eprintln!("distance slope {:.4} (rms residual {:.2e})", fit.slope, fit.residual);
    }
    if let Some(spread) = result.ratio_spread {
        eprintln!("distance / factor spread {spread:.4}");
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let common = &cli.common;
    use ExperimentKind as K;
    let (kinds, default): (&[K], ExperimentConfig) = match &cli.command {
        Command::Example => (&[K::Example, K::IidSweep], ExperimentConfig::example()),
        Command::Markov => (&[K::MarkovSweep], ExperimentConfig::markov_default()),
        Command::Nb => (&[K::NbSweep], ExperimentConfig::nb_default()),
        Command::DemoIntro => {
            let mut c = ExperimentConfig::example();
            c.kind = K::DemoIntro;
            c.blocks.clear();
            c.n_grid = vec![4, 16, 64, 256, 1024];
            (&[K::DemoIntro], c)
        }
        Command::Check { count } => {
            let mut config = config_for(common, &[K::Check], ExperimentConfig::check_default(1, *count))?;
            if config.count.is_none() || common.config.is_none() {
                config.count = Some(*count);
            }
            let report = run_check(config.seed.unwrap_or(1), config.count.unwrap_or(*count));
            let mut out = sink(config.output.as_deref())?;
            if common.json {
                write_json(&report, &mut out)?;
            } else {
                write_check_csv(&report, &mut out)?;
            }
            out.flush()?;
            for f in &report.failures {
                if report.summary(&f.check).is_some_and(|s| s.gating) {
                    eprintln!("FAILED {} #{}: {}", f.check, f.instance, serde_json::to_string(f)?);
                }
            }
            return Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(2) });
        }
        Command::Fit { input, column } => {
            let file = File::open(input).with_context(|| format!("opening {}", input.display()))?;
            let fit = fit_rate(&read_points(file, column)?)?;
            let mut out = sink(common.out.as_deref())?;
            if common.json {
                write_json(&fit, &mut out)?;
            } else {
                write_fit_csv(&fit, &mut out)?;
            }
            out.flush()?;
            return Ok(ExitCode::SUCCESS);
        }
    };
    let config = config_for(common, kinds, default)?;
    let result = run_config(&config)?;
    emit_sweep(&result, config.output.as_deref(), common.json)?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let guard = e.chain().any(|c| matches!(c.downcast_ref::<Error>(), Some(Error::ResourceLimit { .. })));
            ExitCode::from(if guard { 3 } else { 1 })
        }
    }
}
