use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use reflectsim::experiments::{self, io, ExperimentConfig, VStudyConfig};
use reflectsim::moments::MomentTable;
use reflectsim::rectify::{mean_shift, rectify_samples};
use reflectsim::stats::{
    default_grid, kde_gaussian, linear_grid, mc_summary, quantile_grid, silverman_bandwidth,
    DEFAULT_GRID_POINTS,
};
use reflectsim::streams::{stream, Purpose};
use reflectsim::{LevyModel, ReflectionSummary, VSamplerSpec};

#[derive(Parser)]
#[command(name = "reflectsim", version, about = "Reflected Lévy process discretization error toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a coupled coarse/fine error study; writes records.csv, outcomes.csv and report.json.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rectify coarse outcomes from an outcomes CSV.
    Rectify {
        /// Experiment config supplying the model, V sampler, policy and seed.
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        outcomes: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Clip rectified values to [0, 1].
        #[arg(long)]
        clamp: bool,
        /// Pass values sitting on a barrier through unchanged.
        #[arg(long)]
        skip_boundary: bool,
    },
    /// Draw samples of V, one per line.
    VSample(VSampleArgs),
    /// Gaussian KDE of a sample file, written as v,density rows.
    VDensity {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        bandwidth: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
        grid_points: usize,
        /// Restrict the grid to the [lo, hi] sample quantiles, e.g. 0.01,0.99.
        #[arg(long, value_delimiter = ',')]
        quantiles: Option<Vec<f64>>,
        /// Explicit grid bounds lo,hi.
        #[arg(long, value_delimiter = ',', conflicts_with = "quantiles")]
        range: Option<Vec<f64>>,
    },
    /// Closed-form moments of V; with --resolution also the error scale and mean shift.
    Moments {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        beta: f64,
        /// Also report E V_n.
        #[arg(long)]
        n: Option<usize>,
        /// Brownian variance (alpha = 2).
        #[arg(long, conflicts_with = "scale")]
        sigma2: Option<f64>,
        /// Stable scale (alpha < 2).
        #[arg(long)]
        scale: Option<f64>,
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// E V_n against E V for a range of n, as CSV.
    Convergence {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        beta: f64,
        #[arg(long, value_delimiter = ',', default_value = "1,10,100,1000,10000,100000,1000000")]
        ns: Vec<usize>,
    },
    /// Monte Carlo study of V over (alpha, beta) cells.
    VStudy {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
    },
}

#[derive(Args)]
struct VSampleArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    beta: f64,
    #[arg(long, default_value_t = 100)]
    m: usize,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long)]
    reps: usize,
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Bessel points per side when alpha = 2.
    #[arg(long, default_value_t = 150)]
    k: usize,
    /// Treat (alpha, beta) as a one-sided stable limit and sample |X_Υ|.
    #[arg(long)]
    monotone: bool,
    /// Write samples here instead of stdout and print a summary.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn v_sample(args: &VSampleArgs) -> Result<()> {
    let spec = if args.monotone {
        VSamplerSpec::Monotone {
            model_hat: LevyModel::StrictlyStable { alpha: args.alpha, beta: args.beta, scale: args.scale },
        }
    } else if args.alpha == 2.0 {
        VSamplerSpec::BesselBrownian { k: args.k }
    } else {
        VSamplerSpec::StableNested {
            alpha: args.alpha,
            beta: args.beta,
            scale: args.scale,
            m: args.m,
            n: args.n,
        }
    };
    let sampler = spec.build()?;
    let mut samples = Vec::with_capacity(args.reps);
    for j in 0..args.reps as u64 {
        samples.push(sampler.sample(&mut stream(args.seed, j, Purpose::VDraw)));
    }
    // the Bessel construction is for unit Brownian motion; apply the scale afterwards
    if matches!(spec, VSamplerSpec::BesselBrownian { .. }) && args.scale != 1.0 {
        samples.iter_mut().for_each(|v| *v *= args.scale);
    }
    match &args.out {
        Some(path) => {
            io::write_samples(path, &samples)?;
            println!("{}", serde_json::to_string_pretty(&mc_summary(&samples)?)?);
        }
        None => {
            for v in &samples {
                println!("{v}");
            }
        }
    }
    Ok(())
}

fn moments(
    alpha: f64,
    beta: f64,
    n: Option<usize>,
    sigma2: Option<f64>,
    scale: Option<f64>,
    resolution: Option<usize>,
) -> Result<serde_json::Value> {
    let table = MomentTable::new(alpha, beta, n)?;
    let mut out = serde_json::to_value(&table)?;
    if let Some(res) = resolution {
        let model = if alpha == 2.0 {
            if scale.is_some() {
                bail!("use --sigma2 for alpha = 2");
            }
            LevyModel::brownian(0.0, sigma2.unwrap_or(1.0))?
        } else {
            if sigma2.is_some() {
                bail!("--sigma2 only applies to alpha = 2");
            }
            LevyModel::stable(alpha, beta, scale.unwrap_or(1.0))?
        };
        let obj = out.as_object_mut().expect("table is an object");
        obj.insert("resolution".into(), json!(res));
        obj.insert("scaling".into(), json!(model.scaling(1.0 / res as f64)?));
        obj.insert("shift".into(), json!(mean_shift(&model, res)?));
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { config, seed, workers, out } => {
            let mut config = ExperimentConfig::load(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            if let Some(seed) = seed {
                config.seed = seed;
            }
            if let Some(workers) = workers {
                config.workers = workers;
            }
            let report = experiments::run_error_experiment(&config)?;
            io::write_experiment(&out, &report)?;
            let a = &report.aggregates;
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "replications": report.records.len(),
                    "fine_lower_last": a.fine_split.lower_last,
                    "coarse_lower_last": a.coarse_split.lower_last,
                    "ks_raw": a.fit.ks_raw,
                    "ks_rectified": a.fit.ks_rectified,
                    "config_hash": report.provenance.config_hash,
                }))?
            );
        }
        Command::Rectify { config, outcomes, out, seed, clamp, skip_boundary } => {
            let mut config = ExperimentConfig::load(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            if let Some(seed) = seed {
                config.seed = seed;
            }
            config.policy.clamp_to_unit |= clamp;
            config.policy.skip_boundary_samples |= skip_boundary;
            let rows = io::read_outcomes(&outcomes)
                .with_context(|| format!("reading {}", outcomes.display()))?;
            let Some(first) = rows.first() else {
                bail!("{} has no outcomes", outcomes.display());
            };
            let summaries: Vec<ReflectionSummary> = rows.iter().map(|r| r.summary()).collect();
            let rectified = rectify_samples(
                &summaries,
                &config.model,
                first.n,
                &config.sampler(),
                config.policy,
                config.seed,
                first.replication,
            )?;
            io::write_rectified(&out, &rows, &rectified)?;
            println!(
                "{}",
                json!({ "count": rows.len(), "out_of_range": rectified.out_of_range })
            );
        }
        Command::VSample(args) => v_sample(&args)?,
        Command::VDensity { input, out, bandwidth, grid_points, quantiles, range } => {
            let samples = io::read_samples(&input)?;
            let h = match bandwidth {
                Some(h) => h,
                None => silverman_bandwidth(&samples)?,
            };
            for pair in [&quantiles, &range].into_iter().flatten() {
                if pair.len() != 2 {
                    bail!("expected lo,hi but got {} values", pair.len());
                }
            }
            let grid = match (quantiles, range) {
                (Some(q), _) => quantile_grid(&samples, q[0], q[1], grid_points)?,
                (_, Some(r)) => linear_grid(r[0], r[1], grid_points),
                _ => default_grid(&samples, h, grid_points),
            };
            let density = kde_gaussian(&samples, Some(h), Some(grid))?;
            io::write_density(&out, &density)?;
        }
        Command::Moments { alpha, beta, n, sigma2, scale, resolution } => {
            let value = moments(alpha, beta, n, sigma2, scale, resolution)?;
            println!("{}", serde_json::to_string_pretty(&value)?);
        }
        Command::Convergence { alpha, beta, ns } => {
            println!("n,expected_vn,gap,relative_gap");
            for row in experiments::convergence_table(alpha, beta, &ns)? {
                println!("{},{},{},{}", row.n, row.expected_vn, row.gap, row.relative_gap);
            }
        }
        Command::VStudy { config, out, seed, workers } => {
            let mut config = VStudyConfig::load(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            if let Some(seed) = seed {
                config.seed = seed;
            }
            if let Some(workers) = workers {
                config.workers = workers;
            }
            let report = experiments::run_v_study(&config)?;
            io::write_v_study(&out, &report)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
