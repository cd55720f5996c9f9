mod params;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use rician_shadowed::channel::{gram, max_eigenvalue, ChannelSampler};
use rician_shadowed::monte_carlo::sample_chunked;
use rician_shadowed::stats::MaxEigDistribution;
use rician_shadowed::verify::{self, Suite};

use params::ParamArgs;

#[derive(Debug, Parser)]
#[command(name = "rsm", version, about = "MIMO Rician shadowed fading: curves, sampling and self-checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, clap::Args)]
struct GridArgs {
    #[arg(long = "x-min", default_value_t = 0.0)]
    x_min: f64,
    #[arg(long = "x-max", default_value_t = 180.0)]
    x_max: f64,
    #[arg(long, default_value_t = 200)]
    points: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Analytic CDF of the largest eigenvalue on a uniform grid
    Cdf {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        output: PathBuf,
    },
    /// Analytic PDF of the largest eigenvalue on a uniform grid
    Pdf {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        output: PathBuf,
    },
    /// Monte-Carlo draws of the largest eigenvalue
    Sample {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 100_000)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Run a self-check suite and print name,metric,threshold,pass lines
    Verify {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum SuiteArg {
    SpecialFunctions,
    Reductions,
    Figures,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::SpecialFunctions => Suite::SpecialFunctions,
            SuiteArg::Reductions => Suite::Reductions,
            SuiteArg::Figures => Suite::Figures,
        }
    }
}

enum Failure {
    /// Bad parameters, bad grid or unusable paths.
    Invalid(anyhow::Error),
    Numerical(anyhow::Error),
    Verification,
}

impl From<rician_shadowed::Error> for Failure {
    fn from(e: rician_shadowed::Error) -> Self {
        use rician_shadowed::Error as E;
        match e {
            E::Domain(_) | E::InvalidParameter(_) => Failure::Invalid(e.into()),
            _ => Failure::Numerical(e.into()),
        }
    }
}

fn invalid(e: anyhow::Error) -> Failure {
    Failure::Invalid(e)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Invalid(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(e)) => {
            eprintln!("numerical error: {e:#}");
            ExitCode::from(3)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Cdf { params, grid, output } => curve(&params, &grid, &output, "cdf"),
        Command::Pdf { params, grid, output } => curve(&params, &grid, &output, "pdf"),
        Command::Sample {
            params,
            count,
            seed,
            output,
        } => sample(&params, count, seed, &output),
        Command::Verify { suite, seed } => run_verify(suite.into(), seed),
    }
}

fn grid_points(grid: &GridArgs) -> anyhow::Result<Vec<f64>> {
    if !(grid.x_min.is_finite() && grid.x_max.is_finite() && grid.x_min >= 0.0 && grid.x_min < grid.x_max) {
        return Err(anyhow!("grid needs 0 ≤ x-min < x-max, got [{}, {}]", grid.x_min, grid.x_max));
    }
    if grid.points < 2 {
        return Err(anyhow!("grid needs at least 2 points, got {}", grid.points));
    }
    let step = (grid.x_max - grid.x_min) / (grid.points - 1) as f64;
    Ok((0..grid.points)
        .map(|k| if k + 1 == grid.points { grid.x_max } else { grid.x_min + step * k as f64 })
        .collect())
}

fn csv_writer(path: &Path) -> anyhow::Result<csv::Writer<std::fs::File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    csv::Writer::from_path(path).with_context(|| format!("opening {}", path.display()))
}

fn float(v: f64) -> String {
    format!("{v:.16e}")
}

fn curve(args: &ParamArgs, grid: &GridArgs, output: &Path, what: &str) -> Result<(), Failure> {
    let resolved = args.resolve().map_err(invalid)?;
    let xs = grid_points(grid).map_err(invalid)?;
    println!(
        "resolved: {resolved} --x-min {} --x-max {} --points {}",
        grid.x_min, grid.x_max, grid.points
    );
    let dist = MaxEigDistribution::new(&resolved.params()?)?;
    let mut rows = Vec::with_capacity(xs.len());
    for &x in &xs {
        let v = if what == "cdf" { dist.cdf(x)? } else { dist.pdf(x)? };
        rows.push([float(x), float(v)]);
    }
    let mut w = csv_writer(output).map_err(invalid)?;
    let io = |e: csv::Error| invalid(anyhow!(e).context(format!("writing {}", output.display())));
    w.write_record(["x", what]).map_err(io)?;
    for r in &rows {
        w.write_record(r).map_err(io)?;
    }
    w.flush().map_err(|e| invalid(e.into()))?;
    Ok(())
}

fn sample(args: &ParamArgs, count: usize, seed: u64, output: &Path) -> Result<(), Failure> {
    let resolved = args.resolve().map_err(invalid)?;
    if count == 0 {
        return Err(invalid(anyhow!("count must be ≥ 1")));
    }
    println!("resolved: {resolved} --count {count} --seed {seed}");
    let sampler = ChannelSampler::new(&resolved.params()?.to_model()?)?;
    let draws = sample_chunked(count, seed, |rng| max_eigenvalue(&gram(&sampler.channel(rng))));
    let mut w = csv_writer(output).map_err(invalid)?;
    let io = |e: csv::Error| invalid(anyhow!(e).context(format!("writing {}", output.display())));
    w.write_record(["max_eigenvalue"]).map_err(io)?;
    for d in draws {
        w.write_record([float(d?)]).map_err(io)?;
    }
    w.flush().map_err(|e| invalid(e.into()))?;
    Ok(())
}

fn run_verify(suite: Suite, seed: u64) -> Result<(), Failure> {
    println!("resolved: --suite {} --seed {seed}", suite.name());
    let checks = verify::run(suite, seed)?;
    println!("name,metric,threshold,pass");
    for c in &checks {
        println!("{c}");
    }
    if checks.iter().all(|c| c.pass) {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}
