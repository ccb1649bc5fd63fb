mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "laminatron", version, about = "Curve sequences, intersection estimates and limit-set traces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration; the pentagon defaults are used when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides the configuration).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Largest sequence index (overrides the configuration).
    #[arg(long, global = true)]
    max_index: Option<usize>,
    /// Round probe curves, e.g. `1-2,2-3,1-3`.
    #[arg(long, global = true, value_delimiter = ',')]
    probes: Option<Vec<String>>,
    /// Trace with the products `A(0,k)` in place of intersection numbers.
    #[arg(long, global = true)]
    synthetic: bool,
    /// Profile sample times `t1,t2,...`.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    times: Option<Vec<f64>>,
    /// Profile sample grid `start:stop:step`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    grid: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
enum Command {
    /// Write the default configuration as JSON to stdout.
    DefaultConfig,
    /// Generate the curve prefix and its intersection table.
    Generate,
    /// Check the local intersection and twist conditions.
    Verify,
    /// Build the constant ledger and check the intersection sandwich.
    Estimates,
    /// Normalised vectors, Cauchy decay and ratio diagnostics.
    Measures,
    /// Active intervals, their ordering and optional profiles.
    Timeline,
    /// Barycentric trace of the length vectors.
    Trace,
    /// Every stage in order.
    All,
}

fn configure(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(o) = &cli.out {
        cfg.out = o.display().to_string();
    }
    if let Some(n) = cli.max_index {
        cfg.max_index = n;
    }
    if let Some(p) = &cli.probes {
        cfg.probes = Some(p.clone());
    }
    cfg.synthetic |= cli.synthetic;
    Ok(cfg)
}

fn sample_times(cli: &Cli) -> Result<Option<Vec<f64>>> {
    if let Some(t) = &cli.times {
        return Ok(Some(t.clone()));
    }
    let Some(g) = &cli.grid else { return Ok(None) };
    let parts: Vec<f64> = g
        .split(':')
        .map(|x| x.trim().parse::<f64>().with_context(|| format!("bad grid value {x:?}")))
        .collect::<Result<_>>()?;
    let [start, stop, step] = parts[..] else { anyhow::bail!("grid must be start:stop:step") };
    if !(step > 0.0) || stop < start {
        anyhow::bail!("grid needs step > 0 and stop >= start");
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok(Some((0..=n).map(|i| start + step * i as f64).collect()))
}

fn threads() -> Result<()> {
    if let Ok(v) = std::env::var("LAMINATRON_THREADS") {
        let n: usize = v.parse().with_context(|| format!("LAMINATRON_THREADS must be a count, got {v:?}"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the thread pool")?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<bool> {
    threads()?;
    if cli.command == Command::DefaultConfig {
        println!("{}", serde_json::to_string_pretty(&RunConfig::default())?);
        return Ok(true);
    }
    let cfg = configure(cli)?;
    let times = sample_times(cli)?;
    let mut ctx = commands::Context::new(cfg)?;
    let ok = match cli.command {
        Command::DefaultConfig => unreachable!(),
        Command::Generate => ctx.generate()?,
        Command::Verify => ctx.verify()?,
        Command::Estimates => ctx.estimates()?,
        Command::Measures => ctx.measures()?,
        Command::Timeline => ctx.timeline(times.as_deref())?,
        Command::Trace => ctx.trace()?,
        Command::All => ctx.all(times.as_deref())?,
    };
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("one or more checks failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
