//! `beamsnr`: Monte Carlo experiments for the blind beamspace estimators.
//!
//! Subcommands:
//! - `sweep`: estimator bias versus SNR; writes CSV tables, SVG charts and a manifest
//! - `unbiasedness`: mean risk estimate against measured MSE for a fixed channel
//! - `bench`: runtime scaling of the estimation pipeline with array size
//! - `calibrate-gamma`: picks the gap threshold with the smallest noise power bias
//!
//! Settings come from defaults, then `--config <file.json>`, then flags.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use beamsnr::harness::checks::default_gamma_grid;
use beamsnr::harness::{self, ExperimentConfig, Manifest};
use beamsnr::Denoiser;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "beamsnr", version, about = "Blind SNR and MSE estimation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct ConfigArgs {
    /// JSON config file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Antenna count
    #[arg(long = "m")]
    antennas: Option<usize>,
    /// Propagation paths per channel
    #[arg(long = "l")]
    paths: Option<usize>,
    /// True noise power (linear)
    #[arg(long)]
    n0: Option<f64>,
    /// SNR grid in dB: comma list ("-3,3,10") or range ("-10:2:20")
    #[arg(long, allow_hyphen_values = true)]
    snr_grid_db: Option<String>,
    /// Monte Carlo trials per grid point
    #[arg(long)]
    trials: Option<usize>,
    /// Gap threshold of the noise floor search
    #[arg(long)]
    gamma: Option<f64>,
    /// Soft threshold of the denoiser
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    outputs: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Estimator means and spreads over an SNR grid
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
        /// Worker threads (results do not depend on it)
        #[arg(long)]
        workers: Option<usize>,
        /// Also write every trial to trials.csv
        #[arg(long)]
        dump_trials: bool,
    },
    /// Check that the known-noise risk estimate is unbiased
    Unbiasedness {
        #[command(flatten)]
        config: ConfigArgs,
        /// SNR points in dB
        #[arg(long, default_value = "-3,3,10", allow_hyphen_values = true)]
        snr_db: String,
        #[arg(long, value_enum, default_value_t = DenoiserArg::Soft)]
        denoiser: DenoiserArg,
    },
    /// Runtime of the estimation pipeline versus array size
    Bench {
        #[command(flatten)]
        config: ConfigArgs,
        /// Array sizes, increasing
        #[arg(long, default_value = "64,128,256,512,1024")]
        m_list: String,
    },
    /// Choose the gap threshold minimizing the mean noise power bias
    CalibrateGamma {
        #[command(flatten)]
        config: ConfigArgs,
        /// Candidate thresholds (default 0.25:0.25:8)
        #[arg(long)]
        gammas: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DenoiserArg {
    Soft,
    Identity,
    Zero,
}

/// Parses `"a,b,c"` or `"start:step:stop"` (inclusive, with a small tolerance on
/// the end point).
fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    if text.contains(':') {
        let parts: Vec<f64> = text
            .split(':')
            .map(|p| p.trim().parse::<f64>().with_context(|| format!("bad number {p:?} in {text:?}")))
            .collect::<Result<_>>()?;
        let [start, step, stop] = parts[..] else { bail!("range must be start:step:stop, got {text:?}") };
        if step.is_nan() || step <= 0.0 || stop < start {
            bail!("range {text:?} must have a positive step and stop >= start");
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        return Ok((0..count).map(|i| ((start + step * i as f64) * 1e9).round() / 1e9).collect());
    }
    text.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse::<f64>().with_context(|| format!("bad number {p:?} in {text:?}")))
        .collect()
}

impl ConfigArgs {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::from_json_file(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(v) = self.antennas {
            c.antennas = v;
        }
        if let Some(v) = self.paths {
            c.paths = v;
        }
        if let Some(v) = self.n0 {
            c.n0 = v;
        }
        if let Some(v) = &self.snr_grid_db {
            c.snr_grid_db = parse_grid(v)?;
        }
        if let Some(v) = self.trials {
            c.trials = v;
        }
        if let Some(v) = self.gamma {
            c.gamma = v;
        }
        if let Some(v) = self.lambda {
            c.lambda = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = &self.outputs {
            c.outputs = v.clone();
        }
        c.validate()?;
        Ok(c)
    }
}

fn write_report<T: serde::Serialize>(config: &ExperimentConfig, command: &str, name: &str, report: &T) -> Result<()> {
    let dir = &config.outputs;
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(report)? + "\n")
        .with_context(|| format!("writing {}", path.display()))?;
    Manifest::new(command, config, std::slice::from_ref(&path)).write(dir, &format!("{command}.manifest.json"))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Sweep { config, workers, dump_trials } => {
            let config = config.resolve()?;
            let files = harness::sweep_to_dir(&config, workers, dump_trials)?;
            for f in files {
                println!("wrote {}", f.display());
            }
            Ok(true)
        }
        Command::Unbiasedness { config, snr_db, denoiser } => {
            let config = config.resolve()?;
            let denoiser = match denoiser {
                DenoiserArg::Soft => Denoiser::soft_threshold(config.lambda)?,
                DenoiserArg::Identity => Denoiser::identity(),
                DenoiserArg::Zero => Denoiser::zero(),
            };
            let report = harness::run_unbiasedness_check(&config, &parse_grid(&snr_db)?, &denoiser)?;
            println!("{:>8} {:>12} {:>12} {:>10}  verdict", "snr_db", "mean_sure", "mean_mse", "gap");
            for p in &report.points {
                println!(
                    "{:>8} {:>12.6} {:>12.6} {:>9.3}%  {}",
                    p.snr_db,
                    p.mean_sure,
                    p.mean_mse,
                    100.0 * p.relative_gap,
                    verdict(p.pass)
                );
            }
            write_report(&config, "unbiasedness", "unbiasedness.json", &report)?;
            println!("{} (tolerance {}%)", verdict(report.pass), 100.0 * report.tolerance);
            Ok(report.pass)
        }
        Command::Bench { config, m_list } => {
            let config = config.resolve()?;
            let sizes: Vec<usize> = m_list
                .split(',')
                .map(|s| s.trim().parse().with_context(|| format!("bad size {s:?}")))
                .collect::<Result<_>>()?;
            let report = harness::run_scaling_bench(&sizes, config.gamma, config.seed)?;
            for p in &report.points {
                println!(
                    "M = {:>6}: {:>10.3} us/run, oracle deviation {:.2e}",
                    p.antennas,
                    p.seconds_per_run * 1e6,
                    p.oracle_deviation
                );
            }
            if let (Some(r), Some(e)) = (report.mean_ratio, report.fitted_exponent) {
                println!("mean doubling ratio {r:.3}, fitted exponent {e:.3}");
            }
            write_report(&config, "bench", "bench.json", &report)?;
            println!("{}", verdict(report.pass));
            Ok(report.pass)
        }
        Command::CalibrateGamma { config, gammas } => {
            let config = config.resolve()?;
            let gammas = match gammas {
                Some(g) => parse_grid(&g)?,
                None => default_gamma_grid(),
            };
            let report = harness::calibrate_gamma(&config, &gammas)?;
            for row in &report.rows {
                println!("gamma {:>6.3}: mean |bias| {:.5}", row.gamma, row.objective);
            }
            write_report(&config, "calibrate-gamma", "calibrate_gamma.json", &report)?;
            println!("best gamma {}", report.best_gamma);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
