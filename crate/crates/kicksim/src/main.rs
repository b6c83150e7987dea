//! kicksim: n-slit which-way interference simulator and verifier.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use kicksim::config::ExperimentConfig;
use kicksim::driver::run_experiment;
use kicksim::error::Error;
use kicksim::kicks::kick_spectrum;
use kicksim::report::{
    to_rounded_json, write_patterns, write_report, write_samples, OutputLock,
};
use kicksim::verify::{run_suite, VerifyOptions};

#[derive(Parser)]
#[command(
    name = "kicksim",
    about = "n-slit which-way interference: entanglement vs momentum kicks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonOpts {
    /// Worker threads (default: all cores; KICKSIM_THREADS as fallback).
    #[arg(long, env = "KICKSIM_THREADS", global = true)]
    threads: Option<usize>,
    /// Emit machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a config file and write artifacts.
    ///
    /// Defaults for every optional config key are listed in the
    /// generated defaults.toml next to the artifacts; see also the
    /// [slits]/[basis]/[propagation]/[montecarlo]/[grid] sections in the
    /// bundled configs (sigma: d/20, profile: gaussian, basis: fourier,
    /// mode: fraunhofer, grid: 4096 points with 4d margin, seed: 0).
    Run {
        /// Experiment config (TOML).
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides output_dir in the config).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Monte Carlo seed override.
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Run a verification suite and print the verdict.
    Verify {
        /// Suite: equivalence, eraser, spectrum, pspace, montecarlo, all.
        suite: String,
        /// Slit width as a fraction of the spacing (default 0.05).
        /// 0.25 is the documented negative control: it violates the
        /// narrowness precondition and trips the overlap guard.
        #[arg(long)]
        sigma_over_d: Option<f64>,
        /// Base seed for the stochastic checks.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Print the kick spectrum p_j = j h / (n d).
    Spectrum {
        /// Number of slits.
        n: usize,
        /// Slit spacing.
        #[arg(long, default_value_t = 1.0)]
        d: f64,
        /// Fold outcomes j > n/2 to j - n (symmetric +-p table).
        #[arg(long)]
        folded: bool,
        #[command(flatten)]
        common: CommonOpts,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::InvalidConfig(_) | Error::InvalidDimension { .. } | Error::OutputLocked(_) => 2,
        Error::GridTooCoarse { .. }
        | Error::GridTooSmall
        | Error::OverlapTooLarge { .. }
        | Error::AliasingDetected { .. }
        | Error::NotFarField { .. }
        | Error::NotUnitary { .. }
        | Error::NotUnbiased { .. }
        | Error::DegenerateMomenta => 3,
        _ => 1,
    }
}

fn configure_threads(threads: Option<usize>) {
    if let Some(t) = threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build_global();
    }
}

fn cmd_run(
    config: &PathBuf,
    out: Option<PathBuf>,
    seed: Option<u64>,
    json: bool,
) -> Result<(), Error> {
    let cfg = ExperimentConfig::from_path(config)?;
    let resolved = cfg.resolve()?;
    let experiment_name = format!("{:?}", cfg.experiment)
        .chars()
        .flat_map(|c| {
            if c.is_uppercase() {
                vec!['_', c.to_ascii_lowercase()]
            } else {
                vec![c]
            }
        })
        .collect::<String>()
        .trim_start_matches('_')
        .to_string();

    // compute everything before touching the filesystem so a failure
    // leaves no partial artifacts
    let output = run_experiment(&resolved, &experiment_name, seed)?;

    let dir = out
        .or(cfg.output_dir)
        .unwrap_or_else(|| PathBuf::from("out"));
    let _lock = OutputLock::acquire(&dir)?;
    write_report(&dir, &output.report)?;
    write_patterns(&dir, &output.unconditioned, &output.conditioned)?;
    if let Some(run) = &output.samples {
        write_samples(&dir, run)?;
    }
    std::fs::write(dir.join("defaults.toml"), ExperimentConfig::defaults_toml())?;

    if json {
        println!("{}", to_rounded_json(&output.report)?);
    } else {
        println!(
            "wrote {}: unconditioned visibility {:.4}, {} conditioned patterns",
            dir.display(),
            output.report.unconditioned.visibility,
            output.conditioned.len()
        );
    }
    Ok(())
}

fn cmd_verify(suite: &str, sigma_over_d: Option<f64>, seed: u64, json: bool) -> Result<bool, Error> {
    let mut opts = VerifyOptions::default();
    if let Some(s) = sigma_over_d {
        opts.sigma_over_d = s;
    }
    opts.seed = seed;
    let verdicts = run_suite(suite, &opts)?;
    let all_pass = verdicts.iter().all(|v| v.pass);
    if json {
        println!("{}", to_rounded_json(&verdicts)?);
    } else {
        for v in &verdicts {
            println!("suite {}: {}", v.suite, if v.pass { "PASS" } else { "FAIL" });
            for c in &v.checks {
                println!(
                    "  [{}] {}: value {:.6e} threshold {:.6e}",
                    if c.pass { "ok" } else { "FAIL" },
                    c.name,
                    c.value,
                    c.threshold
                );
            }
        }
    }
    Ok(all_pass)
}

fn cmd_spectrum(n: usize, d: f64, folded: bool, json: bool) -> Result<(), Error> {
    let spec = kick_spectrum(n, d, folded)?;
    if json {
        println!("{}", to_rounded_json(&spec)?);
    } else {
        println!("kick spectrum: n = {n}, d = {d}, folded = {folded}");
        println!("{:>8} {:>12} {:>16} {:>12}", "outcome", "p / (h/d)", "p (hbar=1)", "prob");
        for k in &spec.kicks {
            println!(
                "{:>8} {:>9}/{:<2} {:>16.9} {:>12.6}",
                k.outcome, k.ratio.0, k.ratio.1, k.momentum, k.probability
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result: Result<u8, Error> = match cli.command {
        Command::Run {
            config,
            out,
            seed,
            common,
        } => {
            configure_threads(common.threads);
            cmd_run(&config, out, seed, common.json).map(|_| 0)
        }
        Command::Verify {
            suite,
            sigma_over_d,
            seed,
            common,
        } => {
            configure_threads(common.threads);
            cmd_verify(&suite, sigma_over_d, seed, common.json)
                .map(|pass| if pass { 0 } else { 4 })
        }
        Command::Spectrum {
            n,
            d,
            folded,
            common,
        } => cmd_spectrum(n, d, folded, common.json).map(|_| 0),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
