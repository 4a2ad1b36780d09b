//! Command-line front end: deploy scenarios, run single trials, and drive
//! the Monte Carlo experiments from a config file plus flag overrides.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use swarmloc_core::harness::{
    self, run_single, sweep_iterations, ExperimentConfig, ReportBundle,
};
use swarmloc_core::scenario::Point;
use swarmloc_core::schedules::variant_table;
use swarmloc_core::{Error, Result};

#[derive(Parser)]
#[command(
    name = "swarmloc",
    version,
    about = "TDOA source localization: swarm-variant benchmark with a linearized baseline"
)]
struct Cli {
    /// Experiment config file (TOML); flags override individual keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List every runnable variant name
    Variants,
    /// Print (or write) the deployed scenario as CSV
    Deploy {
        #[command(flatten)]
        over: Overrides,
    },
    /// Run one verbose trial of a single variant
    Run {
        /// Variant name, e.g. MPSO11
        #[arg(long)]
        variant: String,
        #[command(flatten)]
        over: Overrides,
    },
    /// Monte Carlo over the configured variants with full reports
    Mc {
        #[command(flatten)]
        over: Overrides,
    },
    /// Error-vs-iteration sweep at explicit checkpoints
    Sweep {
        /// Comma-separated iteration checkpoints, e.g. 1,5,10,50,150
        #[arg(long, value_delimiter = ',', required = true)]
        checkpoints: Vec<usize>,
        #[command(flatten)]
        over: Overrides,
    },
    /// Compare the standard swarm, the fast variant, and the baseline solver
    Cdf {
        #[command(flatten)]
        over: Overrides,
    },
}

#[derive(Args)]
struct Overrides {
    /// Master seed for the whole experiment
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated variant names, or "all"
    #[arg(long, value_delimiter = ',')]
    variants: Option<Vec<String>>,
    /// Number of sensing nodes
    #[arg(long)]
    n_sus: Option<usize>,
    /// Reference SNR in dB at the base-station distance
    #[arg(long)]
    snr0_db: Option<f64>,
    /// Attacker position as "x,y" in meters
    #[arg(long, value_parser = parse_point)]
    emitter: Option<Point>,
    /// Disable measurement noise (exact range differences)
    #[arg(long)]
    no_noise: bool,
    /// Report directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Redraw the node layout every trial
    #[arg(long)]
    redeploy_per_trial: bool,
    /// Run trials on one thread (results are identical either way)
    #[arg(long)]
    sequential: bool,
    /// Swarm iteration budget
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    swarm_size: Option<usize>,
    /// Half-width of the square node deployment region, meters
    #[arg(long)]
    half_width_m: Option<f64>,
    /// Distance from base station to the licensed transmitter, meters
    #[arg(long)]
    pu_distance_m: Option<f64>,
}

fn parse_point(s: &str) -> std::result::Result<Point, String> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| format!("expected \"x,y\", got {s:?}"))?;
    let parse = |v: &str| {
        v.trim()
            .parse::<f64>()
            .map_err(|e| format!("bad coordinate {v:?}: {e}"))
    };
    Ok(Point::new(parse(x)?, parse(y)?))
}

impl Overrides {
    fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(trials) = self.trials {
            cfg.trials = trials;
        }
        if let Some(variants) = &self.variants {
            cfg.variants = variants.clone();
        }
        if let Some(n) = self.n_sus {
            cfg.scenario.n_sus = n;
        }
        if let Some(snr) = self.snr0_db {
            cfg.noise.snr0_db = snr;
        }
        if let Some(emitter) = self.emitter {
            cfg.emitter = emitter;
        }
        if self.no_noise {
            cfg.noise.enabled = false;
        }
        if let Some(out) = &self.out {
            cfg.out_dir = Some(out.clone());
        }
        if self.redeploy_per_trial {
            cfg.redeploy_per_trial = true;
        }
        if self.sequential {
            cfg.parallel = false;
        }
        if let Some(t) = self.iterations {
            cfg.pso.max_iterations = t;
        }
        if let Some(k) = self.swarm_size {
            cfg.pso.swarm_size = k;
        }
        if let Some(hw) = self.half_width_m {
            cfg.scenario.half_width_m = hw;
        }
        if let Some(d) = self.pu_distance_m {
            cfg.scenario.pu_distance_m = d;
        }
    }
}

fn load_config(path: Option<&PathBuf>, over: &Overrides) -> Result<ExperimentConfig> {
    let mut cfg = match path {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    over.apply(&mut cfg);
    cfg.validate()?;
    Ok(cfg)
}

fn write_or_print(out: Option<&PathBuf>, name: &str, content: &str) -> Result<()> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| Error::Io {
                path: dir.clone(),
                source: e,
            })?;
            let path = dir.join(name);
            std::fs::write(&path, content).map_err(|e| Error::Io {
                path: path.clone(),
                source: e,
            })?;
            println!("wrote {}", path.display());
            Ok(())
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn print_summary(bundle: &ReportBundle, out: Option<&PathBuf>) {
    for row in &bundle.convergence {
        println!(
            "{}: mean convergence iteration {:.2} over {} trials",
            row.variant, row.mean_convergence_iteration, row.n
        );
    }
    for (name, median) in &bundle.medians_m {
        println!("{name}: median error {median:.2} m");
    }
    if bundle.solver_failures > 0 {
        println!("solver failures: {}", bundle.solver_failures);
    }
    if let Some(dir) = out {
        println!("report written to {}", dir.display());
    }
}

fn real_main(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Variants => {
            for v in variant_table() {
                println!("{}", v.name);
            }
            Ok(())
        }
        Command::Deploy { over } => {
            let cfg = load_config(cli.config.as_ref(), &over)?;
            let scenario = harness::experiment_scenario(&cfg)?;
            write_or_print(cfg.out_dir.as_ref(), "scenario.csv", &scenario.to_csv())
        }
        Command::Run { variant, over } => {
            let cfg = load_config(cli.config.as_ref(), &over)?;
            let run = run_single(&cfg, &variant)?;
            println!(
                "{variant}: {} iterations, final fitness {:.6e}",
                run.trace.entries.len() - 1,
                run.trace.final_fitness()
            );
            println!(
                "estimate ({:.2}, {:.2}), error {:.2} m, converged by iteration {}",
                run.trace.estimate.x, run.trace.estimate.y, run.error_m, run.convergence_iteration
            );
            println!(
                "verdict {} (distance to licensed transmitter {:.1} m)",
                run.decision.verdict, run.decision.distance_to_pu_m
            );
            if let (Some(su), Some(d)) = (run.decision.suspect_su, run.decision.distance_to_suspect_m)
            {
                println!("nearest node: SU {su} at {d:.1} m");
            }
            if let Some(dir) = &cfg.out_dir {
                std::fs::create_dir_all(dir).map_err(|e| Error::Io {
                    path: dir.clone(),
                    source: e,
                })?;
                let write = |name: &str, content: &str| -> Result<()> {
                    let path = dir.join(name);
                    std::fs::write(&path, content).map_err(|e| Error::Io {
                        path: path.clone(),
                        source: e,
                    })
                };
                write("trace.csv", &run.trace.to_csv())?;
                write("scenario.csv", &run.scenario.to_csv())?;
                write("measurements.csv", &run.measurements.to_csv())?;
                println!("trace written to {}", dir.display());
            }
            Ok(())
        }
        Command::Mc { over } => {
            let cfg = load_config(cli.config.as_ref(), &over)?;
            let bundle = harness::run_experiment(&cfg)?;
            print_summary(&bundle, cfg.out_dir.as_ref());
            Ok(())
        }
        Command::Sweep { checkpoints, over } => {
            let cfg = load_config(cli.config.as_ref(), &over)?;
            let bundle = sweep_iterations(&cfg, &cfg.variants, &checkpoints)?;
            for row in &bundle.mse_vs_iteration {
                println!(
                    "{} t={}: rms {:.3} m (mse {:.3}, bias2 {:.3}, n={})",
                    row.variant, row.t, row.rms_m, row.mse_m2, row.bias2_m2, row.n
                );
            }
            if let Some(dir) = cfg.out_dir.as_ref() {
                println!("report written to {}", dir.display());
            }
            Ok(())
        }
        Command::Cdf { over } => {
            let cfg = load_config(cli.config.as_ref(), &over)?;
            let bundle = harness::compare_cdf(&cfg)?;
            print_summary(&bundle, cfg.out_dir.as_ref());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match real_main(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
