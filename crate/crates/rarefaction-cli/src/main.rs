use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rarefaction::cli::{self, Config, StateSection};
use rarefaction::Error;

#[derive(Parser)]
#[command(name = "rarefaction", version, about = "Two-dimensional rarefaction waves of isentropic Euler: batch driver")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// TOML config file; every key is optional.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (beats OUTPUT_DIR and the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to the available cores. Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Perturbation seed, overriding the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact 1D Riemann solution.
    Solve1d {
        /// Left state as RHO,V1[,V2].
        #[arg(long, value_parser = parse_state)]
        left: Option<StateSection>,
        /// Right state as RHO,V1[,V2].
        #[arg(long, value_parser = parse_state)]
        right: Option<StateSection>,
        /// Also write the sampled profile at this time.
        #[arg(long)]
        profile_t: Option<f64>,
    },
    /// Finite-volume run with slices, fronts, summary and entropy report.
    Simulate2d,
    /// Taylor data on the initial slice and the ansatz report.
    BuildData,
    /// Characteristic front surfaces in acoustical coordinates.
    TraceFronts,
    /// Relative-entropy comparison of a run with a reference.
    VerifyEntropy {
        /// Directory of a completed run; its config echo is replayed.
        #[arg(long, conflicts_with = "config")]
        run: Option<PathBuf>,
    },
}

fn parse_state(s: &str) -> Result<StateSection, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match v[..] {
        [rho, v1] => Ok(StateSection { rho, v1, v2: 0.0 }),
        [rho, v1, v2] => Ok(StateSection { rho, v1, v2 }),
        _ => Err("expected RHO,V1 or RHO,V1,V2".into()),
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn load(path: Option<&Path>) -> rarefaction::Result<Config> {
    match path {
        Some(p) => cli::load_config(p),
        None => Ok(Config::default()),
    }
}

fn print_json<T: serde::Serialize>(v: &T) -> rarefaction::Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{}", serde_json::to_string_pretty(v)?) {
        // a closed pipe (e.g. `| head`) is not an error
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn execute(args: Cli) -> rarefaction::Result<bool> {
    let g = &args.global;
    if let Some(n) = g.threads {
        if n == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Invalid(e.to_string()))?;
    }
    let mut cfg = match &args.command {
        Command::VerifyEntropy { run: Some(dir) } => cli::load_config(&dir.join("config.toml"))?,
        _ => load(g.config.as_deref())?,
    };
    if let Some(s) = g.seed {
        cfg.perturbation.seed = s;
    }
    let out = cli::output_dir(g.out.as_deref(), &cfg);
    match args.command {
        Command::Solve1d { left, right, profile_t } => {
            match (left, right) {
                (Some(l), Some(r)) => {
                    cfg.left = l;
                    cfg.right = r;
                }
                (None, None) if g.config.is_some() => {}
                _ => return Err(usage("solve1d needs --config or both --left and --right")),
            }
            if profile_t.is_some() {
                cfg.output.profile_t = profile_t;
            }
            print_json(&cli::run_solve1d(&cfg, &out)?)?;
            Ok(true)
        }
        Command::Simulate2d => {
            let s = cli::run_simulate2d(&cfg, &out)?;
            print_json(&s)?;
            if let Some(f) = &s.failure {
                eprintln!("error: run aborted at t = {}: {f}", s.failure_time.unwrap_or(0.0));
                return Ok(false);
            }
            Ok(true)
        }
        Command::BuildData => {
            let rep = cli::run_build_data(&cfg, &out)?;
            print_json(&rep)?;
            Ok(true)
        }
        Command::TraceFronts => {
            print_json(&cli::run_trace_fronts(&cfg, &out)?)?;
            Ok(true)
        }
        Command::VerifyEntropy { .. } => {
            print_json(&cli::run_verify_entropy(&cfg, &out)?)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let args = Cli::parse();
    match execute(args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}
