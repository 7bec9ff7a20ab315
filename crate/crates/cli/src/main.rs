//! `sievelab`: identity suites, norm computations, scans with exponent fits,
//! sieve and BDH experiments. Exit status 0 on success, 1 when a check fails
//! or an experiment reports a violation, 2 on bad usage.

mod commands;
mod config;
mod record;
mod verify;

use clap::{Parser, Subcommand, ValueEnum};
use config::{usage, Config, UsageError};
use record::Format;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "sievelab", version, about = "Large sieve norms for Dirichlet characters twisted by rationals")]
struct Cli {
    /// key=value configuration file; repeated keys form lists
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// tolerance for identity checks, or the power-iteration residual target
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// output file (default stdout)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// worker threads (falls back to SIEVELAB_THREADS)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(clap::Args)]
struct Assignments {
    /// KEY=VALUE parameters, overriding the config file (e.g. Q=4 N=64,128)
    params: Vec<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the identity suites (keys: suite, tables)
    Verify(Assignments),
    /// Compute norms on a parameter grid (keys: Q k T N family parity signed route dump dump_csv)
    Norm(Assignments),
    /// Sweep a grid and fit exponents along N and Q (keys as norm, plus plot_dir)
    Scan(Assignments),
    /// Sieve inequality experiments (keys: plan Q random max_N max_Q half_residue)
    Sieve(Assignments),
    /// BDH variance against its character expansion (keys: X Q inputs)
    Bdh(Assignments),
}

const GLOBAL_KEYS: &[&str] = &["seed", "tol", "out", "format", "threads"];

fn run(cli: Cli) -> Result<i32, UsageError> {
    let mut cfg = match &cli.config {
        Some(p) => Config::parse(&std::fs::read_to_string(p).map_err(|e| UsageError(format!("{}: {e}", p.display())))?)?,
        None => Config::default(),
    };
    let (name, assignments) = match &cli.cmd {
        Cmd::Verify(a) => ("verify", a),
        Cmd::Norm(a) => ("norm", a),
        Cmd::Scan(a) => ("scan", a),
        Cmd::Sieve(a) => ("sieve", a),
        Cmd::Bdh(a) => ("bdh", a),
    };
    cfg.override_with(&assignments.params)?;

    let seed = match cli.seed {
        Some(s) => s,
        None => cfg.one("seed", sievelab::norms::DEFAULT_SEED)?,
    };
    let tol = match cli.tol {
        Some(t) => Some(t),
        None => cfg.get("tol").map(|_| cfg.one::<f64>("tol", 0.0)).transpose()?,
    };
    if tol.is_some_and(|t| !(t >= 0.0)) {
        return usage("tol must be nonnegative");
    }
    let format = match cli.format {
        Some(FormatArg::Csv) => Format::Csv,
        Some(FormatArg::Json) => Format::Json,
        None => match cfg.one("format", "csv".to_string())?.as_str() {
            "csv" => Format::Csv,
            "json" => Format::Json,
            f => return usage(format!("format must be csv or json, not {f:?}")),
        },
    };
    let out = cli.out.clone().or_else(|| cfg.get("out").and_then(|v| v.first()).map(PathBuf::from));
    let threads = match cli.threads {
        Some(t) => Some(t),
        None if cfg.get("threads").is_some() => Some(cfg.one("threads", 0usize)?),
        None => match std::env::var("SIEVELAB_THREADS") {
            Ok(v) => Some(v.trim().parse().map_err(|_| UsageError(format!("SIEVELAB_THREADS={v:?} is not a count")))?),
            Err(_) => None,
        },
    };
    if let Some(t) = threads {
        if t == 0 {
            return usage("threads must be positive");
        }
        // only fails if a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }

    let mut sub = cfg.clone();
    for k in GLOBAL_KEYS {
        sub.remove(k);
    }
    let runinfo = commands::Run { seed, tol };
    let output = match name {
        "verify" => commands::verify(&sub, &runinfo)?,
        "norm" => commands::norm(&sub, &runinfo)?,
        "scan" => commands::scan(&sub, &runinfo)?,
        "sieve" => commands::sieve(&sub, &runinfo)?,
        _ => commands::bdh(&sub, &runinfo)?,
    };
    let written = match &out {
        Some(p) => std::fs::File::create(p).and_then(|f| record::write_records(&output.records, format, f)),
        None => record::write_records(&output.records, format, std::io::stdout().lock()),
    };
    written.map_err(|e| UsageError(format!("writing output: {e}")))?;
    let failed = output.records.iter().filter(|r| r.pass == Some(false)).count();
    eprintln!("{name}: {} records, {failed} failed", output.records.len());
    Ok(output.exit)
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    };
    std::process::exit(code);
}
