//! `nilflow`: build the interval action, verify it, and export reports.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 usage or config error.

mod commands;
mod config;
mod error;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use config::{ParamFlags, RunConfig, Suite};
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "nilflow", version, about = "C^{1+α} action of N4 on [0,1]: construction and checks")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Hölder target α of the parameter set.
    #[arg(long, global = true, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    p: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    q: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    r: Option<f64>,
    /// Use the closed form p = q = 4/α, r = 4/3.
    #[arg(long, global = true)]
    auto: bool,
    /// Truncation radius of the index box.
    #[arg(long = "N", global = true)]
    radius: Option<i64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (default: stdout).
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the eight exponent conditions.
    CheckParams,
    /// Build the interval family and the realized generators; print a summary.
    Build,
    /// Evaluate a word in e, d, f (a, b, c are expanded) as CSV `x,gx,dgx`.
    Eval {
        #[arg(long)]
        word: Option<String>,
        /// Sample points; default is the midpoint of every safe interval.
        #[arg(long, value_delimiter = ',')]
        x: Option<Vec<f64>>,
    },
    /// Run the verification suites.
    Verify {
        #[arg(long, value_enum)]
        suite: Option<Suite>,
        #[arg(long, hide = true)]
        perturb_lengths: Option<f64>,
    },
    /// Hölder constant sweep of log Dg, written as CSV.
    Holder {
        #[arg(long, value_delimiter = ',')]
        alpha_list: Option<Vec<f64>>,
        #[arg(long = "N-list", value_delimiter = ',')]
        radius_list: Option<Vec<i64>>,
        #[arg(long)]
        word: Option<String>,
        /// Also write the full JSON sweep report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Monte Carlo estimate of the expected length series along the urn walk.
    Markov {
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        paths: Option<u64>,
        #[arg(long, value_delimiter = ',')]
        horizons: Option<Vec<u64>>,
        #[arg(long, value_delimiter = ',')]
        exponents: Option<Vec<f64>>,
    },
    /// Three-element certificate for (e, d, c) and the lexicographic family.
    Obstruction {
        #[arg(long, value_delimiter = ',', num_args = 1)]
        base: Option<Vec<i64>>,
        #[arg(long)]
        lex_radius: Option<i64>,
    },
    /// Interval layout as CSV.
    ExportLayout,
    /// Chart table `u,h,dh` for one length ratio (debugging aid).
    ChartTable {
        /// Left-neighbor length over own length.
        #[arg(long, default_value_t = 1.0)]
        ratio: f64,
        /// Interior sample points, evenly spaced.
        #[arg(long, default_value_t = 99)]
        points: usize,
    },
}

fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json(path: Option<&PathBuf>, value: &Value) -> Result<(), CliError> {
    let mut out = output(path)?;
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| CliError::Failed(e.to_string()))?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("NILFLOW_THREADS") else { return Ok(()) };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("NILFLOW_THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Failed(e.to_string()))
}

fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let g = &cli.global;
    let mut cfg = RunConfig::load(g.config.as_deref())?;
    cfg.apply_param_flags(&ParamFlags { alpha: g.alpha, p: g.p, q: g.q, r: g.r, auto: g.auto })?;
    if let Some(n) = g.radius {
        cfg.radius = n;
    }
    if let Some(seed) = g.seed {
        cfg.seed = seed;
    }
    match &cli.command {
        Command::Eval { word, x } => {
            if let Some(w) = word {
                cfg.eval.word = w.clone();
            }
            if let Some(x) = x {
                cfg.eval.x = x.clone();
            }
        }
        Command::Verify { suite, perturb_lengths } => {
            if let Some(s) = suite {
                cfg.verify.suite = *s;
            }
            if perturb_lengths.is_some() {
                cfg.verify.perturb_lengths = *perturb_lengths;
            }
        }
        Command::Holder { alpha_list, radius_list, word, .. } => {
            if let Some(a) = alpha_list {
                cfg.holder.alpha_list = a.clone();
            }
            if let Some(n) = radius_list {
                cfg.holder.radius_list = n.clone();
            }
            if let Some(w) = word {
                cfg.holder.word = w.clone();
            }
        }
        Command::Markov { d, paths, horizons, exponents } => {
            if let Some(d) = d {
                cfg.markov.d = *d;
            }
            if let Some(p) = paths {
                cfg.markov.paths = *p;
            }
            if let Some(h) = horizons {
                cfg.markov.horizons = h.clone();
            }
            if exponents.is_some() {
                cfg.markov.exponents = exponents.clone();
            }
        }
        Command::Obstruction { base, lex_radius } => {
            if let Some(b) = base {
                cfg.obstruction.base = <[i64; 3]>::try_from(b.as_slice())
                    .map_err(|_| CliError::Usage(format!("--base needs three coordinates, got {b:?}")))?;
            }
            if let Some(r) = lex_radius {
                cfg.obstruction.lex_radius = *r;
            }
        }
        Command::CheckParams | Command::Build | Command::ExportLayout | Command::ChartTable { .. } => {}
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let cfg = resolve(&cli)?;
    let out = cli.global.out.as_ref();
    match &cli.command {
        Command::CheckParams => {
            let (report, feasible) = commands::check_params(&cfg)?;
            write_json(out, &report)?;
            if !feasible {
                return Err(CliError::Failed("parameters are infeasible".into()));
            }
        }
        Command::Build => write_json(out, &commands::build(&cfg)?)?,
        Command::Eval { .. } => {
            let mut w = output(out)?;
            commands::eval(&cfg, &mut w)?;
            w.flush()?;
        }
        Command::ExportLayout => {
            let mut w = output(out)?;
            commands::export_layout(&cfg, &mut w)?;
            w.flush()?;
        }
        Command::ChartTable { ratio, points } => {
            let mut w = output(out)?;
            commands::chart_table(*ratio, *points, &mut w)?;
            w.flush()?;
        }
        Command::Verify { .. } => {
            let (report, failed) = commands::verify(&cfg)?;
            write_json(out, &report)?;
            if !failed.is_empty() {
                return Err(CliError::Failed(format!("suites failed: {}", failed.join(", "))));
            }
        }
        Command::Holder { report, .. } => {
            let (sweep, summary) = commands::holder(&cfg)?;
            let mut w = output(out)?;
            nilflow::analysis::write_sweep_csv(&sweep, &mut w)?;
            w.flush()?;
            if let Some(path) = report {
                write_json(Some(path), &summary)?;
            }
        }
        Command::Markov { .. } => {
            let (report, cauchy) = commands::markov(&cfg)?;
            write_json(out, &report)?;
            if !cauchy {
                return Err(CliError::Failed("estimates are not Cauchy across horizons".into()));
            }
        }
        Command::Obstruction { .. } => {
            let (report, passed) = commands::obstruction(&cfg)?;
            write_json(out, &report)?;
            if !passed {
                return Err(CliError::Failed("certificate does not hold".into()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nilflow: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
