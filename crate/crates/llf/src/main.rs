//! Command-line front end: every subcommand is a thin wrapper over the
//! library's study runners, emitting CSV tables and JSON summaries.

// As in the library: `!(x > bound)` validations deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use llf::{
    approximate_from_data, approximate_with, cache_dir, cache_file_name, cached_factorization,
    detect, run_convergence, run_piecewise_pipeline, run_rank_table, run_sweep,
    write_convergence_csv, write_rank_csv, write_sweep_csv, DataFile, Error, FrameConfig,
    Partition, Result, SweepSpec, SweepVariable, TestFunction, DEFAULT_TAU, DEFAULT_TOLERANCE,
    GRID_FACTOR, RANK_TABLE_CASES,
};

#[derive(Parser)]
#[command(
    name = "llf",
    version,
    about = "Stable function approximation from equispaced samples via local Legendre frames",
    after_help = "Functions are given as f1..f9, sin:<omega>, or piecewise:<xi>:<zeta>.\n\
        Offline factorizations are cached under $LLF_CACHE_DIR (default: a\n\
        llf-cache directory in the system temp dir)."
)]
struct Cli {
    /// Seed for randomized trials. Accepted for reproducibility plumbing;
    /// every shipped code path is deterministic and ignores it.
    #[arg(long, global = true, value_name = "SEED")]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

/// Frame parameters shared by most subcommands.
#[derive(clap::Args, Debug, Clone, Copy)]
struct ConfigArgs {
    /// Local polynomial degree N (m = ceil(gamma (N+1)) samples per subinterval)
    #[arg(long = "N", value_name = "N", default_value_t = 15)]
    degree: usize,

    /// Extension half-width T of the Legendre frame interval [-T, T]
    #[arg(long = "T", value_name = "T", default_value_t = 6.0)]
    extension: f64,

    /// Oversampling ratio gamma
    #[arg(long = "gamma", value_name = "GAMMA", default_value_t = 1.0)]
    oversampling: f64,

    /// Truncation threshold epsilon for the TSVD solve
    #[arg(long = "eps", value_name = "EPS", default_value_t = 1e-14)]
    truncation: f64,
}

impl ConfigArgs {
    fn build(&self) -> Result<FrameConfig> {
        FrameConfig::new(
            self.degree,
            self.extension,
            self.oversampling,
            self.truncation,
        )
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build the reference factorization for a configuration and cache it;
    /// prints the retained rank C_delta.
    Offline {
        #[command(flatten)]
        config: ConfigArgs,
        /// Also copy the factorization file to this path
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },

    /// Approximate a function or an equispaced data file on K subintervals;
    /// emits an x,f,approx,error CSV.
    Approximate {
        /// Function spec (f1..f9, sin:<omega>, piecewise:<xi>:<zeta>)
        #[arg(
            long = "fn",
            value_name = "FN",
            conflicts_with = "data",
            required_unless_present = "data"
        )]
        function: Option<String>,
        /// CSV data file with header x,f and uniformly spaced x
        #[arg(long, value_name = "FILE")]
        data: Option<PathBuf>,
        /// Subinterval count (inferred from a data file when omitted)
        #[arg(long = "K", value_name = "K", required_unless_present = "data")]
        subintervals: Option<usize>,
        #[command(flatten)]
        config: ConfigArgs,
        /// Error CSV path (stdout when omitted)
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Also serialize the approximant to this path
        #[arg(long, value_name = "FILE")]
        approx_out: Option<PathBuf>,
    },

    /// Convergence study: error and rank for each K in a list; emits a
    /// K,M,E_M,C_delta CSV.
    Converge {
        /// Function spec
        #[arg(long = "fn", value_name = "FN")]
        function: String,
        /// Comma-separated subinterval counts, e.g. 2,4,8,16,32
        #[arg(long = "K", value_name = "LIST")]
        subintervals: String,
        #[command(flatten)]
        config: ConfigArgs,
        /// CSV path (stdout when omitted)
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },

    /// Single-variable parameter sweep; emits a <var>,E_M CSV and reports
    /// the first/last swept value meeting the tolerance on stderr.
    Sweep {
        /// Variable to sweep: T, N, K, or gamma
        #[arg(long, value_name = "VAR")]
        var: String,
        /// Swept values: comma list (1,2,4) or range start:step:end (1.0:0.2:16)
        #[arg(long, value_name = "VALUES")]
        values: String,
        /// Function spec
        #[arg(long = "fn", value_name = "FN")]
        function: String,
        /// Fixed subinterval count (ignored when sweeping K)
        #[arg(long = "K", value_name = "K", default_value_t = 8)]
        subintervals: usize,
        #[command(flatten)]
        config: ConfigArgs,
        /// Target accuracy for the threshold report
        #[arg(long, value_name = "TOL", default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        /// CSV path (stdout when omitted)
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },

    /// Retained rank C_delta per (omega, m) case; emits an
    /// omega,m,C_delta,m_C_delta_over_omega CSV.
    RankTable {
        /// Cases as omega:m pairs, e.g. 1:15,2:26 (default: the built-in table)
        #[arg(long, value_name = "CASES")]
        cases: Option<String>,
        /// Extension half-width T
        #[arg(long = "T", value_name = "T", default_value_t = 6.0)]
        extension: f64,
        /// Truncation threshold epsilon
        #[arg(long = "eps", value_name = "EPS", default_value_t = 1e-14)]
        truncation: f64,
        /// CSV path (stdout when omitted)
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },

    /// Flag subintervals whose coefficient energy betrays a singularity;
    /// emits a k,eta,flagged CSV and a JSON summary.
    Detect {
        /// Function spec (use piecewise:<xi>:<zeta> for the benchmark family)
        #[arg(long = "fn", value_name = "FN")]
        function: String,
        /// Subinterval count
        #[arg(long = "K", value_name = "K", default_value_t = 20)]
        subintervals: usize,
        #[command(flatten)]
        config: ConfigArgs,
        /// Detection threshold factor over the median energy
        #[arg(long, value_name = "TAU", default_value_t = DEFAULT_TAU)]
        tau: f64,
        /// CSV path (stdout when omitted)
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// JSON summary path (stderr when omitted)
        #[arg(long, value_name = "FILE")]
        json: Option<PathBuf>,
    },

    /// Full detect -> localize -> correct pipeline on the piecewise family;
    /// emits the corrected x,f,approx,error CSV and a JSON summary.
    Correct {
        /// Slope-break location xi
        #[arg(long, value_name = "XI")]
        xi: f64,
        /// Curvature-break location zeta
        #[arg(long, value_name = "ZETA")]
        zeta: f64,
        /// Subinterval count
        #[arg(long = "K", value_name = "K", default_value_t = 20)]
        subintervals: usize,
        #[command(flatten)]
        config: ConfigArgs,
        /// Detection threshold factor over the median energy
        #[arg(long, value_name = "TAU", default_value_t = DEFAULT_TAU)]
        tau: f64,
        /// CSV path (stdout when omitted)
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// JSON summary path (stderr when omitted)
        #[arg(long, value_name = "FILE")]
        json: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    // `seed` is parsed but intentionally unused: no shipped path draws
    // random numbers, and the flag reserves the interface for ones that do.
    let Cli { seed: _, command } = Cli::parse();
    match run(command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

/// Opens `--out`, falling back to stdout.
fn open_out(out: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

/// Parses `start:step:end` ranges and comma lists of reals.
fn parse_values(s: &str) -> Result<Vec<f64>> {
    let number = |tok: &str| -> Result<f64> {
        tok.trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad number {tok:?} in {s:?}")))
    };
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let (start, step, end) = (number(parts[0])?, number(parts[1])?, number(parts[2])?);
        if !(step > 0.0) || end < start {
            return Err(Error::InvalidArgument(format!(
                "range must satisfy step > 0 and end >= start, got {s:?}"
            )));
        }
        let count = ((end - start) / step + 1e-9).floor() as usize;
        return Ok((0..=count).map(|i| start + i as f64 * step).collect());
    }
    if parts.len() != 1 {
        return Err(Error::InvalidArgument(format!(
            "expected a comma list or start:step:end, got {s:?}"
        )));
    }
    s.split(',').map(number).collect()
}

/// Parses a comma list of positive integers.
fn parse_usize_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad integer {tok:?} in {s:?}")))
        })
        .collect()
}

/// Parses rank-table cases `omega:m` separated by commas.
fn parse_cases(s: &str) -> Result<Vec<(f64, usize)>> {
    s.split(',')
        .map(|tok| {
            let (omega, m) = tok
                .trim()
                .split_once(':')
                .ok_or_else(|| Error::InvalidArgument(format!("expected omega:m, got {tok:?}")))?;
            let omega = omega
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad frequency {omega:?}")))?;
            let m = m
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad sample count {m:?}")))?;
            Ok((omega, m))
        })
        .collect()
}

fn parse_variable(s: &str) -> Result<SweepVariable> {
    match s {
        "T" => Ok(SweepVariable::Extension),
        "N" => Ok(SweepVariable::Degree),
        "K" => Ok(SweepVariable::Subintervals),
        "gamma" => Ok(SweepVariable::Oversampling),
        other => Err(Error::InvalidArgument(format!(
            "unknown sweep variable {other:?}; expected T, N, K, or gamma"
        ))),
    }
}

/// Writes the JSON summary to `--json`, falling back to stderr so stdout
/// stays a clean CSV stream.
fn emit_json(json: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            writeln!(w, "{json}")?;
            w.flush()?;
        }
        None => eprintln!("{json}"),
    }
    Ok(())
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Offline { config, out } => {
            let config = config.build()?;
            let fact = cached_factorization(&config)?;
            let cached = cache_dir().join(cache_file_name(&config));
            if let Some(out) = out {
                fact.save(&out)?;
            }
            println!("C_delta = {}", fact.retained_rank());
            eprintln!("cached at {}", cached.display());
            Ok(())
        }

        Command::Approximate {
            function,
            data,
            subintervals,
            config,
            out,
            approx_out,
        } => {
            let config = config.build()?;
            let fact = cached_factorization(&config)?;
            let mut w = open_out(out.as_deref())?;
            let approx = if let Some(path) = data {
                let file = DataFile::load(&path)?;
                let m = config.sample_count();
                let k = match subintervals {
                    Some(k) => k,
                    None if (file.len() - 1) % (m - 1) == 0 => (file.len() - 1) / (m - 1),
                    None => {
                        return Err(Error::InvalidData(format!(
                            "{} samples do not tile into subintervals of m = {m}; pass --K",
                            file.len()
                        )))
                    }
                };
                let approx = approximate_from_data(&fact, file.xs(), file.values(), k)?;
                // The truth is only known at the file's own grid points.
                writeln!(w, "x,f,approx,error")?;
                for (&x, &fx) in file.xs().iter().zip(file.values()) {
                    let qx = approx.evaluate(x)?;
                    writeln!(w, "{x},{fx},{qx},{}", (fx - qx).abs())?;
                }
                approx
            } else {
                let spec = function.expect("clap enforces --fn or --data");
                let f = TestFunction::parse(&spec)?;
                let k = subintervals.expect("clap enforces --K with --fn");
                let (a, b) = f.domain();
                let partition = Partition::uniform(a, b, k)?;
                let approx = approximate_with(&fact, &partition, |x| f.eval(x))?;
                approx.write_error_csv(&mut w, |x| f.eval(x), GRID_FACTOR)?;
                approx
            };
            w.flush()?;
            if let Some(path) = approx_out {
                approx.save(&path)?;
            }
            Ok(())
        }

        Command::Converge {
            function,
            subintervals,
            config,
            out,
        } => {
            let f = TestFunction::parse(&function)?;
            let config = config.build()?;
            let ks = parse_usize_list(&subintervals)?;
            let rows = run_convergence(&f, &config, &ks)?;
            let mut w = open_out(out.as_deref())?;
            write_convergence_csv(&rows, &mut w)?;
            w.flush()?;
            Ok(())
        }

        Command::Sweep {
            var,
            values,
            function,
            subintervals,
            config,
            tol,
            out,
        } => {
            let variable = parse_variable(&var)?;
            let f = TestFunction::parse(&function)?;
            let mut spec = SweepSpec::new(variable, parse_values(&values)?, f);
            spec.degree = config.degree;
            spec.subintervals = subintervals;
            spec.extension = config.extension;
            spec.oversampling = config.oversampling;
            spec.truncation = config.truncation;
            spec.tolerance = tol;
            let result = run_sweep(&spec)?;
            let mut w = open_out(out.as_deref())?;
            write_sweep_csv(variable, &result.rows, &mut w)?;
            w.flush()?;
            let col = variable.column();
            match (result.first_pass, result.last_pass) {
                (Some(first), Some(last)) => {
                    eprintln!("tolerance {tol} met from {col} = {first} through {col} = {last}")
                }
                _ => eprintln!("tolerance {tol} never met"),
            }
            Ok(())
        }

        Command::RankTable {
            cases,
            extension,
            truncation,
            out,
        } => {
            let cases = match cases {
                Some(s) => parse_cases(&s)?,
                None => RANK_TABLE_CASES.to_vec(),
            };
            let rows = run_rank_table(&cases, extension, truncation)?;
            let mut w = open_out(out.as_deref())?;
            write_rank_csv(&rows, &mut w)?;
            w.flush()?;
            Ok(())
        }

        Command::Detect {
            function,
            subintervals,
            config,
            tau,
            out,
            json,
        } => {
            let f = TestFunction::parse(&function)?;
            let config = config.build()?;
            let fact = cached_factorization(&config)?;
            let (a, b) = f.domain();
            let partition = Partition::uniform(a, b, subintervals)?;
            let approx = approximate_with(&fact, &partition, |x| f.eval(x))?;
            let report = detect(&approx, tau)?;
            let mut w = open_out(out.as_deref())?;
            report.write_eta_csv(&mut w)?;
            w.flush()?;
            let windows: Vec<serde_json::Value> = report
                .windows()
                .iter()
                .map(|win| serde_json::json!({ "first": win.first(), "last": win.last() }))
                .collect();
            let summary = serde_json::json!({
                "version": 1u32,
                "function": f.id(),
                "tau": report.tau(),
                "degenerate": report.degenerate(),
                "median_eta": report.median_eta(),
                "flagged": report.flagged(),
                "windows": windows,
            })
            .to_string();
            emit_json(&summary, json.as_deref())
        }

        Command::Correct {
            xi,
            zeta,
            subintervals,
            config,
            tau,
            out,
            json,
        } => {
            let config = config.build()?;
            let partition = Partition::uniform(0.0, 1.0, subintervals)?;
            let report = run_piecewise_pipeline(xi, zeta, &partition, &config, tau)?;
            let mut w = open_out(out.as_deref())?;
            let f = |x: f64| llf::piecewise_value(xi, zeta, x);
            match &report.corrected {
                Some(corr) => corr.write_error_csv(&mut w, f, GRID_FACTOR)?,
                None => report.approximant.write_error_csv(&mut w, f, GRID_FACTOR)?,
            }
            w.flush()?;
            emit_json(&report.to_json(), json.as_deref())
        }
    }
}
