//! `ghquad`: quadrature rules, GH distribution functions, option prices, sampling and reproduction tables.

mod args;
mod commands;
mod report;
mod reproduce;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use args::{gather_points, usage, BatchInput, CliError, CliResult, ParamArgs};
use commands::{QuadOptions, Route, SampleOptions};
use report::{resolve_out, write_output, Format, Report, OUT_DIR_ENV};
use reproduce::{Settings, Target};

#[derive(Parser, Debug)]
#[command(
    name = "ghquad",
    version,
    about = "Generalized hyperbolic distribution via inverse Gaussian quadrature"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    /// Output file (relative paths resolve against $GHQUAD_OUT_DIR when set)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Emit an IG or GIG quadrature rule
    Quad {
        /// Use the mixing law of a built-in parameter set
        #[arg(long)]
        set: Option<String>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        /// Unit-scale rule with gamma = delta = sigma
        #[arg(long)]
        sigma: Option<f64>,
        /// GIG order; without it the IG rule is emitted
        #[arg(long, allow_hyphen_values = true)]
        p: Option<f64>,
        #[arg(long, default_value_t = 20)]
        n: usize,
        /// Skip renormalization of GIG weights
        #[arg(long)]
        raw: bool,
    },
    /// GH density
    Density {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        y: Vec<f64>,
        #[command(flatten)]
        batch: BatchInput,
        /// Emit the log-density
        #[arg(long)]
        log: bool,
    },
    /// Moments E[X^r] of the GIG mixing variable
    Moments {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        r: Vec<f64>,
        #[command(flatten)]
        batch: BatchInput,
    },
    /// Moment generating function, closed form or by quadrature when --n is given
    Mgf {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        t: Vec<f64>,
        #[command(flatten)]
        batch: BatchInput,
        /// Evaluate the MGF of the mixing variable instead of Y
        #[arg(long)]
        mixing: bool,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Mean, variance, skewness and excess kurtosis
    Stats {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// CDF through the finite normal mixture
    Cdf {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        y: Vec<f64>,
        #[command(flatten)]
        batch: BatchInput,
        #[arg(long, default_value_t = 50)]
        n: usize,
        /// Emit the survival function 1 - F(y)
        #[arg(long)]
        upper: bool,
    },
    /// Quantiles through the finite normal mixture
    Quantile {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_delimiter = ',')]
        q: Vec<f64>,
        #[command(flatten)]
        batch: BatchInput,
        #[arg(long, default_value_t = 50)]
        n: usize,
    },
    /// European option prices on S = exp(Y)
    Price {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_delimiter = ',')]
        strike: Vec<f64>,
        #[command(flatten)]
        batch: BatchInput,
        #[arg(long, default_value_t = 50)]
        n: usize,
        #[arg(long)]
        put: bool,
    },
    /// E[g(Y)] by compound quadrature; g is power:k, exp:t, indicator:c, call:K or put:K
    Expect {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, required = true, allow_hyphen_values = true)]
        g: Vec<String>,
        #[arg(long, default_value_t = 50)]
        n: usize,
        /// Gauss-Hermite size for the normal layer
        #[arg(long, default_value_t = 40)]
        m: usize,
    },
    /// GH random variates
    Sample {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long = "n-quad", alias = "n", default_value_t = 50)]
        n_quad: usize,
        #[arg(long)]
        antithetic: bool,
        /// Write little-endian 64-bit floats instead of text
        #[arg(long)]
        binary: bool,
        /// Generate in parallel, one substream per chunk of this size
        #[arg(long)]
        chunk: Option<usize>,
    },
    /// CDF by adaptive integration
    OracleCdf {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        y: Vec<f64>,
        #[command(flatten)]
        batch: BatchInput,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, value_enum, default_value = "density")]
        route: Route,
        #[arg(long)]
        upper: bool,
    },
    /// Time a 99-percentile CDF batch, quadrature against the density oracle
    Bench {
        /// Parameter sets to time (repeatable); all four by default
        #[arg(long)]
        set: Vec<String>,
        #[arg(long, default_value_t = 50)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        reps: usize,
        /// Oracle tolerance
        #[arg(long, default_value_t = 2e-3)]
        tol: f64,
    },
    /// Regenerate figure data and tables as CSV
    Reproduce {
        #[arg(long, value_enum)]
        target: Target,
        #[arg(long, default_value_t = 50)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Repetitions: timing runs for table2 (default 20), simulations for table4 (default 100)
        #[arg(long)]
        reps: Option<usize>,
        /// Draws per simulation for table4
        #[arg(long, default_value_t = 1_000_000)]
        count: usize,
        /// Oracle tolerance for table2 timings
        #[arg(long, default_value_t = 2e-3)]
        tol: f64,
    },
}

enum Output {
    Report(Report),
    Bytes(Vec<u8>),
}

fn run(cli: &Cli) -> CliResult<()> {
    let out = resolve_out(cli.out.as_deref());
    let output = match &cli.command {
        Command::Quad {
            set,
            gamma,
            delta,
            sigma,
            p,
            n,
            raw,
        } => Output::Report(commands::quad(&QuadOptions {
            set: set.as_deref(),
            gamma: *gamma,
            delta: *delta,
            sigma: *sigma,
            p: *p,
            n: *n,
            raw: *raw,
        })?),
        Command::Density {
            params,
            y,
            batch,
            log,
        } => {
            let ys = gather_points(y, batch.input.as_deref(), "--y")?;
            Output::Report(commands::density(&params.resolve()?, &ys, *log)?)
        }
        Command::Moments { params, r, batch } => {
            let rs = gather_points(r, batch.input.as_deref(), "--r")?;
            Output::Report(commands::moments(&params.resolve()?, &rs)?)
        }
        Command::Mgf {
            params,
            t,
            batch,
            mixing,
            n,
        } => {
            let ts = gather_points(t, batch.input.as_deref(), "--t")?;
            Output::Report(commands::mgf(&params.resolve()?, &ts, *mixing, *n)?)
        }
        Command::Stats { params } => Output::Report(commands::stats(&params.resolve()?)?),
        Command::Cdf {
            params,
            y,
            batch,
            n,
            upper,
        } => {
            let ys = gather_points(y, batch.input.as_deref(), "--y")?;
            Output::Report(commands::cdf(&params.resolve()?, &ys, *n, *upper)?)
        }
        Command::Quantile {
            params,
            q,
            batch,
            n,
        } => {
            let qs = gather_points(q, batch.input.as_deref(), "--q")?;
            Output::Report(commands::quantile(&params.resolve()?, &qs, *n)?)
        }
        Command::Price {
            params,
            strike,
            batch,
            n,
            put,
        } => {
            let ks = gather_points(strike, batch.input.as_deref(), "--strike")?;
            Output::Report(commands::price(&params.resolve()?, &ks, *n, *put)?)
        }
        Command::Expect { params, g, n, m } => {
            Output::Report(commands::expect(&params.resolve()?, g, *n, *m)?)
        }
        Command::Sample {
            params,
            count,
            seed,
            n_quad,
            antithetic,
            binary,
            chunk,
        } => {
            let params = params.resolve()?;
            let opts = SampleOptions {
                count: *count,
                seed: *seed,
                n: *n_quad,
                antithetic: *antithetic,
                chunk: *chunk,
            };
            let values = commands::sample(&params, &opts)?;
            if *binary {
                Output::Bytes(values.iter().flat_map(|v| v.to_le_bytes()).collect())
            } else if cli.format == Format::Json {
                Output::Report(commands::sample_report(&params, &opts, &values))
            } else {
                let mut text = String::with_capacity(values.len() * 24);
                for v in values {
                    text.push_str(&report::fmt_f64(v));
                    text.push('\n');
                }
                Output::Bytes(text.into_bytes())
            }
        }
        Command::OracleCdf {
            params,
            y,
            batch,
            tol,
            route,
            upper,
        } => {
            let ys = gather_points(y, batch.input.as_deref(), "--y")?;
            Output::Report(commands::oracle_cdf(
                &params.resolve()?,
                &ys,
                *tol,
                *route,
                *upper,
            )?)
        }
        Command::Bench { set, n, reps, tol } => {
            let all = reproduce::preset_sets();
            let sets = if set.is_empty() {
                all
            } else {
                let mut chosen = Vec::new();
                for name in set {
                    match all.iter().find(|(s, _)| s.eq_ignore_ascii_case(name)) {
                        Some(entry) => chosen.push(entry.clone()),
                        None => return usage(format!("unknown parameter set '{name}'")),
                    }
                }
                chosen
            };
            let table = reproduce::timing_table(&sets, *n, *reps, *tol)?;
            Output::Report(Report::new(table).meta("reps", *reps).meta("tol", *tol))
        }
        Command::Reproduce {
            target,
            n,
            seed,
            reps,
            count,
            tol,
        } => {
            let settings = Settings {
                n: *n,
                seed: *seed,
                reps: *reps,
                count: *count,
                tol: *tol,
            };
            if *target == Target::All {
                return reproduce_all(&settings, out, cli.format);
            }
            Output::Report(
                Report::new(reproduce::build(*target, &settings)?)
                    .meta("target", target.name())
                    .meta("n", *n),
            )
        }
    };
    let bytes = match output {
        Output::Report(r) => r.render(cli.format).into_bytes(),
        Output::Bytes(b) => b,
    };
    write_output(out.as_deref(), &bytes)?;
    Ok(())
}

/// Writes every target into a directory: `--out`, else `$GHQUAD_OUT_DIR`, else the working directory.
fn reproduce_all(settings: &Settings, out: Option<PathBuf>, format: Format) -> CliResult<()> {
    let dir = out
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let mut written = String::new();
    for target in Target::EACH {
        let report = Report::new(reproduce::build(target, settings)?).meta("target", target.name());
        let path = dir.join(format!("{}.{ext}", target.name()));
        write_output(Some(&path), report.render(format).as_bytes())?;
        written.push_str(&format!("{}\n", path.display()));
    }
    write_output(None, written.as_bytes())?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ghquad: {e}");
            if cli.format == Format::Json {
                let doc =
                    serde_json::json!({ "error": { "code": e.code(), "message": e.to_string() } });
                println!("{doc}");
            }
            if matches!(e, CliError::Usage(_)) {
                eprintln!("run 'ghquad --help' for usage");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
