use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use relmachine::config::RunConfig;
use relmachine::report::{Format, RunReport};
use relmachine::sweep;
use relmachine::verify::{self, Fault, VerifyOptions};
use relmachine::Error;

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser)]
#[command(
    name = "relmachine",
    version,
    about = "Two-qubit SWAP machine with moving detector qubits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML configuration file; missing keys take the built-in defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file (stdout if omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,

    /// Points per sweep, or random points for `verify`.
    #[arg(long, global = true)]
    grid: Option<usize>,

    /// Qubit speeds `vA,vB` as fractions of c.
    #[arg(long, global = true, value_parser = parse_speeds)]
    speeds: Option<(f64, f64)>,
}

#[derive(Subcommand)]
enum Command {
    /// Full statistics at one operating point.
    Point,
    /// Heat noise-to-signal ratio against the uncertainty bounds.
    Fig1,
    /// Entropy production times noise-to-signal ratio.
    Fig2,
    /// Cooling power and COP at maximum figure of merit.
    Fig3,
    /// Refrigerator figure-of-merit optimum.
    Optimize,
    /// Run the invariant suite; exits 1 if any family fails.
    Verify {
        #[arg(long)]
        seed: Option<u64>,
        /// Corrupt the mean-work formula to check that the suite notices.
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

fn parse_speeds(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected vA,vB, got {s:?}"))?;
    let parse = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. } => EXIT_CONFIG,
        _ => EXIT_NUMERIC,
    }
}

fn configure_threads() -> Result<(), Error> {
    let Ok(value) = std::env::var("RELMACHINE_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Config {
            field: "RELMACHINE_THREADS".into(),
            message: format!("must be a positive integer, got {value:?}"),
        })?;
    // the global pool can only be built once; a second attempt is harmless
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

fn load_config(cli: &Cli) -> Result<RunConfig, Error> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(n) = cli.grid {
        cfg.set_grid(n);
    }
    if let Some((va, vb)) = cli.speeds {
        cfg.set_speeds(va, vb);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn open_output(cli: &Cli) -> Result<Box<dyn Write>, Error> {
    Ok(match &cli.out {
        Some(path) => Box::new(BufWriter::new(File::create(path).map_err(|e| {
            Error::Config {
                field: "out".into(),
                message: format!("{}: {e}", path.display()),
            }
        })?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_report(cli: &Cli, report: &RunReport) -> Result<(), Error> {
    let format = match cli.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    let mut out = open_output(cli)?;
    report
        .write(format, &mut out)
        .and_then(|_| out.flush())
        .map_err(|e| Error::Config {
            field: "out".into(),
            message: e.to_string(),
        })
}

fn run(cli: &Cli) -> Result<u8, Error> {
    configure_threads()?;
    let cfg = load_config(cli)?;
    let (name, result) = match &cli.command {
        Command::Point => ("point", sweep::cmd_point(&cfg)),
        Command::Fig1 => ("fig1", sweep::cmd_fig1(&cfg.fig1)),
        Command::Fig2 => ("fig2", sweep::cmd_fig2(&cfg.fig2)),
        Command::Fig3 => ("fig3", sweep::cmd_fig3(&cfg.fig3)),
        Command::Optimize => ("optimize", sweep::cmd_optimize(&cfg.optimize)),
        Command::Verify { seed, inject_fault } => {
            let opts = VerifyOptions {
                grid: cfg.verify.grid,
                seed: seed.unwrap_or(cfg.verify.seed),
                fault: inject_fault.then_some(Fault::FlipMeanWorkSign),
            };
            let report = verify::run(&opts)?;
            let mut out = open_output(cli)?;
            writeln!(out, "{report}")
                .and_then(|_| out.flush())
                .map_err(|e| Error::Config {
                    field: "out".into(),
                    message: e.to_string(),
                })?;
            return Ok(if report.passed() {
                0
            } else {
                EXIT_VERIFY_FAILED
            });
        }
    };
    let mut report = result?;
    sweep::stamp(&mut report, name, &cfg);
    write_report(cli, &report)?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("relmachine: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
