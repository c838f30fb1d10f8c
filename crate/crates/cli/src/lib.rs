//! Command-line front end and debugger service.
//!
//! `main` is a thin wrapper around [`run`], so everything here can be
//! driven in-process.

pub mod service;
mod table;

use std::ffi::OsString;
use std::io::{self, IsTerminal, Write};
use std::net::{IpAddr, Ipv4Addr, SocketAddr};
use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use clap::{Args, Parser, Subcommand, ValueEnum};
use sheetrace::{
    analyze, load_intervals, load_workbook, parse_address, Analysis, AnalysisTraceError,
    CellAddress, CircularReference, ExpectedSheet, LoadError, TraceError, Workbook,
};

pub const EXIT_OK: u8 = 0;
/// Usage errors, unreadable or malformed inputs, circular workbooks.
pub const EXIT_FAILURE: u8 = 1;
/// `trace` was pointed at a cell with no symptom.
pub const EXIT_NOT_FAULTY: u8 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "sheetrace",
    version,
    about = "Interval testing and fault tracing for spreadsheets"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate, bound and mark every cell, then print the report
    Analyze(AnalyzeArgs),
    /// Print the most influential faulty cell behind a marked cell
    Trace(TraceArgs),
    /// Serve the HTTP API used by the grid debugger
    Serve(ServeArgs),
}

#[derive(Args, Debug)]
pub struct Inputs {
    /// Workbook document (JSON)
    #[arg(long, value_name = "FILE")]
    pub workbook: PathBuf,
    /// Expected intervals (JSON); without it every cell is unchecked
    #[arg(long, value_name = "FILE")]
    pub intervals: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// When to colorize the table
    #[arg(long, value_enum, default_value_t = ColorChoice::Auto)]
    pub color: ColorChoice,
}

#[derive(Args, Debug)]
pub struct TraceArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    #[arg(long, value_name = "ADDR", value_parser = cell_arg)]
    pub cell: CellAddress,
    /// Also dump every step of the search as JSON
    #[arg(long)]
    pub explain: bool,
}

#[derive(Args, Debug)]
pub struct ServeArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value_t = IpAddr::V4(Ipv4Addr::LOCALHOST))]
    pub host: IpAddr,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ColorChoice {
    Auto,
    Always,
    Never,
}

impl ColorChoice {
    fn enabled(self) -> bool {
        match self {
            ColorChoice::Always => true,
            ColorChoice::Never => false,
            ColorChoice::Auto => {
                io::stdout().is_terminal() && std::env::var_os("NO_COLOR").is_none()
            }
        }
    }
}

fn cell_arg(s: &str) -> Result<CellAddress, String> {
    parse_address(s).map_err(|e| e.to_string())
}

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("{code}: {0}", code = .0.code())]
    Load(#[from] LoadError),
    #[error("CircularReference: {0}")]
    Circular(CircularReference),
    #[error("QueryNotFaulty: {0}")]
    NotFaulty(TraceError),
    #[error("{0}")]
    Io(#[from] io::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::NotFaulty(_) => EXIT_NOT_FAULTY,
            _ => EXIT_FAILURE,
        }
    }
}

/// RFC 3339 UTC, whole seconds.
pub fn timestamp_now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true)
}

pub fn load_inputs(
    workbook: &Path,
    intervals: Option<&Path>,
) -> Result<(Workbook, ExpectedSheet), LoadError> {
    let wb = load_workbook(workbook)?;
    let expected = match intervals {
        Some(p) => load_intervals(p)?,
        None => ExpectedSheet::new(),
    };
    Ok((wb, expected))
}

impl Inputs {
    fn load(&self) -> Result<(Workbook, ExpectedSheet), LoadError> {
        load_inputs(&self.workbook, self.intervals.as_deref())
    }
}

/// Parse `args` (program name first), run the command and return the
/// process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // --help and --version land here too.
            return if e.use_stderr() {
                EXIT_FAILURE
            } else {
                EXIT_OK
            };
        }
    };
    let result = match cli.command {
        Command::Analyze(a) => run_analyze(&a),
        Command::Trace(a) => run_trace(&a),
        Command::Serve(a) => run_serve(&a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {f}");
            f.exit_code()
        }
    }
}

fn run_analyze(args: &AnalyzeArgs) -> Result<(), Failure> {
    let (wb, expected) = args.inputs.load()?;
    let report = analyze(&wb, &expected).stamped(timestamp_now());
    let mut out = io::stdout().lock();
    match args.format {
        Format::Json => writeln!(out, "{}", report.to_json())?,
        Format::Table => table::render(&report, args.color.enabled(), &mut out)?,
    }
    out.flush()?;
    Ok(())
}

fn run_trace(args: &TraceArgs) -> Result<(), Failure> {
    let (wb, expected) = args.inputs.load()?;
    let analysis = Analysis::run(&wb, &expected);
    let result = analysis.trace(args.cell).map_err(|e| match e {
        AnalysisTraceError::Circular(c) => Failure::Circular(c),
        AnalysisTraceError::Trace(t) => Failure::NotFaulty(t),
    })?;
    let mut out = io::stdout().lock();
    writeln!(out, "{}", result.most_influential)?;
    if args.explain {
        let json = serde_json::to_string_pretty(&result).expect("trace serializes");
        writeln!(out, "{json}")?;
    }
    out.flush()?;
    Ok(())
}

fn run_serve(args: &ServeArgs) -> Result<(), Failure> {
    let (wb, expected) = args.inputs.load()?;
    let session = service::Session::new(wb, expected);
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()?;
    runtime.block_on(service::serve(
        session,
        SocketAddr::new(args.host, args.port),
    ))?;
    Ok(())
}
