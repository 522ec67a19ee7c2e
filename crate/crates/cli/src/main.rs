use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use patchlab::scenario::{parse_scenario, run, selfcheck, Command, Report, RunOptions};
use patchlab::Error;

#[derive(Parser)]
#[command(name = "patchlab", version, about = "Exact commutative algebra and finite-level patching experiments")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// Scenario file (JSON).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Report destination; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Number of patching levels, overriding the scenario.
    #[arg(long)]
    levels: Option<u32>,
    /// Run independent steps concurrently.
    #[arg(long)]
    parallel: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Args, Clone)]
struct NumerologyArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    r1: Option<u64>,
    #[arg(long)]
    r2: Option<u64>,
    /// Number of Taylor-Wiles primes.
    #[arg(long)]
    q: Option<u64>,
    /// Size of the framing set.
    #[arg(long = "T")]
    t: Option<u64>,
    /// Size of the ramified set.
    #[arg(long = "SpR")]
    spr: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the whole pipeline of a scenario.
    Run(Common),
    /// Cohomology of each complex.
    Homology(Common),
    /// Split off contractible summands.
    Minimize(Common),
    /// Fitting decompositions and ordinary parts.
    Localize(Common),
    /// Minimal free resolutions of graded modules.
    Resolve(Common),
    /// Kernel and cokernel structure of matrices.
    Invariants(Common),
    /// Cohomology length criterion on graded complexes.
    CheckDeduce(Common),
    /// Depth bound for graded submodules.
    CheckBound(Common),
    /// Patch a tower and verify the conclusions.
    Patch(Common),
    /// Patch two towers joined by a link.
    PatchPair(Common),
    /// Closed-form invariants from a signature.
    Numerology(NumerologyArgs),
    /// Built-in invariant suite.
    Selfcheck(Common),
}

fn fail(code: &str, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("patchlab: {code}: {msg}");
    ExitCode::from(1)
}

fn read_input(path: &Option<PathBuf>) -> Result<String, Error> {
    let path = path.as_ref().ok_or_else(|| Error::MissingDeclaration("--input is required".into()))?;
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn numerology_text(a: &NumerologyArgs) -> Result<String, Error> {
    let need = |x: Option<u64>, flag: &str| x.ok_or_else(|| Error::MissingDeclaration(format!("--{flag} is required")));
    let mut q = serde_json::json!({ "n": need(a.n, "n")?, "r1": need(a.r1, "r1")?, "r2": need(a.r2, "r2")? });
    for (key, v) in [("q", a.q), ("T", a.t), ("SpR", a.spr)] {
        if let Some(v) = v {
            q[key] = v.into();
        }
    }
    Ok(serde_json::json!({ "version": 1, "numerology": { "query": q } }).to_string())
}

fn execute(cmd: &Cmd) -> Result<(Report, Common), Error> {
    let (command, common) = match cmd {
        Cmd::Run(c) => (Command::Run, c),
        Cmd::Homology(c) => (Command::Homology, c),
        Cmd::Minimize(c) => (Command::Minimize, c),
        Cmd::Localize(c) => (Command::Localize, c),
        Cmd::Resolve(c) => (Command::Resolve, c),
        Cmd::Invariants(c) => (Command::Invariants, c),
        Cmd::CheckDeduce(c) => (Command::CheckDeduce, c),
        Cmd::CheckBound(c) => (Command::CheckBound, c),
        Cmd::Patch(c) => (Command::Patch, c),
        Cmd::PatchPair(c) => (Command::PatchPair, c),
        Cmd::Numerology(a) => (Command::Numerology, &a.common),
        Cmd::Selfcheck(c) => (Command::Selfcheck, c),
    };
    let opts = RunOptions { levels: common.levels, parallel: common.parallel };
    let report = match cmd {
        Cmd::Selfcheck(_) => selfcheck(opts)?,
        Cmd::Numerology(a) if common.input.is_none() => run(&parse_scenario(&numerology_text(a)?)?, command, opts),
        _ => run(&parse_scenario(&read_input(&common.input)?)?, command, opts),
    };
    Ok((report, common.clone()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            return fail("E_USAGE", e.to_string().trim_end());
        }
    };
    let (report, common) = match execute(&cli.command) {
        Ok(x) => x,
        Err(e) => return fail(e.code(), e),
    };
    let text = match common.format {
        Format::Json => report.to_json(),
        Format::Table => report.to_table(),
    };
    match &common.output {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &text) {
                return fail("E_IO", format!("{}: {e}", p.display()));
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(report.exit_code() as u8)
}
