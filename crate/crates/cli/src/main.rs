//! `embcol`: generation, counting, reductions, the worst-to-average pipeline,
//! interactive-proof sessions, checkers and amplification experiments.
//!
//! Exit status: 0 on success, 1 when a verification or selection fails, 2 on
//! a usage or input error.

mod args;
mod cmd;
mod input;
mod report;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use args::UsageError;
use report::Report;

#[derive(Parser)]
#[command(name = "embcol", version, about = "Colorful subgraph counting experiments")]
struct Cli {
    /// Print per-trial records as CSV instead of the JSON report.
    #[arg(long, global = true)]
    csv: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random or structured instance, host graph or k-OV instance.
    Gen(cmd::gen::GenArgs),
    /// Count embeddings, homomorphisms, subgraphs or colorful embeddings.
    Count(cmd::count::CountArgs),
    /// Run a reduction and compare it against direct computation.
    Reduce(cmd::reduce::ReduceArgs),
    /// Worst-case counts from a corrupted average-case oracle.
    Wta(cmd::wta::WtaArgs),
    /// Serve the prover side of the interactive proof.
    Prove(cmd::session::ProveArgs),
    /// Run the verifier side, in-process, against a remote prover, or on a stored transcript.
    Verify(cmd::session::VerifyArgs),
    /// Instance checker runs against a counting oracle.
    Check(cmd::check::CheckArgs),
    /// Selector runs over a list of counting oracles.
    Select(cmd::check::SelectArgs),
    /// Direct-product, XOR and end-to-end amplification experiments.
    Amplify(cmd::amplify::AmplifyArgs),
}

/// What a subcommand hands back: its report and whether the run counts as
/// a verification or selection failure.
pub struct Outcome {
    pub report: Report,
    pub failed: bool,
}

fn dispatch(command: Command) -> anyhow::Result<Outcome> {
    match command {
        Command::Gen(a) => cmd::gen::run(a),
        Command::Count(a) => cmd::count::run(a),
        Command::Reduce(a) => cmd::reduce::run(a),
        Command::Wta(a) => cmd::wta::run(a),
        Command::Prove(a) => cmd::session::prove(a),
        Command::Verify(a) => cmd::session::verify(a),
        Command::Check(a) => cmd::check::check(a),
        Command::Select(a) => cmd::check::select(a),
        Command::Amplify(a) => cmd::amplify::run(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    // prove --stdio owns stdout for the wire protocol
    let report_to_stderr = matches!(&cli.command, Command::Prove(p) if p.stdio);
    match dispatch(cli.command) {
        Ok(outcome) => {
            let report = outcome.report.finish(started);
            let written = if report_to_stderr {
                emit(&report, cli.csv, std::io::stderr().lock())
            } else {
                emit(&report, cli.csv, std::io::stdout().lock())
            };
            if let Err(e) = written {
                if e.downcast_ref::<std::io::Error>().is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe) {
                    return ExitCode::from(if outcome.failed { 1 } else { 0 });
                }
                eprintln!("error: writing report: {e:#}");
                return ExitCode::from(1);
            }
            ExitCode::from(if outcome.failed { 1 } else { 0 })
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            let usage = e.downcast_ref::<UsageError>().is_some()
                || matches!(e.downcast_ref::<embcol::Error>(), Some(embcol::Error::Malformed(_)));
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}

fn emit<W: Write>(report: &Report, csv: bool, out: W) -> anyhow::Result<()> {
    if csv {
        report.write_csv(out)
    } else {
        Ok(report.write_json(out)?)
    }
}
