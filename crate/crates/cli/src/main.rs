//! `gsa`: reproducible experiments on hypersurfaces in Gaussian space.
//!
//! Every command writes CSV or JSON that embeds the resolved configuration,
//! including the seed. Exit codes: 0 success, 2 usage or input error,
//! 3 failed precondition, 4 tolerance or solver failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod output;

use args::{Cli, Command};
use clap::Parser;
use gsa_core::Error;
use std::process::ExitCode;

/// Exit status for a library error.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidParameter(_)
        | Error::Format(_)
        | Error::NonPositiveRadius(_)
        | Error::ResolutionTooLow(_)
        | Error::OpenCurve(_)
        | Error::ChartOutOfRange(_) => 2,
        Error::NoBracket(..)
        | Error::ConvergenceFailure(_)
        | Error::StepUnderflow(_)
        | Error::NoRootInBracket(..)
        | Error::NonConvexSolution(_)
        | Error::StepLimitExceeded(_) => 4,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = cli.config();
    let outcome = match &cli.command {
        Command::Table(a) => commands::table(a),
        Command::Verify(a) => commands::verify(a),
        Command::Scan(a) => commands::scan(a),
        Command::Spectrum(a) => commands::spectrum(a),
        Command::Shoot(a) => commands::shoot(a),
        Command::Flow(a) => commands::flow(a, &config),
        Command::Random(a) => commands::random(a, cli.common.seed),
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    if let Err(e) = output::emit(&cli.common, &config, &outcome) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if outcome.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        for f in &outcome.failures {
            eprintln!("check failed: {f}");
        }
        ExitCode::from(4)
    }
}
