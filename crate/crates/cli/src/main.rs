//! `shapeinv` command-line driver.
//!
//! Exit codes: 0 success, 1 usage or domain error, 2 a check failed,
//! 3 a hypergeometric series did not converge.

mod args;
mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use shapeinv::{Error, Result};

use args::{Cli, Command};
use commands::{Outcome, Status};

const EXIT_USAGE: u8 = 1;
const EXIT_CHECK_FAILED: u8 = 2;
const EXIT_NON_CONVERGENCE: u8 = 3;

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Identity(a) => commands::identity(a),
        Command::Check(a) => commands::check(&a.to_config()?),
        Command::Spectrum(a) => commands::spectrum(a),
        Command::Gauge(a) => commands::gauge(a),
    }
}

fn out_path(cli: &Cli) -> Option<&std::path::Path> {
    let common = match &cli.command {
        Command::Identity(a) => &a.common,
        Command::Check(a) => a,
        Command::Spectrum(a) => &a.common,
        Command::Gauge(a) => &a.common,
    };
    common.out.as_deref()
}

fn emit(path: Option<&std::path::Path>, body: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, body),
        None => std::io::stdout().lock().write_all(body.as_bytes()),
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::SeriesNonConvergence { .. } => EXIT_NON_CONVERGENCE,
        _ => EXIT_USAGE,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            if let Err(e) = emit(out_path(&cli), &outcome.body) {
                eprintln!("error: cannot write report: {e}");
                return ExitCode::from(EXIT_USAGE);
            }
            match outcome.status {
                Status::Passed => ExitCode::SUCCESS,
                Status::CheckFailed => ExitCode::from(EXIT_CHECK_FAILED),
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_exit_codes() {
        assert_eq!(exit_code(&Error::SeriesNonConvergence { terms: 400, tail: 1e-3 }), EXIT_NON_CONVERGENCE);
        assert_eq!(exit_code(&Error::Parse("x".into())), EXIT_USAGE);
        assert_eq!(exit_code(&Error::Domain { x: -1.0, lo: 0.0, hi: f64::INFINITY }), EXIT_USAGE);
    }
}
