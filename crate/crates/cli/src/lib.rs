//! Command-line driver and annotation HTTP server.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod provenance;
pub mod server;

use std::ffi::OsString;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::CliResult;

fn dispatch(cli: Cli) -> CliResult<()> {
    let cfg = cli.config.as_deref().map(config::load).transpose()?;
    let cfg = cfg.as_ref();
    match cli.command {
        Command::Extract(a) => commands::extract_cmd(&config::merge(&a, cfg)?),
        Command::Analyze(a) => commands::analyze_cmd(&config::merge(&a, cfg)?),
        Command::Split(a) => commands::split_cmd(&config::merge(&a, cfg)?),
        Command::Prompts(a) => commands::prompts_cmd(&config::merge(&a, cfg)?),
        Command::TrainBaseline(a) => commands::train_cmd(&config::merge(&a, cfg)?),
        Command::Predict(a) => commands::predict_cmd(&config::merge(&a, cfg)?),
        Command::Evaluate(a) => commands::evaluate_cmd(&config::merge(&a, cfg)?),
        Command::Serve(a) => commands::serve_cmd(&config::merge(&a, cfg)?),
    }
}

/// Parses `args` and runs the command. Exit codes: 0 ok, 1 validation, 2 I/O, 3 adapter.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(error::ErrorKind::Validation.exit_code())
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
