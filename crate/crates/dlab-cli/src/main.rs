mod args;
mod commands;
mod manifest;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, GfAction};

/// Worker-count variable; unset means one worker per available core.
const WORKERS_ENV: &str = "DLAB_WORKERS";

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or input files: exit 2.
    Usage(String),
    /// A requested check failed: exit 1.
    Failed(String),
    Core(dlab_core::Error),
}

impl From<dlab_core::Error> for CliError {
    fn from(e: dlab_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(e.into())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Usage(format!("json: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Core(dlab_core::Error::Io(std::io::Error::other(e)))
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use dlab_core::Error as E;
        match self {
            CliError::Usage(_) | CliError::Core(E::InvalidArgument(_) | E::Contract(_)) => 2,
            CliError::Failed(_) | CliError::Core(_) => 1,
        }
    }
}

fn configure_workers() -> Result<(), CliError> {
    let Ok(v) = std::env::var(WORKERS_ENV) else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| CliError::Usage(format!("{WORKERS_ENV}={v} is not a worker count")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot start {n} workers: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_workers()?;
    match cli.command {
        Command::Solve { equation, opts } => commands::solve(equation, &opts),
        Command::Norm { spec, input, common } => commands::norm(&spec, &input, &common),
        Command::Embed(opts) => commands::embed(&opts),
        Command::Profiles { mode, manifest, opts } => commands::profiles(mode, &manifest, &opts),
        Command::Verify { kinds, common } => commands::verify(&kinds, &common),
        Command::Gf { action: GfAction::Info { input } } => commands::gf_info(&input),
        Command::Gf { action: GfAction::Convert { input, output, side } } => commands::gf_convert(&input, &output, side),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // clap exits with status 2 on usage errors
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Usage(m) => eprintln!("error: {m}"),
                CliError::Failed(m) => eprintln!("check failed: {m}"),
                CliError::Core(c) => eprintln!("error: {c}"),
            }
            ExitCode::from(e.exit_code())
        }
    }
}
