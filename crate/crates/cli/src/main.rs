use std::process::ExitCode;

use clap::Parser;

mod config;
mod run;

use config::{parse_config, Cli, SEED_ENV};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 3,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let env_seed = std::env::var(SEED_ENV).ok();
    let outcome = parse_config(&cli.command, env_seed.as_deref()).and_then(|cfg| run::execute(&cfg));
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("hammerlip: {e}");
            if matches!(e, CliError::Usage(_)) {
                eprintln!("run `hammerlip --help` for usage");
            }
            ExitCode::from(e.code())
        }
    }
}
