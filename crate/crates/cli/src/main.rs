mod args;
mod commands;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};

/// Machine-readable error tag: the library error kind when there is one.
fn error_kind(err: &anyhow::Error) -> &'static str {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<cochlea_car::Error>() {
            return e.kind();
        }
        if cause.is::<std::io::Error>() {
            return "io";
        }
    }
    "error"
}

fn one_line(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or_default();
            let first = first.strip_prefix("error: ").unwrap_or(first);
            eprintln!("error[usage]: {} (see --help)", one_line(first));
            return ExitCode::from(2);
        }
    };

    let result = commands::load_config(cli.config.as_deref()).and_then(|config| match cli.command {
        Command::Design(cmd) => commands::design(config, cmd),
        Command::Run(cmd) => commands::run(config, cmd),
        Command::Analyze(cmd) => commands::analyze(config, cmd),
        Command::Schedule(cmd) => commands::schedule(config, cmd),
        Command::Compare(cmd) => commands::compare(config, cmd),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {}", error_kind(&e), one_line(&format!("{e:#}")));
            ExitCode::from(1)
        }
    }
}
