use std::process::ExitCode;

use clap::Parser;
use wfpo_core::cli::{error_record, run, Cli};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", error_record(cli.command.name(), &e));
            ExitCode::FAILURE
        }
    }
}
