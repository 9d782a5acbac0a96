use std::process::ExitCode;

use clap::Parser;
use dpimpute_cli::args::{Cli, Command};
use dpimpute_cli::commands::{bounds, impute_cmd, query, simulate, to_json};
use dpimpute_cli::CliResult;

fn run(cli: &Cli) -> CliResult<String> {
    match &cli.command {
        Command::Simulate(a) => simulate(a, cli.threads).map(|r| to_json(&r)),
        Command::Bounds(a) => bounds(a).map(|r| to_json(&r)),
        Command::Impute(a) => impute_cmd(a).map(|r| to_json(&r)),
        Command::Query(a) => query(a).map(|r| to_json(&r)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // Help and version requests are not errors; everything else is
            // malformed input.
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("dpimpute: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
