use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use limdiff::cli_io::{run, Cli, Status};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(Status::InputError.exit_code() as u8),
            };
        }
    };
    let report = run(&cli.command);
    let mut out = std::io::stdout().lock();
    // A closed pipe leaves nothing to report to.
    let _ = out.write_all(report.render(cli.json).as_bytes());
    ExitCode::from(report.exit_code() as u8)
}
