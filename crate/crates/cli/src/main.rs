use std::io;
use std::process::ExitCode;

use clap::Parser;
use nfr_cli::{commands, Cli};

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::from_default_env())
        .with_writer(io::stderr)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // clap picks 0 for --help/--version and 2 for usage errors
        Err(e) => e.exit(),
    };
    let stdin = io::stdin();
    let status = commands::run(cli, &mut stdin.lock(), &mut io::stdout(), &mut io::stderr());
    ExitCode::from(status.code() as u8)
}
