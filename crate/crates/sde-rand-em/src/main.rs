use clap::Parser;
use sde_rand_em::config::CliCommand;
use sde_rand_em::{run, RunConfig};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "sde-rand-em",
    version,
    about = "Strong-error experiments for randomised Euler-Maruyama"
)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, settings) = cli.command.split();
    let status = RunConfig::resolve(command, settings).and_then(|cfg| run(&cfg));
    match status {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
