mod args;
mod commands;
mod config;
mod error;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use config::Settings;
use error::CliError;

fn run(cli: &Cli) -> Result<(String, bool), CliError> {
    let s = Settings::resolve(cli)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(s.jobs)
        .build()
        .map_err(|e| CliError::Input(format!("worker pool: {e}")))?;
    pool.install(|| {
        let (report, ok) = match &cli.command {
            Command::Constants(pt) => (commands::constants(pt)?, true),
            Command::Verify(a) => commands::verify(a, &s)?,
            Command::Spectrum { point, kmax } => (commands::spectrum(point, *kmax, &s)?, true),
            Command::RegionMap(a) => (commands::region_map(a, &s)?, true),
            Command::Minimize(a) => (commands::minimize(a, &s)?, true),
        };
        Ok((report.render(s.format), ok))
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((text, ok)) => {
            print!("{text}");
            let _ = std::io::stdout().flush();
            ExitCode::from(if ok { 0 } else { 1 })
        }
        Err(e) => {
            let doc = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
            eprintln!("{doc}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
