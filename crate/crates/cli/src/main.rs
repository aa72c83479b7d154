mod args;
mod error;
mod output;
mod record;
mod run;

use std::io::Write;
use std::process::ExitCode;

use chrono::Utc;
use clap::Parser;
use serde_json::json;

use args::{Cli, Command};
use error::CliError;
use record::RunRecord;

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("LACSUM_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Usage(format!("LACSUM_THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("LACSUM_THREADS: {e}")))
}

fn replay(path: &std::path::Path) -> Result<String, CliError> {
    let rec = RunRecord::load(path)?;
    let out = run::execute(&rec.config, false)?;
    let matches = out.payload == rec.payload;
    let summary = json!({
        "schema": 1,
        "run": path.display().to_string(),
        "command": rec.config.name(),
        "matches": matches,
    });
    if matches {
        Ok(output::to_json(&summary))
    } else {
        println!("{}", output::to_json(&summary));
        Err(CliError::Mismatch)
    }
}

fn run(cli: Cli) -> Result<String, CliError> {
    configure_threads()?;
    let mut config = cli.command;
    if let Command::Replay(a) = &config {
        return replay(&a.run);
    }
    let seeds = run::resolve(&mut config)?;
    let started = Utc::now();
    let out = run::execute(&config, true)?;
    let finished = Utc::now();
    if !cli.no_record {
        let argv = std::env::args().collect();
        let rec = RunRecord::new(argv, config, seeds, started, finished, out.payload);
        rec.write(&cli.runs_dir, &started)?;
    }
    Ok(out.stdout)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(text) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(text.as_bytes());
            if !text.ends_with('\n') {
                let _ = stdout.write_all(b"\n");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            if !matches!(e, CliError::Mismatch) {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
