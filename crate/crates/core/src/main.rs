use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use qbattery::config::{run, RunConfig};
use qbattery::Error;

/// Dual-cavity quantum battery charging simulator.
///
/// Every config key can be overridden with `--<section>-<key> <value>`,
/// e.g. `--model-n_a 5 --experiment-kind trace`.
#[derive(Parser, Debug)]
#[command(name = "qbattery", version)]
struct Cli {
    /// Config file (`key = value` lines under `[section]` headers).
    #[arg(short, long)]
    config: Option<PathBuf>,

    /// Overrides in the form `--section-key value`.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "OVERRIDES")]
    overrides: Vec<String>,
}

fn fail(e: &Error) -> ExitCode {
    let msg = e.to_string().replace('"', "'");
    eprintln!("error kind={} code={} msg=\"{}\"", e.kind(), e.exit_code(), msg);
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let text = match &cli.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                let err = Error::Validation {
                    key: "config".into(),
                    message: format!("cannot read {}: {e}", path.display()),
                };
                return fail(&err);
            }
        },
        None => String::new(),
    };
    let config = match RunConfig::from_sources(&text, &cli.overrides) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    match run(&config) {
        Ok(outcome) => {
            for note in &outcome.notes {
                println!("{note}");
            }
            println!("wrote {}", outcome.csv.display());
            println!("wrote {}", outcome.manifest.display());
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}
