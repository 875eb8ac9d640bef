mod args;
mod commands;
mod input;
mod output;

use std::fmt;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use serde_json::Value;

use signlab_core::ensemble::Ensemble;

use crate::args::{Cli, Command};
use crate::commands::Context;
use crate::output::{summary, Meta};

/// Anything that should end the run with exit status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<signlab_core::Error> for UsageError {
    fn from(e: signlab_core::Error) -> Self {
        UsageError(e.to_string())
    }
}

fn run(cli: &Cli) -> Result<bool, UsageError> {
    let ctx = Context {
        ensemble: Ensemble::with_cap(cli.enum_cap)?,
        seed: cli.seed,
    };
    let out = match &cli.command {
        Command::Moments(a) => commands::moments(a, &ctx),
        Command::Spectral(a) => commands::spectral(a, &ctx),
        Command::Tripnorm(a) => commands::tripnorm(a, &ctx),
        Command::Orlicz(a) => commands::orlicz(a, &ctx),
        Command::Tail(a) => commands::tail(a, &ctx),
        Command::Theorem1(a) => commands::theorem1(a, &ctx),
        Command::Integral(a) => commands::integral(a, &ctx),
        Command::Gamma(a) => commands::gamma(a, &ctx),
    }?;

    let mut config = serde_json::to_value(cli).map_err(|e| UsageError(e.to_string()))?;
    if let Value::Object(map) = &mut config {
        map.insert("resolved".into(), Value::Object(out.resolved));
    }
    let meta = Meta {
        version: env!("CARGO_PKG_VERSION"),
        subcommand: cli.command.name(),
        seed: cli.seed,
        config,
    };
    let mut records = out.records;
    let closing = summary(&records);
    let all_hold = matches!(closing.fields.first(), Some((_, output::Field::Bool(true))));
    records.push(closing);

    let stdout = io::stdout();
    let mut lock = stdout.lock();
    output::write(&mut lock, cli.format, &meta, &records)
        .and_then(|()| lock.flush())
        .map_err(|e| UsageError(format!("writing output: {e}")))?;
    Ok(all_hold)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
