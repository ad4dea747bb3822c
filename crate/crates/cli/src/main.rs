mod args;
mod commands;
mod failure;
mod render;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::{with_config, Cli, Command};
use commands::Output;
use failure::Failure;

fn run(cli: &Cli) -> Result<(), Failure> {
    let config = cli.config.as_deref();
    let output = match &cli.command {
        Command::Spectrum(a) => commands::spectrum(&with_config(a, config)?)?,
        Command::Simulate(a) => commands::simulate_cmd(&with_config(a, config)?)?,
        Command::Estimate(a) => commands::estimate(&with_config(a, config)?)?,
        Command::Coverage(a) => commands::coverage(&with_config(a, config)?)?,
        Command::Family(a) => commands::family(&with_config(a, config)?)?,
    };
    let value = match output {
        Output::Trajectory(traj) => return commands::write_trajectory_to(&traj, cli.out.as_deref()),
        Output::Json(value) => value,
    };
    let text = if cli.table {
        render::table(&value)
    } else if cli.csv {
        render::csv(&value)
    } else {
        format!("{}\n", serde_json::to_string_pretty(&value).expect("JSON values serialize"))
    };
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
