use std::path::PathBuf;
use std::process::ExitCode;

use contact2d::cli::{self, CliError, CliOptions};

const USAGE: &str = "\
contact2d — planar contact dynamics runner

usage:
  contact2d simulate <config> [--strict-paper] [--out-dir DIR]
  contact2d sweep <config> [--strict-paper] [--out-dir DIR]
  contact2d drop-test <config> [--strict-paper] [--out-dir DIR]

simulate    run the configured scenario, write trajectory.csv
sweep       run the torque sweep, write sweep.csv and print the table
drop-test   run the bounce check, write trajectory.csv and a summary

--strict-paper  integrate positions with the pre-step velocity
--out-dir DIR   output directory (default: CONTACT2D_OUT_DIR or '.')
";

fn parse_args() -> Result<(String, PathBuf, CliOptions), CliError> {
    let mut args = std::env::args().skip(1);
    let command = args.next().ok_or_else(|| CliError::Usage(USAGE.into()))?;
    let mut config: Option<PathBuf> = None;
    let mut options = CliOptions::default();
    let mut rest = args;
    while let Some(arg) = rest.next() {
        match arg.as_str() {
            "--strict-paper" => options.strict_paper = true,
            "--out-dir" => {
                let dir = rest
                    .next()
                    .ok_or_else(|| CliError::Usage("--out-dir needs a directory".into()))?;
                options.out_dir = PathBuf::from(dir);
            }
            _ if config.is_none() && !arg.starts_with('-') => config = Some(PathBuf::from(arg)),
            other => {
                return Err(CliError::Usage(format!("unexpected argument '{other}'\n\n{USAGE}")))
            }
        }
    }
    let config = config.ok_or_else(|| CliError::Usage(USAGE.into()))?;
    Ok((command, config, options))
}

fn run() -> Result<(), CliError> {
    let (command, config, options) = parse_args()?;
    match command.as_str() {
        "simulate" => cli::cmd_simulate(&config, &options).map(|_| ()),
        "sweep" => cli::cmd_sweep(&config, &options).map(|_| ()),
        "drop-test" => cli::cmd_drop_test(&config, &options).map(|_| ()),
        other => Err(CliError::Usage(format!("unknown command '{other}'\n\n{USAGE}"))),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
