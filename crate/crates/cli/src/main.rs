use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use fkp_cli::{exit_code, parse_config, run, Subcommand};

/// Fractional KP spectral lab.
#[derive(Debug, Parser)]
#[command(name = "fkp", version)]
struct Args {
    /// What to run.
    #[arg(value_enum)]
    subcommand: Subcommand,
    /// Config file with one `key=value` per line.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// `key=value` overrides applied after the config file.
    overrides: Vec<String>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = parse_config(args.subcommand, args.config.as_deref(), &args.overrides).and_then(|cfg| run(&cfg));
    match result {
        Ok(manifest) => {
            if args.subcommand != Subcommand::Verify {
                println!("{}: {}", manifest.subcommand, manifest.status);
                for f in &manifest.files {
                    println!("  {}  {}", f.sha256, f.path);
                }
            }
            ExitCode::from(exit_code(&manifest) as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
