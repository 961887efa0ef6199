use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use stark_lft::config::{parse_config, Mode};
use stark_lft::run::run;

/// Stark-effect channel solver: frame-transformation maps, irregular-solution
/// reconstruction, photoionization spectra and detector-plane maps.
#[derive(Parser)]
#[command(name = "stark-lft", version)]
struct Cli {
    /// JSON configuration file
    #[arg(long)]
    config: PathBuf,
    /// override the mode given in the config file
    #[arg(long)]
    mode: Option<String>,
    /// worker threads for energy scans (1 = fully deterministic output)
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// output directory for CSV artifacts
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", cli.config.display());
            return ExitCode::FAILURE;
        }
    };
    let mut cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    if let Some(m) = &cli.mode {
        cfg.mode = match Mode::parse(m) {
            Ok(m) => m,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::FAILURE;
            }
        };
    }
    match run(&cfg, &cli.out, cli.threads) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error [{}]: {e}", cfg.mode.name());
            ExitCode::FAILURE
        }
    }
}
