use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use wvdeflect_cli::scenario::parse_override;
use wvdeflect_cli::{run_scenario, RunOptions, Scenario};

/// Weak-value deflection scenarios: writes CSV datasets and a JSON manifest.
#[derive(Debug, Parser)]
#[command(name = "wvdeflect", version)]
struct Args {
    #[arg(value_enum)]
    scenario: Scenario,

    /// Parameter file (TOML). Falls back to the built-in defaults.
    #[arg(long, env = "WVDEFLECT_CONFIG")]
    config: Option<PathBuf>,

    /// Patch one parameter, e.g. `--set beam.alpha=0.1`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", value_parser = parse_set)]
    overrides: Vec<(String, String)>,

    /// Output directory [default: out/<scenario>]
    #[arg(long)]
    out: Option<PathBuf>,

    /// Proceed even if the regime assumptions fail.
    #[arg(long)]
    force: bool,

    /// Cross-check closed forms against the grid oracle after the scenario.
    #[arg(long)]
    self_check: bool,
}

fn parse_set(s: &str) -> Result<(String, String), String> {
    parse_override(s).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let args = Args::parse();
    let out_dir = args
        .out
        .unwrap_or_else(|| PathBuf::from("out").join(args.scenario.name()));
    let opts = RunOptions {
        scenario: args.scenario,
        config: args.config,
        overrides: args.overrides,
        out_dir,
        force: args.force,
        self_check: args.self_check,
    };
    match run_scenario(&opts) {
        Ok(outcome) => {
            for f in &outcome.manifest.files {
                println!("{}  {}", f.sha256, outcome.out_dir.join(&f.path).display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("wvdeflect: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
