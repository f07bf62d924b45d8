use clap::Parser;
use sncontrol::cli::{run_scenario, Command, ScenarioConfig, EXIT_CONFIG, EXIT_NUMERICAL};
use std::path::PathBuf;
use std::process::ExitCode;

/// Stackelberg–Nash null-control experiments.
#[derive(Debug, Parser)]
#[command(version, about)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Scenario file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for artifacts and the manifest; defaults to the
    /// scenario's `output` key.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the seed from the scenario file.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.config.display());
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    let mut cfg = match ScenarioConfig::from_toml(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let Some(out) = args.out.or_else(|| cfg.output.as_ref().map(PathBuf::from)) else {
        eprintln!("error: no output directory: pass --out or set `output` in the scenario");
        return ExitCode::from(EXIT_CONFIG as u8);
    };
    match run_scenario(&cfg, args.command, &out) {
        Ok(m) => {
            for c in &m.checks {
                println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            if let Some(e) = &m.error {
                eprintln!("error: {e}");
            }
            ExitCode::from(m.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { EXIT_CONFIG } else { EXIT_NUMERICAL } as u8)
        }
    }
}
