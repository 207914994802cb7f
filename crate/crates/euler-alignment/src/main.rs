use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use euler_alignment::config::{parse_config, RunConfig};
use euler_alignment::experiment::{
    classify_experiment, convergence_study, presets_catalog, resolve_output_dir, run_experiment,
};
use euler_alignment::output;
use euler_alignment::timestep::RunOutcome;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "euler-alignment",
    version,
    about = "Finite-volume solver for the controlled pressureless Euler alignment system"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configured experiment and write snapshots, diagnostics, and a summary
    Run { config: PathBuf },
    /// Classify configured initial data against the critical thresholds
    Classify { config: PathBuf },
    /// List the named initial-data and reference-velocity presets
    Presets,
    /// Self-convergence study of the configured problem over doubling resolutions
    Convergence { config: PathBuf },
}

fn load(path: &Path) -> Result<RunConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    parse_config(&text).map_err(|e| e.to_string())
}

fn dispatch(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Run { config } => {
            let cfg = load(&config)?;
            let report = run_experiment(&cfg).map_err(|e| e.to_string())?;
            let summary =
                std::fs::read_to_string(&report.summary_path).map_err(|e| e.to_string())?;
            print!("{summary}");
            println!("output_dir = {}", report.output_dir.display());
            match report.result.outcome {
                RunOutcome::Completed => Ok(ExitCode::SUCCESS),
                RunOutcome::Diverged(_) => Ok(ExitCode::from(2)),
            }
        }
        Command::Classify { config } => {
            let cfg = load(&config)?;
            let report = classify_experiment(&cfg).map_err(|e| e.to_string())?;
            print!("{}", report.text);
            println!("output_dir = {}", report.output_dir.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Presets => {
            print!("{}", presets_catalog());
            Ok(ExitCode::SUCCESS)
        }
        Command::Convergence { config } => {
            let cfg = load(&config)?;
            let table = convergence_study(&cfg).map_err(|e| e.to_string())?;
            print!("{}", table.render());
            let dir = resolve_output_dir(&cfg);
            std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
            let path = output::write_text(&dir, "eoc.csv", &table.to_csv())
                .map_err(|e| e.to_string())?;
            println!("wrote {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
