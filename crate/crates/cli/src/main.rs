use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use qreg_cli::{cmd_check, cmd_run, cmd_sweep, cmd_table, CliError, Format, Outcome, SweepSpec, EXIT_INVALID};

#[derive(Parser)]
#[command(name = "qreg", version, about = "Run quantum-register experiment files")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and report the final lab-state and probabilities.
    Run {
        file: PathBuf,
        /// Override a declared parameter, e.g. `--param phi=pi/2`.
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep one parameter over a uniform grid and write detector probabilities as CSV.
    Sweep {
        file: PathBuf,
        /// Parameter to vary.
        #[arg(long, value_name = "NAME")]
        sweep: String,
        #[arg(long, value_name = "EXPR", allow_hyphen_values = true)]
        from: String,
        #[arg(long, value_name = "EXPR", allow_hyphen_values = true)]
        to: String,
        #[arg(long)]
        steps: usize,
        /// Detector column; repeatable. Defaults to every declared detector.
        #[arg(long = "detector", value_name = "NAME")]
        detectors: Vec<String>,
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that every stage preserves inner products on its reachable domain.
    Check {
        file: PathBuf,
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the single-qubit operator product table.
    Table {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn emit(outcome: &Outcome, out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, &outcome.output).with_context(|| format!("cannot write {}", path.display())),
        None => {
            print!("{}", outcome.output);
            Ok(())
        }
    }
}

fn dispatch(command: Command) -> anyhow::Result<(Outcome, Option<PathBuf>)> {
    Ok(match command {
        Command::Run { file, params, format, out } => {
            let format = match format {
                FormatArg::Text => Format::Text,
                FormatArg::Json => Format::Json,
            };
            let text = read(&file)?;
            (cmd_run(&file.display().to_string(), &text, &params, format)?, out)
        }
        Command::Sweep {
            file,
            sweep,
            from,
            to,
            steps,
            detectors,
            params,
            out,
        } => {
            let text = read(&file)?;
            let spec = SweepSpec {
                param: &sweep,
                from: &from,
                to: &to,
                steps,
                detectors: &detectors,
            };
            (cmd_sweep(&file.display().to_string(), &text, &params, &spec)?, out)
        }
        Command::Check { file, params, out } => {
            let text = read(&file)?;
            (cmd_check(&file.display().to_string(), &text, &params)?, out)
        }
        Command::Table { out } => (cmd_table(), out),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = dispatch(cli.command).and_then(|(outcome, out)| {
        emit(&outcome, out.as_deref())?;
        Ok(outcome.code)
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            let code = err.downcast_ref::<CliError>().map_or(EXIT_INVALID, |e| e.code);
            eprintln!("error: {err:#}");
            ExitCode::from(code as u8)
        }
    }
}
