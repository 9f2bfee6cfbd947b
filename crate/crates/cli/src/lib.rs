//! Subcommand implementations behind the `qreg` binary.
//!
//! Each command returns its rendered output together with the process exit
//! code, so the binary only has to route bytes.

use std::fmt::Write as _;

use rayon::prelude::*;

use qreg_core::algebra::render_table;
use qreg_core::dsl::{eval_constant, parse_experiment, parse_override, Overrides, ParseError};
use qreg_core::{check_program, run_program, ExperimentProgram};

pub const EXIT_OK: i32 = 0;
/// Parse, validation or isometry failure.
pub const EXIT_INVALID: i32 = 1;
/// A run whose final norm drifts from one.
pub const EXIT_NORM: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

/// Rendered output plus exit code.
#[derive(Debug, PartialEq, Eq)]
pub struct Outcome {
    pub output: String,
    pub code: i32,
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

fn invalid(message: impl Into<String>) -> CliError {
    CliError {
        code: EXIT_INVALID,
        message: message.into(),
    }
}

fn located(origin: &str, err: &ParseError) -> CliError {
    let lines: Vec<String> = err.diagnostics.iter().map(|d| format!("{origin}:{d}")).collect();
    invalid(lines.join("\n"))
}

/// Collect `--param name=value` flags; a later flag for the same name wins.
pub fn parse_overrides(specs: &[String]) -> Result<Overrides, CliError> {
    let mut out = Overrides::new();
    for spec in specs {
        let (name, value) = parse_override(spec).map_err(|e| invalid(e.to_string()))?;
        out.insert(name, value);
    }
    Ok(out)
}

/// Parse experiment text; `origin` prefixes diagnostics.
pub fn load(origin: &str, text: &str, overrides: &Overrides) -> Result<ExperimentProgram, CliError> {
    parse_experiment(text, overrides).map_err(|e| located(origin, &e))
}

pub fn cmd_run(origin: &str, text: &str, params: &[String], format: Format) -> Result<Outcome, CliError> {
    let overrides = parse_overrides(params)?;
    let program = load(origin, text, &overrides)?;
    let report = run_program(&program).map_err(|e| invalid(e.to_string()))?;
    let output = match format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json(),
    };
    let code = if report.norm_ok() { EXIT_OK } else { EXIT_NORM };
    Ok(Outcome { output, code })
}

pub struct SweepSpec<'a> {
    pub param: &'a str,
    pub from: &'a str,
    pub to: &'a str,
    pub steps: usize,
    /// Empty means every declared detector.
    pub detectors: &'a [String],
}

fn real_bound(text: &str, what: &str) -> Result<f64, CliError> {
    let v = eval_constant(text).map_err(|e| invalid(format!("--{what}: {e}")))?;
    if v.im != 0.0 {
        return Err(invalid(format!("--{what} must be real, got {v}")));
    }
    Ok(v.re)
}

/// Uniform grid over `[from, to]` with both endpoints included.
pub fn grid(from: f64, to: f64, steps: usize) -> Vec<f64> {
    (0..steps)
        .map(|k| {
            if k + 1 == steps {
                to
            } else {
                from + (to - from) * (k as f64) / ((steps - 1) as f64)
            }
        })
        .collect()
}

/// CSV with header `param,<detectors>` and one row per grid point, in grid order.
pub fn cmd_sweep(origin: &str, text: &str, params: &[String], spec: &SweepSpec) -> Result<Outcome, CliError> {
    if spec.steps < 2 {
        return Err(invalid(format!("--steps must be at least 2, got {}", spec.steps)));
    }
    let from = real_bound(spec.from, "from")?;
    let to = real_bound(spec.to, "to")?;
    let mut overrides = parse_overrides(params)?;
    overrides.insert(spec.param.to_string(), from.into());
    let program = load(origin, text, &overrides)?;

    let declared: Vec<String> = program.detectors().iter().map(|d| d.name().to_string()).collect();
    let columns: Vec<String> = if spec.detectors.is_empty() {
        declared.clone()
    } else {
        spec.detectors.to_vec()
    };
    if columns.is_empty() {
        return Err(invalid("no detectors declared or requested"));
    }
    if let Some(unknown) = columns.iter().find(|c| !declared.contains(c)) {
        return Err(invalid(format!("unknown detector `{unknown}`")));
    }

    let rows: Vec<Result<String, CliError>> = grid(from, to, spec.steps)
        .into_par_iter()
        .map(|x| {
            let mut ov = overrides.clone();
            ov.insert(spec.param.to_string(), x.into());
            let program = load(origin, text, &ov)?;
            let report = run_program(&program).map_err(|e| invalid(e.to_string()))?;
            if !report.norm_ok() {
                return Err(CliError {
                    code: EXIT_NORM,
                    message: format!("{}={x}: {}", spec.param, report.warnings.join("; ")),
                });
            }
            let mut row = format!("{x}");
            for c in &columns {
                let _ = write!(row, ",{}", report.detectors[c]);
            }
            Ok(row)
        })
        .collect();

    let mut output = format!("param,{}\n", columns.join(","));
    for row in rows {
        output.push_str(&row?);
        output.push('\n');
    }
    Ok(Outcome { output, code: EXIT_OK })
}

/// Per-stage isometry report; exit code 1 if any stage fails.
pub fn cmd_check(origin: &str, text: &str, params: &[String]) -> Result<Outcome, CliError> {
    let overrides = parse_overrides(params)?;
    let program = load(origin, text, &overrides)?;
    let reports = check_program(&program).map_err(|e| invalid(e.to_string()))?;
    if reports.is_empty() {
        return Ok(Outcome {
            output: "no stages; nothing to check\n".to_string(),
            code: EXIT_OK,
        });
    }
    let width = reports.iter().map(|r| r.stage.len()).max().unwrap_or(0).max(5);
    let mut output = format!("{:<width$}  {:>6}  {:>14}  result\n", "stage", "domain", "max_deviation");
    let mut failed = false;
    for r in &reports {
        failed |= !r.passed;
        let verdict = if r.passed { "ok" } else { "FAIL" };
        let _ = writeln!(
            output,
            "{:<width$}  {:>6}  {:>14.3e}  {verdict}",
            r.stage, r.domain_size, r.max_deviation
        );
    }
    let code = if failed { EXIT_INVALID } else { EXIT_OK };
    Ok(Outcome { output, code })
}

pub fn cmd_table() -> Outcome {
    Outcome {
        output: render_table(),
        code: EXIT_OK,
    }
}
