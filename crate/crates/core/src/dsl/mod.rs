//! The `.qreg` experiment language.
//!
//! ```text
//! register 3
//! param alpha = 0.6
//! param beta  = sqrt(1 - alpha^2)
//! init A+0
//! stage sg {
//!   A+0 -> (alpha) A+1 + (beta) A+2
//! }
//! detect up = 1
//! detect down = 2
//! ```

mod elab;
mod expr;
mod lexer;
mod parser;

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use num_complex::Complex64;

use crate::register::CreationMonomial;
use crate::rewrite::ExperimentProgram;

pub use expr::{eval_expr, BinOp, Env, EvalError, EvalErrorKind, ExprAst, ExprKind, Func};

/// Stop collecting diagnostics after this many.
pub const MAX_DIAGNOSTICS: usize = 20;

/// Names that cannot be declared with `param`.
pub const RESERVED: [&str; 18] = [
    "i", "pi", "A", "exp", "cos", "sin", "tan", "sqrt", "conj", "register", "param", "init", "stage", "detect",
    "pvm", "bs", "map", "pair",
];

pub type Overrides = BTreeMap<String, Complex64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl Position {
    /// Diagnostics about `--param` overrides.
    pub const COMMAND_LINE: Position = Position { line: 0, column: 0 };
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == Position::COMMAND_LINE {
            f.write_str("<command line>")
        } else {
            write!(f, "{}:{}", self.line, self.column)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub pos: Position,
    pub message: String,
    pub severity: Severity,
}

impl Diagnostic {
    pub fn error(pos: Position, message: impl Into<String>) -> Self {
        Self {
            pos,
            message: message.into(),
            severity: Severity::Error,
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}: {level}: {}", self.pos, self.message)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub diagnostics: Vec<Diagnostic>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.diagnostics.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

fn sorted(mut diagnostics: Vec<Diagnostic>) -> ParseError {
    diagnostics.sort_by_key(|d| d.pos);
    diagnostics.truncate(MAX_DIAGNOSTICS);
    ParseError { diagnostics }
}

/// Parse and validate an experiment, with `overrides` replacing declared parameter values.
pub fn parse_experiment(text: &str, overrides: &Overrides) -> Result<ExperimentProgram, ParseError> {
    let (tokens, mut diagnostics) = lexer::tokenize(text);
    let mut p = parser::Parser::new(&tokens);
    let ast = p.parse_file();
    diagnostics.append(&mut p.diagnostics);
    if !diagnostics.is_empty() {
        return Err(sorted(diagnostics));
    }
    elab::elaborate(&ast, overrides).map_err(sorted)
}

/// Parse a standalone expression such as `pi/4`.
pub fn parse_expr(text: &str) -> Result<ExprAst, ParseError> {
    let (tokens, diagnostics) = lexer::tokenize(text);
    if !diagnostics.is_empty() {
        return Err(sorted(diagnostics));
    }
    let mut p = parser::Parser::new(&tokens);
    let ast = p.parse_expr().and_then(|ast| p.expect_end().map(|_| ast));
    ast.map_err(|d| sorted(vec![d]))
}

/// Evaluate a parameter-free expression.
pub fn eval_constant(text: &str) -> Result<Complex64, ParseError> {
    let ast = parse_expr(text)?;
    eval_expr(&ast, &Env::new()).map_err(|e| sorted(vec![Diagnostic::error(e.pos, e.kind.to_string())]))
}

/// Parse a `name=expr` command-line override; the expression may not reference parameters.
pub fn parse_override(spec: &str) -> Result<(String, Complex64), ParseError> {
    let at = |msg: String| sorted(vec![Diagnostic::error(Position::COMMAND_LINE, msg)]);
    let (name, value) = spec
        .split_once('=')
        .ok_or_else(|| at(format!("override `{spec}` is not of the form name=value")))?;
    let name = name.trim();
    let valid = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if !valid {
        return Err(at(format!("`{name}` is not a parameter name")));
    }
    let value = eval_constant(value).map_err(|e| at(format!("override `{name}`: {e}")))?;
    Ok((name.to_string(), value))
}

fn coefficient(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("({:?})", c.re)
    } else {
        format!("({:?} + {:?}*i)", c.re, c.im)
    }
}

fn term(c: Complex64, m: &CreationMonomial) -> String {
    let body = if m.is_empty() {
        "|0)".to_string()
    } else {
        m.indices().iter().map(|q| format!("A+{q}")).collect::<Vec<_>>().join(" ")
    };
    if c == Complex64::new(1.0, 0.0) {
        body
    } else {
        format!("{} {body}", coefficient(c))
    }
}

fn terms(targets: &[(Complex64, CreationMonomial)]) -> String {
    targets.iter().map(|(c, m)| term(*c, m)).collect::<Vec<_>>().join(" + ")
}

/// Render a program as source text that parses back to an equal program.
///
/// Catalog calls are expanded into explicit rules; coefficients are written
/// as exact decimal literals.
pub fn print_program(program: &ExperimentProgram) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "register {}", program.shape().rank());
    if !program.initial().is_empty() {
        let _ = writeln!(out, "init {}", terms(program.initial()));
    }
    for stage in program.stages() {
        let _ = writeln!(out, "stage {} {{", stage.name());
        for rule in stage.rules() {
            let _ = writeln!(out, "  A+{} -> {}", rule.source(), terms(rule.targets()));
        }
        out.push_str("}\n");
    }
    for det in program.detectors() {
        let qubits: Vec<String> = det.qubits().iter().map(|q| q.to_string()).collect();
        let _ = writeln!(out, "detect {} = {}", det.name(), qubits.join(" "));
    }
    out
}
