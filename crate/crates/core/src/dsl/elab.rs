//! Turns a parsed file into a validated [`ExperimentProgram`].

use std::collections::BTreeSet;

use num_complex::Complex64;

use super::expr::{eval_expr, Env, ExprAst};
use super::parser::{CallAst, Entry, FileAst, Item, Spanned, TermAst, TermBody};
use super::{Diagnostic, Overrides, Position, MAX_DIAGNOSTICS, RESERVED};
use crate::catalog::{beam_splitter, pair_source, pvm_test, single_channel_map};
use crate::error::QregError;
use crate::register::{BasisIndex, CreationMonomial, RegisterShape};
use crate::rewrite::{Detector, ExperimentProgram, Stage, TransitionRule};

struct Elaborator {
    shape: RegisterShape,
    env: Env,
    diagnostics: Vec<Diagnostic>,
}

pub(super) fn elaborate(ast: &FileAst, overrides: &Overrides) -> Result<ExperimentProgram, Vec<Diagnostic>> {
    let Some((rank, rank_pos)) = ast.register else {
        return Err(Vec::new());
    };
    let shape = match RegisterShape::new(rank.min(usize::MAX as u64) as usize) {
        Ok(shape) => shape,
        Err(e) => return Err(vec![Diagnostic::error(rank_pos, e.to_string())]),
    };
    let mut el = Elaborator {
        shape,
        env: Env::new(),
        diagnostics: Vec::new(),
    };
    el.bind_params(ast, overrides);

    let mut initial = None;
    let mut stages: Vec<(Stage, Position)> = Vec::new();
    let mut detectors: Vec<(Detector, Position)> = Vec::new();
    for item in &ast.items {
        match item {
            Item::Param { .. } => {}
            Item::Init { terms, pos } => {
                if initial.is_some() {
                    el.report(*pos, "`init` given more than once");
                    continue;
                }
                initial = el.terms(terms, true);
            }
            Item::Stage { name, entries, pos } => {
                if stages.iter().any(|(s, _)| s.name() == name) {
                    el.report(*pos, format!("duplicate stage name `{name}`"));
                    continue;
                }
                if let Some(stage) = el.stage(name, entries) {
                    stages.push((stage, *pos));
                }
            }
            Item::Detect { name, qubits, pos } => {
                if detectors.iter().any(|(d, _)| d.name() == name) {
                    el.report(*pos, format!("duplicate detector name `{name}`"));
                    continue;
                }
                let Some(qubits) = qubits.iter().map(|q| el.qubit(*q)).collect::<Option<Vec<_>>>() else {
                    continue;
                };
                let det = match Detector::new(name.clone(), qubits) {
                    Ok(det) => det,
                    Err(e) => {
                        el.report(*pos, e.to_string());
                        continue;
                    }
                };
                if let Some((other, _)) = detectors.iter().find(|(d, _)| d.outcome() == det.outcome()) {
                    let msg = format!("detectors `{}` and `{name}` declare the same outcome", other.name());
                    el.report(*pos, msg);
                    continue;
                }
                detectors.push((det, *pos));
            }
        }
    }
    if !el.diagnostics.is_empty() {
        return Err(el.diagnostics);
    }
    let stages = stages.into_iter().map(|(s, _)| s).collect();
    let detectors = detectors.into_iter().map(|(d, _)| d).collect();
    ExperimentProgram::new(shape, initial.unwrap_or_default(), stages, detectors)
        .map_err(|e| vec![Diagnostic::error(rank_pos, e.to_string())])
}

impl Elaborator {
    fn report(&mut self, pos: Position, message: impl Into<String>) {
        if self.diagnostics.len() < MAX_DIAGNOSTICS {
            self.diagnostics.push(Diagnostic::error(pos, message));
        }
    }

    fn bind_params(&mut self, ast: &FileAst, overrides: &Overrides) {
        let declared: BTreeSet<&str> = ast
            .items
            .iter()
            .filter_map(|item| match item {
                Item::Param { name, .. } => Some(name.as_str()),
                _ => None,
            })
            .collect();
        for name in overrides.keys() {
            if !declared.contains(name.as_str()) {
                self.report(Position::COMMAND_LINE, format!("override for undeclared parameter `{name}`"));
            }
        }
        let mut seen = BTreeSet::new();
        for item in &ast.items {
            let Item::Param { name, expr, pos } = item else {
                continue;
            };
            if RESERVED.contains(&name.as_str()) {
                self.report(*pos, format!("`{name}` is reserved and cannot name a parameter"));
                continue;
            }
            if !seen.insert(name.clone()) {
                self.report(*pos, format!("parameter `{name}` declared twice"));
                continue;
            }
            let value = match overrides.get(name) {
                Some(&v) => Some(v),
                None => self.eval(expr),
            };
            if let Some(v) = value {
                self.env.insert(name.clone(), v);
            }
        }
    }

    fn eval(&mut self, expr: &ExprAst) -> Option<Complex64> {
        match eval_expr(expr, &self.env) {
            Ok(v) => Some(v),
            Err(e) => {
                self.report(e.pos, e.kind.to_string());
                None
            }
        }
    }

    fn qubit(&mut self, (index, pos): Spanned<u64>) -> Option<usize> {
        let rank = self.shape.rank();
        if index >= rank as u64 {
            self.report(pos, format!("qubit index {index} out of range for rank-{rank} register"));
            None
        } else {
            Some(index as usize)
        }
    }

    fn term(&mut self, term: &TermAst, allow_ket: bool) -> Option<(Complex64, CreationMonomial)> {
        let coeff = match &term.coeff {
            Some(e) => self.eval(e),
            None => Some(Complex64::new(1.0, 0.0)),
        };
        let monomial = match &term.body {
            TermBody::Mono(qubits) => {
                let qubits: Option<Vec<usize>> = qubits.iter().map(|q| self.qubit(*q)).collect();
                match CreationMonomial::new(qubits?) {
                    Ok(m) => Some(m),
                    Err(e) => {
                        self.report(term.pos, e.to_string());
                        None
                    }
                }
            }
            TermBody::Ket(text) if allow_ket => match BasisIndex::parse_ket(text, self.shape) {
                Ok(index) => Some(CreationMonomial::new(index.occupied()).expect("distinct bits")),
                Err(e) => {
                    self.report(term.pos, e.to_string());
                    None
                }
            },
            TermBody::Ket(_) => {
                self.report(term.pos, "ket literals are only allowed in `init`");
                None
            }
        };
        Some((coeff?, monomial?))
    }

    fn terms(&mut self, terms: &[TermAst], allow_ket: bool) -> Option<Vec<(Complex64, CreationMonomial)>> {
        let out: Vec<_> = terms.iter().map(|t| self.term(t, allow_ket)).collect();
        out.into_iter().collect()
    }

    fn stage(&mut self, name: &str, entries: &[Entry]) -> Option<Stage> {
        let mut rules: Vec<(TransitionRule, Position)> = Vec::new();
        let mut ok = true;
        for entry in entries {
            match self.entry(entry) {
                Some(built) => rules.extend(built),
                None => ok = false,
            }
        }
        if !ok {
            return None;
        }
        let positions: Vec<(usize, Position)> = rules.iter().map(|(r, p)| (r.source(), *p)).collect();
        match Stage::new(name, rules.into_iter().map(|(r, _)| r).collect()) {
            Ok(stage) => Some(stage),
            Err(e) => {
                let pos = match &e {
                    QregError::DuplicateSource { source_qubit, .. } => positions
                        .iter()
                        .filter(|(s, _)| s == source_qubit)
                        .nth(1)
                        .map(|(_, p)| *p),
                    QregError::FeedsSource { from, .. } => {
                        positions.iter().find(|(s, _)| s == from).map(|(_, p)| *p)
                    }
                    _ => None,
                };
                self.report(pos.unwrap_or(positions[0].1), e.to_string());
                None
            }
        }
    }

    fn entry(&mut self, entry: &Entry) -> Option<Vec<(TransitionRule, Position)>> {
        match entry {
            Entry::Rule { source, terms, pos } => {
                let src = self.qubit(*source);
                let targets = self.terms(terms, false)?;
                match TransitionRule::new(src?, targets) {
                    Ok(rule) => Some(vec![(rule, *pos)]),
                    Err(e) => {
                        self.report(*pos, e.to_string());
                        None
                    }
                }
            }
            Entry::Call { call, pos } => {
                let stage = self.call(call, *pos)?;
                match stage {
                    Ok(stage) => Some(stage.into_rules().into_iter().map(|r| (r, *pos)).collect()),
                    Err(e) => {
                        self.report(*pos, e.to_string());
                        None
                    }
                }
            }
        }
    }

    /// `None` when an argument already produced a diagnostic.
    fn call(&mut self, call: &CallAst, pos: Position) -> Option<Result<Stage, QregError>> {
        match call {
            CallAst::Pvm { src, terms } => {
                let src = self.qubit(*src);
                let terms = self.terms(terms, false)?;
                let mut outs = Vec::new();
                let mut amps = Vec::new();
                for (c, m) in terms {
                    if m.len() != 1 {
                        self.report(pos, format!("pvm outcome `{m}` must be a single creation operator"));
                        return None;
                    }
                    outs.push(m.indices()[0]);
                    amps.push(c);
                }
                Some(pvm_test(src?, &outs, &amps))
            }
            CallAst::Pair { src, terms } => {
                let src = self.qubit(*src);
                let terms = self.terms(terms, false)?;
                let mut pairs = Vec::new();
                for (c, m) in terms {
                    if m.len() != 2 {
                        self.report(pos, format!("pair term `{m}` must create exactly two qubits"));
                        return None;
                    }
                    pairs.push((c, (m.indices()[0], m.indices()[1])));
                }
                Some(pair_source(src?, &pairs))
            }
            CallAst::Map { src, dst, factor } => {
                let src = self.qubit(*src);
                let dst = self.qubit(*dst);
                let factor = self.eval(factor);
                Some(single_channel_map(src?, dst?, factor?))
            }
            CallAst::Bs { ports, a, b, eta } => {
                let q: Vec<Option<usize>> = ports.iter().map(|p| self.qubit(*p)).collect();
                let (a, b) = (self.eval(a), self.eval(b));
                let eta_value = self.eval(eta);
                let q: Vec<usize> = q.into_iter().collect::<Option<_>>()?;
                let eta_value = eta_value?;
                if eta_value.im != 0.0 {
                    self.report(eta.pos, format!("bs phase must be real, got {eta_value}"));
                    return None;
                }
                Some(beam_splitter(q[0], q[1], q[2], q[3], a?, b?, eta_value.re))
            }
        }
    }
}
