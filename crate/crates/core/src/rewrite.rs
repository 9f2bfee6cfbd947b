//! Transition rules, stages and experiment programs.
//!
//! A rule replaces the creation operator of its source qubit by a weighted
//! sum of creation monomials. A stage is a set of rules applied
//! simultaneously; a program folds its stages over an initial lab-state.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_complex::Complex64;

use crate::error::{QregError, Result};
use crate::register::{BasisIndex, CreationMonomial, RegisterShape, SparseState, MAX_RANK};
use crate::report::RunReport;

/// Allowed deviation of an image Gram matrix from the identity.
pub const ISOMETRY_TOLERANCE: f64 = 1e-10;

/// `A+_source -> Σ coeff · monomial`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionRule {
    source: usize,
    targets: Vec<(Complex64, CreationMonomial)>,
}

impl TransitionRule {
    /// Repeated monomials are merged by adding their coefficients.
    pub fn new(
        source: usize,
        targets: impl IntoIterator<Item = (Complex64, CreationMonomial)>,
    ) -> Result<Self> {
        if source >= MAX_RANK {
            return Err(QregError::QubitOutOfRange {
                index: source,
                rank: MAX_RANK,
            });
        }
        let mut merged: Vec<(Complex64, CreationMonomial)> = Vec::new();
        for (coeff, monomial) in targets {
            if monomial.contains(source) {
                return Err(QregError::SelfTarget(source));
            }
            match merged.iter_mut().find(|(_, m)| *m == monomial) {
                Some((c, _)) => *c += coeff,
                None => merged.push((coeff, monomial)),
            }
        }
        if merged.is_empty() {
            return Err(QregError::EmptyRule(source));
        }
        Ok(Self {
            source,
            targets: merged,
        })
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn targets(&self) -> &[(Complex64, CreationMonomial)] {
        &self.targets
    }

    pub fn check(&self, shape: RegisterShape) -> Result<()> {
        shape.check_qubit(self.source)?;
        self.targets.iter().try_for_each(|(_, m)| m.check(shape))
    }

    fn target_mask(&self) -> u64 {
        self.targets.iter().fold(0, |acc, (_, m)| acc | m.mask())
    }
}

/// Rules that act simultaneously.
///
/// Sources are pairwise distinct and no target touches any source of the
/// same stage, so every application order gives the same result.
#[derive(Clone, Debug, PartialEq)]
pub struct Stage {
    name: String,
    rules: Vec<TransitionRule>,
}

impl Stage {
    pub fn new(name: impl Into<String>, rules: Vec<TransitionRule>) -> Result<Self> {
        let name = name.into();
        let mut sources = BTreeSet::new();
        for rule in &rules {
            if !sources.insert(rule.source) {
                return Err(QregError::DuplicateSource {
                    stage: name,
                    source_qubit: rule.source,
                });
            }
        }
        for rule in &rules {
            let touched = rule.target_mask();
            if let Some(&into) = sources.iter().find(|&&s| s < 64 && (touched >> s) & 1 == 1) {
                return Err(QregError::FeedsSource {
                    stage: name,
                    from: rule.source,
                    into,
                });
            }
        }
        Ok(Self { name, rules })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rules(&self) -> &[TransitionRule] {
        &self.rules
    }

    pub fn into_rules(self) -> Vec<TransitionRule> {
        self.rules
    }

    pub fn renamed(self, name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ..self
        }
    }

    pub fn sources(&self) -> impl Iterator<Item = usize> + '_ {
        self.rules.iter().map(|r| r.source)
    }

    pub fn rule_for(&self, source: usize) -> Option<&TransitionRule> {
        self.rules.iter().find(|r| r.source == source)
    }

    pub fn check(&self, shape: RegisterShape) -> Result<()> {
        self.rules.iter().try_for_each(|r| r.check(shape))
    }

    fn source_mask(&self) -> u64 {
        self.rules.iter().fold(0, |acc, r| acc | (1 << r.source))
    }

    /// Image of a bare monomial under this stage, with nilpotent products dropped.
    pub fn substitute_monomial(&self, monomial: &CreationMonomial) -> Vec<(Complex64, CreationMonomial)> {
        let mut partial = vec![(Complex64::new(1.0, 0.0), 0u64)];
        for &q in monomial.indices() {
            partial = match self.rule_for(q) {
                Some(rule) => expand(&partial, rule.targets()),
                None => expand(&partial, &[(Complex64::new(1.0, 0.0), single(q))]),
            };
        }
        let mut acc: BTreeMap<u64, Complex64> = BTreeMap::new();
        for (c, mask) in partial {
            *acc.entry(mask).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        acc.into_iter()
            .map(|(mask, c)| (c, mask_monomial(mask)))
            .collect()
    }
}

fn single(q: usize) -> CreationMonomial {
    CreationMonomial::single(q).expect("qubit index validated by the caller")
}

fn mask_monomial(mask: u64) -> CreationMonomial {
    CreationMonomial::new(BasisIndex(mask).occupied()).expect("distinct bits")
}

fn expand(partial: &[(Complex64, u64)], targets: &[(Complex64, CreationMonomial)]) -> Vec<(Complex64, u64)> {
    let mut out = Vec::with_capacity(partial.len() * targets.len());
    for &(a, mask) in partial {
        for (c, m) in targets {
            let tm = m.mask();
            if mask & tm == 0 {
                out.push((a * c, mask | tm));
            }
        }
    }
    out
}

fn collect(shape: RegisterShape, acc: BTreeMap<u64, Complex64>) -> Result<SparseState> {
    SparseState::from_terms(shape, acc.into_iter().map(|(k, v)| (BasisIndex(k), v)))
}

/// Substitute one rule into every term that occupies its source.
pub fn apply_rule(state: &SparseState, rule: &TransitionRule) -> Result<SparseState> {
    rule.check(state.shape())?;
    let bit = 1u64 << rule.source;
    let mut acc: BTreeMap<u64, Complex64> = BTreeMap::new();
    for (index, amp) in state.terms() {
        if index.0 & bit == 0 {
            *acc.entry(index.0).or_insert(Complex64::new(0.0, 0.0)) += amp;
            continue;
        }
        let cleared = index.0 & !bit;
        for (c, m) in rule.targets() {
            let tm = m.mask();
            if cleared & tm == 0 {
                *acc.entry(cleared | tm).or_insert(Complex64::new(0.0, 0.0)) += amp * c;
            }
        }
    }
    collect(state.shape(), acc)
}

/// Substitute every rule of `stage` at once.
pub fn apply_stage(state: &SparseState, stage: &Stage) -> Result<SparseState> {
    stage.check(state.shape())?;
    let sources = stage.source_mask();
    let mut acc: BTreeMap<u64, Complex64> = BTreeMap::new();
    for (index, amp) in state.terms() {
        let mut partial = vec![(amp, index.0 & !sources)];
        if index.0 & sources != 0 {
            for rule in stage.rules() {
                if index.is_set(rule.source) {
                    partial = expand(&partial, rule.targets());
                }
            }
        }
        for (c, mask) in partial {
            *acc.entry(mask).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
    }
    collect(state.shape(), acc)
}

/// Single stage equivalent to running `first` then `second`.
///
/// Each rule of `first` has `second` substituted into its targets; rules of
/// `second` for other sources are kept. The result agrees with sequential
/// application on states whose terms never route two excitations to the same
/// qubit, which covers rank-one lab-states.
pub fn compose_stages(first: &Stage, second: &Stage, name: impl Into<String>) -> Result<Stage> {
    let mut rules = Vec::new();
    for rule in first.rules() {
        if second.rule_for(rule.source).is_some() {
            return Err(QregError::Composition(format!(
                "qubit {} is a source in both `{}` and `{}`",
                rule.source,
                first.name(),
                second.name()
            )));
        }
        let mut targets = Vec::new();
        for (c, m) in rule.targets() {
            for (d, image) in second.substitute_monomial(m) {
                targets.push((c * d, image));
            }
        }
        rules.push(TransitionRule::new(rule.source, targets)?);
    }
    rules.extend(second.rules().iter().cloned());
    Stage::new(name, rules)
}

/// A named exclusive coincidence outcome: exactly these qubits fire.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Detector {
    name: String,
    qubits: Vec<usize>,
}

impl Detector {
    pub fn new(name: impl Into<String>, qubits: Vec<usize>) -> Result<Self> {
        let name = name.into();
        let distinct: BTreeSet<usize> = qubits.iter().copied().collect();
        if qubits.is_empty() || distinct.len() != qubits.len() {
            return Err(QregError::InvalidDetector(name));
        }
        Ok(Self { name, qubits })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn outcome(&self) -> BasisIndex {
        BasisIndex::from_qubits(self.qubits.iter().copied())
    }
}

/// Register shape, initial lab-state, ordered stages and detector outcomes.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentProgram {
    shape: RegisterShape,
    initial: Vec<(Complex64, CreationMonomial)>,
    stages: Vec<Stage>,
    detectors: Vec<Detector>,
}

impl ExperimentProgram {
    /// An empty `initial` list denotes the void state.
    pub fn new(
        shape: RegisterShape,
        initial: Vec<(Complex64, CreationMonomial)>,
        stages: Vec<Stage>,
        detectors: Vec<Detector>,
    ) -> Result<Self> {
        for (_, m) in &initial {
            m.check(shape)?;
        }
        let mut names = BTreeSet::new();
        for stage in &stages {
            stage.check(shape)?;
            if !names.insert(stage.name()) {
                return Err(QregError::DuplicateStage(stage.name().to_string()));
            }
        }
        let mut seen: BTreeMap<&str, BasisIndex> = BTreeMap::new();
        for det in &detectors {
            det.qubits.iter().try_for_each(|&q| shape.check_qubit(q))?;
            if seen.contains_key(det.name()) {
                return Err(QregError::DuplicateDetector(det.name.clone()));
            }
            if let Some((other, _)) = seen.iter().find(|(_, &o)| o == det.outcome()) {
                return Err(QregError::DuplicateOutcome(other.to_string(), det.name.clone()));
            }
            seen.insert(det.name(), det.outcome());
        }
        Ok(Self {
            shape,
            initial,
            stages,
            detectors,
        })
    }

    pub fn shape(&self) -> RegisterShape {
        self.shape
    }

    pub fn initial(&self) -> &[(Complex64, CreationMonomial)] {
        &self.initial
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn detectors(&self) -> &[Detector] {
        &self.detectors
    }

    pub fn with_stages(&self, stages: Vec<Stage>) -> Result<Self> {
        Self::new(self.shape, self.initial.clone(), stages, self.detectors.clone())
    }

    pub fn initial_state(&self) -> Result<SparseState> {
        let void = SparseState::void(self.shape);
        if self.initial.is_empty() {
            return Ok(void);
        }
        let mut state = SparseState::zero(self.shape);
        for (c, m) in &self.initial {
            state = state.add(&void.apply_monomial(m)?.scale(*c))?;
        }
        Ok(state)
    }

    /// Lab-state entering each stage, followed by the final state.
    pub fn trajectory(&self) -> Result<Vec<SparseState>> {
        let mut states = vec![self.initial_state()?];
        for stage in &self.stages {
            let next = apply_stage(states.last().expect("nonempty"), stage)?;
            states.push(next);
        }
        Ok(states)
    }

    pub fn final_state(&self) -> Result<SparseState> {
        Ok(self.trajectory()?.pop().expect("nonempty"))
    }

    /// Basis states each stage must map isometrically: the void, one
    /// excitation on each source, and the support of the reachable state
    /// entering the stage.
    pub fn isometry_domains(&self) -> Result<Vec<Vec<BasisIndex>>> {
        let trajectory = self.trajectory()?;
        Ok(self
            .stages
            .iter()
            .zip(&trajectory)
            .map(|(stage, entering)| {
                let mut domain: BTreeSet<BasisIndex> = BTreeSet::new();
                domain.insert(BasisIndex::VOID);
                domain.extend(stage.sources().map(|s| BasisIndex::from_qubits([s])));
                domain.extend(entering.support());
                domain.into_iter().collect()
            })
            .collect())
    }
}

/// Run every stage from the initial state and evaluate the Born rule.
///
/// A final state whose norm drifts from one is reported through
/// `warnings` and carries no probabilities.
pub fn run_program(program: &ExperimentProgram) -> Result<RunReport> {
    let final_state = program.final_state()?;
    Ok(RunReport::from_final_state(program, final_state))
}

#[derive(Clone, Debug, PartialEq)]
pub struct IsometryReport {
    pub stage: String,
    pub passed: bool,
    pub max_deviation: f64,
    pub domain_size: usize,
}

/// Compare inner products of the images of `domain` with those of the
/// originals (the identity matrix).
pub fn check_isometry(stage: &Stage, shape: RegisterShape, domain: &[BasisIndex]) -> Result<IsometryReport> {
    let domain: Vec<BasisIndex> = domain.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let mut images = Vec::with_capacity(domain.len());
    for &index in &domain {
        images.push(apply_stage(&SparseState::basis(shape, index)?, stage)?);
    }
    // Only pairs whose images share a basis state can overlap.
    let mut buckets: HashMap<u64, Vec<(usize, Complex64)>> = HashMap::new();
    for (i, image) in images.iter().enumerate() {
        for (k, amp) in image.terms() {
            buckets.entry(k.0).or_default().push((i, amp));
        }
    }
    let mut gram: HashMap<(usize, usize), Complex64> = HashMap::new();
    for entries in buckets.values() {
        for &(i, a) in entries {
            for &(j, b) in entries {
                if i <= j {
                    *gram.entry((i, j)).or_insert(Complex64::new(0.0, 0.0)) += a.conj() * b;
                }
            }
        }
    }
    let mut deviation: f64 = 0.0;
    for i in 0..domain.len() {
        let diag = gram.get(&(i, i)).copied().unwrap_or_default();
        deviation = deviation.max((diag - 1.0).norm());
    }
    for (&(i, j), g) in &gram {
        if i != j {
            deviation = deviation.max(g.norm());
        }
    }
    Ok(IsometryReport {
        stage: stage.name().to_string(),
        passed: deviation <= ISOMETRY_TOLERANCE,
        max_deviation: deviation,
        domain_size: domain.len(),
    })
}

/// Isometry report for every stage of `program` on its reachable domain.
pub fn check_program(program: &ExperimentProgram) -> Result<Vec<IsometryReport>> {
    let domains = program.isometry_domains()?;
    program
        .stages()
        .iter()
        .zip(&domains)
        .map(|(stage, domain)| check_isometry(stage, program.shape(), domain))
        .collect()
}
