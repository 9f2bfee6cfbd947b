//! The bundled experiment files.

use crate::dsl::{parse_experiment, Overrides, ParseError};
use crate::rewrite::ExperimentProgram;

pub struct CorpusEntry {
    pub name: &'static str,
    pub source: &'static str,
}

impl CorpusEntry {
    pub fn parse(&self) -> Result<ExperimentProgram, ParseError> {
        parse_experiment(self.source, &Overrides::new())
    }

    pub fn parse_with(&self, overrides: &Overrides) -> Result<ExperimentProgram, ParseError> {
        parse_experiment(self.source, overrides)
    }
}

macro_rules! entry {
    ($name:literal) => {
        CorpusEntry {
            name: $name,
            source: include_str!(concat!("../experiments/", $name, ".qreg")),
        }
    };
}

pub const CORPUS: [CorpusEntry; 8] = [
    entry!("stern_gerlach"),
    entry!("wollaston"),
    entry!("double_sg"),
    entry!("mach_zender"),
    entry!("povm_interference"),
    entry!("epr"),
    entry!("hsz"),
    entry!("independent_pair"),
];

pub fn find(name: &str) -> Option<&'static CorpusEntry> {
    CORPUS.iter().find(|e| e.name == name)
}
