//! Quantum-register simulation of laboratory experiments.
//!
//! Each site where an apparatus could register something is a qubit. A run
//! starts from a lab-state over the register and rewrites creation
//! operators stage by stage; detector probabilities follow from the Born
//! rule on the final lab-state.

pub mod algebra;
pub mod catalog;
pub mod corpus;
pub mod dsl;
pub mod error;
pub mod register;
pub mod report;
pub mod rewrite;

pub use error::{QregError, Result};
pub use register::{BasisIndex, CreationMonomial, RankReport, RegisterShape, SparseState};
pub use report::RunReport;
pub use rewrite::{
    apply_rule, apply_stage, check_isometry, check_program, compose_stages, run_program, Detector,
    ExperimentProgram, IsometryReport, Stage, TransitionRule,
};
