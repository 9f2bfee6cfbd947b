use thiserror::Error;

pub type Result<T, E = QregError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QregError {
    #[error("register rank {0} outside 1..=63")]
    InvalidRank(usize),
    #[error("qubit index {index} out of range for rank-{rank} register")]
    QubitOutOfRange { index: usize, rank: usize },
    #[error("basis index {index} out of range for rank-{rank} register")]
    BasisOutOfRange { index: u64, rank: usize },
    #[error("occupation {value} at position {position} is not 0 or 1")]
    InvalidOccupation { position: usize, value: u8 },
    #[error("occupation list has length {got}, register rank is {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("cannot parse ket literal `{0}`")]
    InvalidKet(String),
    #[error("register shapes differ: rank {left} vs rank {right}")]
    ShapeMismatch { left: usize, right: usize },
    #[error("state is not normalized: norm = {norm}")]
    NotNormalized { norm: f64 },
    #[error("state is the zero vector")]
    ZeroState,
    #[error("creation monomial repeats qubit {0}")]
    DuplicateIndex(usize),
    #[error("transition rule for qubit {0} has no targets")]
    EmptyRule(usize),
    #[error("qubit {0} appears in its own target")]
    SelfTarget(usize),
    #[error("stage `{stage}` has two rules for qubit {source_qubit}")]
    DuplicateSource { stage: String, source_qubit: usize },
    #[error("stage `{stage}`: a target of the rule for qubit {from} feeds the rule for qubit {into}")]
    FeedsSource {
        stage: String,
        from: usize,
        into: usize,
    },
    #[error("duplicate stage name `{0}`")]
    DuplicateStage(String),
    #[error("duplicate detector name `{0}`")]
    DuplicateDetector(String),
    #[error("detector `{0}` declares no qubits or repeats a qubit")]
    InvalidDetector(String),
    #[error("detectors `{0}` and `{1}` declare the same outcome")]
    DuplicateOutcome(String, String),
    #[error("{0}")]
    Catalog(String),
    #[error("cannot compose stages: {0}")]
    Composition(String),
}
