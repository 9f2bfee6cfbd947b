//! Dense reference simulator for cross-checking the sparse engine.
//!
//! Every operator is a full `2^r × 2^r` matrix built from Kronecker
//! products of single-qubit matrices, so the rank is capped at 12.
//!
//! Single-qubit vectors follow `|1) = (1, 0)ᵀ`, `|0) = (0, 1)ᵀ`, and the
//! register vector is linearized with qubit 0 varying fastest. Basis state
//! `|a)` therefore sits at dense position `!a & (2^r - 1)`; see
//! [`dense_position`].

use ndarray::linalg::kron;
use ndarray::{Array1, Array2};
use num_complex::Complex64;
use thiserror::Error;

use qreg_core::algebra::{qop_matrix, Mat2, QubitOp, ScaledQubitOp};
use qreg_core::{BasisIndex, CreationMonomial, ExperimentProgram, QregError, RegisterShape, SparseState, Stage};

pub const MAX_ORACLE_RANK: usize = 12;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("dense oracle supports rank at most {MAX_ORACLE_RANK}, got {0}")]
    RankTooLarge(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Core(#[from] QregError),
}

pub type Result<T, E = OracleError> = std::result::Result<T, E>;

pub type DenseVector = Array1<Complex64>;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn check_rank(shape: RegisterShape) -> Result<()> {
    if shape.rank() > MAX_ORACLE_RANK {
        Err(OracleError::RankTooLarge(shape.rank()))
    } else {
        Ok(())
    }
}

fn dim(shape: RegisterShape) -> usize {
    1 << shape.rank()
}

/// Dense vector position of a basis state.
pub fn dense_position(index: BasisIndex, shape: RegisterShape) -> usize {
    (!index.0 & shape.max_index()) as usize
}

/// A `2^r × 2^r` operator on a register.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    shape: RegisterShape,
    matrix: Array2<Complex64>,
}

impl DenseOperator {
    pub fn new(shape: RegisterShape, matrix: Array2<Complex64>) -> Result<Self> {
        check_rank(shape)?;
        let n = dim(shape);
        if matrix.dim() != (n, n) {
            return Err(OracleError::DimensionMismatch {
                expected: n,
                got: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(Self { shape, matrix })
    }

    pub fn identity(shape: RegisterShape) -> Result<Self> {
        check_rank(shape)?;
        Ok(Self {
            shape,
            matrix: Array2::eye(dim(shape)),
        })
    }

    pub fn shape(&self) -> RegisterShape {
        self.shape
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.matrix
    }

    /// `self · other`.
    pub fn compose(&self, other: &DenseOperator) -> DenseOperator {
        DenseOperator {
            shape: self.shape,
            matrix: self.matrix.dot(&other.matrix),
        }
    }

    pub fn apply(&self, vector: &DenseVector) -> Result<DenseVector> {
        if vector.len() != self.matrix.ncols() {
            return Err(OracleError::DimensionMismatch {
                expected: self.matrix.ncols(),
                got: vector.len(),
            });
        }
        Ok(self.matrix.dot(vector))
    }

    /// Entry `(row, column)` addressed by basis states rather than dense positions.
    pub fn entry(&self, row: BasisIndex, column: BasisIndex) -> Complex64 {
        self.matrix[[dense_position(row, self.shape), dense_position(column, self.shape)]]
    }
}

fn mat2(m: Mat2) -> Array2<Complex64> {
    Array2::from_shape_fn((2, 2), |(r, c)| m[r][c])
}

/// Tensor product of per-qubit factors, qubit 0 fastest.
fn tensor(factors: &[Array2<Complex64>]) -> Array2<Complex64> {
    let mut acc = factors[0].clone();
    for f in &factors[1..] {
        acc = kron(f, &acc);
    }
    acc
}

/// `A+` on every listed qubit, `σ0` elsewhere.
pub fn dense_monomial(monomial: &CreationMonomial, shape: RegisterShape) -> Result<DenseOperator> {
    check_rank(shape)?;
    monomial.check(shape)?;
    let create = mat2(qop_matrix(ScaledQubitOp::unit(QubitOp::Adag)));
    let identity = mat2(qop_matrix(ScaledQubitOp::unit(QubitOp::S0)));
    let factors: Vec<Array2<Complex64>> = (0..shape.rank())
        .map(|j| {
            if monomial.contains(j) {
                create.clone()
            } else {
                identity.clone()
            }
        })
        .collect();
    DenseOperator::new(shape, tensor(&factors))
}

/// Image of one basis state under a stage, by naive substitution over occupation lists.
fn substitute(stage: &Stage, occupied: &[bool]) -> Vec<(Complex64, Vec<bool>)> {
    let rank = occupied.len();
    let mut partial: Vec<(Complex64, Vec<bool>)> = vec![(one(), vec![false; rank])];
    for (q, &on) in occupied.iter().enumerate() {
        if !on {
            continue;
        }
        let factor: Vec<(Complex64, Vec<usize>)> = match stage.rules().iter().find(|r| r.source() == q) {
            Some(rule) => rule
                .targets()
                .iter()
                .map(|(c, m)| (*c, m.indices().to_vec()))
                .collect(),
            None => vec![(one(), vec![q])],
        };
        let mut next = Vec::new();
        for (c, occ) in &partial {
            for (d, qubits) in &factor {
                if qubits.iter().any(|&t| occ[t]) {
                    continue;
                }
                let mut occ = occ.clone();
                for &t in qubits {
                    occ[t] = true;
                }
                next.push((c * d, occ));
            }
        }
        partial = next;
    }
    partial
}

fn occupation_position(occ: &[bool]) -> usize {
    // bit value 1 sits at single-qubit position 0
    occ.iter()
        .enumerate()
        .map(|(j, &on)| if on { 0 } else { 1 << j })
        .sum()
}

/// The stage as a matrix, built column by column.
pub fn dense_stage(stage: &Stage, shape: RegisterShape) -> Result<DenseOperator> {
    check_rank(shape)?;
    stage.check(shape)?;
    let n = dim(shape);
    let mut matrix = Array2::from_elem((n, n), zero());
    for column in 0..n {
        // position bit j clear means qubit j occupied
        let occupied: Vec<bool> = (0..shape.rank()).map(|j| column & (1 << j) == 0).collect();
        for (c, occ) in substitute(stage, &occupied) {
            matrix[[occupation_position(&occ), column]] += c;
        }
    }
    DenseOperator::new(shape, matrix)
}

pub fn void_vector(shape: RegisterShape) -> Result<DenseVector> {
    check_rank(shape)?;
    let mut v = Array1::from_elem(dim(shape), zero());
    v[dense_position(BasisIndex::VOID, shape)] = one();
    Ok(v)
}

pub fn densify(state: &SparseState) -> Result<DenseVector> {
    let shape = state.shape();
    check_rank(shape)?;
    let mut v = Array1::from_elem(dim(shape), zero());
    for (index, amp) in state.terms() {
        v[dense_position(index, shape)] = amp;
    }
    Ok(v)
}

/// Amplitude of basis state `index` in a dense vector.
pub fn dense_amplitude(vector: &DenseVector, index: BasisIndex, shape: RegisterShape) -> Complex64 {
    vector[dense_position(index, shape)]
}

/// Maximum entrywise deviation between a sparse state and a dense vector.
pub fn compare_states(sparse: &SparseState, dense: &DenseVector) -> Result<f64> {
    let expected = dim(sparse.shape());
    if dense.len() != expected {
        return Err(OracleError::DimensionMismatch {
            expected,
            got: dense.len(),
        });
    }
    let sparse = densify(sparse)?;
    Ok(sparse
        .iter()
        .zip(dense.iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max))
}

/// Initial lab-state as `Σ c · dense_monomial(m) · |0)`.
pub fn dense_initial(program: &ExperimentProgram) -> Result<DenseVector> {
    let shape = program.shape();
    let void = void_vector(shape)?;
    if program.initial().is_empty() {
        return Ok(void);
    }
    let mut v = Array1::from_elem(dim(shape), zero());
    for (c, m) in program.initial() {
        v = v + dense_monomial(m, shape)?.apply(&void)?.mapv(|x| x * c);
    }
    Ok(v)
}

/// Final lab-state from matrix products applied to the dense initial vector.
pub fn dense_run(program: &ExperimentProgram) -> Result<DenseVector> {
    let shape = program.shape();
    let mut v = dense_initial(program)?;
    for stage in program.stages() {
        v = dense_stage(stage, shape)?.apply(&v)?;
    }
    Ok(v)
}
