//! Single-qubit computational-basis operator algebra.
//!
//! The eight operators `P0, P1, A, A+, s0, s1, s2, s3` acting on one qubit
//! are closed under multiplication up to a scalar in `{0, ±1, ±i}`. Products
//! are looked up in a fixed table; [`qop_matrix`] gives the 2×2 matrix of an
//! operator built from outer products of the basis vectors
//! `|1) = (1, 0)ᵀ`, `|0) = (0, 1)ᵀ`, and is used to check the table.

use std::fmt;

use num_complex::Complex64;

/// A 2×2 complex matrix, row-major.
pub type Mat2 = [[Complex64; 2]; 2];

/// Basis operators on a single qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QubitOp {
    /// `|0)(0|`
    P0,
    /// `|1)(1|`
    P1,
    /// `|0)(1|`
    A,
    /// `|1)(0|`
    Adag,
    /// identity
    S0,
    S1,
    S2,
    S3,
}

impl QubitOp {
    pub const ALL: [QubitOp; 8] = [
        QubitOp::P0,
        QubitOp::P1,
        QubitOp::A,
        QubitOp::Adag,
        QubitOp::S0,
        QubitOp::S1,
        QubitOp::S2,
        QubitOp::S3,
    ];

    /// The seven operators that appear as rows and columns of the product table.
    pub const TABULATED: [QubitOp; 7] = [
        QubitOp::P0,
        QubitOp::P1,
        QubitOp::A,
        QubitOp::Adag,
        QubitOp::S1,
        QubitOp::S2,
        QubitOp::S3,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            QubitOp::P0 => "P0",
            QubitOp::P1 => "P1",
            QubitOp::A => "A",
            QubitOp::Adag => "A+",
            QubitOp::S0 => "s0",
            QubitOp::S1 => "s1",
            QubitOp::S2 => "s2",
            QubitOp::S3 => "s3",
        }
    }

    fn table_slot(self) -> Option<usize> {
        QubitOp::TABULATED.iter().position(|&op| op == self)
    }
}

impl fmt::Display for QubitOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// A unit scalar `i^k`. Multiplying by one of these is exact in floating point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    One,
    I,
    MinusOne,
    MinusI,
}

impl Phase {
    pub fn apply(self, z: Complex64) -> Complex64 {
        match self {
            Phase::One => z,
            Phase::I => Complex64::new(-z.im, z.re),
            Phase::MinusOne => -z,
            Phase::MinusI => Complex64::new(z.im, -z.re),
        }
    }

    pub fn to_complex(self) -> Complex64 {
        self.apply(Complex64::new(1.0, 0.0))
    }

    fn prefix(self) -> &'static str {
        match self {
            Phase::One => "",
            Phase::I => "i",
            Phase::MinusOne => "-",
            Phase::MinusI => "-i",
        }
    }
}

use Phase::{MinusI as NI, MinusOne as N1, One as P, I};
use QubitOp::{Adag, P0, P1, S0, S1, S2, S3, A};

type Entry = Option<(Phase, QubitOp)>;

const fn e(phase: Phase, op: QubitOp) -> Entry {
    Some((phase, op))
}

/// Row `x`, column `y` holds the product `x·y`.
/// Order: P0, P1, A, A+, s1, s2, s3.
const TABLE: [[Entry; 7]; 7] = [
    // P0
    [e(P, P0), None, e(P, A), None, e(P, A), e(I, A), e(N1, P0)],
    // P1
    [None, e(P, P1), None, e(P, Adag), e(P, Adag), e(NI, Adag), e(P, P1)],
    // A
    [None, e(P, A), None, e(P, P0), e(P, P0), e(NI, P0), e(P, A)],
    // A+
    [e(P, Adag), None, e(P, P1), None, e(P, P1), e(I, P1), e(N1, Adag)],
    // s1
    [e(P, Adag), e(P, A), e(P, P1), e(P, P0), e(P, S0), e(I, S3), e(NI, S2)],
    // s2
    [e(NI, Adag), e(I, A), e(NI, P1), e(I, P0), e(NI, S3), e(P, S0), e(I, S1)],
    // s3
    [e(N1, P0), e(P, P1), e(N1, A), e(P, Adag), e(I, S2), e(NI, S1), e(P, S0)],
];

/// Exact product of two basis operators on the same qubit; `None` is the zero operator.
pub fn basis_product(x: QubitOp, y: QubitOp) -> Option<(Phase, QubitOp)> {
    match (x, y) {
        (S0, other) | (other, S0) => Some((Phase::One, other)),
        _ => {
            // both operands are tabulated once s0 is excluded
            let row = x.table_slot().expect("tabulated operator");
            let col = y.table_slot().expect("tabulated operator");
            TABLE[row][col]
        }
    }
}

/// A basis operator (or zero) times a complex scalar.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledQubitOp {
    coeff: Complex64,
    op: Option<QubitOp>,
}

impl ScaledQubitOp {
    pub fn new(coeff: Complex64, op: QubitOp) -> Self {
        Self { coeff, op: Some(op) }
    }

    pub fn unit(op: QubitOp) -> Self {
        Self::new(Complex64::new(1.0, 0.0), op)
    }

    pub fn zero() -> Self {
        Self {
            coeff: Complex64::new(0.0, 0.0),
            op: None,
        }
    }

    pub fn coeff(&self) -> Complex64 {
        self.coeff
    }

    /// `None` for the zero operator.
    pub fn op(&self) -> Option<QubitOp> {
        self.op
    }

    pub fn is_zero(&self) -> bool {
        self.op.is_none()
    }
}

impl From<QubitOp> for ScaledQubitOp {
    fn from(op: QubitOp) -> Self {
        ScaledQubitOp::unit(op)
    }
}

impl fmt::Display for ScaledQubitOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.op {
            None => f.write_str("0"),
            Some(op) if self.coeff == Complex64::new(1.0, 0.0) => write!(f, "{op}"),
            Some(op) => write!(f, "({}) {op}", self.coeff),
        }
    }
}

/// Multiply two scaled single-qubit operators. Zero is absorbing.
pub fn qop_mul(x: ScaledQubitOp, y: ScaledQubitOp) -> ScaledQubitOp {
    let (Some(a), Some(b)) = (x.op, y.op) else {
        return ScaledQubitOp::zero();
    };
    match basis_product(a, b) {
        None => ScaledQubitOp::zero(),
        Some((phase, op)) => ScaledQubitOp::new(phase.apply(x.coeff * y.coeff), op),
    }
}

fn ket(bit: u8) -> [Complex64; 2] {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    // |1) = (1, 0)ᵀ and |0) = (0, 1)ᵀ
    if bit == 1 {
        [one, zero]
    } else {
        [zero, one]
    }
}

fn outer(u: u8, v: u8) -> Mat2 {
    let (ku, kv) = (ket(u), ket(v));
    let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (r, row) in m.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            *cell = ku[r] * kv[c].conj();
        }
    }
    m
}

fn combine(terms: &[(Complex64, Mat2)]) -> Mat2 {
    let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (c, t) in terms {
        for r in 0..2 {
            for k in 0..2 {
                m[r][k] += c * t[r][k];
            }
        }
    }
    m
}

fn basis_matrix(op: QubitOp) -> Mat2 {
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match op {
        QubitOp::P0 => outer(0, 0),
        QubitOp::P1 => outer(1, 1),
        QubitOp::A => outer(0, 1),
        QubitOp::Adag => outer(1, 0),
        QubitOp::S0 => combine(&[(one, outer(1, 1)), (one, outer(0, 0))]),
        QubitOp::S1 => combine(&[(one, outer(0, 1)), (one, outer(1, 0))]),
        QubitOp::S2 => combine(&[(i, outer(0, 1)), (-i, outer(1, 0))]),
        QubitOp::S3 => combine(&[(one, outer(1, 1)), (-one, outer(0, 0))]),
    }
}

/// Matrix of `x` in the basis `|1) = (1, 0)ᵀ`, `|0) = (0, 1)ᵀ`.
pub fn qop_matrix(x: ScaledQubitOp) -> Mat2 {
    match x.op {
        None => [[Complex64::new(0.0, 0.0); 2]; 2],
        Some(op) => {
            let mut m = basis_matrix(op);
            for row in m.iter_mut() {
                for cell in row.iter_mut() {
                    *cell *= x.coeff;
                }
            }
            m
        }
    }
}

/// Render the 7×7 product table as aligned text.
pub fn render_table() -> String {
    let cell = |entry: Entry| match entry {
        None => "0".to_string(),
        Some((phase, op)) => format!("{}{}", phase.prefix(), op.symbol()),
    };
    let width = 6;
    let mut out = format!("{:>width$}", "");
    for col in QubitOp::TABULATED {
        out.push_str(&format!("{:>width$}", col.symbol()));
    }
    out.push('\n');
    for row in QubitOp::TABULATED {
        out.push_str(&format!("{:>width$}", row.symbol()));
        for col in QubitOp::TABULATED {
            out.push_str(&format!("{:>width$}", cell(basis_product(row, col))));
        }
        out.push('\n');
    }
    out
}
