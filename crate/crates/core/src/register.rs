//! Lab-states of a rank-r quantum register.
//!
//! Basis states are stored as bitmasks: qubit `j` contributes `2^j`, so the
//! bit string `|i0 i1 … i(r-1))` (qubit 0 leftmost) is the integer
//! `Σ i_j 2^j`. States are sparse maps from basis index to amplitude and
//! never materialize the `2^r` dimensional vector.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{QregError, Result};

pub const MAX_RANK: usize = 63;

/// Amplitudes below this magnitude are dropped after every operation.
pub const PRUNE_THRESHOLD: f64 = 1e-12;

/// Allowed `|norm - 1|` for Born-rule queries.
pub const NORM_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RegisterShape {
    rank: usize,
}

impl RegisterShape {
    pub fn new(rank: usize) -> Result<Self> {
        if rank == 0 || rank > MAX_RANK {
            return Err(QregError::InvalidRank(rank));
        }
        Ok(Self { rank })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Largest valid basis index, `2^r - 1`.
    pub fn max_index(&self) -> u64 {
        (1u64 << self.rank) - 1
    }

    pub fn check_qubit(&self, index: usize) -> Result<()> {
        if index < self.rank {
            Ok(())
        } else {
            Err(QregError::QubitOutOfRange {
                index,
                rank: self.rank,
            })
        }
    }

    pub fn check_index(&self, index: BasisIndex) -> Result<()> {
        if index.0 <= self.max_index() {
            Ok(())
        } else {
            Err(QregError::BasisOutOfRange {
                index: index.0,
                rank: self.rank,
            })
        }
    }

    fn check_same(&self, other: &RegisterShape) -> Result<()> {
        if self.rank == other.rank {
            Ok(())
        } else {
            Err(QregError::ShapeMismatch {
                left: self.rank,
                right: other.rank,
            })
        }
    }
}

/// A register computational-basis state, encoded as `Σ i_j 2^j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BasisIndex(pub u64);

impl BasisIndex {
    pub const VOID: BasisIndex = BasisIndex(0);

    /// Encode an occupation list `i0, i1, …` (qubit 0 first).
    pub fn from_bits(bits: &[u8], shape: RegisterShape) -> Result<Self> {
        if bits.len() != shape.rank() {
            return Err(QregError::LengthMismatch {
                expected: shape.rank(),
                got: bits.len(),
            });
        }
        let mut value = 0u64;
        for (position, &bit) in bits.iter().enumerate() {
            match bit {
                0 => {}
                1 => value |= 1 << position,
                _ => return Err(QregError::InvalidOccupation { position, value: bit }),
            }
        }
        Ok(BasisIndex(value))
    }

    /// The basis state with exactly the listed qubits occupied.
    pub fn from_qubits(qubits: impl IntoIterator<Item = usize>) -> Self {
        BasisIndex(qubits.into_iter().fold(0u64, |acc, q| acc | (1 << q)))
    }

    pub fn to_bits(self, shape: RegisterShape) -> Vec<u8> {
        (0..shape.rank()).map(|j| ((self.0 >> j) & 1) as u8).collect()
    }

    pub fn is_set(self, qubit: usize) -> bool {
        qubit < 64 && (self.0 >> qubit) & 1 == 1
    }

    pub fn occupied(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&j| self.is_set(j))
    }

    pub fn popcount(self) -> u32 {
        self.0.count_ones()
    }

    /// `|101)` style, qubit 0 leftmost.
    pub fn bit_string(self, shape: RegisterShape) -> String {
        self.to_bits(shape)
            .iter()
            .map(|&b| if b == 1 { '1' } else { '0' })
            .collect()
    }

    pub fn ket_bits(self, shape: RegisterShape) -> String {
        format!("|{})", self.bit_string(shape))
    }

    pub fn ket_decimal(self) -> String {
        format!("|{})", self.0)
    }

    /// Parse `|101)`, `|5)` or `|11_10)`.
    ///
    /// A body of exactly `rank` binary digits is read as a bit string; a
    /// `_10` suffix forces decimal; anything else is decimal.
    pub fn parse_ket(text: &str, shape: RegisterShape) -> Result<Self> {
        let bad = || QregError::InvalidKet(text.to_string());
        let body = text
            .trim()
            .strip_prefix('|')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(bad)?;
        if body.is_empty() {
            return Err(bad());
        }
        let index = if let Some(decimal) = body.strip_suffix("_10") {
            BasisIndex(decimal.parse().map_err(|_| bad())?)
        } else if body.len() == shape.rank() && body.chars().all(|c| c == '0' || c == '1') {
            let bits: Vec<u8> = body.bytes().map(|b| b - b'0').collect();
            BasisIndex::from_bits(&bits, shape)?
        } else {
            BasisIndex(body.parse().map_err(|_| bad())?)
        };
        shape.check_index(index)?;
        Ok(index)
    }
}

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{})", self.0)
    }
}

/// Product of creation operators on distinct qubits, kept in ascending order.
///
/// Creation operators on different qubits commute, so sorting carries no sign.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CreationMonomial {
    indices: Vec<usize>,
}

impl CreationMonomial {
    pub fn new(indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut indices: Vec<usize> = indices.into_iter().collect();
        indices.sort_unstable();
        for pair in indices.windows(2) {
            if pair[0] == pair[1] {
                return Err(QregError::DuplicateIndex(pair[0]));
            }
        }
        if let Some(&last) = indices.last() {
            if last >= MAX_RANK {
                return Err(QregError::QubitOutOfRange {
                    index: last,
                    rank: MAX_RANK,
                });
            }
        }
        Ok(Self { indices })
    }

    pub fn identity() -> Self {
        Self::default()
    }

    pub fn single(qubit: usize) -> Result<Self> {
        Self::new([qubit])
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, qubit: usize) -> bool {
        self.indices.binary_search(&qubit).is_ok()
    }

    pub fn mask(&self) -> u64 {
        BasisIndex::from_qubits(self.indices.iter().copied()).0
    }

    pub fn check(&self, shape: RegisterShape) -> Result<()> {
        match self.indices.last() {
            Some(&last) => shape.check_qubit(last),
            None => Ok(()),
        }
    }
}

impl fmt::Display for CreationMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.indices.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.indices.iter().map(|i| format!("A+{i}")).collect();
        f.write_str(&parts.join(" "))
    }
}

/// Set of excitation counts present in a state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankReport {
    pub ranks: Vec<u32>,
    pub homogeneous: bool,
}

/// A sparse register state `Σ ψ_a |a)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseState {
    shape: RegisterShape,
    terms: BTreeMap<u64, Complex64>,
}

impl SparseState {
    pub fn zero(shape: RegisterShape) -> Self {
        Self {
            shape,
            terms: BTreeMap::new(),
        }
    }

    /// The all-unoccupied state `|0)`.
    pub fn void(shape: RegisterShape) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(0, Complex64::new(1.0, 0.0));
        Self { shape, terms }
    }

    pub fn basis(shape: RegisterShape, index: BasisIndex) -> Result<Self> {
        Self::from_terms(shape, [(index, Complex64::new(1.0, 0.0))])
    }

    /// Sum of `amp |a)` over the given terms. Repeated keys add.
    pub fn from_terms(
        shape: RegisterShape,
        terms: impl IntoIterator<Item = (BasisIndex, Complex64)>,
    ) -> Result<Self> {
        let mut acc = BTreeMap::new();
        for (index, amp) in terms {
            shape.check_index(index)?;
            *acc.entry(index.0).or_insert(Complex64::new(0.0, 0.0)) += amp;
        }
        Ok(Self::pruned(shape, acc))
    }

    fn pruned(shape: RegisterShape, mut terms: BTreeMap<u64, Complex64>) -> Self {
        terms.retain(|_, amp| amp.norm() >= PRUNE_THRESHOLD);
        Self { shape, terms }
    }

    pub fn shape(&self) -> RegisterShape {
        self.shape
    }

    pub fn amplitude(&self, index: BasisIndex) -> Complex64 {
        self.terms
            .get(&index.0)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Stored terms in ascending basis order.
    pub fn terms(&self) -> impl Iterator<Item = (BasisIndex, Complex64)> + '_ {
        self.terms.iter().map(|(&k, &v)| (BasisIndex(k), v))
    }

    pub fn support(&self) -> Vec<BasisIndex> {
        self.terms.keys().map(|&k| BasisIndex(k)).collect()
    }

    /// Number of stored terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Apply `A+_k`; terms already occupying `k` vanish.
    pub fn apply_creation(&self, qubit: usize) -> Result<Self> {
        self.shape.check_qubit(qubit)?;
        self.create_mask(1 << qubit)
    }

    /// Apply a product of creation operators.
    pub fn apply_monomial(&self, monomial: &CreationMonomial) -> Result<Self> {
        monomial.check(self.shape)?;
        self.create_mask(monomial.mask())
    }

    fn create_mask(&self, mask: u64) -> Result<Self> {
        let mut out = BTreeMap::new();
        for (&key, &amp) in &self.terms {
            if key & mask == 0 {
                *out.entry(key | mask).or_insert(Complex64::new(0.0, 0.0)) += amp;
            }
        }
        Ok(Self::pruned(self.shape, out))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let terms = self.terms.iter().map(|(&k, &v)| (k, v * factor)).collect();
        Self::pruned(self.shape, terms)
    }

    pub fn add(&self, other: &SparseState) -> Result<Self> {
        self.shape.check_same(&other.shape)?;
        let mut terms = self.terms.clone();
        for (&k, &v) in &other.terms {
            *terms.entry(k).or_insert(Complex64::new(0.0, 0.0)) += v;
        }
        Ok(Self::pruned(self.shape, terms))
    }

    /// `(self|other)`, conjugate-linear in `self`.
    pub fn inner_product(&self, other: &SparseState) -> Result<Complex64> {
        self.shape.check_same(&other.shape)?;
        let (small, large, conj_small) = if self.terms.len() <= other.terms.len() {
            (&self.terms, &other.terms, true)
        } else {
            (&other.terms, &self.terms, false)
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, &a) in small {
            if let Some(&b) = large.get(k) {
                acc += if conj_small { a.conj() * b } else { b.conj() * a };
            }
        }
        Ok(acc)
    }

    pub fn norm(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= NORM_TOLERANCE
    }

    fn require_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(QregError::NotNormalized { norm: self.norm() })
        }
    }

    /// Probability that exactly the qubits of `outcome` fire: `|(outcome|ψ)|²`.
    pub fn born_exclusive(&self, outcome: BasisIndex) -> Result<f64> {
        self.shape.check_index(outcome)?;
        self.require_normalized()?;
        Ok(self.amplitude(outcome).norm_sqr().min(1.0))
    }

    /// Probability that qubit `k` fires, whatever else fires with it.
    pub fn born_marginal(&self, qubit: usize) -> Result<f64> {
        self.shape.check_qubit(qubit)?;
        self.require_normalized()?;
        let p: f64 = self
            .terms
            .iter()
            .filter(|(&k, _)| (k >> qubit) & 1 == 1)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        Ok(p.min(1.0))
    }

    pub fn state_rank(&self) -> Result<RankReport> {
        if self.is_zero() {
            return Err(QregError::ZeroState);
        }
        let ranks: BTreeSet<u32> = self.terms.keys().map(|k| k.count_ones()).collect();
        Ok(RankReport {
            homogeneous: ranks.len() == 1,
            ranks: ranks.into_iter().collect(),
        })
    }

    /// Largest entrywise `|self_a - other_a|`.
    pub fn max_deviation(&self, other: &SparseState) -> Result<f64> {
        self.shape.check_same(&other.shape)?;
        let keys: BTreeSet<u64> = self.terms.keys().chain(other.terms.keys()).copied().collect();
        Ok(keys
            .into_iter()
            .map(|k| (self.amplitude(BasisIndex(k)) - other.amplitude(BasisIndex(k))).norm())
            .fold(0.0, f64::max))
    }
}
