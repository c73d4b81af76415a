//! Multi-index bookkeeping and the tensor-product Pauli operator basis.
//!
//! A basis operator σ_m = σ_{m_1} ⊗ … ⊗ σ_{m_n} is addressed by a
//! [`MultiIndex`] of per-party labels in {0,1,2,3} (0 = identity). The 4^n
//! operators are orthogonal under the Hilbert–Schmidt pairing,
//! Tr(σ_m σ_m') = 2^n δ_{mm'}, and span the Hermitian matrices of size 2^n.
//!
//! Index ordering everywhere in this crate is lexicographic base-4 with the
//! all-zero index first; party 0 is the most significant digit and the most
//! significant qubit of the computational-basis index.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, Result};

/// Largest supported party count. 4^n matrices of size 2^n × 2^n are cached
/// per party count, which stays reasonable up to n = 6.
pub const MAX_PARTIES: usize = 6;

/// Imaginary residue above which a Hermitian trace pairing is rejected.
pub const TRACE_IM_TOL: f64 = 1e-12;

/// Dense complex matrix used throughout the crate.
pub type CMatrix = DMatrix<Complex64>;

/// Per-party Pauli labels (m_1, …, m_n), each in {0,1,2,3}.
///
/// Serialized as a digit string, e.g. `"330"` for (3,3,0).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    labels: Vec<u8>,
}

impl MultiIndex {
    pub fn new(labels: Vec<u8>) -> Result<Self> {
        if labels.is_empty() || labels.len() > MAX_PARTIES {
            return Err(Error::PartyCountOutOfRange(labels.len()));
        }
        for (party, &label) in labels.iter().enumerate() {
            if label > 3 {
                return Err(Error::InvalidLabel { party, label });
            }
        }
        Ok(Self { labels })
    }

    /// Parse a digit string such as `"330"`.
    pub fn parse(s: &str) -> Result<Self> {
        s.parse()
    }

    pub fn party_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    /// The all-zero index (σ_0 = identity).
    pub fn is_zero(&self) -> bool {
        self.labels.iter().all(|&l| l == 0)
    }

    /// N_0(m): number of identity factors.
    pub fn n_zero(&self) -> usize {
        self.labels.iter().filter(|&&l| l == 0).count()
    }

    /// Number of non-identity factors, n − N_0(m).
    pub fn weight(&self) -> usize {
        self.party_count() - self.n_zero()
    }

    /// Rank in the canonical lexicographic base-4 order (all-zero index = 0).
    pub fn position(&self) -> usize {
        self.labels
            .iter()
            .fold(0usize, |acc, &l| acc * 4 + l as usize)
    }

    /// Inverse of [`MultiIndex::position`] for a given party count.
    pub fn from_position(party_count: usize, position: usize) -> Result<Self> {
        if party_count == 0 || party_count > MAX_PARTIES {
            return Err(Error::PartyCountOutOfRange(party_count));
        }
        let total = 1usize << (2 * party_count);
        if position >= total {
            return Err(Error::InvalidIndexString(position.to_string(), party_count));
        }
        let mut labels = vec![0u8; party_count];
        let mut rest = position;
        for p in (0..party_count).rev() {
            labels[p] = (rest % 4) as u8;
            rest /= 4;
        }
        Ok(Self { labels })
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &l in &self.labels {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for MultiIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut labels = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c.to_digit(10) {
                Some(d) if d <= 3 => labels.push(d as u8),
                _ => return Err(Error::InvalidIndexString(s.to_string(), s.len())),
            }
        }
        Self::new(labels)
    }
}

/// All 4^n multi-indices in canonical order, all-zero index first.
pub fn enumerate_indices(party_count: usize) -> Result<Vec<MultiIndex>> {
    if party_count == 0 || party_count > MAX_PARTIES {
        return Err(Error::PartyCountOutOfRange(party_count));
    }
    let total = 1usize << (2 * party_count);
    (0..total)
        .map(|pos| MultiIndex::from_position(party_count, pos))
        .collect()
}

/// Action of σ_m on a computational-basis column: σ_m |col⟩ = phase · |row⟩.
///
/// Each single-qubit Pauli maps a basis vector to exactly one basis vector
/// with a phase in {±1, ±i}, so σ_m is a signed permutation. This is the
/// kernel behind exact operator construction and fast expectation values.
pub(crate) fn pauli_column_action(m: &MultiIndex, col: usize) -> (usize, Complex64) {
    let n = m.party_count();
    let mut row = col;
    let mut phase = Complex64::new(1.0, 0.0);
    for (p, &label) in m.labels.iter().enumerate() {
        let shift = n - 1 - p;
        let bit = (col >> shift) & 1;
        match label {
            0 => {}
            1 => {
                row ^= 1 << shift;
            }
            2 => {
                // σ_y |0⟩ = i|1⟩, σ_y |1⟩ = −i|0⟩
                row ^= 1 << shift;
                phase *= if bit == 0 {
                    Complex64::new(0.0, 1.0)
                } else {
                    Complex64::new(0.0, -1.0)
                };
            }
            3 => {
                if bit == 1 {
                    phase = -phase;
                }
            }
            _ => unreachable!("labels validated at construction"),
        }
    }
    (row, phase)
}

/// One Pauli basis operator: its multi-index and dense matrix.
///
/// Entries are exact in {0, ±1, ±i}; no roundoff enters at the basis layer.
#[derive(Debug, Clone)]
pub struct BasisOperator {
    pub index: MultiIndex,
    pub matrix: CMatrix,
}

/// σ_m as a dense matrix: the Kronecker product of single-qubit Paulis in
/// party order (party 0 leftmost / most significant).
pub fn pauli_operator(m: &MultiIndex) -> BasisOperator {
    let dim = 1usize << m.party_count();
    let mut matrix = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let (row, phase) = pauli_column_action(m, col);
        matrix[(row, col)] = phase;
    }
    BasisOperator {
        index: m.clone(),
        matrix,
    }
}

/// Tr(a · σ_m), exploiting the one-entry-per-column structure of σ_m.
///
/// The trace of a product of Hermitian matrices is real; an imaginary
/// residue at or above [`TRACE_IM_TOL`] is rejected as a caller bug.
pub fn pauli_expectation(a: &CMatrix, m: &MultiIndex) -> Result<f64> {
    let dim = 1usize << m.party_count();
    if a.nrows() != dim || a.ncols() != dim {
        return Err(Error::DimensionMismatch(a.nrows(), dim));
    }
    let mut total = Complex64::new(0.0, 0.0);
    for col in 0..dim {
        let (row, phase) = pauli_column_action(m, col);
        total += a[(col, row)] * phase;
    }
    if total.im.abs() >= TRACE_IM_TOL {
        return Err(Error::NonRealTrace(total.im.abs()));
    }
    Ok(total.re)
}

/// Add coeff · σ_m into `h` without materializing σ_m.
pub(crate) fn accumulate_pauli(h: &mut CMatrix, m: &MultiIndex, coeff: f64) {
    let dim = 1usize << m.party_count();
    debug_assert_eq!(h.nrows(), dim);
    for col in 0..dim {
        let (row, phase) = pauli_column_action(m, col);
        h[(row, col)] += phase * coeff;
    }
}

/// Hilbert–Schmidt pairing Tr(a·b) of two Hermitian matrices.
///
/// Terms are paired as a_ij·b_ji + a_ji·b_ij so the imaginary parts of
/// Hermitian inputs cancel exactly; a residue ≥ [`TRACE_IM_TOL`] therefore
/// signals a non-Hermitian argument and is an error.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    if a.nrows() != a.ncols() || b.nrows() != b.ncols() || a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch(a.nrows(), b.nrows()));
    }
    let n = a.nrows();
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..n {
        total += a[(i, i)] * b[(i, i)];
        for j in (i + 1)..n {
            total += a[(i, j)] * b[(j, i)] + a[(j, i)] * b[(i, j)];
        }
    }
    if total.im.abs() >= TRACE_IM_TOL {
        return Err(Error::NonRealTrace(total.im.abs()));
    }
    Ok(total.re)
}

/// The full operator basis for one party count, built once and shared.
#[derive(Debug)]
pub struct PauliBasis {
    party_count: usize,
    ops: Vec<BasisOperator>,
}

static BASIS_CACHE: OnceLock<Mutex<HashMap<usize, Arc<PauliBasis>>>> = OnceLock::new();

impl PauliBasis {
    /// The cached basis for `party_count` qubits, built on first access.
    pub fn for_parties(party_count: usize) -> Result<Arc<PauliBasis>> {
        if party_count == 0 || party_count > MAX_PARTIES {
            return Err(Error::PartyCountOutOfRange(party_count));
        }
        let cache = BASIS_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("basis cache poisoned");
        if let Some(basis) = guard.get(&party_count) {
            return Ok(Arc::clone(basis));
        }
        let ops = enumerate_indices(party_count)?
            .iter()
            .map(pauli_operator)
            .collect();
        let basis = Arc::new(PauliBasis { party_count, ops });
        guard.insert(party_count, Arc::clone(&basis));
        Ok(basis)
    }

    pub fn party_count(&self) -> usize {
        self.party_count
    }

    /// Operators in canonical order; `operators()[0]` is the identity.
    pub fn operators(&self) -> &[BasisOperator] {
        &self.ops
    }

    pub fn operator(&self, m: &MultiIndex) -> &BasisOperator {
        &self.ops[m.position()]
    }
}
