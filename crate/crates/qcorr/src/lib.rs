//! # qcorr
//!
//! Irreducible multiparty correlation in multi-qubit states.
//!
//! A full-rank n-qubit density matrix carries two dual coordinate systems
//! over the tensor-product Pauli basis: the exponential parameters θ, with
//! ρ = exp(Σ θ^m σ_m − ψ·I), and the expectation parameters η^m = Tr(ρ σ_m).
//! Zeroing every θ coordinate that touches more than k parties defines the
//! exponential family E_k. Projecting a state onto E_k — the maximum-entropy
//! state with the same order-k marginals, equivalently the relative-entropy
//! projection — splits its total correlation into irreducible k-party
//! pieces C_k = S(ρ*_{k-1}) − S(ρ*_k), with C_T = S(ρ*_1) − S(ρ).
//!
//! | Module | Provides |
//! |--------|----------|
//! | [`pauli`] | multi-index bookkeeping, tensor-product Pauli operators |
//! | [`hermitian`] | spectra, matrix exp/log, entropies, partial trace |
//! | [`coords`] | θ/η coordinates, the potentials ψ and φ, families E_k |
//! | [`maxent`] | the convex projection onto E_k under fixed marginals |
//! | [`correlations`] | the hierarchy C_2..C_n, C_T, by both definitions |
//! | [`channels`] | local operations and the CNOT correlation-creation demo |
//! | [`oracle`] | classical IPF cross-check for diagonal states |
//! | [`io`] | JSON state specifications and report formats |
//!
//! All entropies are in nats. Only full-rank (strictly positive) states admit
//! θ coordinates; rank-deficient inputs are rejected, not regularized.
//!
//! ```
//! use qcorr::coords::{theta_to_density, ThetaCoords};
//! use qcorr::correlations::decompose_entropic;
//! use qcorr::maxent::SolverOptions;
//! use qcorr::pauli::MultiIndex;
//!
//! let mut theta = ThetaCoords::zeros(3).unwrap();
//! theta.set(&MultiIndex::parse("330").unwrap(), 1.0);
//! theta.set(&MultiIndex::parse("303").unwrap(), 0.5);
//! let rho = theta_to_density(&theta).unwrap();
//! let report = decompose_entropic(&rho, &SolverOptions::default()).unwrap();
//! assert!(report.c(3).unwrap() < 1e-7); // weight-2 couplings only: no C3
//! ```

use thiserror::Error;

pub mod channels;
pub mod coords;
pub mod correlations;
pub mod hermitian;
pub mod io;
pub mod maxent;
pub mod oracle;
pub mod pauli;

pub use coords::{EtaCoords, ExponentialFamily, ThetaCoords};
pub use hermitian::DensityMatrix;
pub use pauli::MultiIndex;

/// Error type shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("party count {0} outside supported range 1..={max}", max = pauli::MAX_PARTIES)]
    PartyCountOutOfRange(usize),

    #[error("invalid Pauli label {label} at party {party}: labels must be 0..=3")]
    InvalidLabel { party: usize, label: u8 },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix is not Hermitian (asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("trace is {0} but must be 1")]
    InvalidTrace(f64),

    #[error("not a legitimate state: minimum eigenvalue {0:.6e} is negative")]
    NotPositive(f64),

    #[error("rank-deficient matrix: eigenvalue {0:.6e} at or below the full-rank threshold {thr:.0e}", thr = hermitian::FULL_RANK_EIG_MIN)]
    RankDeficient(f64),

    #[error("matrix exponential would overflow: eigenvalue {0:.3e} exceeds {max}", max = hermitian::EXP_EIG_MAX)]
    ExpOverflow(f64),

    #[error("theta overflow guard: sum of |theta| = {0:.3} exceeds {max}", max = coords::THETA_L1_MAX)]
    ThetaOverflow(f64),

    #[error("trace of Hermitian pairing has imaginary residue {0:.3e} (non-Hermitian input?)")]
    NonRealTrace(f64),

    #[error("projection did not converge after {iterations} iterations (marginal residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("targets appear infeasible: |theta|_1 = {0:.1} diverged into the overflow guard")]
    InfeasibleTargets(f64),

    #[error("projection onto E_{order} failed: {source}")]
    ProjectionFailed { order: usize, source: Box<Error> },

    #[error("constraint order {order} invalid for {party_count} parties")]
    InvalidOrder { order: usize, party_count: usize },

    #[error("probe state lies outside E_{0}: theta weight above the family cutoff")]
    ProbeOutsideFamily(usize),

    #[error("invalid party subset: {0}")]
    InvalidSubset(String),

    #[error("party index {0} out of range for {1} parties")]
    PartyOutOfRange(usize, usize),

    #[error("Kraus operators incomplete: sum K†K deviates from identity by {0:.3e}")]
    IncompleteKraus(f64),

    #[error("matrix is not unitary (deviation {0:.3e} from U†U = I)")]
    NotUnitary(f64),

    #[error("invalid index string {0:?}: expected {1} digits in 0..=3, not all zero")]
    InvalidIndexString(String, usize),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid state spec: {0}")]
    InvalidSpec(String),

    #[error("coordinate vector has length {0}, expected {1}")]
    CoordLength(usize, usize),

    #[error("non-finite coordinate value at index {0}")]
    NonFiniteCoord(String),
}

pub type Result<T> = std::result::Result<T, Error>;
