//! Local quantum operations and the correlation-creation demonstration.
//!
//! A local operation on one party is realized the usual way: attach an
//! ancilla, apply a joint unitary, trace the ancilla out — or equivalently
//! apply a Kraus map on that party alone. The scripted scenario in
//! [`run_counterexample`] starts from a three-qubit state with only
//! weight-≤2 couplings (a member of E₂), applies an ancilla-controlled CNOT
//! to qubit 1, and lands outside E₂: a local operation creates irreducible
//! three-party correlation, even though total correlation can only decrease.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::coords::{density_to_eta, density_to_theta, theta_to_density, EtaCoords, ThetaCoords};
use crate::correlations::decompose_entropic;
use crate::hermitian::{eig_hermitian, max_abs_diff, partial_trace, DensityMatrix};
use crate::maxent::SolverOptions;
use crate::pauli::{CMatrix, MultiIndex};
use crate::{Error, Result};

const UNITARITY_TOL: f64 = 1e-10;
const KRAUS_COMPLETENESS_TOL: f64 = 1e-10;

/// A quantum channel acting on a single party, given by 2×2 Kraus operators
/// with Σ K†K = I.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    party: usize,
    operators: Vec<CMatrix>,
}

impl KrausChannel {
    pub fn new(party: usize, operators: Vec<CMatrix>) -> Result<Self> {
        if operators.is_empty() {
            return Err(Error::IncompleteKraus(1.0));
        }
        for k in &operators {
            if k.nrows() != 2 || k.ncols() != 2 {
                return Err(Error::DimensionMismatch(k.nrows(), 2));
            }
        }
        let mut sum = CMatrix::zeros(2, 2);
        for k in &operators {
            sum += k.adjoint() * k;
        }
        let deviation = max_abs_diff(&sum, &CMatrix::identity(2, 2));
        if deviation > KRAUS_COMPLETENESS_TOL {
            return Err(Error::IncompleteKraus(deviation));
        }
        Ok(Self { party, operators })
    }

    pub fn party(&self) -> usize {
        self.party
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    /// Identity channel on `party`.
    pub fn identity(party: usize) -> Self {
        Self {
            party,
            operators: vec![CMatrix::identity(2, 2)],
        }
    }

    /// Full depolarization: the party's marginal becomes I/2.
    pub fn depolarizing(party: usize) -> Self {
        let half = Complex64::new(0.5, 0.0);
        let operators = (0..4u8)
            .map(|l| crate::pauli::pauli_operator(&MultiIndex::new(vec![l]).unwrap()).matrix * half)
            .collect();
        Self { party, operators }
    }

    /// A random channel from a Haar-ish random qubit⊗ancilla unitary via the
    /// Stinespring construction: K_j = (I ⊗ ⟨j|) V (I ⊗ |0⟩).
    pub fn random<R: Rng + ?Sized>(party: usize, rng: &mut R) -> Self {
        let v = random_unitary(4, rng);
        // Joint basis |s, a⟩ with the ancilla bit least significant.
        let operators = (0..2usize)
            .map(|j| {
                let mut k = CMatrix::zeros(2, 2);
                for r in 0..2 {
                    for c in 0..2 {
                        k[(r, c)] = v[(2 * r + j, 2 * c)];
                    }
                }
                k
            })
            .collect();
        Self { party, operators }
    }
}

/// Tensor the ancilla onto the state as a new last party.
pub fn attach_ancilla(rho: &DensityMatrix, ancilla: &DensityMatrix) -> Result<DensityMatrix> {
    let n = rho.party_count() + ancilla.party_count();
    if n > crate::pauli::MAX_PARTIES {
        return Err(Error::PartyCountOutOfRange(n));
    }
    Ok(DensityMatrix::from_valid_parts(
        rho.matrix().kronecker(ancilla.matrix()),
        n,
    ))
}

/// The CNOT permutation on n qubits: flips the target's basis bit whenever
/// the control bit is 1. Exact 0/1 entries; an involution.
pub fn cnot_unitary(control: usize, target: usize, party_count: usize) -> Result<CMatrix> {
    if control >= party_count {
        return Err(Error::PartyOutOfRange(control, party_count));
    }
    if target >= party_count {
        return Err(Error::PartyOutOfRange(target, party_count));
    }
    if control == target {
        return Err(Error::InvalidSubset(format!(
            "control and target are both party {control}"
        )));
    }
    let dim = 1usize << party_count;
    let control_mask = 1usize << (party_count - 1 - control);
    let target_mask = 1usize << (party_count - 1 - target);
    let mut u = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let row = if col & control_mask != 0 {
            col ^ target_mask
        } else {
            col
        };
        u[(row, col)] = Complex64::new(1.0, 0.0);
    }
    Ok(u)
}

/// U ρ U† for a unitary U; the spectrum (hence every entropy) is unchanged.
pub fn apply_unitary(rho: &DensityMatrix, u: &CMatrix) -> Result<DensityMatrix> {
    if u.nrows() != rho.dim() || u.ncols() != rho.dim() {
        return Err(Error::DimensionMismatch(u.nrows(), rho.dim()));
    }
    let gram = u.adjoint() * u;
    let deviation = max_abs_diff(&gram, &CMatrix::identity(u.nrows(), u.ncols()));
    if deviation > UNITARITY_TOL {
        return Err(Error::NotUnitary(deviation));
    }
    Ok(DensityMatrix::from_valid_parts(
        u * rho.matrix() * u.adjoint(),
        rho.party_count(),
    ))
}

/// Apply a single-party Kraus channel: Σ_j (I⊗…⊗K_j⊗…⊗I) ρ (…)†.
pub fn apply_kraus(rho: &DensityMatrix, channel: &KrausChannel) -> Result<DensityMatrix> {
    let n = rho.party_count();
    if channel.party >= n {
        return Err(Error::PartyOutOfRange(channel.party, n));
    }
    let left = CMatrix::identity(1 << channel.party, 1 << channel.party);
    let right_dim = 1usize << (n - 1 - channel.party);
    let right = CMatrix::identity(right_dim, right_dim);

    let mut out = CMatrix::zeros(rho.dim(), rho.dim());
    for k in &channel.operators {
        let full = left.kronecker(k).kronecker(&right);
        out += &full * rho.matrix() * full.adjoint();
    }
    Ok(DensityMatrix::from_valid_parts(out, n))
}

/// A random unitary exp(iH) from a Gaussian Hermitian H.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let mut h = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        h[(i, i)] = Complex64::new(rng.sample(StandardNormal), 0.0);
        for j in (i + 1)..dim {
            let z = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    let spectrum = eig_hermitian(&h).expect("random H is Hermitian by construction");
    spectrum.apply_complex(|l| Complex64::new(0.0, l).exp())
}

/// Everything the scripted scenario produces.
#[derive(Debug, Clone)]
pub struct CounterexampleReport {
    pub rho_initial: DensityMatrix,
    pub rho_final: DensityMatrix,
    pub eta_final: EtaCoords,
    pub theta_final: ThetaCoords,
    pub c3_before: f64,
    pub c3_after: f64,
    /// Max-abs deviation of the five analytically known η from tanh closed forms.
    pub eta_errors: f64,
    /// Max-abs deviation of the five known θ from their 3-decimal reference values.
    pub theta_errors: f64,
}

/// The five nonzero η of the final state in closed form: with t = tanh 1,
/// η^001 = t/√2, η^033 = η^303 = t²/√2, η^330 = t², η^331 = t³/√2.
pub fn expected_final_eta() -> Vec<(MultiIndex, f64)> {
    let t = 1f64.tanh();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [
        ("001", t * s),
        ("033", t * t * s),
        ("303", t * t * s),
        ("330", t * t),
        ("331", t * t * t * s),
    ]
    .into_iter()
    .map(|(k, v)| (MultiIndex::parse(k).unwrap(), v))
    .collect()
}

/// The five nonzero θ of the final state, as three-decimal reference values.
pub fn expected_final_theta() -> Vec<(MultiIndex, f64)> {
    [
        ("001", 0.650),
        ("033", 0.336),
        ("303", 0.336),
        ("330", 0.543),
        ("331", 0.048),
    ]
    .into_iter()
    .map(|(k, v)| (MultiIndex::parse(k).unwrap(), v))
    .collect()
}

/// θ of the initial three-qubit state: θ^330 = 1, θ^303 = θ^001 = 1/√2.
pub fn counterexample_initial_theta() -> ThetaCoords {
    let mut theta = ThetaCoords::zeros(3).expect("3 parties");
    let s = std::f64::consts::FRAC_1_SQRT_2;
    theta.set(&MultiIndex::parse("330").unwrap(), 1.0);
    theta.set(&MultiIndex::parse("303").unwrap(), s);
    theta.set(&MultiIndex::parse("001").unwrap(), s);
    theta
}

impl CounterexampleReport {
    /// First violated reproduction assertion, if any: the five η within
    /// 1e-9 of their closed forms, the five θ within `theta_tol` of their
    /// reference decimals, C₃ ≈ 0 before and C₃ > 1e-6 after.
    pub fn first_failure(&self, theta_tol: f64) -> Option<String> {
        for (m, expected) in expected_final_eta() {
            let got = self.eta_final.get(&m);
            if (got - expected).abs() > 1e-9 {
                return Some(format!(
                    "eta^{m} = {got:.12} differs from closed form {expected:.12}"
                ));
            }
        }
        for (m, expected) in expected_final_theta() {
            let got = self.theta_final.get(&m);
            if (got - expected).abs() > theta_tol {
                return Some(format!(
                    "theta^{m} = {got:.6} differs from reference {expected:.3} (tol {theta_tol})"
                ));
            }
        }
        if self.c3_before >= 1e-7 {
            return Some(format!(
                "c3_before = {:.3e} is not below 1e-7",
                self.c3_before
            ));
        }
        if self.c3_after <= 1e-6 {
            return Some(format!(
                "c3_after = {:.3e} is not above 1e-6",
                self.c3_after
            ));
        }
        None
    }
}

/// Run the scripted scenario: build the initial state, attach the ancilla
/// (θ_a³ = 1, appended as the last party), CNOT with the ancilla as control
/// and qubit 1 as target, trace the ancilla out, and report coordinates and
/// C₃ before/after.
pub fn run_counterexample(opts: &SolverOptions) -> Result<CounterexampleReport> {
    let rho_initial = theta_to_density(&counterexample_initial_theta())?;

    let mut ancilla_theta = ThetaCoords::zeros(1)?;
    ancilla_theta.set(&MultiIndex::parse("3").unwrap(), 1.0);
    let ancilla = theta_to_density(&ancilla_theta)?;

    let joint = attach_ancilla(&rho_initial, &ancilla)?;
    let cnot = cnot_unitary(3, 0, 4)?; // control = ancilla (last), target = qubit 1
    let evolved = apply_unitary(&joint, &cnot)?;
    let rho_final = partial_trace(&evolved, &[0, 1, 2])?;

    let eta_final = density_to_eta(&rho_final)?;
    let theta_final = density_to_theta(&rho_final)?;

    let c3_before = decompose_entropic(&rho_initial, opts)?
        .c(3)
        .expect("three parties");
    let c3_after = decompose_entropic(&rho_final, opts)?
        .c(3)
        .expect("three parties");

    let eta_errors = expected_final_eta()
        .into_iter()
        .map(|(m, v)| (eta_final.get(&m) - v).abs())
        .fold(0.0, f64::max);
    let theta_errors = expected_final_theta()
        .into_iter()
        .map(|(m, v)| (theta_final.get(&m) - v).abs())
        .fold(0.0, f64::max);

    Ok(CounterexampleReport {
        rho_initial,
        rho_final,
        eta_final,
        theta_final,
        c3_before,
        c3_after,
        eta_errors,
        theta_errors,
    })
}
