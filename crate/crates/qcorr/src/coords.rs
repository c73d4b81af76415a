//! The two dual coordinate systems on full-rank states.
//!
//! Exponential coordinates θ parametrize ρ = exp(Σ_m̄ θ^m̄ σ_m̄ − ψ·I) over the
//! nonzero multi-indices m̄; the log-partition ψ(θ) = ln Tr exp(Σ θ^m̄ σ_m̄)
//! absorbs normalization (θ^0 = −ψ is never stored). Expectation coordinates
//! are η^m̄ = Tr(ρ σ_m̄), with η^0 = 1 fixed by normalization.
//!
//! The two systems are Legendre-dual: with φ(η) = −S(ρ(η)),
//!
//!   φ(η) + ψ(θ) − Σ_m̄ η^m̄ θ^m̄ = 0,   η = ∂ψ/∂θ,   θ = ∂φ/∂η,
//!
//! and relative entropy between any two full-rank states expands as
//! S(ρ‖ρ') = φ(η) + ψ(θ') − Σ η^m̄ θ'^m̄. Truncating θ at interaction weight k
//! gives the exponential family [`ExponentialFamily`] E_k used by the
//! projection solver.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::hermitian::{
    eig_hermitian, relative_entropy, von_neumann_entropy, DensityMatrix, Spectrum,
    FULL_RANK_EIG_MIN, PSD_TOL,
};
use crate::pauli::{accumulate_pauli, pauli_expectation, CMatrix, MultiIndex, MAX_PARTIES};
use crate::{Error, Result};

/// Overflow guard: Σ|θ^m̄| above this is rejected before exponentiation.
/// An artifact bound, not a structural one — it comfortably covers every
/// state whose spectrum spans fewer than ~40 orders of magnitude.
pub const THETA_L1_MAX: f64 = 50.0;

fn coord_len(party_count: usize) -> usize {
    (1usize << (2 * party_count)) - 1
}

fn check_party_count(party_count: usize) -> Result<()> {
    if party_count == 0 || party_count > MAX_PARTIES {
        return Err(Error::PartyCountOutOfRange(party_count));
    }
    Ok(())
}

macro_rules! coord_vector {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Debug, Clone, PartialEq)]
        pub struct $name {
            party_count: usize,
            values: Vec<f64>,
        }

        impl $name {
            /// All-zero coordinates (the maximally mixed state).
            pub fn zeros(party_count: usize) -> Result<Self> {
                check_party_count(party_count)?;
                Ok(Self {
                    party_count,
                    values: vec![0.0; coord_len(party_count)],
                })
            }

            /// Wrap a dense vector in canonical index order (zero index omitted).
            pub fn from_values(party_count: usize, values: Vec<f64>) -> Result<Self> {
                check_party_count(party_count)?;
                if values.len() != coord_len(party_count) {
                    return Err(Error::CoordLength(values.len(), coord_len(party_count)));
                }
                if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
                    let m = MultiIndex::from_position(party_count, pos + 1)?;
                    return Err(Error::NonFiniteCoord(m.to_string()));
                }
                Ok(Self {
                    party_count,
                    values,
                })
            }

            /// Build from a sparse map of index strings; omitted indices are zero.
            pub fn from_map(party_count: usize, map: &BTreeMap<String, f64>) -> Result<Self> {
                let mut coords = Self::zeros(party_count)?;
                for (key, &value) in map {
                    let m = MultiIndex::parse(key)?;
                    if m.party_count() != party_count || m.is_zero() {
                        return Err(Error::InvalidIndexString(key.clone(), party_count));
                    }
                    if !value.is_finite() {
                        return Err(Error::NonFiniteCoord(key.clone()));
                    }
                    coords.set(&m, value);
                }
                Ok(coords)
            }

            /// Sparse map of index strings, dropping entries with |v| ≤ `eps`.
            pub fn to_map(&self, eps: f64) -> BTreeMap<String, f64> {
                self.iter()
                    .filter(|(_, v)| v.abs() > eps)
                    .map(|(m, v)| (m.to_string(), v))
                    .collect()
            }

            pub fn party_count(&self) -> usize {
                self.party_count
            }

            /// Coordinate of the nonzero index `m`.
            pub fn get(&self, m: &MultiIndex) -> f64 {
                assert!(!m.is_zero(), "the all-zero index is not stored");
                assert_eq!(m.party_count(), self.party_count, "party count mismatch");
                self.values[m.position() - 1]
            }

            pub fn set(&mut self, m: &MultiIndex, value: f64) {
                assert!(!m.is_zero(), "the all-zero index is not stored");
                assert_eq!(m.party_count(), self.party_count, "party count mismatch");
                self.values[m.position() - 1] = value;
            }

            /// Dense values in canonical order (position 1 onward).
            pub fn values(&self) -> &[f64] {
                &self.values
            }

            /// (index, value) pairs over all nonzero indices in canonical order.
            pub fn iter(&self) -> impl Iterator<Item = (MultiIndex, f64)> + '_ {
                self.values.iter().enumerate().map(move |(i, &v)| {
                    (
                        MultiIndex::from_position(self.party_count, i + 1)
                            .expect("positions enumerate valid indices"),
                        v,
                    )
                })
            }

            pub fn l1_norm(&self) -> f64 {
                self.values.iter().map(|v| v.abs()).sum()
            }

            /// Largest |difference| against another coordinate vector.
            pub fn max_abs_diff(&self, other: &Self) -> f64 {
                assert_eq!(self.party_count, other.party_count);
                self.values
                    .iter()
                    .zip(&other.values)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            }
        }
    };
}

coord_vector!(
    /// Exponential-family coordinates {θ^m̄} of a full-rank state.
    ThetaCoords
);

coord_vector!(
    /// Expectation coordinates η^m̄ = Tr(ρ σ_m̄).
    ///
    /// Coordinates extracted from a state always lie in [−1, 1] (each σ_m̄ has
    /// eigenvalues ±1). Arbitrary values may be supplied when building
    /// candidate states; positivity is checked in [`eta_to_density`].
    EtaCoords
);

/// The exponential family E_k: full-rank states whose θ vanishes on every
/// index of weight above `max_weight`. E_1 is the product states; E_n is the
/// whole full-rank state space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExponentialFamily {
    party_count: usize,
    max_weight: usize,
}

impl ExponentialFamily {
    pub fn new(party_count: usize, max_weight: usize) -> Result<Self> {
        check_party_count(party_count)?;
        if max_weight == 0 || max_weight > party_count {
            return Err(Error::InvalidOrder {
                order: max_weight,
                party_count,
            });
        }
        Ok(Self {
            party_count,
            max_weight,
        })
    }

    pub fn party_count(&self) -> usize {
        self.party_count
    }

    pub fn max_weight(&self) -> usize {
        self.max_weight
    }

    /// True iff every θ coordinate of weight above the cutoff is ≤ `tol` in
    /// magnitude.
    pub fn contains_theta(&self, theta: &ThetaCoords, tol: f64) -> bool {
        assert_eq!(theta.party_count(), self.party_count);
        theta
            .iter()
            .all(|(m, v)| m.weight() <= self.max_weight || v.abs() <= tol)
    }

    /// Family membership of a full-rank state, via its θ coordinates.
    pub fn contains(&self, rho: &DensityMatrix, tol: f64) -> Result<bool> {
        Ok(self.contains_theta(&density_to_theta(rho)?, tol))
    }
}

/// Σ_m̄ θ^m̄ σ_m̄ as a dense Hermitian matrix.
pub(crate) fn hamiltonian(theta: &ThetaCoords) -> CMatrix {
    let dim = 1usize << theta.party_count();
    let mut h = CMatrix::zeros(dim, dim);
    for (m, v) in theta.iter() {
        if v != 0.0 {
            accumulate_pauli(&mut h, &m, v);
        }
    }
    h
}

/// ln Σ e^λ, shifted by the max eigenvalue for stability.
pub(crate) fn log_partition(spectrum: &Spectrum) -> f64 {
    let top = spectrum.max_eigenvalue();
    let sum: f64 = spectrum
        .eigenvalues()
        .iter()
        .map(|&l| (l - top).exp())
        .sum();
    top + sum.ln()
}

/// ρ(θ) = exp(Σ θ^m̄ σ_m̄ − ψ·I): positive definite with unit trace by
/// construction.
pub fn theta_to_density(theta: &ThetaCoords) -> Result<DensityMatrix> {
    let l1 = theta.l1_norm();
    if l1 > THETA_L1_MAX {
        return Err(Error::ThetaOverflow(l1));
    }
    let spectrum = eig_hermitian(&hamiltonian(theta))?;
    let psi = log_partition(&spectrum);
    let rho = spectrum.apply(|l| (l - psi).exp());
    Ok(DensityMatrix::from_valid_parts(rho, theta.party_count()))
}

/// η^m̄ = Tr(ρ σ_m̄) for every nonzero index.
pub fn density_to_eta(rho: &DensityMatrix) -> Result<EtaCoords> {
    let n = rho.party_count();
    let mut eta = EtaCoords::zeros(n)?;
    for pos in 1..=coord_len(n) {
        let m = MultiIndex::from_position(n, pos)?;
        let v = pauli_expectation(rho.matrix(), &m)?;
        debug_assert!(v.abs() <= 1.0 + PSD_TOL, "η^{m} = {v} outside [-1, 1]");
        eta.set(&m, v);
    }
    Ok(eta)
}

/// ρ(η) = Σ_m η^m σ_m / 2^n with η^0 = 1, validated for positivity.
///
/// Not every η vector is a state; a negative eigenvalue is reported as a
/// "not a legitimate state" error carrying the offending eigenvalue.
pub fn eta_to_density(eta: &EtaCoords) -> Result<DensityMatrix> {
    let n = eta.party_count();
    let dim = 1usize << n;
    let mut m = CMatrix::identity(dim, dim);
    for (idx, v) in eta.iter() {
        if v != 0.0 {
            accumulate_pauli(&mut m, &idx, v);
        }
    }
    m *= Complex64::new(1.0 / dim as f64, 0.0);
    DensityMatrix::new(m, n)
}

/// θ^m̄ = Tr(ln(ρ) σ_m̄) / 2^n; requires full rank.
pub fn density_to_theta(rho: &DensityMatrix) -> Result<ThetaCoords> {
    let n = rho.party_count();
    let spectrum = rho.spectrum();
    if spectrum.min_eigenvalue() <= FULL_RANK_EIG_MIN {
        return Err(Error::RankDeficient(spectrum.min_eigenvalue()));
    }
    let log_rho = spectrum.apply(f64::ln);
    let dim = 1usize << n;
    let mut theta = ThetaCoords::zeros(n)?;
    for pos in 1..=coord_len(n) {
        let m = MultiIndex::from_position(n, pos)?;
        theta.set(&m, pauli_expectation(&log_rho, &m)? / dim as f64);
    }
    Ok(theta)
}

/// The log-partition ψ(θ) = ln Tr exp(Σ θ^m̄ σ_m̄).
///
/// Strictly convex with ∂ψ/∂θ^m̄ = η^m̄; ψ(0) = n ln 2 and θ^0 = −ψ
/// normalizes the exponential form.
pub fn psi(theta: &ThetaCoords) -> Result<f64> {
    let l1 = theta.l1_norm();
    if l1 > THETA_L1_MAX {
        return Err(Error::ThetaOverflow(l1));
    }
    let spectrum = eig_hermitian(&hamiltonian(theta))?;
    Ok(log_partition(&spectrum))
}

/// The dual potential φ(η) = −S(ρ(η)), defined on full-rank η.
pub fn phi(eta: &EtaCoords) -> Result<f64> {
    let rho = eta_to_density(eta)?;
    let spectrum = rho.spectrum();
    if spectrum.min_eigenvalue() <= FULL_RANK_EIG_MIN {
        return Err(Error::RankDeficient(spectrum.min_eigenvalue()));
    }
    Ok(-von_neumann_entropy(&rho))
}

/// Both sides of the mixed-coordinate identity
///
///   S(ρ‖ρ'') − S(ρ‖ρ') − S(ρ'‖ρ'') = Σ_m̄ (η^m̄ − η'^m̄)(θ'^m̄ − θ''^m̄),
///
/// returned as (lhs, rhs) for the caller to compare.
pub fn mixed_identity_check(
    rho: &DensityMatrix,
    rho_p: &DensityMatrix,
    rho_pp: &DensityMatrix,
) -> Result<(f64, f64)> {
    if rho.party_count() != rho_p.party_count() || rho.party_count() != rho_pp.party_count() {
        return Err(Error::DimensionMismatch(rho.dim(), rho_p.dim()));
    }
    let lhs = relative_entropy(rho, rho_pp)?
        - relative_entropy(rho, rho_p)?
        - relative_entropy(rho_p, rho_pp)?;

    let eta = density_to_eta(rho)?;
    let eta_p = density_to_eta(rho_p)?;
    let theta_p = density_to_theta(rho_p)?;
    let theta_pp = density_to_theta(rho_pp)?;
    let rhs = eta
        .values()
        .iter()
        .zip(eta_p.values())
        .zip(theta_p.values().iter().zip(theta_pp.values()))
        .map(|((e, ep), (tp, tpp))| (e - ep) * (tp - tpp))
        .sum();
    Ok((lhs, rhs))
}

/// Random full-rank test state: each θ^m̄ i.i.d. Gaussian with the given
/// scale. Scale ~0.3 keeps spectra well conditioned.
pub fn random_theta<R: Rng + ?Sized>(
    party_count: usize,
    scale: f64,
    rng: &mut R,
) -> Result<ThetaCoords> {
    check_party_count(party_count)?;
    let values = (0..coord_len(party_count))
        .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
        .collect();
    ThetaCoords::from_values(party_count, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::max_abs_diff;
    use crate::pauli::hs_inner;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mi(s: &str) -> MultiIndex {
        MultiIndex::parse(s).unwrap()
    }

    fn random_state(n: usize, seed: u64, scale: f64) -> DensityMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        theta_to_density(&random_theta(n, scale, &mut rng).unwrap()).unwrap()
    }

    /// θ of the correlation-creation demo's initial state.
    pub(crate) fn demo_initial_theta() -> ThetaCoords {
        let mut theta = ThetaCoords::zeros(3).unwrap();
        theta.set(&mi("330"), 1.0);
        theta.set(&mi("303"), FRAC_1_SQRT_2);
        theta.set(&mi("001"), FRAC_1_SQRT_2);
        theta
    }

    #[test]
    fn zero_theta_gives_maximally_mixed() {
        for n in 1..=3 {
            let rho = theta_to_density(&ThetaCoords::zeros(n).unwrap()).unwrap();
            let mixed = DensityMatrix::maximally_mixed(n).unwrap();
            assert!(max_abs_diff(rho.matrix(), mixed.matrix()) < 1e-15);
        }
    }

    #[test]
    fn single_qubit_thermal_state() {
        let mut theta = ThetaCoords::zeros(1).unwrap();
        theta.set(&mi("3"), 1.0);
        let rho = theta_to_density(&theta).unwrap();
        let z = 2.0 * 1f64.cosh();
        assert!((rho.matrix()[(0, 0)].re - 1f64.exp() / z).abs() < 1e-14);
        assert!((rho.matrix()[(1, 1)].re - (-1f64).exp() / z).abs() < 1e-14);

        let eta = density_to_eta(&rho).unwrap();
        assert!((eta.get(&mi("3")) - 1f64.tanh()).abs() < 1e-14);
    }

    #[test]
    fn demo_initial_state_is_full_rank() {
        let rho = theta_to_density(&demo_initial_theta()).unwrap();
        assert_eq!(rho.dim(), 8);
        assert!(rho.is_full_rank());
    }

    #[test]
    fn theta_overflow_guard() {
        let mut theta = ThetaCoords::zeros(1).unwrap();
        theta.set(&mi("3"), 51.0);
        assert!(matches!(
            theta_to_density(&theta),
            Err(Error::ThetaOverflow(_))
        ));
        assert!(matches!(psi(&theta), Err(Error::ThetaOverflow(_))));
    }

    #[test]
    fn eta_of_maximally_mixed_is_zero() {
        let eta = density_to_eta(&DensityMatrix::maximally_mixed(2).unwrap()).unwrap();
        assert!(eta.values().iter().all(|&v| v.abs() < 1e-15));
    }

    #[test]
    fn product_state_eta_factorizes() {
        let mut ta = ThetaCoords::zeros(1).unwrap();
        ta.set(&mi("3"), 0.7);
        ta.set(&mi("1"), -0.2);
        let mut tb = ThetaCoords::zeros(1).unwrap();
        tb.set(&mi("2"), 0.4);
        tb.set(&mi("3"), 0.1);
        let a = theta_to_density(&ta).unwrap();
        let b = theta_to_density(&tb).unwrap();
        let ab = DensityMatrix::new(a.matrix().kronecker(b.matrix()), 2).unwrap();

        let ea = density_to_eta(&a).unwrap();
        let eb = density_to_eta(&b).unwrap();
        let eab = density_to_eta(&ab).unwrap();
        for m1 in 1..4u8 {
            for m2 in 1..4u8 {
                let joint = eab.get(&MultiIndex::new(vec![m1, m2]).unwrap());
                let left = ea.get(&MultiIndex::new(vec![m1]).unwrap());
                let right = eb.get(&MultiIndex::new(vec![m2]).unwrap());
                assert!((joint - left * right).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn eta_to_density_round_trip_and_rejection() {
        let rho = random_state(2, 3, 0.3);
        let eta = density_to_eta(&rho).unwrap();
        let back = eta_to_density(&eta).unwrap();
        assert!(max_abs_diff(rho.matrix(), back.matrix()) < 1e-12);

        assert!(
            max_abs_diff(
                eta_to_density(&EtaCoords::zeros(2).unwrap())
                    .unwrap()
                    .matrix(),
                DensityMatrix::maximally_mixed(2).unwrap().matrix()
            ) < 1e-15
        );

        // η³ = 2 would be diag(3,−1)/2: not a state.
        let mut eta = EtaCoords::zeros(1).unwrap();
        eta.set(&mi("3"), 2.0);
        match eta_to_density(&eta).unwrap_err() {
            Error::NotPositive(l) => assert!((l + 0.5).abs() < 1e-12),
            other => panic!("expected NotPositive, got {other:?}"),
        }
    }

    #[test]
    fn theta_round_trip() {
        assert!(
            density_to_theta(&DensityMatrix::maximally_mixed(3).unwrap())
                .unwrap()
                .values()
                .iter()
                .all(|&v| v.abs() < 1e-13)
        );

        for seed in 0..5u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let theta = random_theta(2, 0.3, &mut rng).unwrap();
            let rho = theta_to_density(&theta).unwrap();
            let back = density_to_theta(&rho).unwrap();
            assert!(theta.max_abs_diff(&back) < 1e-9, "seed {seed}");
        }
    }

    #[test]
    fn density_to_theta_rejects_rank_deficient() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = c(1.0, 0.0);
        let pure = DensityMatrix::new(m, 1).unwrap();
        assert!(matches!(
            density_to_theta(&pure),
            Err(Error::RankDeficient(_))
        ));
    }

    #[test]
    fn psi_closed_forms() {
        assert!((psi(&ThetaCoords::zeros(3).unwrap()).unwrap() - 8f64.ln()).abs() < 1e-13);
        for t in [0.1, 0.5, 1.0, 2.0] {
            let mut theta = ThetaCoords::zeros(1).unwrap();
            theta.set(&mi("3"), t);
            assert!((psi(&theta).unwrap() - (2.0 * t.cosh()).ln()).abs() < 1e-13);
        }
    }

    #[test]
    fn psi_gradient_is_eta() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let theta = random_theta(2, 0.3, &mut rng).unwrap();
        let eta = density_to_eta(&theta_to_density(&theta).unwrap()).unwrap();
        let h = 1e-5;
        for probe in [mi("30"), mi("12"), mi("03")] {
            let mut plus = theta.clone();
            plus.set(&probe, theta.get(&probe) + h);
            let mut minus = theta.clone();
            minus.set(&probe, theta.get(&probe) - h);
            let fd = (psi(&plus).unwrap() - psi(&minus).unwrap()) / (2.0 * h);
            assert!((fd - eta.get(&probe)).abs() < 1e-6, "index {probe}");
        }
    }

    #[test]
    fn phi_closed_form_and_gradient() {
        assert!((phi(&EtaCoords::zeros(3).unwrap()).unwrap() + 3.0 * 2f64.ln()).abs() < 1e-12);

        let rho = random_state(2, 21, 0.25);
        let eta = density_to_eta(&rho).unwrap();
        let theta = density_to_theta(&rho).unwrap();
        let h = 1e-5;
        for probe in [mi("03"), mi("21"), mi("33")] {
            let mut plus = eta.clone();
            plus.set(&probe, eta.get(&probe) + h);
            let mut minus = eta.clone();
            minus.set(&probe, eta.get(&probe) - h);
            let fd = (phi(&plus).unwrap() - phi(&minus).unwrap()) / (2.0 * h);
            assert!((fd - theta.get(&probe)).abs() < 1e-5, "index {probe}");
        }
    }

    #[test]
    fn legendre_identity() {
        let check = |rho: &DensityMatrix, label: &str| {
            let eta = density_to_eta(rho).unwrap();
            let theta = density_to_theta(rho).unwrap();
            let pairing: f64 = eta
                .values()
                .iter()
                .zip(theta.values())
                .map(|(e, t)| e * t)
                .sum();
            let residual = phi(&eta).unwrap() + psi(&theta).unwrap() - pairing;
            assert!(residual.abs() < 1e-9, "{label}: residual {residual:e}");
        };
        for seed in 0..100u64 {
            check(
                &random_state(2, 100 + seed, 0.3),
                &format!("2q seed {seed}"),
            );
        }
        for seed in 0..10u64 {
            check(
                &random_state(3, 700 + seed, 0.3),
                &format!("3q seed {seed}"),
            );
        }
    }

    #[test]
    fn mixed_identity_degenerate_cases() {
        let rho = random_state(2, 51, 0.3);
        let (lhs, rhs) = mixed_identity_check(&rho, &rho, &rho).unwrap();
        assert!(lhs.abs() < 1e-10 && rhs.abs() < 1e-10);

        let other = random_state(2, 52, 0.3);
        let (lhs, rhs) = mixed_identity_check(&rho, &other, &other).unwrap();
        assert!(lhs.abs() < 1e-10 && rhs.abs() < 1e-10);
    }

    #[test]
    fn mixed_identity_random_triples() {
        for seed in 0..10u64 {
            let a = random_state(2, 200 + 3 * seed, 0.3);
            let b = random_state(2, 201 + 3 * seed, 0.3);
            let c = random_state(2, 202 + 3 * seed, 0.3);
            let (lhs, rhs) = mixed_identity_check(&a, &b, &c).unwrap();
            assert!((lhs - rhs).abs() < 1e-8, "seed {seed}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn family_membership() {
        let n = 3;
        let mixed = DensityMatrix::maximally_mixed(n).unwrap();
        let e1 = ExponentialFamily::new(n, 1).unwrap();
        let e2 = ExponentialFamily::new(n, 2).unwrap();
        assert!(e1.contains(&mixed, 1e-10).unwrap());
        assert!(e2.contains(&mixed, 1e-10).unwrap());

        let rho_i = theta_to_density(&demo_initial_theta()).unwrap();
        assert!(e2.contains(&rho_i, 1e-9).unwrap());
        assert!(!e1.contains(&rho_i, 1e-3).unwrap());

        assert!(ExponentialFamily::new(3, 0).is_err());
        assert!(ExponentialFamily::new(3, 4).is_err());
    }

    #[test]
    fn psi_is_convex_on_midpoints() {
        for seed in 0..10u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(300 + seed);
            let a = random_theta(2, 0.4, &mut rng).unwrap();
            let b = random_theta(2, 0.4, &mut rng).unwrap();
            let mid = ThetaCoords::from_values(
                2,
                a.values()
                    .iter()
                    .zip(b.values())
                    .map(|(x, y)| 0.5 * (x + y))
                    .collect(),
            )
            .unwrap();
            let lhs = psi(&mid).unwrap();
            let rhs = 0.5 * (psi(&a).unwrap() + psi(&b).unwrap());
            assert!(lhs <= rhs + 1e-10, "seed {seed}");
        }
    }

    #[test]
    fn map_round_trip_and_validation() {
        let mut map = BTreeMap::new();
        map.insert("330".to_string(), 1.0);
        map.insert("303".to_string(), FRAC_1_SQRT_2);
        let theta = ThetaCoords::from_map(3, &map).unwrap();
        assert_eq!(theta.get(&mi("330")), 1.0);
        assert_eq!(theta.to_map(0.0), map);

        let mut bad = BTreeMap::new();
        bad.insert("000".to_string(), 1.0);
        assert!(ThetaCoords::from_map(3, &bad).is_err());
        let mut bad = BTreeMap::new();
        bad.insert("30".to_string(), 1.0);
        assert!(ThetaCoords::from_map(3, &bad).is_err());
    }

    #[test]
    fn reconstruction_from_eta_matches_identity_expansion() {
        // Σ_m η^m σ_m / 2^n with η^0 = 1 reproduces ρ.
        let rho = random_state(3, 77, 0.3);
        let eta = density_to_eta(&rho).unwrap();
        let dim = 8;
        let mut rebuilt = CMatrix::identity(dim, dim);
        for (m, v) in eta.iter() {
            accumulate_pauli(&mut rebuilt, &m, v);
        }
        rebuilt *= c(1.0 / dim as f64, 0.0);
        assert!(max_abs_diff(&rebuilt, rho.matrix()) < 1e-12);
        // and the Hilbert–Schmidt read-off agrees with hs_inner
        let m330 = mi("330");
        let dense = crate::pauli::pauli_operator(&m330).matrix;
        assert!((hs_inner(rho.matrix(), &dense).unwrap() - eta.get(&m330)).abs() < 1e-13);
    }
}
