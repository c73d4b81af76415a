//! Dense Hermitian linear algebra: eigendecomposition, matrix exponential and
//! logarithm, entropies, quantum relative entropy, partial trace.
//!
//! Everything here is a spectral function of a Hermitian matrix, so all
//! results are basis-independent even when eigenvalues are degenerate.
//! Entropies are in nats.

use num_complex::Complex64;

use crate::pauli::{hs_inner, CMatrix, MAX_PARTIES};
use crate::{Error, Result};

/// Asymmetry below which inputs are silently symmetrized to (h + h†)/2;
/// anything larger is treated as a caller bug, not roundoff.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Looser asymmetry bound accepted by the spectral routines themselves.
pub const EIG_HERMITICITY_TOL: f64 = 1e-10;

/// Allowed deviation of a density-matrix trace from 1.
pub const TRACE_TOL: f64 = 1e-10;

/// Most negative eigenvalue tolerated in a density matrix.
pub const PSD_TOL: f64 = 1e-10;

/// Eigenvalues at or below this are treated as rank deficiency. Rank-deficient
/// states have no exponential-coordinate representation and are rejected
/// rather than regularized.
pub const FULL_RANK_EIG_MIN: f64 = 1e-12;

/// Largest eigenvalue accepted by the matrix exponential before f64 overflow.
pub const EXP_EIG_MAX: f64 = 700.0;

/// Eigenvalues below this contribute zero to −Σ λ ln λ.
const ENTROPY_EIG_FLOOR: f64 = 1e-15;

/// Largest |a_ij − conj(a_ji)| over all entries.
pub fn asymmetry(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let d = (a[(i, j)] - a[(j, i)].conj()).norm();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

/// Largest elementwise |a − b|; handy for matrix comparisons in tests.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch in max_abs_diff");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Symmetrize to (h + h†)/2 when the asymmetry is below `tol`, else error.
pub(crate) fn hermitize(h: &CMatrix, tol: f64) -> Result<CMatrix> {
    if h.nrows() != h.ncols() {
        return Err(Error::DimensionMismatch(h.nrows(), h.ncols()));
    }
    let asym = asymmetry(h);
    if asym > tol {
        return Err(Error::NotHermitian(asym));
    }
    Ok((h + h.adjoint()) * Complex64::new(0.5, 0.0))
}

/// Spectral decomposition of a Hermitian matrix: real eigenvalues in
/// ascending order, paired with the columns of a unitary eigenvector matrix.
#[derive(Debug, Clone)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
}

impl Spectrum {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    /// U diag(f(λ)) U† for a real scalar function f.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        self.apply_complex(|l| Complex64::new(f(l), 0.0))
    }

    /// U diag(f(λ)) U† for a complex-valued scalar function f.
    pub fn apply_complex(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let n = self.eigenvalues.len();
        let mut scaled = self.eigenvectors.clone();
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            let v = f(l);
            for i in 0..n {
                scaled[(i, j)] *= v;
            }
        }
        scaled * self.eigenvectors.adjoint()
    }

    /// U diag(λ) U†, for round-trip checks.
    pub fn reconstruct(&self) -> CMatrix {
        self.apply(|l| l)
    }
}

/// Full spectral decomposition of a Hermitian matrix.
///
/// Deterministic for a fixed input; dimension is capped at 2^MAX_PARTIES.
pub fn eig_hermitian(h: &CMatrix) -> Result<Spectrum> {
    if h.nrows() > (1 << MAX_PARTIES) {
        return Err(Error::DimensionMismatch(h.nrows(), 1 << MAX_PARTIES));
    }
    let h = hermitize(h, EIG_HERMITICITY_TOL)?;
    let n = h.nrows();
    let se = h.symmetric_eigen();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));

    let eigenvalues: Vec<f64> = order.iter().map(|&j| se.eigenvalues[j]).collect();
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &se.eigenvectors.column(src));
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// exp(h) for Hermitian h, via the spectrum. exp(0) = I.
pub fn matrix_exp(h: &CMatrix) -> Result<CMatrix> {
    let spectrum = eig_hermitian(h)?;
    if spectrum.max_eigenvalue() > EXP_EIG_MAX {
        return Err(Error::ExpOverflow(spectrum.max_eigenvalue()));
    }
    hermitize(&spectrum.apply(f64::exp), EIG_HERMITICITY_TOL)
}

/// ln(p) for Hermitian positive-definite p; inverse of [`matrix_exp`].
pub fn matrix_log(p: &CMatrix) -> Result<CMatrix> {
    let spectrum = eig_hermitian(p)?;
    if spectrum.min_eigenvalue() <= FULL_RANK_EIG_MIN {
        return Err(Error::RankDeficient(spectrum.min_eigenvalue()));
    }
    hermitize(&spectrum.apply(f64::ln), EIG_HERMITICITY_TOL)
}

/// A 2^n × 2^n density matrix: Hermitian, unit trace, positive semidefinite
/// within [`PSD_TOL`].
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: CMatrix,
    party_count: usize,
}

impl DensityMatrix {
    /// Validate and wrap a candidate density matrix.
    ///
    /// The matrix must be Hermitian within [`HERMITICITY_TOL`] (it is then
    /// symmetrized), have trace within [`TRACE_TOL`] of 1, and smallest
    /// eigenvalue at least −[`PSD_TOL`].
    pub fn new(matrix: CMatrix, party_count: usize) -> Result<Self> {
        if party_count == 0 || party_count > MAX_PARTIES {
            return Err(Error::PartyCountOutOfRange(party_count));
        }
        let dim = 1usize << party_count;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch(matrix.nrows(), dim));
        }
        let matrix = hermitize(&matrix, HERMITICITY_TOL)?;
        let trace: f64 = (0..dim).map(|i| matrix[(i, i)].re).sum();
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidTrace(trace));
        }
        let spectrum = eig_hermitian(&matrix)?;
        if spectrum.min_eigenvalue() < -PSD_TOL {
            return Err(Error::NotPositive(spectrum.min_eigenvalue()));
        }
        Ok(Self {
            matrix,
            party_count,
        })
    }

    /// Wrap a matrix that is valid by construction (outputs of the spectral
    /// routines and channels). Symmetrizes away roundoff; full validation
    /// runs only in debug builds.
    pub(crate) fn from_valid_parts(matrix: CMatrix, party_count: usize) -> Self {
        let matrix = (&matrix + matrix.adjoint()) * Complex64::new(0.5, 0.0);
        debug_assert!(
            {
                let trace: f64 = (0..matrix.nrows()).map(|i| matrix[(i, i)].re).sum();
                (trace - 1.0).abs() <= TRACE_TOL
            },
            "internal state lost unit trace"
        );
        Self {
            matrix,
            party_count,
        }
    }

    /// I / 2^n.
    pub fn maximally_mixed(party_count: usize) -> Result<Self> {
        if party_count == 0 || party_count > MAX_PARTIES {
            return Err(Error::PartyCountOutOfRange(party_count));
        }
        let dim = 1usize << party_count;
        let matrix = CMatrix::identity(dim, dim) * Complex64::new(1.0 / dim as f64, 0.0);
        Ok(Self {
            matrix,
            party_count,
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn party_count(&self) -> usize {
        self.party_count
    }

    pub fn dim(&self) -> usize {
        1 << self.party_count
    }

    /// Spectrum of the state. Cannot fail: the stored matrix is Hermitian by
    /// construction.
    pub fn spectrum(&self) -> Spectrum {
        eig_hermitian(&self.matrix).expect("stored density matrix is Hermitian")
    }

    /// True when the smallest eigenvalue clears the full-rank threshold.
    pub fn is_full_rank(&self) -> bool {
        self.spectrum().min_eigenvalue() > FULL_RANK_EIG_MIN
    }
}

/// S(ρ) = −Σ λ ln λ, clamping each term to zero below the eigenvalue floor.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    -rho.spectrum()
        .eigenvalues()
        .iter()
        .filter(|&&l| l > ENTROPY_EIG_FLOOR)
        .map(|&l| l * l.ln())
        .sum::<f64>()
}

/// Quantum relative entropy S(ρ‖σ) = Tr ρ (ln ρ − ln σ), in nats.
///
/// Both states must be full rank; a rank-deficient σ would make the
/// divergence infinite and is rejected.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), sigma.dim()));
    }
    let rho_spec = rho.spectrum();
    if rho_spec.min_eigenvalue() <= FULL_RANK_EIG_MIN {
        return Err(Error::RankDeficient(rho_spec.min_eigenvalue()));
    }
    let sigma_spec = sigma.spectrum();
    if sigma_spec.min_eigenvalue() <= FULL_RANK_EIG_MIN {
        return Err(Error::RankDeficient(sigma_spec.min_eigenvalue()));
    }
    let tr_rho_ln_rho: f64 = rho_spec.eigenvalues().iter().map(|&l| l * l.ln()).sum();
    let ln_sigma = sigma_spec.apply(f64::ln);
    let tr_rho_ln_sigma = hs_inner(rho.matrix(), &ln_sigma)?;
    Ok(tr_rho_ln_rho - tr_rho_ln_sigma)
}

/// Trace out every party not listed in `keep` (0-based party indices).
///
/// Kept parties stay in their original relative order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = rho.party_count();
    if keep.is_empty() {
        return Err(Error::InvalidSubset("empty party subset".into()));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    for pair in kept.windows(2) {
        if pair[0] == pair[1] {
            return Err(Error::InvalidSubset(format!("duplicate party {}", pair[0])));
        }
    }
    if let Some(&bad) = kept.iter().find(|&&p| p >= n) {
        return Err(Error::PartyOutOfRange(bad, n));
    }

    let traced: Vec<usize> = (0..n).filter(|p| !kept.contains(p)).collect();
    let m = kept.len();
    let out_dim = 1usize << m;
    let trace_dim = 1usize << traced.len();

    // Bit of party p sits at position n−1−p of the full index.
    let assemble = |sub: usize, env: usize| -> usize {
        let mut full = 0usize;
        for (q, &p) in kept.iter().enumerate() {
            let bit = (sub >> (m - 1 - q)) & 1;
            full |= bit << (n - 1 - p);
        }
        for (r, &p) in traced.iter().enumerate() {
            let bit = (env >> (traced.len() - 1 - r)) & 1;
            full |= bit << (n - 1 - p);
        }
        full
    };

    let src = rho.matrix();
    let mut out = CMatrix::zeros(out_dim, out_dim);
    for a in 0..out_dim {
        for b in 0..out_dim {
            let mut sum = Complex64::new(0.0, 0.0);
            for env in 0..trace_dim {
                sum += src[(assemble(a, env), assemble(b, env))];
            }
            out[(a, b)] = sum;
        }
    }
    Ok(DensityMatrix::from_valid_parts(out, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{pauli_expectation, pauli_operator, MultiIndex};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn op(s: &str) -> CMatrix {
        pauli_operator(&MultiIndex::parse(s).unwrap()).matrix
    }

    fn random_hermitian(dim: usize, seed: u64, scale: f64) -> CMatrix {
        let mut state = seed.max(1);
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64 - 0.5) * 2.0 * scale
        };
        let mut h = CMatrix::zeros(dim, dim);
        for i in 0..dim {
            h[(i, i)] = c(next(), 0.0);
            for j in (i + 1)..dim {
                let z = c(next(), next());
                h[(i, j)] = z;
                h[(j, i)] = z.conj();
            }
        }
        h
    }

    #[test]
    fn eig_pauli_z() {
        let s = eig_hermitian(&op("3")).unwrap();
        assert_eq!(s.eigenvalues(), &[-1.0, 1.0]);
    }

    #[test]
    fn eig_identity_eight() {
        let s = eig_hermitian(&CMatrix::identity(8, 8)).unwrap();
        assert!(s.eigenvalues().iter().all(|&l| (l - 1.0).abs() < 1e-14));
    }

    #[test]
    fn eig_xx_spectrum() {
        let s = eig_hermitian(&op("11")).unwrap();
        let expect = [-1.0, -1.0, 1.0, 1.0];
        for (l, e) in s.eigenvalues().iter().zip(expect) {
            assert!((l - e).abs() < 1e-14);
        }
    }

    #[test]
    fn eig_reconstruction_and_unitarity() {
        let h = random_hermitian(16, 42, 1.0);
        let s = eig_hermitian(&h).unwrap();
        assert!(max_abs_diff(&s.reconstruct(), &h) < 1e-10);
        let gram = s.eigenvectors().adjoint() * s.eigenvectors();
        assert!(max_abs_diff(&gram, &CMatrix::identity(16, 16)) < 1e-10);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let mut h = CMatrix::zeros(2, 2);
        h[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(eig_hermitian(&h), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn eig_is_deterministic() {
        let h = random_hermitian(8, 99, 1.0);
        let a = eig_hermitian(&h).unwrap();
        let b = eig_hermitian(&h).unwrap();
        assert_eq!(a.eigenvalues(), b.eigenvalues());
        assert_eq!(max_abs_diff(a.eigenvectors(), b.eigenvectors()), 0.0);
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let e = matrix_exp(&CMatrix::zeros(4, 4)).unwrap();
        assert!(max_abs_diff(&e, &CMatrix::identity(4, 4)) < 1e-15);
    }

    #[test]
    fn exp_of_pauli_z() {
        let e = matrix_exp(&op("3")).unwrap();
        assert!((e[(0, 0)].re - 1f64.exp()).abs() < 1e-14);
        assert!((e[(1, 1)].re - (-1f64).exp()).abs() < 1e-14);
        assert!(e[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn thermal_qubit_magnetization() {
        // exp(σ_z)/Tr exp(σ_z) has ⟨σ_z⟩ = tanh 1.
        let e = matrix_exp(&op("3")).unwrap();
        let trace: f64 = (0..2).map(|i| e[(i, i)].re).sum();
        let rho = e * c(1.0 / trace, 0.0);
        let m3 = MultiIndex::parse("3").unwrap();
        let eta = pauli_expectation(&rho, &m3).unwrap();
        assert!((eta - 1f64.tanh()).abs() < 1e-14);
    }

    #[test]
    fn exp_overflow_guard() {
        let h = op("3") * c(701.0, 0.0);
        assert!(matches!(matrix_exp(&h), Err(Error::ExpOverflow(_))));
    }

    #[test]
    fn log_inverts_exp() {
        let id = CMatrix::identity(4, 4);
        assert!(max_abs_diff(&matrix_log(&id).unwrap(), &CMatrix::zeros(4, 4)) < 1e-15);

        let diag_ez = matrix_exp(&op("3")).unwrap();
        assert!(max_abs_diff(&matrix_log(&diag_ez).unwrap(), &op("3")) < 1e-13);

        for seed in 1..=5u64 {
            // Spectral radius pinned to 5: the round-trip condition number
            // grows like e^(2R), and past R ≈ 6 double precision can no
            // longer certify 1e-9.
            let raw = random_hermitian(8, seed, 1.0);
            let radius = eig_hermitian(&raw)
                .unwrap()
                .eigenvalues()
                .iter()
                .fold(0.0f64, |m, &l| m.max(l.abs()));
            let h = raw * c(5.0 / radius, 0.0);
            let round = matrix_log(&matrix_exp(&h).unwrap()).unwrap();
            assert!(max_abs_diff(&round, &h) < 1e-9, "seed {seed}");
        }
    }

    #[test]
    fn log_rejects_rank_deficiency() {
        let mut p = CMatrix::zeros(2, 2);
        p[(0, 0)] = c(1.0, 0.0);
        let err = matrix_log(&p).unwrap_err();
        match err {
            Error::RankDeficient(l) => assert!(l.abs() < 1e-12),
            other => panic!("expected RankDeficient, got {other:?}"),
        }
    }

    #[test]
    fn density_matrix_validation() {
        let ok = DensityMatrix::maximally_mixed(3).unwrap();
        assert_eq!(ok.dim(), 8);

        // wrong trace
        let m = CMatrix::identity(2, 2);
        assert!(matches!(
            DensityMatrix::new(m, 1),
            Err(Error::InvalidTrace(_))
        ));

        // negative eigenvalue
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = c(1.5, 0.0);
        m[(1, 1)] = c(-0.5, 0.0);
        assert!(matches!(
            DensityMatrix::new(m, 1),
            Err(Error::NotPositive(_))
        ));

        // non-Hermitian beyond tolerance
        let mut m = CMatrix::identity(2, 2) * c(0.5, 0.0);
        m[(0, 1)] = c(1e-6, 0.0);
        assert!(matches!(
            DensityMatrix::new(m, 1),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn entropy_of_maximally_mixed() {
        let rho = DensityMatrix::maximally_mixed(3).unwrap();
        assert!((von_neumann_entropy(&rho) - 3.0 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn entropy_stays_within_bounds() {
        for seed in 1..=20u64 {
            let h = random_hermitian(8, seed, 0.6);
            let e = matrix_exp(&h).unwrap();
            let trace: f64 = (0..8).map(|i| e[(i, i)].re).sum();
            let rho = DensityMatrix::new(e * c(1.0 / trace, 0.0), 3).unwrap();
            let s = von_neumann_entropy(&rho);
            assert!(
                s >= 0.0 && s <= 3.0 * 2f64.ln() + 1e-10,
                "seed {seed}: S = {s}"
            );
        }
    }

    #[test]
    fn klein_inequality_on_many_pairs() {
        let mk = |s: u64| {
            let h = random_hermitian(4, s, 0.5);
            let e = matrix_exp(&h).unwrap();
            let trace: f64 = (0..4).map(|i| e[(i, i)].re).sum();
            DensityMatrix::new(e * c(1.0 / trace, 0.0), 2).unwrap()
        };
        for seed in 0..100u64 {
            let rho = mk(2 * seed + 1);
            let sigma = mk(2 * seed + 2);
            let s = relative_entropy(&rho, &sigma).unwrap();
            assert!(s >= -1e-10, "seed {seed}: S(ρ‖σ) = {s:e}");
        }
    }

    #[test]
    fn entropy_of_thermal_qubit_and_products() {
        // diag(e, e⁻¹)/(e + e⁻¹): S = ln(2 cosh 1) − tanh 1.
        let z = 2.0 * 1f64.cosh();
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = c(1f64.exp() / z, 0.0);
        m[(1, 1)] = c((-1f64).exp() / z, 0.0);
        let rho = DensityMatrix::new(m.clone(), 1).unwrap();
        let expected = (2.0 * 1f64.cosh()).ln() - 1f64.tanh();
        assert!((von_neumann_entropy(&rho) - expected).abs() < 1e-12);

        // additivity on a threefold product
        let prod = m.kronecker(&m).kronecker(&m);
        let rho3 = DensityMatrix::new(prod, 3).unwrap();
        assert!((von_neumann_entropy(&rho3) - 3.0 * expected).abs() < 1e-12);
    }

    #[test]
    fn relative_entropy_klein_equality() {
        for seed in 1..=5u64 {
            let h = random_hermitian(8, seed, 0.4);
            let e = matrix_exp(&h).unwrap();
            let trace: f64 = (0..8).map(|i| e[(i, i)].re).sum();
            let rho = DensityMatrix::new(e * c(1.0 / trace, 0.0), 3).unwrap();
            let s = relative_entropy(&rho, &rho).unwrap();
            assert!(s.abs() < 1e-10, "S(ρ‖ρ) = {s:e}");
        }
    }

    #[test]
    fn relative_entropy_classical_pair() {
        // S(diag(0.9, 0.1) ‖ I/2) = 0.9 ln 1.8 + 0.1 ln 0.2
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = c(0.9, 0.0);
        m[(1, 1)] = c(0.1, 0.0);
        let rho = DensityMatrix::new(m, 1).unwrap();
        let sigma = DensityMatrix::maximally_mixed(1).unwrap();
        let expected = 0.9 * 1.8f64.ln() + 0.1 * 0.2f64.ln();
        assert!((relative_entropy(&rho, &sigma).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn relative_entropy_rejects_rank_deficient() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = c(1.0, 0.0);
        let pure = DensityMatrix::new(m, 1).unwrap();
        let mixed = DensityMatrix::maximally_mixed(1).unwrap();
        assert!(matches!(
            relative_entropy(&mixed, &pure),
            Err(Error::RankDeficient(_))
        ));
    }

    #[test]
    fn partial_trace_of_product_recovers_factor() {
        let z = 2.0 * 1f64.cosh();
        let mut a = CMatrix::zeros(2, 2);
        a[(0, 0)] = c(1f64.exp() / z, 0.0);
        a[(1, 1)] = c((-1f64).exp() / z, 0.0);
        let mut b = CMatrix::zeros(2, 2);
        b[(0, 0)] = c(0.25, 0.0);
        b[(1, 1)] = c(0.75, 0.0);
        b[(0, 1)] = c(0.1, 0.05);
        b[(1, 0)] = c(0.1, -0.05);
        let joint = DensityMatrix::new(a.kronecker(&b), 2).unwrap();

        let left = partial_trace(&joint, &[0]).unwrap();
        assert!(max_abs_diff(left.matrix(), &a) < 1e-14);
        let right = partial_trace(&joint, &[1]).unwrap();
        assert!(max_abs_diff(right.matrix(), &b) < 1e-14);
    }

    #[test]
    fn partial_trace_of_mixed_to_single_party() {
        let rho = DensityMatrix::maximally_mixed(3).unwrap();
        let single = partial_trace(&rho, &[1]).unwrap();
        let expected = CMatrix::identity(2, 2) * c(0.5, 0.0);
        assert!(max_abs_diff(single.matrix(), &expected) < 1e-15);
    }

    #[test]
    fn partial_trace_eta_consistency() {
        // Tr(Tr_3(ρ) σ_(m1,m2)) = Tr(ρ σ_(m1,m2,0))
        let h = random_hermitian(8, 7, 0.3);
        let e = matrix_exp(&h).unwrap();
        let trace: f64 = (0..8).map(|i| e[(i, i)].re).sum();
        let rho = DensityMatrix::new(e * c(1.0 / trace, 0.0), 3).unwrap();
        let reduced = partial_trace(&rho, &[0, 1]).unwrap();
        for m1 in 0..4u8 {
            for m2 in 0..4u8 {
                let short = MultiIndex::new(vec![m1, m2]).unwrap();
                let long = MultiIndex::new(vec![m1, m2, 0]).unwrap();
                let lhs = pauli_expectation(reduced.matrix(), &short).unwrap();
                let rhs = pauli_expectation(rho.matrix(), &long).unwrap();
                assert!((lhs - rhs).abs() < 1e-12, "index {m1}{m2}");
            }
        }
    }

    #[test]
    fn partial_trace_subset_errors() {
        let rho = DensityMatrix::maximally_mixed(2).unwrap();
        assert!(matches!(
            partial_trace(&rho, &[]),
            Err(Error::InvalidSubset(_))
        ));
        assert!(matches!(
            partial_trace(&rho, &[0, 0]),
            Err(Error::InvalidSubset(_))
        ));
        assert!(matches!(
            partial_trace(&rho, &[2]),
            Err(Error::PartyOutOfRange(2, 2))
        ));
    }

    #[test]
    fn monotonicity_under_partial_trace_sampled() {
        // S(ρ‖σ) ≥ S(Tr_B ρ ‖ Tr_B σ); the acceptance suite runs 100 pairs.
        for seed in 1..=10u64 {
            let mk = |s: u64| {
                let h = random_hermitian(4, s, 0.5);
                let e = matrix_exp(&h).unwrap();
                let trace: f64 = (0..4).map(|i| e[(i, i)].re).sum();
                DensityMatrix::new(e * c(1.0 / trace, 0.0), 2).unwrap()
            };
            let rho = mk(seed);
            let sigma = mk(seed + 1000);
            let full = relative_entropy(&rho, &sigma).unwrap();
            for keep in [[0usize], [1usize]] {
                let reduced = relative_entropy(
                    &partial_trace(&rho, &keep).unwrap(),
                    &partial_trace(&sigma, &keep).unwrap(),
                )
                .unwrap();
                assert!(full - reduced >= -1e-8, "seed {seed} keep {keep:?}");
            }
        }
    }
}
