//! Classical maximum-entropy fitting for n-bit joint distributions.
//!
//! Iterative proportional fitting over all k-variable marginals gives the
//! classical analog of the quantum projection. Density matrices that are
//! diagonal in the computational basis commute with their constraints, so on
//! them the quantum solver must reproduce these numbers exactly — the test
//! suites use this module as an independent oracle.

use std::collections::BTreeMap;

use crate::hermitian::DensityMatrix;
use crate::{Error, Result};

/// Default IPF convergence tolerance on the max marginal residual.
pub const IPF_TOL: f64 = 1e-10;

/// Default bound on IPF cycles.
pub const IPF_MAX_CYCLES: usize = 10_000;

/// A joint distribution over n binary variables; bit of variable p sits at
/// position n−1−p, matching the computational-basis convention.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    party_count: usize,
    probabilities: Vec<f64>,
}

impl JointDistribution {
    pub fn new(party_count: usize, probabilities: Vec<f64>) -> Result<Self> {
        if party_count == 0 || party_count > crate::pauli::MAX_PARTIES {
            return Err(Error::PartyCountOutOfRange(party_count));
        }
        let size = 1usize << party_count;
        if probabilities.len() != size {
            return Err(Error::InvalidDistribution(format!(
                "length {} does not match 2^{party_count}",
                probabilities.len()
            )));
        }
        if probabilities.iter().any(|&p| !p.is_finite() || p < 0.0) {
            return Err(Error::InvalidDistribution(
                "negative or non-finite probability".into(),
            ));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(Self {
            party_count,
            probabilities,
        })
    }

    pub fn uniform(party_count: usize) -> Result<Self> {
        let size = 1usize << party_count;
        Self::new(party_count, vec![1.0 / size as f64; size])
    }

    /// A diagonal density matrix as a classical distribution. Off-diagonal
    /// weight above 1e-12 is rejected: the mapping only makes sense for
    /// states diagonal in the computational basis.
    pub fn from_diagonal(rho: &DensityMatrix) -> Result<Self> {
        let dim = rho.dim();
        let m = rho.matrix();
        for i in 0..dim {
            for j in 0..dim {
                if i != j && m[(i, j)].norm() > 1e-12 {
                    return Err(Error::InvalidDistribution(format!(
                        "state is not diagonal: |rho[{i},{j}]| = {:.3e}",
                        m[(i, j)].norm()
                    )));
                }
            }
        }
        Self::new(rho.party_count(), (0..dim).map(|i| m[(i, i)].re).collect())
    }

    pub fn party_count(&self) -> usize {
        self.party_count
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// Shannon entropy in nats.
    pub fn shannon_entropy(&self) -> f64 {
        -self
            .probabilities
            .iter()
            .filter(|&&p| p > 1e-15)
            .map(|&p| p * p.ln())
            .sum::<f64>()
    }

    /// Marginal table over the given variables (in the order listed).
    pub fn marginal(&self, subset: &[usize]) -> Vec<f64> {
        let mut table = vec![0.0; 1 << subset.len()];
        for (x, &p) in self.probabilities.iter().enumerate() {
            table[self.project(x, subset)] += p;
        }
        table
    }

    fn project(&self, x: usize, subset: &[usize]) -> usize {
        let n = self.party_count;
        subset.iter().enumerate().fold(0usize, |acc, (q, &p)| {
            let bit = (x >> (n - 1 - p)) & 1;
            acc | (bit << (subset.len() - 1 - q))
        })
    }
}

/// All size-k subsets of {0..n−1} in lexicographic order.
fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn recurse(
        start: usize,
        n: usize,
        k: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for v in start..n {
            current.push(v);
            recurse(v + 1, n, k, current, out);
            current.pop();
        }
    }
    recurse(0, n, k, &mut current, &mut out);
    out
}

fn max_marginal_residual(
    q: &JointDistribution,
    subsets: &[Vec<usize>],
    targets: &[Vec<f64>],
) -> f64 {
    subsets
        .iter()
        .zip(targets)
        .map(|(s, t)| {
            q.marginal(s)
                .iter()
                .zip(t)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

/// Iterative proportional fitting with a per-cycle entropy trace.
///
/// Starts from the uniform distribution and cyclically rescales by
/// target/current marginal ratios over every k-subset until the largest
/// marginal residual drops to `tol`. Returns the fit and the entropy after
/// each cycle (non-decreasing, a property the tests pin down).
pub fn ipf_project_with_trace(
    p: &JointDistribution,
    order: usize,
    tol: f64,
    max_cycles: usize,
) -> Result<(JointDistribution, Vec<f64>)> {
    let n = p.party_count();
    if order == 0 || order > n {
        return Err(Error::InvalidOrder {
            order,
            party_count: n,
        });
    }
    if p.probabilities.iter().any(|&v| v <= 0.0) {
        return Err(Error::InvalidDistribution(
            "IPF requires a strictly positive distribution".into(),
        ));
    }

    let subsets = k_subsets(n, order);
    let targets: Vec<Vec<f64>> = subsets.iter().map(|s| p.marginal(s)).collect();

    let mut q = JointDistribution::uniform(n)?;
    let mut entropies = Vec::new();
    for _ in 0..max_cycles {
        for (s, t) in subsets.iter().zip(&targets) {
            let current = q.marginal(s);
            for x in 0..q.probabilities.len() {
                let cell = q.project(x, s);
                q.probabilities[x] *= t[cell] / current[cell];
            }
        }
        // keep the total pinned against drift
        let total: f64 = q.probabilities.iter().sum();
        for v in &mut q.probabilities {
            *v /= total;
        }
        entropies.push(q.shannon_entropy());
        if max_marginal_residual(&q, &subsets, &targets) <= tol {
            return Ok((q, entropies));
        }
    }
    Err(Error::NoConvergence {
        iterations: max_cycles,
        residual: max_marginal_residual(&q, &subsets, &targets),
    })
}

/// Maximum-entropy distribution matching all k-variable marginals of `p`.
pub fn ipf_project(
    p: &JointDistribution,
    order: usize,
    tol: f64,
    max_cycles: usize,
) -> Result<JointDistribution> {
    Ok(ipf_project_with_trace(p, order, tol, max_cycles)?.0)
}

/// Connected information of each order: C_k = H(p⋆_{k−1}) − H(p⋆_k) with
/// p⋆_n = p, using the default IPF settings.
pub fn classical_connected_info(p: &JointDistribution) -> Result<BTreeMap<usize, f64>> {
    let n = p.party_count();
    let mut entropy_chain = Vec::with_capacity(n);
    for k in 1..n {
        entropy_chain.push(ipf_project(p, k, IPF_TOL, IPF_MAX_CYCLES)?.shannon_entropy());
    }
    entropy_chain.push(p.shannon_entropy());
    let mut c_k = BTreeMap::new();
    for k in 2..=n {
        c_k.insert(k, entropy_chain[k - 2] - entropy_chain[k - 1]);
    }
    Ok(c_k)
}
