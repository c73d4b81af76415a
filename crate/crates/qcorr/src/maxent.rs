//! Maximum-entropy projection onto the exponential family E_k.
//!
//! Given the order-k marginal expectations η⋆ of a source state, the state of
//! maximum von Neumann entropy matching them is the unique member of E_k with
//! those expectations — equivalently the relative-entropy projection
//! argmin_{σ ∈ E_k} S(ρ⋆‖σ). It is found by minimizing the smooth, strictly
//! convex dual
//!
//!   f(θ) = ψ(θ) − Σ_{m̄ constrained} η⋆^m̄ θ^m̄
//!
//! over θ supported on the constrained indices, whose gradient is exactly
//! η(θ) − η⋆. A BFGS iteration with Armijo backtracking, started from θ = 0
//! (the maximally mixed state, where the dual Hessian is the identity),
//! converges superlinearly on these small dense problems.

use nalgebra::{DMatrix, DVector};

use crate::coords::{log_partition, ExponentialFamily, ThetaCoords, THETA_L1_MAX};
use crate::hermitian::{eig_hermitian, relative_entropy, DensityMatrix};
use crate::pauli::{accumulate_pauli, pauli_expectation, CMatrix, MultiIndex};
use crate::{Error, Result};

const ARMIJO_C1: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;
/// Near the optimum the true descent per step falls below the roundoff of
/// the dual value; the Armijo test gets this much absolute slack so the
/// (still accurate) gradient can drive the final contraction.
const ARMIJO_NOISE_FLOOR: f64 = 1e-14;

/// Expectation targets for every nonzero index of weight ≤ order, extracted
/// from a source state. Fixing these is the same as fixing all order-k
/// reduced density matrices.
#[derive(Debug, Clone)]
pub struct MarginalConstraints {
    party_count: usize,
    order: usize,
    indices: Vec<MultiIndex>,
    targets: Vec<f64>,
}

impl MarginalConstraints {
    pub fn party_count(&self) -> usize {
        self.party_count
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Constrained (index, target) pairs in canonical index order.
    pub fn targets(&self) -> impl Iterator<Item = (&MultiIndex, f64)> {
        self.indices.iter().zip(self.targets.iter().copied())
    }

    pub fn target(&self, m: &MultiIndex) -> Option<f64> {
        self.indices
            .iter()
            .position(|i| i == m)
            .map(|p| self.targets[p])
    }
}

/// Read off Tr(ρ σ_m̄) for every nonzero index of weight ≤ `order`.
pub fn extract_constraints(rho: &DensityMatrix, order: usize) -> Result<MarginalConstraints> {
    let n = rho.party_count();
    if order == 0 || order > n {
        return Err(Error::InvalidOrder {
            order,
            party_count: n,
        });
    }
    let mut indices = Vec::new();
    let mut targets = Vec::new();
    for m in crate::pauli::enumerate_indices(n)? {
        if m.is_zero() || m.weight() > order {
            continue;
        }
        targets.push(pauli_expectation(rho.matrix(), &m)?);
        indices.push(m);
    }
    Ok(MarginalConstraints {
        party_count: n,
        order,
        indices,
        targets,
    })
}

/// Knobs for the projection solver.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Convergence criterion: max-abs marginal residual.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Log per-iteration residuals to standard error.
    pub verbose_trace: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-9,
            max_iterations: 500,
            verbose_trace: false,
        }
    }
}

/// A converged projection: the state, its θ (zero outside weight ≤ order),
/// and solver diagnostics.
#[derive(Debug, Clone)]
pub struct ProjectionResult {
    pub state: DensityMatrix,
    pub theta: ThetaCoords,
    pub order: usize,
    pub iterations: usize,
    /// Max-abs marginal mismatch at the returned θ.
    pub final_residual: f64,
    pub converged: bool,
}

/// One dual-function evaluation: value, constrained expectations, and the
/// state itself.
struct DualEval {
    value: f64,
    eta: DVector<f64>,
    rho: CMatrix,
}

fn eval_dual(
    theta: &DVector<f64>,
    constraints: &MarginalConstraints,
    dim: usize,
) -> Result<Option<DualEval>> {
    let l1: f64 = theta.iter().map(|v| v.abs()).sum();
    if l1 > THETA_L1_MAX {
        return Ok(None); // line search treats the guard as +∞
    }
    let mut h = CMatrix::zeros(dim, dim);
    for (j, m) in constraints.indices.iter().enumerate() {
        if theta[j] != 0.0 {
            accumulate_pauli(&mut h, m, theta[j]);
        }
    }
    let spectrum = eig_hermitian(&h)?;
    let psi = log_partition(&spectrum);
    let rho = spectrum.apply(|l| (l - psi).exp());
    let mut eta = DVector::zeros(constraints.len());
    for (j, m) in constraints.indices.iter().enumerate() {
        eta[j] = pauli_expectation(&rho, m)?;
    }
    let pairing: f64 = constraints
        .targets
        .iter()
        .zip(theta.iter())
        .map(|(t, v)| t * v)
        .sum();
    Ok(Some(DualEval {
        value: psi - pairing,
        eta,
        rho,
    }))
}

/// Project onto E_order: the unique state whose weight-≤order expectations
/// match the targets within `opts.tolerance`.
pub fn project(
    constraints: &MarginalConstraints,
    opts: &SolverOptions,
) -> Result<ProjectionResult> {
    let n = constraints.party_count;
    let dim = 1usize << n;
    let d = constraints.len();

    let mut theta = DVector::zeros(d);
    let mut current =
        eval_dual(&theta, constraints, dim)?.expect("theta = 0 is inside the overflow guard");
    // Inverse Hessian estimate; exact at θ = 0 where Cov(σ_m̄) = I.
    let mut inv_hessian = DMatrix::<f64>::identity(d, d);

    let mut gradient = &current.eta - DVector::from_column_slice(&constraints.targets);
    let mut residual = gradient.amax();

    for iteration in 0..=opts.max_iterations {
        if opts.verbose_trace {
            eprintln!(
                "project[E_{}] iter {:3}  residual {:.3e}  dual {:.12}",
                constraints.order, iteration, residual, current.value
            );
        }
        if residual <= opts.tolerance {
            let mut full_theta = ThetaCoords::zeros(n)?;
            for (j, m) in constraints.indices.iter().enumerate() {
                full_theta.set(m, theta[j]);
            }
            return Ok(ProjectionResult {
                state: DensityMatrix::from_valid_parts(current.rho, n),
                theta: full_theta,
                order: constraints.order,
                iterations: iteration,
                final_residual: residual,
                converged: true,
            });
        }
        if iteration == opts.max_iterations {
            break;
        }

        let mut direction = -(&inv_hessian * &gradient);
        let mut slope = gradient.dot(&direction);
        if slope >= 0.0 {
            // Curvature estimate went bad; fall back to steepest descent.
            inv_hessian = DMatrix::identity(d, d);
            direction = -gradient.clone();
            slope = gradient.dot(&direction);
        }

        let mut step = 1.0;
        let mut accepted = None;
        let mut guard_blocked = true;
        let noise = ARMIJO_NOISE_FLOOR * (1.0 + current.value.abs());
        for _ in 0..MAX_BACKTRACKS {
            let candidate = &theta + &direction * step;
            if let Some(eval) = eval_dual(&candidate, constraints, dim)? {
                guard_blocked = false;
                if eval.value <= current.value + ARMIJO_C1 * step * slope + noise {
                    accepted = Some((candidate, eval));
                    break;
                }
            }
            step *= 0.5;
        }
        let (new_theta, new_eval) = match accepted {
            Some(pair) => pair,
            None if guard_blocked => {
                let l1: f64 = theta.iter().map(|v| v.abs()).sum();
                return Err(Error::InfeasibleTargets(l1));
            }
            None => {
                return Err(Error::NoConvergence {
                    iterations: iteration,
                    residual,
                })
            }
        };

        let new_gradient = &new_eval.eta - DVector::from_column_slice(&constraints.targets);
        let s = &new_theta - &theta;
        let y = &new_gradient - &gradient;
        let sy = s.dot(&y);
        if sy > 1e-12 * s.norm() * y.norm() {
            // BFGS update of the inverse Hessian.
            let rho_bfgs = 1.0 / sy;
            let hy = &inv_hessian * &y;
            let yhy = y.dot(&hy);
            let shyt = &s * hy.transpose();
            inv_hessian = inv_hessian - (&shyt + shyt.transpose()) * rho_bfgs
                + (&s * s.transpose()) * (rho_bfgs * (1.0 + yhy * rho_bfgs));
        }

        theta = new_theta;
        current = new_eval;
        gradient = new_gradient;
        residual = gradient.amax();
    }

    Err(Error::NoConvergence {
        iterations: opts.max_iterations,
        residual,
    })
}

/// Both sides of the Pythagorean identity at a converged projection:
///
///   S(ρ⋆‖probe) = S(ρ⋆‖ρ⋆ₖ) + S(ρ⋆ₖ‖probe)   for every probe ∈ E_k,
///
/// returned as (lhs, rhs). The probe must lie in the projection's family.
pub fn pythagorean_check(
    rho_star: &DensityMatrix,
    projection: &ProjectionResult,
    probe: &DensityMatrix,
) -> Result<(f64, f64)> {
    let family = ExponentialFamily::new(projection.theta.party_count(), projection.order)?;
    if !family.contains(probe, 1e-8)? {
        return Err(Error::ProbeOutsideFamily(projection.order));
    }
    let lhs = relative_entropy(rho_star, probe)?;
    let rhs = relative_entropy(rho_star, &projection.state)?
        + relative_entropy(&projection.state, probe)?;
    Ok((lhs, rhs))
}
