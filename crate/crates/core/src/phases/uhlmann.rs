//! Uhlmann holonomy by the first-order ordered product
//! `V_{k+1} = exp(A(phi_k) dphi) V_k`, `V_0 = I`, with the connection
//!
//! ```text
//! A_nm = <n| [d_phi sqrt(rho), sqrt(rho)] |m> / (p_n + p_m)
//! ```
//!
//! in the instantaneous eigenbasis of `rho(phi)`. For the rotated family
//! `rho(phi) = U rho U^dag` one has `d_phi sqrt(rho) = [K, sqrt(rho)]`.
//!
//! The phase is `arg Tr[rho(0) V(2 pi)]`. Only full-rank states are accepted.

use std::f64::consts::PI;

use super::{wrap_phase, LoopGenerator, VISIBILITY_FLOOR};
use crate::error::{Error, Result};
use crate::linalg::{commutator, expm_antihermitian, hermitian_eigen, sqrt_from_eigen, trace, ComplexMatrix};
use crate::states::{evolve, LoopSpec, ReducedState};

pub const DEFAULT_RANK_EPS: f64 = 1e-8;

/// Analytic `d_phi sqrt(rho(phi)) = [K, sqrt(rho(phi))]`.
pub fn sqrt_derivative(rho_phi: &ComplexMatrix, generator: &LoopGenerator) -> Result<ComplexMatrix> {
    let eig = hermitian_eigen(rho_phi)?;
    let sqrt = sqrt_from_eigen(&eig)?;
    commutator(&generator.k, &sqrt)
}

/// The anti-Hermitian Uhlmann connection at one point of the loop, in the
/// fixed product basis.
///
/// In the eigenbasis, with `s_n = sqrt(p_n)` and `K' = V^dag K V`,
/// `[[K, sqrt(rho)], sqrt(rho)]_nm = K'_nm (s_m - s_n)^2`. Using this form
/// instead of forming the double commutator in the product basis keeps the
/// division by `p_n + p_m` well conditioned when both eigenvalues are small.
pub fn uhlmann_connection(rho_phi: &ComplexMatrix, generator: &LoopGenerator, rank_eps: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eigen(rho_phi)?;
    let min = eig.eigenvalues[0];
    if min < rank_eps {
        return Err(Error::RankDeficient { min_eigenvalue: min, rank_eps });
    }
    let v = &eig.eigenvectors;
    let p = &eig.eigenvalues;
    let s: Vec<f64> = p.iter().map(|x| x.sqrt()).collect();
    let mut a = v.adjoint() * &generator.k * v;
    for n in 0..p.len() {
        for m in 0..p.len() {
            let d = s[m] - s[n];
            a[(n, m)] *= d * d / (p[n] + p[m]);
        }
    }
    Ok(v * a * v.adjoint())
}

/// Ordered product over `steps` uniform azimuthal points.
fn holonomy_with_steps<S: ReducedState + ?Sized>(
    state: &S,
    theta: f64,
    steps: usize,
    rank_eps: f64,
) -> Result<ComplexMatrix> {
    let generator = LoopGenerator::for_sites(state.sites());
    let dim = state.density().nrows();
    let dphi = 2.0 * PI / steps as f64;
    let mut v = ComplexMatrix::identity(dim, dim);
    for k in 0..steps {
        let rho = evolve(state, k as f64 * dphi, theta);
        let a = uhlmann_connection(&rho, &generator, rank_eps)?;
        v = expm_antihermitian(&a, dphi)? * v;
    }
    Ok(v)
}

/// `V(2 pi)` for the loop.
pub fn uhlmann_holonomy<S: ReducedState + ?Sized>(
    state: &S,
    loop_spec: &LoopSpec,
    rank_eps: f64,
) -> Result<ComplexMatrix> {
    holonomy_with_steps(state, loop_spec.theta, loop_spec.steps, rank_eps)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UhlmannPhase {
    /// Principal value in `(-pi, pi]`.
    pub phase: f64,
    /// `|gamma(steps) - gamma(steps / 2)|`, reduced modulo `2 pi`.
    pub convergence_estimate: f64,
    pub steps: usize,
}

fn phase_of(rho0: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64> {
    let amplitude = trace(&(rho0 * v));
    if amplitude.norm() < VISIBILITY_FLOOR {
        return Err(Error::VanishingVisibility { magnitude: amplitude.norm() });
    }
    Ok(wrap_phase(amplitude.arg()))
}

/// `arg Tr[rho(0; theta) V(2 pi; theta)]` with a step-halving error estimate.
pub fn uhlmann_phase<S: ReducedState + ?Sized>(state: &S, loop_spec: &LoopSpec, rank_eps: f64) -> Result<UhlmannPhase> {
    let rho0 = evolve(state, 0.0, loop_spec.theta);
    let full = holonomy_with_steps(state, loop_spec.theta, loop_spec.steps, rank_eps)?;
    let half = holonomy_with_steps(state, loop_spec.theta, loop_spec.steps / 2, rank_eps)?;
    let phase = phase_of(&rho0, &full)?;
    let coarse = phase_of(&rho0, &half)?;
    Ok(UhlmannPhase {
        phase,
        convergence_estimate: wrap_phase(phase - coarse).abs(),
        steps: loop_spec.steps,
    })
}

/// `gamma_U(pair) - 2 gamma_U(single)` in `(-pi, pi]`, with both phases.
pub fn delta_gamma_u_from_states<P, S>(
    pair: &P,
    single: &S,
    loop_spec: &LoopSpec,
    rank_eps: f64,
) -> Result<(f64, UhlmannPhase, UhlmannPhase)>
where
    P: ReducedState + ?Sized,
    S: ReducedState + ?Sized,
{
    let p = uhlmann_phase(pair, loop_spec, rank_eps)?;
    let s = uhlmann_phase(single, loop_spec, rank_eps)?;
    Ok((wrap_phase(p.phase - 2.0 * s.phase), p, s))
}

/// `delta gamma_U` straight from the coupling. Rank failures are reported
/// as [`Error::InvalidParameter`] naming the offending `lambda`.
pub fn delta_gamma_u(
    params: &crate::ising::CouplingRatio,
    r: usize,
    loop_spec: &LoopSpec,
    rank_eps: f64,
) -> Result<(f64, UhlmannPhase, UhlmannPhase)> {
    let chain = crate::ising::IsingChain::new(*params)?;
    let c = chain.correlators(r)?;
    let pair = crate::states::two_site_state(&c)?;
    let single = crate::states::single_site_state(c.m)?;
    delta_gamma_u_from_states(&pair, &single, loop_spec, rank_eps).map_err(|e| match e {
        Error::RankDeficient { min_eigenvalue, rank_eps } => Error::InvalidParameter(format!(
            "lambda = {}: reduced state has eigenvalue {min_eigenvalue:.3e} below rank_eps {rank_eps:.1e}",
            params.lambda
        )),
        other => other,
    })
}
