//! Interferometric phase
//! `arg sum_n p_n <n(0)|n(2 pi)> exp(-int <n|d_phi n> dphi)`.
//!
//! Eigenvectors are carried by the loop unitary, `|n(phi)> = U(phi)|n>`.
//! Because the generator `K = (d_phi U) U^dag` does not depend on `phi`, the
//! connection integrand `<n|U^dag K U|n>` is constant and the integral is
//! `2 pi <n|U(0)^dag K U(0)|n>`.
//!
//! Degenerate eigenvalues are handled block-wise: within a block of equal
//! `p` the scalar factors become `Tr[W_b exp(-2 pi K_b)]`, with `W_b` and
//! `K_b` the block restrictions of `U(0)^dag U(2 pi)` and `U(0)^dag K U(0)`.
//! This is the parallel-transport generalization and is independent of the
//! basis chosen inside the block; for a non-degenerate spectrum it is the
//! per-eigenvector sum above.

use std::f64::consts::PI;

use nalgebra::DVector;

use super::{wrap_phase, LoopGenerator, VISIBILITY_FLOOR};
use crate::error::{Error, Result};
use crate::ising::{CouplingRatio, IsingChain};
use crate::linalg::{expm_antihermitian, hermitian_eigen, trace, ComplexMatrix, C64};
use crate::quad::{integrate, QuadOptions};
use crate::states::{rotation, rotation_dphi, single_site_state, two_site_state, ReducedState};

/// Eigenvalues closer than this share a block.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// `2 pi <n|U(0)^dag K U(0)|n>` for a (normalized) eigenvector `v`.
pub fn connection_integral_closed(v: &DVector<C64>, sites: usize, theta: f64) -> C64 {
    let u0 = rotation(sites, 0.0, theta);
    let k = LoopGenerator::for_sites(sites).k;
    let w = &u0 * v;
    (w.adjoint() * k * &w)[(0, 0)] * (2.0 * PI)
}

/// The same integral by adaptive quadrature of `<n|U(phi)^dag d_phi U(phi)|n>`
/// over `[0, 2 pi]`, with `d_phi U` taken from the explicit matrix entries.
pub fn connection_integral_quadrature(v: &DVector<C64>, sites: usize, theta: f64, tol: f64) -> Result<C64> {
    let integrand = |phi: f64| {
        let u = rotation(sites, phi, theta);
        let du = rotation_dphi(sites, phi, theta);
        ((u * v).adjoint() * (du * v))[(0, 0)]
    };
    let opts = QuadOptions { tol, max_depth: 30, initial_panels: 8 };
    let re = integrate(|phi| integrand(phi).re, 0.0, 2.0 * PI, &opts)?;
    let im = integrate(|phi| integrand(phi).im, 0.0, 2.0 * PI, &opts)?;
    Ok(C64::new(re.value, im.value))
}

/// Groups ascending eigenvalues into runs closer than [`DEGENERACY_TOL`].
fn degenerate_blocks(eigenvalues: &[f64]) -> Vec<std::ops::Range<usize>> {
    let mut blocks = Vec::new();
    let mut start = 0;
    for i in 1..=eigenvalues.len() {
        if i == eigenvalues.len() || eigenvalues[i] - eigenvalues[i - 1] >= DEGENERACY_TOL {
            blocks.push(start..i);
            start = i;
        }
    }
    blocks
}

/// Spectral amplitude built from an explicit eigenbasis, e.g. one rotated inside
/// degenerate blocks. The result does not depend on that choice.
pub fn amplitude_in_basis(
    eigenvalues: &[f64],
    eigenvectors: &ComplexMatrix,
    sites: usize,
    theta: f64,
) -> Result<C64> {
    let u0 = rotation(sites, 0.0, theta);
    let u_loop = rotation(sites, 2.0 * PI, theta);
    let k = LoopGenerator::for_sites(sites).k;
    let overlap = u0.adjoint() * &u_loop;
    let connection = u0.adjoint() * k * &u0;

    let mut amplitude = C64::ZERO;
    for block in degenerate_blocks(eigenvalues) {
        let weight = eigenvalues[block.clone()].iter().sum::<f64>() / block.len() as f64;
        let basis = eigenvectors.columns(block.start, block.len()).into_owned();
        let w_b = basis.adjoint() * &overlap * &basis;
        let k_b = basis.adjoint() * &connection * &basis;
        let transport = expm_antihermitian(&k_b, -2.0 * PI)?;
        amplitude += trace(&(w_b * transport)) * weight;
    }
    Ok(amplitude)
}

/// Complex loop amplitude whose argument is the interferometric phase.
pub fn interferometric_amplitude<S: ReducedState + ?Sized>(state: &S, theta: f64) -> Result<C64> {
    let eig = hermitian_eigen(state.density())?;
    amplitude_in_basis(&eig.eigenvalues, &eig.eigenvectors, state.sites(), theta)
}

/// Interferometric phase in `(-pi, pi]`.
pub fn interferometric_phase<S: ReducedState + ?Sized>(state: &S, theta: f64) -> Result<f64> {
    let amplitude = interferometric_amplitude(state, theta)?;
    if amplitude.norm() < VISIBILITY_FLOOR {
        return Err(Error::VanishingVisibility { magnitude: amplitude.norm() });
    }
    Ok(wrap_phase(amplitude.arg()))
}

/// `-arctan(m tan(Omega/2))` with `Omega = 2 pi (1 - cos theta)`, principal branch.
///
/// Where `tan(Omega/2)` diverges the one-sided limit approached from below is
/// returned, `-(pi/2) sign(m sin(Omega/2))`.
pub fn single_site_phase_closed(m: f64, theta: f64) -> f64 {
    let half = PI * (1.0 - theta.cos());
    let (s, c) = half.sin_cos();
    if m == 0.0 {
        return 0.0;
    }
    if c.abs() < 1e-15 {
        return -0.5 * PI * (m * s).signum();
    }
    -(m * s / c).atan()
}

/// `gamma(rho_pair) - 2 gamma(rho_single)`, both by the spectral formula.
///
/// The single-site spectral phase differs from [`single_site_phase_closed`]
/// by `pi` (the `R_z(2 pi) = -I` sign); doubling removes the offset, so using
/// one code path for both terms keeps the difference convention independent.
pub fn delta_gamma_from_states<P, S>(pair: &P, single: &S, theta: f64) -> Result<f64>
where
    P: ReducedState + ?Sized,
    S: ReducedState + ?Sized,
{
    let gp = interferometric_phase(pair, theta)?;
    let gs = interferometric_phase(single, theta)?;
    Ok(wrap_phase(gp - 2.0 * gs))
}

pub fn delta_gamma(params: &CouplingRatio, r: usize, theta: f64) -> Result<f64> {
    let chain = IsingChain::new(*params)?;
    let c = chain.correlators(r)?;
    delta_gamma_from_states(&two_site_state(&c)?, &single_site_state(c.m)?, theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::Correlators;
    use crate::linalg::{expm_antihermitian, kron};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Distance between two phases modulo `period`.
    fn mod_dist(a: f64, b: f64, period: f64) -> f64 {
        let d = (a - b).rem_euclid(period);
        d.min(period - d)
    }

    struct Raw(ComplexMatrix, usize);
    impl ReducedState for Raw {
        fn density(&self) -> &ComplexMatrix {
            &self.0
        }
        fn sites(&self) -> usize {
            self.1
        }
    }

    fn random_unitary(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
        let a = ComplexMatrix::from_fn(n, n, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        expm_antihermitian(&(&a - a.adjoint()), 1.0).unwrap()
    }

    #[test]
    fn pure_single_site_is_berry_phase() {
        let s = single_site_state(1.0).unwrap();
        for theta in [0.2, 0.9, 1.4, 2.3, 3.0] {
            let omega = 2.0 * PI * (1.0 - f64::cos(theta));
            let g = interferometric_phase(&s, theta).unwrap();
            assert!(mod_dist(g, -omega / 2.0, 2.0 * PI) < 1e-12, "theta {theta}: {g}");
        }
    }

    #[test]
    fn zero_polar_angle_gives_zero() {
        for m in [0.1, 0.6, 1.0] {
            let g = interferometric_phase(&single_site_state(m).unwrap(), 0.0).unwrap();
            assert!(g.abs() < 1e-14);
        }
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(single_site_phase_closed(0.7, 0.0), 0.0);
        assert!(single_site_phase_closed(0.7, PI / 2.0).abs() < 1e-14);
        assert_eq!(single_site_phase_closed(0.0, 1.2), 0.0);
        // Omega/2 = pi/2 at cos(theta) = 1/2
        let g = single_site_phase_closed(0.5, PI / 3.0);
        assert!((g.abs() - PI / 2.0).abs() < 1e-6);
    }

    #[test]
    fn spectral_single_site_is_closed_form_plus_pi() {
        for i in 0..20 {
            for j in 0..20 {
                let m = -0.95 + 1.9 * i as f64 / 19.0;
                let theta = 0.05 + 3.0 * j as f64 / 19.0;
                let spectral = interferometric_phase(&single_site_state(m).unwrap(), theta).unwrap();
                let closed = single_site_phase_closed(m, theta);
                assert!(mod_dist(spectral, closed, PI) < 1e-10, "m {m} theta {theta}");
                // The offset is exactly pi where the arctan branch is the principal one.
                if (PI * (1.0 - theta.cos())).cos() < -1e-3 {
                    assert!(mod_dist(spectral, closed + PI, 2.0 * PI) < 1e-10, "m {m} theta {theta}");
                }
            }
        }
    }

    #[test]
    fn closed_and_quadrature_connection_agree() {
        let c = Correlators { r: 1, m: 0.6, c_xx: 0.5, c_yy: -0.2, c_zz: 0.45 };
        let pair = two_site_state(&c).unwrap();
        let eig = hermitian_eigen(&pair.matrix).unwrap();
        for theta in [0.0, 0.4, 1.3, 2.8] {
            for n in 0..4 {
                let v = eig.vector(n);
                let a = connection_integral_closed(&v, 2, theta);
                let b = connection_integral_quadrature(&v, 2, theta, 1e-12).unwrap();
                assert!((a - b).norm() <= 1e-10, "{a} vs {b}");
                assert!(a.re.abs() < 1e-14);
            }
        }
    }

    #[test]
    fn gauge_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let c = Correlators { r: 2, m: 0.4, c_xx: 0.3, c_yy: -0.05, c_zz: 0.2 };
        let pair = two_site_state(&c).unwrap();
        let eig = hermitian_eigen(&pair.matrix).unwrap();
        for theta in [0.3, 1.1, 2.0] {
            let base = interferometric_phase(&pair, theta).unwrap();
            for _ in 0..20 {
                let mut v = eig.eigenvectors.clone();
                for n in 0..4 {
                    let phase = C64::from_polar(1.0, rng.random_range(0.0..2.0 * PI));
                    for i in 0..4 {
                        v[(i, n)] *= phase;
                    }
                }
                let a = amplitude_in_basis(&eig.eigenvalues, &v, 2, theta).unwrap();
                assert!(mod_dist(a.arg(), base, 2.0 * PI) < 1e-10);
            }
        }
    }

    #[test]
    fn degenerate_block_rotation_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        // fully degenerate, and a two-fold block in the middle
        let states = [
            Correlators { r: 1, m: 0.0, c_xx: 0.0, c_yy: 0.0, c_zz: 0.0 },
            Correlators { r: 5, m: 0.5, c_xx: 0.0, c_yy: 0.0, c_zz: 0.3 },
        ];
        for c in states {
            let rho = two_site_state(&c).unwrap();
            let eig = hermitian_eigen(&rho.matrix).unwrap();
            let blocks = degenerate_blocks(&eig.eigenvalues);
            assert!(blocks.iter().any(|b| b.len() > 1));
            for theta in [0.4, 1.0, 2.2] {
                let base = amplitude_in_basis(&eig.eigenvalues, &eig.eigenvectors, 2, theta).unwrap();
                for _ in 0..2 {
                    let mut v = eig.eigenvectors.clone();
                    for b in &blocks {
                        let q = random_unitary(&mut rng, b.len());
                        let rotated = v.columns(b.start, b.len()) * q;
                        v.columns_mut(b.start, b.len()).copy_from(&rotated);
                    }
                    let a = amplitude_in_basis(&eig.eigenvalues, &v, 2, theta).unwrap();
                    assert!((a - base).norm() < 1e-12, "{a} vs {base}");
                }
            }
        }
    }

    #[test]
    fn product_state_factorizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..200 {
            let m = rng.random_range(-0.99..0.99);
            let theta = rng.random_range(0.0..PI);
            let single = single_site_state(m).unwrap();
            let product = Raw(kron(&single.matrix, &single.matrix), 2);
            let (Ok(gp), Ok(gs)) = (interferometric_phase(&product, theta), interferometric_phase(&single, theta))
            else {
                continue;
            };
            assert!(mod_dist(gp, 2.0 * gs, 2.0 * PI) < 1e-9);
        }
    }

    #[test]
    fn delta_gamma_vanishes_for_product_limit() {
        let p = CouplingRatio::new(1e-6).unwrap();
        let d = delta_gamma(&p, 1, PI / 3.0).unwrap();
        assert!(d.abs() < 1e-6, "{d}");
    }

    #[test]
    fn vanishing_visibility_is_an_error() {
        // Diagonal two-site state at cos theta = 1/2: the amplitude is
        // -p_00 + p_01 + p_10 - p_11, which cancels for these weights.
        let rho = ComplexMatrix::from_diagonal(&DVector::from_vec(
            [0.3, 0.35, 0.15, 0.2].iter().map(|&p| C64::new(p, 0.0)).collect(),
        ));
        let state = Raw(rho, 2);
        assert!(matches!(interferometric_phase(&state, PI / 3.0), Err(Error::VanishingVisibility { .. })));
        // Maximally mixed single site: the degenerate block is transported trivially.
        let s = single_site_state(0.0).unwrap();
        assert!(interferometric_phase(&s, PI / 3.0).unwrap().abs() < 1e-12);
    }
}
