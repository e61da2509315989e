//! Reduced density matrices and the rotated loop family `rho(phi; theta)`.
//!
//! Two-site matrices use the product basis `|00>, |01>, |10>, |11>` with site
//! 0 as the left tensor factor and `|0>` the `Z = +1` state.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::ising::Correlators;
use crate::linalg::{hermitian_eigen, kron, ComplexMatrix, C64};

/// Slack on `|m| <= 1` before a magnetization is rejected rather than clamped.
pub const MAGNETIZATION_SLACK: f64 = 1e-9;
/// Most negative eigenvalue tolerated in a constructed two-site state.
pub const PSD_CONSTRUCTION_TOL: f64 = 1e-10;
pub const DEFAULT_LOOP_STEPS: usize = 2000;
pub const MIN_LOOP_STEPS: usize = 16;

/// A one- or two-site reduced state that can be carried around the loop.
pub trait ReducedState {
    fn density(&self) -> &ComplexMatrix;
    fn sites(&self) -> usize;
}

#[derive(Clone, Debug)]
pub struct SingleSiteState {
    pub matrix: ComplexMatrix,
    pub m: f64,
}

#[derive(Clone, Debug)]
pub struct TwoSiteState {
    pub matrix: ComplexMatrix,
    pub source: Correlators,
}

impl ReducedState for SingleSiteState {
    fn density(&self) -> &ComplexMatrix {
        &self.matrix
    }
    fn sites(&self) -> usize {
        1
    }
}

impl ReducedState for TwoSiteState {
    fn density(&self) -> &ComplexMatrix {
        &self.matrix
    }
    fn sites(&self) -> usize {
        2
    }
}

/// `(I + m Z) / 2`.
pub fn single_site_state(m: f64) -> Result<SingleSiteState> {
    if !(m.abs() <= 1.0 + MAGNETIZATION_SLACK) {
        return Err(Error::InvalidParameter(format!("magnetization {m} outside [-1, 1]")));
    }
    let m = m.clamp(-1.0, 1.0);
    let diag = DVector::from_vec(vec![C64::new(0.5 * (1.0 + m), 0.0), C64::new(0.5 * (1.0 - m), 0.0)]);
    Ok(SingleSiteState { matrix: ComplexMatrix::from_diagonal(&diag), m })
}

/// `(1/4)(I + m (Z_0 + Z_r) + sum_a c_aa A_0 A_r)`, an X-shaped real matrix.
pub fn two_site_state(c: &Correlators) -> Result<TwoSiteState> {
    c.check_bounds()?;
    let Correlators { m, c_xx, c_yy, c_zz, .. } = *c;
    let re = |x: f64| C64::new(0.25 * x, 0.0);
    let mut rho = ComplexMatrix::zeros(4, 4);
    rho[(0, 0)] = re(1.0 + 2.0 * m + c_zz);
    rho[(1, 1)] = re(1.0 - c_zz);
    rho[(2, 2)] = re(1.0 - c_zz);
    rho[(3, 3)] = re(1.0 - 2.0 * m + c_zz);
    rho[(0, 3)] = re(c_xx - c_yy);
    rho[(3, 0)] = re(c_xx - c_yy);
    rho[(1, 2)] = re(c_xx + c_yy);
    rho[(2, 1)] = re(c_xx + c_yy);
    let min = hermitian_eigen(&rho)?.eigenvalues[0];
    if min < -PSD_CONSTRUCTION_TOL {
        return Err(Error::UnphysicalState { min_eigenvalue: min });
    }
    Ok(TwoSiteState { matrix: rho, source: *c })
}

/// Loop at fixed polar angle `theta`, sampled on `steps` azimuthal points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LoopSpec {
    pub theta: f64,
    pub steps: usize,
}

impl LoopSpec {
    pub fn new(theta: f64, steps: usize) -> Result<Self> {
        if !(0.0..=std::f64::consts::PI).contains(&theta) {
            return Err(Error::InvalidParameter(format!("theta = {theta} outside [0, pi]")));
        }
        if steps < MIN_LOOP_STEPS {
            return Err(Error::InvalidParameter(format!("loop steps {steps} < {MIN_LOOP_STEPS}")));
        }
        Ok(LoopSpec { theta, steps })
    }

    pub fn with_default_steps(theta: f64) -> Result<Self> {
        Self::new(theta, DEFAULT_LOOP_STEPS)
    }

    /// Enclosed solid angle `2 pi (1 - cos theta)`.
    pub fn solid_angle(&self) -> f64 {
        2.0 * std::f64::consts::PI * (1.0 - self.theta.cos())
    }
}

/// `R_z(phi) R_y(theta)` with `R_z(phi) = exp(-i phi Z / 2)`.
///
/// `R_z(2 pi) = -I`, so the single-site loop unitary closes only up to sign.
pub fn rotation_single(phi: f64, theta: f64) -> ComplexMatrix {
    let (s, c) = (0.5 * theta).sin_cos();
    let up = C64::from_polar(1.0, -0.5 * phi);
    let down = C64::from_polar(1.0, 0.5 * phi);
    ComplexMatrix::from_row_slice(2, 2, &[up * c, -up * s, down * s, down * c])
}

/// `d/dphi` of [`rotation_single`], differentiated entrywise.
pub fn rotation_single_dphi(phi: f64, theta: f64) -> ComplexMatrix {
    let (s, c) = (0.5 * theta).sin_cos();
    let up = C64::new(0.0, -0.5) * C64::from_polar(1.0, -0.5 * phi);
    let down = C64::new(0.0, 0.5) * C64::from_polar(1.0, 0.5 * phi);
    ComplexMatrix::from_row_slice(2, 2, &[up * c, -up * s, down * s, down * c])
}

pub fn rotation_pair(phi: f64, theta: f64) -> ComplexMatrix {
    let u = rotation_single(phi, theta);
    kron(&u, &u)
}

/// Loop unitary for a state spanning `sites` spins.
pub fn rotation(sites: usize, phi: f64, theta: f64) -> ComplexMatrix {
    match sites {
        1 => rotation_single(phi, theta),
        2 => rotation_pair(phi, theta),
        _ => panic!("only one- and two-site states are supported"),
    }
}

/// `d/dphi` of [`rotation`].
pub fn rotation_dphi(sites: usize, phi: f64, theta: f64) -> ComplexMatrix {
    match sites {
        1 => rotation_single_dphi(phi, theta),
        2 => {
            let u = rotation_single(phi, theta);
            let du = rotation_single_dphi(phi, theta);
            kron(&du, &u) + kron(&u, &du)
        }
        _ => panic!("only one- and two-site states are supported"),
    }
}

/// `U(phi, theta) rho U(phi, theta)^dag`.
pub fn evolve<S: ReducedState + ?Sized>(state: &S, phi: f64, theta: f64) -> ComplexMatrix {
    let u = rotation(state.sites(), phi, theta);
    &u * state.density() * u.adjoint()
}

/// Traces out one site of a two-site matrix: `keep = 0` keeps the left factor.
pub fn partial_trace(rho: &ComplexMatrix, keep: usize) -> ComplexMatrix {
    assert_eq!(rho.nrows(), 4);
    ComplexMatrix::from_fn(2, 2, |a, b| {
        (0..2)
            .map(|k| match keep {
                0 => rho[(2 * a + k, 2 * b + k)],
                _ => rho[(2 * k + a, 2 * k + b)],
            })
            .sum()
    })
}
