//! Mixed-state geometric phases of the reduced states along the loop
//! `phi: 0 -> 2 pi` at fixed `theta`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::ising::IsingChain;
use crate::linalg::{kron, pauli_z, ComplexMatrix, C64};
use crate::states::{single_site_state, two_site_state, LoopSpec};

mod interferometric;
mod uhlmann;

pub use interferometric::{
    amplitude_in_basis, connection_integral_closed, connection_integral_quadrature, delta_gamma, delta_gamma_from_states,
    interferometric_amplitude, interferometric_phase, single_site_phase_closed, DEGENERACY_TOL,
};
pub use uhlmann::{
    delta_gamma_u, delta_gamma_u_from_states, sqrt_derivative, uhlmann_connection, uhlmann_holonomy,
    uhlmann_phase, UhlmannPhase, DEFAULT_RANK_EPS,
};

/// Below this modulus the argument of a loop amplitude is not defined.
pub const VISIBILITY_FLOOR: f64 = 1e-12;

/// The constant generator `K = (d_phi U) U^dag` of the azimuthal rotation:
/// `-(i/2) Z` per site.
#[derive(Clone, Debug)]
pub struct LoopGenerator {
    pub k: ComplexMatrix,
}

impl LoopGenerator {
    pub fn for_sites(sites: usize) -> Self {
        let single = pauli_z().map(|z| C64::new(0.0, -0.5) * z);
        let k = match sites {
            1 => single,
            2 => {
                let id = ComplexMatrix::identity(2, 2);
                kron(&single, &id) + kron(&id, &single)
            }
            _ => panic!("only one- and two-site states are supported"),
        };
        LoopGenerator { k }
    }
}

/// Reduces a phase to `(-pi, pi]`.
pub fn wrap_phase(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y <= -PI { y + 2.0 * PI } else { y }
}

/// Removes `2 pi` jumps larger than `pi` between consecutive defined values.
/// Missing entries are skipped and do not reset the running offset.
pub fn unwrap_phases(values: &[Option<f64>]) -> Vec<Option<f64>> {
    let mut offset = 0.0;
    let mut last: Option<f64> = None;
    values
        .iter()
        .map(|v| {
            let x = (*v)?;
            if let Some(prev) = last {
                let mut y = x + offset;
                while y - prev > PI {
                    y -= 2.0 * PI;
                }
                while y - prev < -PI {
                    y += 2.0 * PI;
                }
                offset = y - x;
            }
            let y = x + offset;
            last = Some(y);
            Some(y)
        })
        .collect()
}

/// Which phases to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PhaseKinds {
    pub interferometric: bool,
    pub uhlmann: bool,
}

impl PhaseKinds {
    pub const BOTH: PhaseKinds = PhaseKinds { interferometric: true, uhlmann: true };
    pub const INTERFEROMETRIC: PhaseKinds = PhaseKinds { interferometric: true, uhlmann: false };
    pub const UHLMANN: PhaseKinds = PhaseKinds { interferometric: false, uhlmann: true };
}

/// Phases at one `(lambda, r, theta)` point. Entries are `None` when not
/// requested or when their evaluation failed.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PhaseRecord {
    pub gamma_int_pair: Option<f64>,
    pub gamma_int_single: Option<f64>,
    pub delta_gamma: Option<f64>,
    pub gamma_u_pair: Option<f64>,
    pub gamma_u_single: Option<f64>,
    pub delta_gamma_u: Option<f64>,
    pub steps_used: usize,
    /// Step-halving estimate for `delta_gamma_u`; zero when no Uhlmann phase was computed.
    pub convergence_estimate: f64,
}

/// Evaluates the requested phases at separation `r`, keeping whatever
/// succeeded. The first error (if any) comes back alongside the record.
pub fn phase_record(
    chain: &IsingChain,
    r: usize,
    loop_spec: &LoopSpec,
    kinds: PhaseKinds,
    rank_eps: f64,
) -> (PhaseRecord, Option<Error>) {
    let mut record = PhaseRecord { steps_used: loop_spec.steps, ..Default::default() };
    let states = chain.correlators(r).and_then(|c| Ok((two_site_state(&c)?, single_site_state(c.m)?)));
    let (pair, single) = match states {
        Ok(s) => s,
        Err(e) => return (record, Some(e)),
    };
    let mut first_error = None;
    if kinds.interferometric {
        let theta = loop_spec.theta;
        let result: Result<(f64, f64)> =
            (|| Ok((interferometric_phase(&pair, theta)?, interferometric_phase(&single, theta)?)))();
        match result {
            Ok((gp, gs)) => {
                record.gamma_int_pair = Some(gp);
                record.gamma_int_single = Some(gs);
                record.delta_gamma = Some(wrap_phase(gp - 2.0 * gs));
            }
            Err(e) => first_error = first_error.or(Some(e)),
        }
    }
    if kinds.uhlmann {
        match delta_gamma_u_from_states(&pair, &single, loop_spec, rank_eps) {
            Ok((delta, p, s)) => {
                record.gamma_u_pair = Some(p.phase);
                record.gamma_u_single = Some(s.phase);
                record.delta_gamma_u = Some(delta);
                record.convergence_estimate = p.convergence_estimate + 2.0 * s.convergence_estimate;
            }
            Err(e) => first_error = first_error.or(Some(e)),
        }
    }
    (record, first_error)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::anti_hermiticity_defect;

    #[test]
    fn wrap_into_half_open_interval() {
        assert_eq!(wrap_phase(PI), PI);
        assert_eq!(wrap_phase(-PI), PI);
        assert!((wrap_phase(3.0 * PI) - PI).abs() < 1e-15);
        assert!((wrap_phase(0.5 + 4.0 * PI) - 0.5).abs() < 1e-14);
        assert!((wrap_phase(-0.5 - 2.0 * PI) + 0.5).abs() < 1e-14);
        for i in -50..50 {
            let y = wrap_phase(0.37 * i as f64);
            assert!(y > -PI && y <= PI);
        }
    }

    #[test]
    fn unwrap_removes_jumps_and_skips_gaps() {
        let vals = [Some(3.0), Some(-3.1), None, Some(-2.9), Some(3.0)];
        let out = unwrap_phases(&vals);
        assert_eq!(out[0], Some(3.0));
        assert!((out[1].unwrap() - (-3.1 + 2.0 * PI)).abs() < 1e-15);
        assert_eq!(out[2], None);
        assert!((out[3].unwrap() - (-2.9 + 2.0 * PI)).abs() < 1e-15);
        assert!((out[4].unwrap() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn generator_is_anti_hermitian() {
        for sites in [1, 2] {
            let k = LoopGenerator::for_sites(sites).k;
            assert!(anti_hermiticity_defect(&k) <= 1e-14);
        }
    }
}
