//! Ground-state observables of the transverse-field Ising chain
//! `H = -lambda sum_j X_j X_{j+1} - sum_j Z_j` in the thermodynamic limit.
//!
//! All two-site correlators are built from the Toeplitz elements
//!
//! ```text
//! G_k = (1/pi) int_0^pi [cos(k phi) (1 + lambda cos phi) - lambda sin(k phi) sin phi] / omega(phi) dphi
//!     = (1/pi) int_0^pi [cos(k phi) + lambda cos((k + 1) phi)] / omega(phi) dphi
//! ```
//!
//! Note the minus sign in front of the `sin(k phi) sin phi` term. With a plus
//! sign the nearest-neighbour `XX` correlator at `lambda = 1` comes out
//! negative, which contradicts both the ferromagnetic coupling and the ground
//! energy sum rule `lambda <XX>_1 + <Z> = (1/pi) int omega`. The finite-chain
//! oracle in [`exact_diag`] settles it (see the tests there).

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::RwLock;

use crate::error::{Error, Result};
use crate::linalg::{det_real, RealMatrix};
use crate::quad::{integrate, QuadOptions};

pub mod exact_diag;

pub use exact_diag::{exact_diag_correlators, FiniteChain};

/// Largest `|k|` accepted for a Toeplitz element.
pub const MAX_TOEPLITZ_INDEX: i64 = 10_000;

/// Control parameter plus quadrature settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CouplingRatio {
    pub lambda: f64,
    pub quad_tol: f64,
    pub quad_max_depth: u32,
}

impl CouplingRatio {
    pub fn new(lambda: f64) -> Result<Self> {
        Self::with_tolerance(lambda, 1e-10)
    }

    pub fn with_tolerance(lambda: f64, quad_tol: f64) -> Result<Self> {
        let params = CouplingRatio { lambda, quad_tol, quad_max_depth: 40 };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("lambda = {} must be >= 0", self.lambda)));
        }
        if !(self.quad_tol > 0.0) {
            return Err(Error::InvalidParameter(format!("quad_tol = {} must be > 0", self.quad_tol)));
        }
        Ok(())
    }

    fn quad_options(&self, initial_panels: usize) -> QuadOptions {
        QuadOptions { tol: self.quad_tol, max_depth: self.quad_max_depth, initial_panels }
    }
}

/// Magnetization and the three two-site correlators at separation `r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Correlators {
    pub r: usize,
    pub m: f64,
    pub c_xx: f64,
    pub c_yy: f64,
    pub c_zz: f64,
}

impl Correlators {
    /// Correlators of an uncorrelated pair, for which the two-site state is
    /// `rho_1 (x) rho_1`.
    pub fn product(m: f64, r: usize) -> Self {
        Correlators { r, m, c_xx: 0.0, c_yy: 0.0, c_zz: m * m }
    }

    pub fn check_bounds(&self) -> Result<()> {
        const SLACK: f64 = 1e-9;
        let named = [("m", self.m), ("c_xx", self.c_xx), ("c_yy", self.c_yy), ("c_zz", self.c_zz)];
        for (name, v) in named {
            if !(v.abs() <= 1.0 + SLACK) {
                return Err(Error::InvalidParameter(format!("{name} = {v} outside [-1, 1]")));
            }
        }
        let connected = self.c_zz - self.m * self.m;
        if connected.abs() > 1.0 + SLACK {
            return Err(Error::InvalidParameter(format!("connected zz part {connected} outside [-1, 1]")));
        }
        Ok(())
    }
}

/// Toeplitz elements `G_k` for `k` in `[-r_max, r_max]`.
#[derive(Clone, Debug)]
pub struct ToeplitzElements {
    pub r_max: usize,
    values: Vec<f64>,
}

impl ToeplitzElements {
    pub fn get(&self, k: i64) -> f64 {
        let r_max = self.r_max as i64;
        assert!(k.abs() <= r_max, "G_{k} outside table of half-width {r_max}");
        self.values[(k + r_max) as usize]
    }

    /// `det[G_{j-i-1}]`, the `<X_0 X_r>` correlator.
    pub fn xx_determinant(&self, r: usize) -> f64 {
        let m = RealMatrix::from_fn(r, r, |i, j| self.get(j as i64 - i as i64 - 1));
        det_real(&m)
    }

    /// `det[G_{i-j+1}]`, the `<Y_0 Y_r>` correlator.
    pub fn yy_determinant(&self, r: usize) -> f64 {
        let m = RealMatrix::from_fn(r, r, |i, j| self.get(i as i64 - j as i64 + 1));
        det_real(&m)
    }
}

/// Single-particle dispersion `omega(phi) = sqrt((lambda sin phi)^2 + (1 + lambda cos phi)^2)`.
pub fn dispersion(phi: f64, lambda: f64) -> f64 {
    let (s, c) = phi.sin_cos();
    (lambda * s).hypot(1.0 + lambda * c)
}

/// Integrand of `G_k`. The only zero of omega on `[0, pi]` is `(pi, 1)`,
/// where the numerator vanishes too; the limit there is zero.
fn toeplitz_integrand(k: i64, lambda: f64, phi: f64) -> f64 {
    let w = dispersion(phi, lambda);
    if w == 0.0 {
        return 0.0;
    }
    ((k as f64 * phi).cos() + lambda * ((k + 1) as f64 * phi).cos()) / w
}

fn toeplitz_quadrature(k: i64, params: &CouplingRatio) -> Result<f64> {
    if k.abs() > MAX_TOEPLITZ_INDEX {
        return Err(Error::InvalidParameter(format!("|k| = {} exceeds {MAX_TOEPLITZ_INDEX}", k.abs())));
    }
    let panels = 2 + k.unsigned_abs() as usize;
    let lambda = params.lambda;
    let r = integrate(|phi| toeplitz_integrand(k, lambda, phi), 0.0, PI, &params.quad_options(panels))?;
    Ok(r.value / PI)
}

/// `<Z> = (1/pi) int_0^pi (1 + lambda cos phi) / omega dphi`.
pub fn magnetization(params: &CouplingRatio) -> Result<f64> {
    params.validate()?;
    let lambda = params.lambda;
    let r = integrate(
        |phi| {
            let w = dispersion(phi, lambda);
            if w == 0.0 { 0.0 } else { (1.0 + lambda * phi.cos()) / w }
        },
        0.0,
        PI,
        &params.quad_options(2),
    )?;
    Ok(r.value / PI)
}

pub fn toeplitz_element(k: i64, params: &CouplingRatio) -> Result<f64> {
    params.validate()?;
    toeplitz_quadrature(k, params)
}

/// Ground-state energy per site, as a positive magnitude:
/// `E_0 / N = -(1/pi) int_0^pi omega dphi`, this returns the integral without the sign.
pub fn ground_energy_density(params: &CouplingRatio) -> Result<f64> {
    params.validate()?;
    let lambda = params.lambda;
    let r = integrate(|phi| dispersion(phi, lambda), 0.0, PI, &params.quad_options(2))?;
    Ok(r.value / PI)
}

pub fn correlator_xx(r: usize, params: &CouplingRatio) -> Result<f64> {
    IsingChain::new(*params)?.correlator_xx(r)
}

pub fn correlator_yy(r: usize, params: &CouplingRatio) -> Result<f64> {
    IsingChain::new(*params)?.correlator_yy(r)
}

pub fn correlator_zz(r: usize, params: &CouplingRatio) -> Result<f64> {
    IsingChain::new(*params)?.correlator_zz(r)
}

/// Observables at one coupling, with a thread-safe cache of Toeplitz elements.
///
/// The cache key is just `k`; `lambda` and the quadrature tolerance are fixed
/// per chain.
#[derive(Debug)]
pub struct IsingChain {
    params: CouplingRatio,
    cache: RwLock<HashMap<i64, f64>>,
}

impl IsingChain {
    pub fn new(params: CouplingRatio) -> Result<Self> {
        params.validate()?;
        Ok(IsingChain { params, cache: RwLock::new(HashMap::new()) })
    }

    pub fn params(&self) -> &CouplingRatio {
        &self.params
    }

    pub fn toeplitz_element(&self, k: i64) -> Result<f64> {
        if let Some(&g) = self.cache.read().expect("cache lock").get(&k) {
            return Ok(g);
        }
        let g = toeplitz_quadrature(k, &self.params)?;
        self.cache.write().expect("cache lock").insert(k, g);
        Ok(g)
    }

    pub fn magnetization(&self) -> Result<f64> {
        self.toeplitz_element(0)
    }

    pub fn toeplitz_elements(&self, r_max: usize) -> Result<ToeplitzElements> {
        let r = r_max as i64;
        let values = (-r..=r).map(|k| self.toeplitz_element(k)).collect::<Result<Vec<_>>>()?;
        Ok(ToeplitzElements { r_max, values })
    }

    fn require_separation(r: usize) -> Result<()> {
        if r == 0 {
            return Err(Error::InvalidParameter("separation r must be >= 1".into()));
        }
        Ok(())
    }

    pub fn correlator_xx(&self, r: usize) -> Result<f64> {
        Self::require_separation(r)?;
        Ok(self.toeplitz_elements(r)?.xx_determinant(r))
    }

    pub fn correlator_yy(&self, r: usize) -> Result<f64> {
        Self::require_separation(r)?;
        Ok(self.toeplitz_elements(r)?.yy_determinant(r))
    }

    pub fn correlator_zz(&self, r: usize) -> Result<f64> {
        Self::require_separation(r)?;
        let m = self.magnetization()?;
        let k = r as i64;
        Ok(m * m - self.toeplitz_element(k)? * self.toeplitz_element(-k)?)
    }

    pub fn correlators(&self, r: usize) -> Result<Correlators> {
        Self::require_separation(r)?;
        let g = self.toeplitz_elements(r)?;
        let m = g.get(0);
        let k = r as i64;
        Ok(Correlators {
            r,
            m,
            c_xx: g.xx_determinant(r),
            c_yy: g.yy_determinant(r),
            c_zz: m * m - g.get(k) * g.get(-k),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn params(lambda: f64) -> CouplingRatio {
        CouplingRatio::new(lambda).unwrap()
    }

    /// Closed forms at lambda = 1, where omega = 2 cos(phi/2):
    /// (1/pi) int cos(phi)cos(phi/2) = 2/(3 pi), (1/pi) int sin^2(phi)/omega = 4/(3 pi).
    const G_PLUS_ONE_AT_CRITICAL: f64 = 2.0 / (3.0 * PI) - 4.0 / (3.0 * PI);
    const G_MINUS_ONE_AT_CRITICAL: f64 = 2.0 / PI;

    #[test]
    fn dispersion_examples() {
        assert_abs_diff_eq!(dispersion(0.0, 1.0), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(dispersion(PI, 0.4), 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(dispersion(PI / 2.0, 1.0), 2f64.sqrt(), epsilon = 1e-15);
        assert!(dispersion(PI, 1.0) < 1e-15);
    }

    #[test]
    fn magnetization_examples() {
        assert_abs_diff_eq!(magnetization(&params(0.0)).unwrap(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(magnetization(&params(1.0)).unwrap(), 2.0 / PI, epsilon = 1e-10);
    }

    #[test]
    fn magnetization_at_half_is_frozen_oracle() {
        // Independent route: composite Simpson on 2^16 panels of the smooth integrand.
        let lambda = 0.5;
        let n = 1 << 16;
        let h = PI / n as f64;
        let f = |phi: f64| (1.0 + lambda * phi.cos()) / dispersion(phi, lambda);
        let simpson: f64 = (0..=n)
            .map(|i| {
                let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                w * f(i as f64 * h)
            })
            .sum::<f64>()
            * h
            / 3.0
            / PI;
        let tight = CouplingRatio::with_tolerance(lambda, 1e-12).unwrap();
        let m = magnetization(&tight).unwrap();
        assert_abs_diff_eq!(m, simpson, epsilon = 1e-12);
        // 30-digit reference from arbitrary-precision quadrature
        assert_abs_diff_eq!(m, 0.934_215_457_667_694_1, epsilon = 1e-12);
    }

    #[test]
    fn toeplitz_examples() {
        for lambda in [0.0, 0.3, 1.0, 2.5] {
            let p = params(lambda);
            let g0 = toeplitz_element(0, &p).unwrap();
            assert!((g0 - magnetization(&p).unwrap()).abs() <= 2.0 * p.quad_tol);
        }
        assert_abs_diff_eq!(toeplitz_element(1, &params(0.0)).unwrap(), 0.0, epsilon = 1e-12);
        let p = params(1.0);
        assert_abs_diff_eq!(toeplitz_element(-1, &p).unwrap(), G_MINUS_ONE_AT_CRITICAL, epsilon = 1e-10);
        assert_abs_diff_eq!(toeplitz_element(1, &p).unwrap(), G_PLUS_ONE_AT_CRITICAL, epsilon = 1e-10);
        assert!(matches!(toeplitz_element(10_001, &p), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn large_index_converges() {
        let g = toeplitz_element(10_000, &params(0.5)).unwrap();
        assert!(g.abs() < 1e-8);
    }

    #[test]
    fn correlator_examples() {
        let zero = params(0.0);
        assert_abs_diff_eq!(correlator_xx(1, &zero).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(correlator_xx(2, &zero).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(correlator_yy(1, &zero).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(correlator_yy(2, &zero).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(correlator_zz(1, &zero).unwrap(), 1.0, epsilon = 1e-12);

        let crit = params(1.0);
        assert_abs_diff_eq!(correlator_xx(1, &crit).unwrap(), 2.0 / PI, epsilon = 1e-9);
        assert_abs_diff_eq!(correlator_yy(1, &crit).unwrap(), -2.0 / (3.0 * PI), epsilon = 1e-9);
        assert_abs_diff_eq!(correlator_zz(1, &crit).unwrap(), 16.0 / (3.0 * PI * PI), epsilon = 1e-9);

        assert!(matches!(correlator_xx(0, &crit), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn zz_tail_decays_to_m_squared() {
        for lambda in [0.25, 0.5] {
            let chain = IsingChain::new(params(lambda)).unwrap();
            let m = chain.magnetization().unwrap();
            let czz = chain.correlator_zz(50).unwrap();
            assert!((czz - m * m).abs() <= 1e-6, "lambda {lambda}: {czz} vs {}", m * m);
        }
    }

    #[test]
    fn energy_examples_and_sum_rule() {
        assert_abs_diff_eq!(ground_energy_density(&params(0.0)).unwrap(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ground_energy_density(&params(1.0)).unwrap(), 4.0 / PI, epsilon = 1e-10);
        for i in 0..=20 {
            let lambda = 0.1 * i as f64;
            let p = params(lambda);
            let chain = IsingChain::new(p).unwrap();
            let lhs = lambda * chain.correlator_xx(1).unwrap() + chain.magnetization().unwrap();
            let rhs = ground_energy_density(&p).unwrap();
            assert!((lhs - rhs).abs() <= 1e-8, "lambda {lambda}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn correlators_stay_bounded() {
        for i in 0..=30 {
            let chain = IsingChain::new(params(0.1 * i as f64)).unwrap();
            for r in [1, 2, 3, 7, 15] {
                let c = chain.correlators(r).unwrap();
                c.check_bounds().unwrap();
                assert!(c.m >= -1e-9);
            }
        }
    }

    #[test]
    fn cached_and_uncached_agree() {
        let p = params(1.3);
        let chain = IsingChain::new(p).unwrap();
        let c = chain.correlators(4).unwrap();
        assert_eq!(c.c_xx, correlator_xx(4, &p).unwrap());
        assert_eq!(c.c_yy, correlator_yy(4, &p).unwrap());
        assert_eq!(c.c_zz, correlator_zz(4, &p).unwrap());
        assert_eq!(c.m, chain.magnetization().unwrap());
    }

    #[test]
    fn rejects_invalid_params() {
        assert!(CouplingRatio::new(-0.1).is_err());
        assert!(CouplingRatio::with_tolerance(1.0, 0.0).is_err());
        assert!(CouplingRatio::new(f64::NAN).is_err());
    }
}
