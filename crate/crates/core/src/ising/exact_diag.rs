//! Finite periodic chains by dense diagonalization, used as a test oracle for
//! the thermodynamic-limit formulas.
//!
//! The Hamiltonian is stoquastic in the `Z` basis (all off-diagonal entries
//! are `-lambda <= 0`), so the ground state is translation invariant and lives
//! in the zero-momentum sector. That sector is spanned by normalized orbit
//! sums `|r> = N_r^{-1/2} sum_{s in orbit(r)} |s>` and has dimension about
//! `2^N / N`, small enough for a dense solve at `N = 12`.
//!
//! Bit `j` of a basis index is 1 when site `j` points down (`Z_j = -1`).

use nalgebra::{DMatrix, SymmetricEigen};

use super::Correlators;
use crate::error::{Error, Result};

/// Gap below which the lowest two levels are treated as degenerate and averaged.
pub const DEGENERACY_GAP: f64 = 1e-8;

/// Ground-state observables of a finite chain.
#[derive(Clone, Debug)]
pub struct FiniteChain {
    pub n_sites: usize,
    pub lambda: f64,
    pub m: f64,
    /// One entry per separation `r = 1..=n_sites/2`.
    pub correlators: Vec<Correlators>,
    /// Gap between the lowest two zero-momentum levels.
    pub gap: f64,
    /// Whether the lowest two states were averaged.
    pub symmetrized: bool,
}

impl FiniteChain {
    pub fn at(&self, r: usize) -> Option<&Correlators> {
        self.correlators.get(r.checked_sub(1)?)
    }
}

fn rotate(s: usize, n: usize) -> usize {
    let mask = (1usize << n) - 1;
    ((s << 1) | (s >> (n - 1))) & mask
}

fn spin(s: usize, site: usize) -> f64 {
    if s >> site & 1 == 0 { 1.0 } else { -1.0 }
}

struct MomentumZeroBasis {
    n: usize,
    reps: Vec<usize>,
    orbit_len: Vec<usize>,
    /// Orbit index of every computational basis state.
    index_of: Vec<u32>,
}

impl MomentumZeroBasis {
    fn new(n: usize) -> Self {
        let dim = 1usize << n;
        let mut index_of = vec![u32::MAX; dim];
        let mut reps = Vec::new();
        let mut orbit_len = Vec::new();
        for s in 0..dim {
            if index_of[s] != u32::MAX {
                continue;
            }
            let idx = reps.len() as u32;
            let mut t = s;
            let mut len = 0;
            loop {
                index_of[t] = idx;
                len += 1;
                t = rotate(t, n);
                if t == s {
                    break;
                }
            }
            reps.push(s);
            orbit_len.push(len);
        }
        MomentumZeroBasis { n, reps, orbit_len, index_of }
    }

    fn dim(&self) -> usize {
        self.reps.len()
    }

    /// `H_{r'r} = sqrt(N_r / N_r') sum_{s' in orbit r'} <s'|H|rep_r>`.
    fn hamiltonian(&self, lambda: f64) -> DMatrix<f64> {
        let n = self.n;
        let mut h = DMatrix::zeros(self.dim(), self.dim());
        for (col, &rep) in self.reps.iter().enumerate() {
            let diag: f64 = -(0..n).map(|j| spin(rep, j)).sum::<f64>();
            h[(col, col)] += diag;
            for j in 0..n {
                let flipped = rep ^ (1 << j) ^ (1 << ((j + 1) % n));
                let row = self.index_of[flipped] as usize;
                let ratio = (self.orbit_len[col] as f64 / self.orbit_len[row] as f64).sqrt();
                h[(row, col)] += -lambda * ratio;
            }
        }
        h
    }

    /// Expands a sector vector to all `2^n` amplitudes.
    fn expand(&self, coeffs: &[f64]) -> Vec<f64> {
        self.index_of
            .iter()
            .map(|&idx| {
                let i = idx as usize;
                coeffs[i] / (self.orbit_len[i] as f64).sqrt()
            })
            .collect()
    }
}

/// Expectation values `(m, [(xx, yy, zz); r = 1..=n/2])` of a real state vector.
fn observables(psi: &[f64], n: usize) -> (f64, Vec<[f64; 3]>) {
    let m = psi.iter().enumerate().map(|(s, a)| a * a * spin(s, 0)).sum();
    let per_r = (1..=n / 2)
        .map(|r| {
            let mask = 1 | (1 << r);
            let mut xx = 0.0;
            let mut yy = 0.0;
            let mut zz = 0.0;
            for (s, &a) in psi.iter().enumerate() {
                let b = psi[s ^ mask];
                let z0zr = spin(s, 0) * spin(s, r);
                xx += a * b;
                // Y|up> = i|down>, Y|down> = -i|up>, so Y_0 Y_r |s> = -z_0 z_r |s ^ mask>.
                yy += -z0zr * a * b;
                zz += z0zr * a * a;
            }
            [xx, yy, zz]
        })
        .collect();
    (m, per_r)
}

fn collect(n: usize, lambda: f64, states: &[Vec<f64>], gap: f64) -> FiniteChain {
    let weight = 1.0 / states.len() as f64;
    let mut m = 0.0;
    let mut acc = vec![[0.0; 3]; n / 2];
    for psi in states {
        let (mi, per_r) = observables(psi, n);
        m += weight * mi;
        for (a, v) in acc.iter_mut().zip(per_r) {
            for k in 0..3 {
                a[k] += weight * v[k];
            }
        }
    }
    let correlators = acc
        .iter()
        .enumerate()
        .map(|(i, v)| Correlators { r: i + 1, m, c_xx: v[0], c_yy: v[1], c_zz: v[2] })
        .collect();
    FiniteChain { n_sites: n, lambda, m, correlators, gap, symmetrized: states.len() > 1 }
}

fn lowest_two(h: DMatrix<f64>) -> (Vec<(f64, Vec<f64>)>, f64) {
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let pick = |k: usize| {
        let col = order[k];
        (eig.eigenvalues[col], eig.eigenvectors.column(col).iter().copied().collect::<Vec<_>>())
    };
    let ground = pick(0);
    let first = pick(1);
    let gap = first.0 - ground.0;
    (vec![ground, first], gap)
}

fn validate(n_sites: usize, lambda: f64) -> Result<()> {
    if !(4..=12).contains(&n_sites) || !n_sites.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("n_sites = {n_sites} must be even and in [4, 12]")));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("lambda = {lambda} must be >= 0")));
    }
    Ok(())
}

/// Ground-state magnetization and correlators of the periodic `n_sites` chain.
///
/// When the lowest two levels are closer than [`DEGENERACY_GAP`] (deep in the
/// ferromagnetic phase) expectation values are averaged over both.
pub fn exact_diag_correlators(n_sites: usize, lambda: f64) -> Result<FiniteChain> {
    validate(n_sites, lambda)?;
    let basis = MomentumZeroBasis::new(n_sites);
    let (levels, gap) = lowest_two(basis.hamiltonian(lambda));
    let take = if gap < DEGENERACY_GAP { 2 } else { 1 };
    let states: Vec<Vec<f64>> = levels[..take].iter().map(|(_, v)| basis.expand(v)).collect();
    Ok(collect(n_sites, lambda, &states, gap))
}

/// Same observables from the unreduced `2^n` Hamiltonian. Only used to check
/// the symmetry reduction.
#[cfg(test)]
fn exact_diag_full(n_sites: usize, lambda: f64) -> FiniteChain {
    let dim = 1usize << n_sites;
    let mut h = DMatrix::zeros(dim, dim);
    for s in 0..dim {
        h[(s, s)] = -(0..n_sites).map(|j| spin(s, j)).sum::<f64>();
        for j in 0..n_sites {
            let t = s ^ (1 << j) ^ (1 << ((j + 1) % n_sites));
            h[(t, s)] += -lambda;
        }
    }
    let (levels, gap) = lowest_two(h);
    let take = if gap < DEGENERACY_GAP { 2 } else { 1 };
    let states: Vec<Vec<f64>> = levels[..take].iter().map(|(_, v)| v.clone()).collect();
    collect(n_sites, lambda, &states, gap)
}
