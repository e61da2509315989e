//! Small dense matrix kernels.
//!
//! Everything here operates on tiny matrices (2x2 and 4x4 complex, up to a
//! few hundred real for Toeplitz determinants), so clarity wins over blocking
//! or specialised storage.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;
pub type RealMatrix = DMatrix<f64>;

/// Inputs further than this from Hermitian (relative to `max(1, max |M_ij|)`)
/// are rejected; closer ones are symmetrized before decomposition.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Anti-Hermiticity tolerance for exponentiated generators, relative like
/// [`HERMITIAN_TOL`].
pub const ANTI_HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues in `[-PSD_TOL, 0)` are treated as round-off and clamped.
pub const PSD_TOL: f64 = 1e-12;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Spectral decomposition `M = V diag(p) V^dag` with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors, one per column, in eigenvalue order.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn vector(&self, n: usize) -> DVector<C64> {
        self.eigenvectors.column(n).into_owned()
    }

    /// Rebuilds `sum_n f(p_n) |n><n|`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let d = DMatrix::from_diagonal(&DVector::from_iterator(
            self.dim(),
            self.eigenvalues.iter().map(|&p| C64::new(f(p), 0.0)),
        ));
        v * d * v.adjoint()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(|p| p)
    }
}

/// Maximum absolute entry of a complex matrix.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// `max |M - M^dag|`.
pub fn hermiticity_defect(m: &ComplexMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// `max |A + A^dag|`.
pub fn anti_hermiticity_defect(m: &ComplexMatrix) -> f64 {
    max_abs(&(m + m.adjoint()))
}

/// `max |U^dag U - I|`.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    let n = u.nrows();
    max_abs(&(u.adjoint() * u - ComplexMatrix::identity(n, n)))
}

fn check_square(m: &ComplexMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    Ok(m.nrows())
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues come back ascending. Each eigenvector is rotated so that its
/// largest-magnitude component (first one, on ties) is real and positive,
/// which makes the output deterministic for non-degenerate spectra.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<HermitianEigen> {
    let n = check_square(m)?;
    let defect = hermiticity_defect(m);
    if defect > HERMITIAN_TOL * max_abs(m).max(1.0) {
        return Err(Error::NotHermitian { norm: defect });
    }
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(sym);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(k).into_owned();
        let norm = v.norm();
        v /= C64::new(norm, 0.0);
        fix_phase(&mut v);
        eigenvectors.set_column(col, &v);
    }
    Ok(HermitianEigen { eigenvalues, eigenvectors })
}

fn fix_phase(v: &mut DVector<C64>) {
    let max = v.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()));
    if max == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .position(|z| z.norm() >= max * (1.0 - 1e-10))
        .expect("max is attained");
    let phase = v[pivot].conj() / v[pivot].norm();
    *v *= phase;
    // Pivot is real positive up to round-off; make it exact.
    v[pivot] = C64::new(v[pivot].norm(), 0.0);
}

/// Principal square root of a positive-semidefinite Hermitian matrix.
pub fn sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eigen(m)?;
    sqrt_from_eigen(&eig)
}

pub(crate) fn sqrt_from_eigen(eig: &HermitianEigen) -> Result<ComplexMatrix> {
    if let Some(&p) = eig.eigenvalues.iter().find(|&&p| p < -PSD_TOL) {
        return Err(Error::NotPsd { min_eigenvalue: p });
    }
    Ok(eig.map_spectrum(|p| p.max(0.0).sqrt()))
}

/// Determinant via LU factorization with partial pivoting.
pub fn det_real(m: &RealMatrix) -> f64 {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "det_real needs a square matrix");
    if n == 0 {
        return 1.0;
    }
    let mut a = m.clone();
    let mut det = 1.0;
    for col in 0..n {
        let (pivot, pivot_abs) = (col..n)
            .map(|row| (row, a[(row, col)].abs()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot_abs == 0.0 {
            return 0.0;
        }
        if pivot != col {
            a.swap_rows(pivot, col);
            det = -det;
        }
        let diag = a[(col, col)];
        det *= diag;
        for row in col + 1..n {
            let factor = a[(row, col)] / diag;
            if factor != 0.0 {
                for k in col + 1..n {
                    let sub = factor * a[(col, k)];
                    a[(row, k)] -= sub;
                }
            }
        }
    }
    det
}

/// `exp(s A)` for anti-Hermitian `A`, through the spectrum of the Hermitian
/// matrix `iA`.
pub fn expm_antihermitian(a: &ComplexMatrix, s: f64) -> Result<ComplexMatrix> {
    check_square(a)?;
    let defect = anti_hermiticity_defect(a);
    if defect > ANTI_HERMITIAN_TOL * max_abs(a).max(1.0) {
        return Err(Error::NotAntiHermitian { norm: defect });
    }
    // A = -i H with H = iA Hermitian, so exp(sA) = V diag(exp(-i s h)) V^dag.
    let h = a.map(|z| I * z);
    let eig = hermitian_eigen(&h)?;
    let v = &eig.eigenvectors;
    let phases = DVector::from_iterator(
        eig.dim(),
        eig.eigenvalues.iter().map(|&h| C64::from_polar(1.0, -s * h)),
    );
    Ok(v * DMatrix::from_diagonal(&phases) * v.adjoint())
}

/// `AB - BA`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_square(a)?;
    check_square(b)?;
    if a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch { left: a.nrows(), right: b.nrows() });
    }
    Ok(a * b - b * a)
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[C64::ZERO, C64::ONE, C64::ONE, C64::ZERO])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[C64::ZERO, -I, I, C64::ZERO])
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[C64::ONE, C64::ZERO, C64::ZERO, -C64::ONE])
}

pub fn trace(m: &ComplexMatrix) -> C64 {
    m.diagonal().iter().sum()
}
