use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |M - M^dag| = {norm:.3e}")]
    NotHermitian { norm: f64 },

    #[error("matrix is not anti-Hermitian: max |A + A^dag| = {norm:.3e}")]
    NotAntiHermitian { norm: f64 },

    #[error("matrix is not positive semidefinite: eigenvalue {min_eigenvalue:.3e}")]
    NotPsd { min_eigenvalue: f64 },

    #[error("dimension mismatch: {left}x{left} vs {right}x{right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("quadrature did not converge at max depth; residual estimate {residual:.3e}")]
    QuadratureNonConvergence { residual: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unphysical correlator set: state eigenvalue {min_eigenvalue:.3e}")]
    UnphysicalState { min_eigenvalue: f64 },

    #[error(
        "Uhlmann phase undefined at given rank_eps: eigenvalue {min_eigenvalue:.3e} < {rank_eps:.1e}"
    )]
    RankDeficient { min_eigenvalue: f64, rank_eps: f64 },

    #[error("vanishing visibility: |amplitude| = {magnitude:.3e}, the phase is undefined")]
    VanishingVisibility { magnitude: f64 },

    #[error("unknown preset `{0}` (expected fig1, fig2 or fig3)")]
    UnknownPreset(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("csv error: {0}")]
    Csv(String),

    #[error("empty selection: {0}")]
    EmptySelection(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Short machine-readable tag used in the `status` column of sweep output.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::NotHermitian { .. } => "not_hermitian",
            Error::NotAntiHermitian { .. } => "not_antihermitian",
            Error::NotPsd { .. } => "not_psd",
            Error::DimensionMismatch { .. } | Error::NotSquare { .. } => "dimension",
            Error::QuadratureNonConvergence { .. } => "quadrature",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::UnphysicalState { .. } => "unphysical_state",
            Error::RankDeficient { .. } => "rank_deficient",
            Error::VanishingVisibility { .. } => "vanishing_visibility",
            Error::UnknownPreset(_) => "unknown_preset",
            Error::Config(_) => "config",
            Error::Csv(_) => "csv",
            Error::EmptySelection(_) => "empty_selection",
            Error::Io { .. } => "io",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
