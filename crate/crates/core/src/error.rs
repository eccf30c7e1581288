use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical operations of this crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {0} is not even")]
    DimensionNotEven(usize),

    #[error("eigensolver did not converge within its iteration budget")]
    NonConvergence,

    #[error("ill-conditioned spectrum: {0}")]
    IllConditioned(String),

    #[error("matrix exponential overflowed (norm {norm:e})")]
    Overflow { norm: f64 },

    #[error("matrix is singular within tolerance (smallest modulus {min_modulus:e})")]
    Singular { min_modulus: f64 },

    #[error("matrix is not Hermitian (relative residual {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("eigenvalue {0} vanishes within tolerance")]
    ZeroEigenvalue(Complex64),

    #[error("eigenvalue {0} is not unimodular")]
    NotUnimodular(Complex64),

    #[error("matrix is not pseudo-unitary; unpaired eigenvalues {unpaired:?}")]
    NotPseudoUnitary { unpaired: Vec<Complex64> },

    #[error("coefficient block of size {p} at eigenvalue {u} is singular")]
    SingularBlock { u: Complex64, p: usize },

    #[error("matrix is not symplectic (residual {residual:e})")]
    NotSymplectic { residual: f64 },

    #[error("bad parameter: {0}")]
    BadParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
