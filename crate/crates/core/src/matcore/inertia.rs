//! Sylvester inertia of an invertible Hermitian matrix.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::cmatrix::CMatrix;
use crate::error::{Error, Result};

/// Signature `(p, q)` of a Hermitian `η` and a matrix `A` with
/// `A† η_{p,q} A = η`, where `η_{p,q} = diag(−1 ×p, +1 ×q)`.
#[derive(Debug, Clone)]
pub struct Inertia {
    pub negatives: usize,
    pub positives: usize,
    pub transformer: CMatrix,
}

impl Inertia {
    pub fn signature(&self) -> Signature {
        Signature { negatives: self.negatives, positives: self.positives }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub negatives: usize,
    pub positives: usize,
}

impl Signature {
    pub fn is_definite(&self) -> bool {
        self.negatives == 0 || self.positives == 0
    }
}

/// The invariance group: `U(n)` when definite, `U(p,q)` otherwise.
impl std::fmt::Display for Signature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_definite() {
            write!(f, "U({})", self.negatives + self.positives)
        } else {
            write!(f, "U({},{})", self.negatives, self.positives)
        }
    }
}

/// `η_{p,q} = diag(−1, …, −1, +1, …, +1)` with `p` negative entries.
pub fn eta_pq(p: usize, q: usize) -> CMatrix {
    let mut d = vec![Complex64::new(-1.0, 0.0); p];
    d.extend(std::iter::repeat_n(Complex64::new(1.0, 0.0), q));
    CMatrix::from_diagonal(&d)
}

/// Counts negative and positive eigenvalues of `eta` and builds the
/// transformer from its Hermitian eigendecomposition.
pub fn inertia(eta: &CMatrix) -> Result<Inertia> {
    let residual = eta.hermiticity_residual();
    if residual > eta.tol().max(1e-14) {
        return Err(Error::NotHermitian { residual });
    }
    let h = (eta.as_na() + eta.as_na().adjoint()) * Complex64::new(0.5, 0.0);
    let eig = nalgebra::linalg::SymmetricEigen::try_new(h, 1e-15, 100_000).ok_or(Error::NonConvergence)?;
    let n = eta.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let scale = eig.eigenvalues.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let min_modulus = eig.eigenvalues.iter().fold(f64::INFINITY, |m, x| m.min(x.abs()));
    if scale == 0.0 || min_modulus <= eta.tol() * scale {
        return Err(Error::Singular { min_modulus });
    }
    let negatives = order.iter().filter(|&&k| eig.eigenvalues[k] < 0.0).count();
    let mut t = DMatrix::<Complex64>::zeros(n, n);
    for (row, &k) in order.iter().enumerate() {
        let s = eig.eigenvalues[k].abs().sqrt();
        for col in 0..n {
            t[(row, col)] = eig.eigenvectors[(col, k)].conj() * s;
        }
    }
    Ok(Inertia { negatives, positives: n - negatives, transformer: CMatrix::wrap(t, eta.tol()) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sigma_x_is_u11() {
        let sx = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let inn = inertia(&sx).unwrap();
        assert_eq!((inn.negatives, inn.positives), (1, 1));
        let a = &inn.transformer;
        let back = &(&a.adjoint() * &eta_pq(1, 1)) * a;
        assert!(back.max_abs_diff(&sx) < 1e-14);
    }

    #[test]
    fn positive_definite_and_errors() {
        let p = CMatrix::from_rows(&[vec![c(2.0, 0.0), c(0.0, 1.0)], vec![c(0.0, -1.0), c(2.0, 0.0)]]).unwrap();
        let inn = inertia(&p).unwrap();
        assert_eq!(inn.signature(), Signature { negatives: 0, positives: 2 });
        let nh = CMatrix::from_real_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(inertia(&nh), Err(Error::NotHermitian { .. })));
        let sing = CMatrix::from_real_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(matches!(inertia(&sing), Err(Error::Singular { .. })));
    }
}
