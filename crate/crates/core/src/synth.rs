//! Deterministic constructors for test and benchmark inputs.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matcore::CMatrix;

/// `u·1 + N` of size `p`, ones on the superdiagonal.
pub fn jordan_block(u: Complex64, p: usize) -> CMatrix {
    let mut d = DMatrix::<Complex64>::zeros(p, p);
    for i in 0..p {
        d[(i, i)] = u;
        if i + 1 < p {
            d[(i, i + 1)] = Complex64::new(1.0, 0.0);
        }
    }
    CMatrix::wrap(d, crate::matcore::DEFAULT_TOL)
}

pub fn block_diag(blocks: &[CMatrix]) -> CMatrix {
    let n: usize = blocks.iter().map(CMatrix::n).sum();
    let mut d = DMatrix::<Complex64>::zeros(n, n);
    let mut at = 0;
    for b in blocks {
        d.view_mut((at, at), (b.n(), b.n())).copy_from(b.as_na());
        at += b.n();
    }
    CMatrix::wrap(d, crate::matcore::DEFAULT_TOL)
}

/// Jordan matrix from `(eigenvalue, block size)` pairs.
pub fn jordan_matrix(blocks: &[(Complex64, usize)]) -> CMatrix {
    let bs: Vec<CMatrix> = blocks.iter().map(|&(u, p)| jordan_block(u, p)).collect();
    block_diag(&bs)
}

/// `A J A⁻¹`.
pub fn conjugate(a: &CMatrix, j: &CMatrix) -> Result<CMatrix> {
    if a.n() != j.n() {
        return Err(Error::DimensionMismatch { expected: j.n(), found: a.n() });
    }
    let inv = a.try_inverse()?;
    Ok(&(a * j) * &inv)
}
