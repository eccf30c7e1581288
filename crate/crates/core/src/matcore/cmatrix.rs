use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance used when a caller does not supply one.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Dense complex square matrix carrying the tolerance used for every rank
/// and equality decision made about it.
///
/// Invariants: square, finite entries, `0 <= tol < 1`. Arithmetic between two
/// matrices keeps the tolerance of the left operand.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    data: DMatrix<Complex64>,
    tol: f64,
}

impl CMatrix {
    pub fn new(data: DMatrix<Complex64>, tol: f64) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(Error::InvalidMatrix(format!(
                "matrix is {}x{}, expected square",
                data.nrows(),
                data.ncols()
            )));
        }
        if data.nrows() == 0 {
            return Err(Error::InvalidMatrix("matrix is empty".into()));
        }
        if !(tol.is_finite() && (0.0..1.0).contains(&tol)) {
            return Err(Error::BadParameter(format!("tolerance {tol} outside [0, 1)")));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidMatrix("non-finite entry".into()));
        }
        Ok(Self { data, tol })
    }

    /// Wraps a matrix with the default tolerance.
    pub fn from_na(data: DMatrix<Complex64>) -> Result<Self> {
        Self::new(data, DEFAULT_TOL)
    }

    /// Builds from row-major rows.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidMatrix("rows are not all of length n".into()));
        }
        Self::from_na(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    /// Builds from row-major real entries.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn identity(n: usize) -> Self {
        Self { data: DMatrix::identity(n, n), tol: DEFAULT_TOL }
    }

    pub fn zeros(n: usize) -> Self {
        Self { data: DMatrix::zeros(n, n), tol: DEFAULT_TOL }
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        Self {
            data: DMatrix::from_fn(n, n, |i, j| if i == j { diag[i] } else { Complex64::new(0.0, 0.0) }),
            tol: DEFAULT_TOL,
        }
    }

    /// Internal constructor for results of arithmetic on valid matrices.
    pub(crate) fn wrap(data: DMatrix<Complex64>, tol: f64) -> Self {
        debug_assert_eq!(data.nrows(), data.ncols());
        Self { data, tol }
    }

    pub fn with_tol(mut self, tol: f64) -> Result<Self> {
        if !(tol.is_finite() && (0.0..1.0).contains(&tol)) {
            return Err(Error::BadParameter(format!("tolerance {tol} outside [0, 1)")));
        }
        self.tol = tol;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn as_na(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn into_na(self) -> DMatrix<Complex64> {
        self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[(i, j)]
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.n()).map(|i| (0..self.n()).map(|j| self.data[(i, j)]).collect()).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::wrap(self.data.adjoint(), self.tol)
    }

    pub fn transpose(&self) -> Self {
        Self::wrap(self.data.transpose(), self.tol)
    }

    /// Entrywise complex conjugate (the time-reversal action on the matrix).
    pub fn conj(&self) -> Self {
        Self::wrap(self.data.map(|z| z.conj()), self.tol)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::wrap(&self.data * c, self.tol)
    }

    /// `self - z I`.
    pub fn shift(&self, z: Complex64) -> Self {
        let mut d = self.data.clone();
        for i in 0..self.n() {
            d[(i, i)] -= z;
        }
        Self::wrap(d, self.tol)
    }

    pub fn trace(&self) -> Complex64 {
        self.data.trace()
    }

    pub fn determinant(&self) -> Complex64 {
        self.data.clone().lu().determinant()
    }

    /// Frobenius norm; used for all residuals.
    pub fn norm(&self) -> f64 {
        self.data.norm()
    }

    /// Spectral norm (largest singular value).
    pub fn norm2(&self) -> f64 {
        spectral_norm(&self.data)
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, z| m.max(z.im.abs()))
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut acc = DMatrix::identity(self.n(), self.n());
        for _ in 0..k {
            acc = &acc * &self.data;
        }
        Self::wrap(acc, self.tol)
    }

    pub fn try_inverse(&self) -> Result<Self> {
        let lu = self.data.clone().lu();
        let inv = lu.try_inverse().ok_or(Error::Singular { min_modulus: 0.0 })?;
        if inv.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Singular { min_modulus: 0.0 });
        }
        Ok(Self::wrap(inv, self.tol))
    }

    /// `‖self − self†‖_F / ‖self‖_F` (zero for the zero matrix).
    pub fn hermiticity_residual(&self) -> f64 {
        let nrm = self.norm();
        if nrm == 0.0 {
            return 0.0;
        }
        (&self.data - self.data.adjoint()).norm() / nrm
    }

    /// Relative Frobenius distance `‖self − other‖ / max(‖other‖, tiny)`.
    pub fn rel_distance(&self, other: &CMatrix) -> f64 {
        let d = (&self.data - &other.data).norm();
        d / other.norm().max(f64::MIN_POSITIVE)
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        self.data.iter().zip(other.data.iter()).fold(0.0_f64, |m, (a, b)| m.max((a - b).norm()))
    }
}

pub(crate) fn spectral_norm(m: &DMatrix<Complex64>) -> f64 {
    if m.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return 0.0;
    }
    super::dense::svd(m).map(|s| s.sigma[0]).unwrap_or_else(|_| m.clone().singular_values().max())
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix(n={}, tol={:e})", self.n(), self.tol)?;
        for i in 0..self.n() {
            write!(f, "  [")?;
            for j in 0..self.n() {
                let z = self.data[(i, j)];
                write!(f, " {:+.6}{:+.6}i", z.re, z.im)?;
            }
            writeln!(f, " ]")?;
        }
        Ok(())
    }
}

impl<'a> Mul<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &'a CMatrix) -> CMatrix {
        CMatrix::wrap(&self.data * &rhs.data, self.tol)
    }
}

impl<'a> Add<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &'a CMatrix) -> CMatrix {
        CMatrix::wrap(&self.data + &rhs.data, self.tol)
    }
}

impl<'a> Sub<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &'a CMatrix) -> CMatrix {
        CMatrix::wrap(&self.data - &rhs.data, self.tol)
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        CMatrix::wrap(-&self.data, self.tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_non_square_and_non_finite() {
        let rect = DMatrix::from_element(2, 3, c(1.0, 0.0));
        assert!(matches!(CMatrix::from_na(rect), Err(Error::InvalidMatrix(_))));
        let nan = DMatrix::from_element(2, 2, c(f64::NAN, 0.0));
        assert!(matches!(CMatrix::from_na(nan), Err(Error::InvalidMatrix(_))));
        let ok = CMatrix::identity(2);
        assert!(ok.clone().with_tol(1.0).is_err());
        assert!(ok.with_tol(0.0).is_ok());
    }

    #[test]
    fn arithmetic_and_norms() {
        let a = CMatrix::from_rows(&[vec![c(1.0, 0.0), c(0.0, 1.0)], vec![c(0.0, 0.0), c(2.0, 0.0)]]).unwrap();
        let i = CMatrix::identity(2);
        assert_eq!(&a * &i, a);
        assert_eq!((&a - &a).norm(), 0.0);
        assert!((a.determinant() - c(2.0, 0.0)).norm() < 1e-15);
        let inv = a.try_inverse().unwrap();
        assert!((&a * &inv).max_abs_diff(&i) < 1e-15);
        assert!((CMatrix::from_diagonal(&[c(3.0, 0.0), c(-4.0, 0.0)]).norm2() - 4.0).abs() < 1e-12);
        assert!(a.hermiticity_residual() > 0.1);
        assert_eq!(i.hermiticity_residual(), 0.0);
    }

    #[test]
    fn singular_inverse_fails() {
        let s = CMatrix::from_real_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(s.try_inverse().is_err());
    }
}
