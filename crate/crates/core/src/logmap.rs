//! Pseudo-Hermitian logarithms and the evolution map `t ↦ e^{−itH}`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{expm, log_jordan_block, principal_log, CMatrix, JordanData, JordanItem};
use crate::pseudospec::{analyze_pseudo_unitary, SpectralPairing};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Shift applied to the logarithm of an inner eigenvalue so that it becomes
/// the conjugate of its outer partner's.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Relocation {
    pub original: Complex64,
    pub shift: i64,
    pub relocated: Complex64,
}

#[derive(Debug, Clone)]
pub struct LogResult {
    /// `H` with `e^{iH} = U`.
    pub h: CMatrix,
    pub relocations: Vec<Relocation>,
    /// `‖e^{iH} − U‖_F`.
    pub residual: f64,
    /// Jordan data of `H`, sharing the basis of `U`.
    pub structure: JordanData,
}

/// `E = −i·ln u` on the principal branch.
fn block_energy(u: Complex64, tol: f64) -> Complex64 {
    -I * principal_log(u, tol)
}

/// `H̃ = −i·log(e^{iE} + N)` for one `p×p` block.
fn block_log(e: Complex64, p: usize) -> DMatrix<Complex64> {
    log_jordan_block(I * e, (I * e).exp(), p) * (-I)
}

/// Logarithm from precomputed Jordan data and a complete pairing.
pub fn log_from_structure(u: &CMatrix, jd: &JordanData, pairing: &SpectralPairing) -> Result<LogResult> {
    if !pairing.is_complete() {
        return Err(Error::NotPseudoUnitary { unpaired: pairing.unpaired_eigenvalues() });
    }
    let n = jd.n();
    let tol = jd.tol();
    let mut energies: Vec<Option<Complex64>> = vec![None; jd.items().len()];
    let mut relocations = Vec::new();
    for entry in &pairing.unimodular {
        let e = block_energy(entry.eigenvalue, tol);
        energies[entry.item] = Some(Complex64::new(e.re, 0.0));
    }
    for pair in &pairing.pairs {
        let outer = block_energy(pair.outer, tol);
        let inner = block_energy(pair.inner, tol);
        let target = outer.conj();
        let shift = ((inner.re - target.re) / (2.0 * PI)).round() as i64;
        relocations.push(Relocation { original: inner, shift, relocated: target });
        energies[pair.outer_item] = Some(outer);
        energies[pair.inner_item] = Some(target);
    }

    let mut items = Vec::with_capacity(jd.items().len());
    for (k, it) in jd.items().iter().enumerate() {
        let e = energies[k].ok_or_else(|| Error::IllConditioned(format!("eigenvalue {} left out of the pairing", it.eigenvalue)))?;
        items.push(JordanItem::new(e, it.jordan_dimensions.clone()));
    }
    let mut h_tilde = DMatrix::<Complex64>::zeros(n, n);
    for b in jd.blocks() {
        let e = items[b.item].eigenvalue;
        h_tilde.view_mut((b.offset, b.offset), (b.size, b.size)).copy_from(&block_log(e, b.size));
    }
    let h = CMatrix::wrap(jd.basis() * h_tilde * jd.cobasis().adjoint(), tol);
    let back = expm(&h.scale(I))?;
    let residual = (back.as_na() - u.as_na()).norm();
    let threshold = n as f64 * tol * u.norm().max(1.0);
    if residual.is_nan() || residual > threshold {
        return Err(Error::IllConditioned(format!("e^{{iH}} misses U by {residual:e} (threshold {threshold:e})")));
    }
    let structure = JordanData::from_parts(items, jd.basis().clone(), tol)?;
    Ok(LogResult { h, relocations, residual, structure })
}

/// A pseudo-Hermitian `H` with `e^{iH} = U`.
///
/// Block energies come from the principal logarithm. Unimodular eigenvalues
/// get real energies; the energy of each inner eigenvalue `1/ū₊` is moved by
/// a multiple of `2π` onto the conjugate of its partner's, so the spectrum of
/// `H` is closed under conjugation with matching Jordan blocks.
pub fn pseudo_hermitian_log(u: &CMatrix) -> Result<LogResult> {
    let analysis = analyze_pseudo_unitary(u)?;
    log_from_structure(u, &analysis.jordan, &analysis.pairing)
}

/// `e^{−itH}`.
pub fn evolve(h: &CMatrix, t: f64) -> Result<CMatrix> {
    if !t.is_finite() {
        return Err(Error::BadParameter(format!("time must be finite, got {t}")));
    }
    expm(&h.scale(Complex64::new(0.0, -t)))
}

/// Jordan data of `e^{i(E·1_p + a_p)}`, with `a_p` the nilpotent shift:
/// a single block of size `p` at `e^{iE}`.
pub fn verify_exponential_structure(e: Complex64, p: usize, tol: f64) -> Result<JordanData> {
    if p == 0 {
        return Err(Error::BadParameter("block size must be positive".into()));
    }
    let w = (I * e).exp();
    // e^{iE}(e^{i a_p} − 1) is upper triangular Toeplitz with first superdiagonal i·e^{iE}
    let mut nil = DMatrix::<Complex64>::zeros(p, p);
    let mut coeff = w;
    for k in 1..p {
        coeff *= I / k as f64;
        for i in 0..(p - k) {
            nil[(i, i + k)] = coeff;
        }
    }
    let mut basis = DMatrix::<Complex64>::zeros(p, p);
    let mut v = nalgebra::DVector::<Complex64>::zeros(p);
    v[p - 1] = Complex64::new(1.0, 0.0);
    for col in (0..p).rev() {
        basis.set_column(col, &v);
        v = &nil * v;
    }
    JordanData::from_parts(vec![JordanItem::new(w, vec![p])], basis, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{jordan_structure, DEFAULT_TOL};
    use crate::pseudospec::is_pseudo_hermitian_spectrum;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn unimodular_diagonal() {
        let w = Complex64::from_polar(1.0, PI / 5.0);
        let r = pseudo_hermitian_log(&CMatrix::from_diagonal(&[w, w.conj()])).unwrap();
        let expected = CMatrix::from_diagonal(&[c(PI / 5.0, 0.0), c(-PI / 5.0, 0.0)]);
        assert!(r.h.max_abs_diff(&expected) < 1e-14);
        assert!(r.relocations.is_empty());
    }

    #[test]
    fn polar_pair() {
        let r = pseudo_hermitian_log(&CMatrix::from_diagonal(&[c(2.0, 0.0), c(0.5, 0.0)])).unwrap();
        let l = 2f64.ln();
        assert!(r.h.max_abs_diff(&CMatrix::from_diagonal(&[c(0.0, -l), c(0.0, l)])) < 1e-14);
        assert_eq!(r.relocations.len(), 1);
        assert_eq!(r.relocations[0].shift, 0);
        assert!(is_pseudo_hermitian_spectrum(&r.h).unwrap().decision);
    }

    #[test]
    fn relocation_across_the_cut() {
        // outer on the cut gets +π; the inner partner sits just outside the snap band below the axis
        let outer = c(-2.0, 0.0);
        let inner = c(-0.5, -1e-9);
        let r = pseudo_hermitian_log(&CMatrix::from_diagonal(&[outer, inner])).unwrap();
        assert_eq!(r.relocations[0].shift, -1);
        let e = r.structure.items().iter().map(|it| it.eigenvalue).collect::<Vec<_>>();
        assert!((e[0].conj() - e[1]).norm() < 1e-15);
        assert!(r.residual < 4e-9);
    }

    #[test]
    fn jordan_block_log() {
        let th = PI / 3.0;
        let w = Complex64::from_polar(1.0, th);
        let u = CMatrix::from_rows(&[vec![w, c(1.0, 0.0)], vec![c(0.0, 0.0), w]]).unwrap();
        let r = pseudo_hermitian_log(&u).unwrap();
        let expected = CMatrix::from_rows(&[vec![c(th, 0.0), -I * w.conj()], vec![c(0.0, 0.0), c(th, 0.0)]]).unwrap();
        assert!(r.h.max_abs_diff(&expected) < 1e-12, "{:?}", r.h);
        assert!(expm(&r.h.scale(I)).unwrap().max_abs_diff(&u) < 1e-12);
    }

    #[test]
    fn not_pseudo_unitary_is_rejected() {
        let u = CMatrix::from_diagonal(&[c(0.0, 2.0), c(0.0, -0.5)]);
        assert!(matches!(pseudo_hermitian_log(&u), Err(Error::NotPseudoUnitary { .. })));
    }

    #[test]
    fn evolution_examples() {
        let h = CMatrix::from_diagonal(&[c(1.0, 0.0), c(-1.0, 0.0)]);
        assert!(evolve(&h, 0.0).unwrap().max_abs_diff(&CMatrix::identity(2)) == 0.0);
        let u = evolve(&h, 0.7).unwrap();
        assert!((u.adjoint().as_na() * u.as_na() - DMatrix::identity(2, 2)).norm() < 1e-15);

        let l = 2f64.ln();
        let h = CMatrix::from_diagonal(&[c(0.0, -l), c(0.0, l)]);
        let u = evolve(&h, 1.0).unwrap();
        assert!(u.max_abs_diff(&CMatrix::from_diagonal(&[c(0.5, 0.0), c(2.0, 0.0)])) < 1e-15);
        let eta = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let w = u.adjoint().as_na() * eta.as_na() * u.as_na();
        assert!((w - eta.as_na()).norm() < 1e-15);
    }

    #[test]
    fn exponential_structure() {
        let jd = verify_exponential_structure(c(0.0, 0.0), 1, DEFAULT_TOL).unwrap();
        assert_eq!(jd.items()[0].eigenvalue, c(1.0, 0.0));
        let jd = verify_exponential_structure(c(PI, 0.0), 3, DEFAULT_TOL).unwrap();
        assert!((jd.items()[0].eigenvalue - c(-1.0, 0.0)).norm() < 1e-15);
        assert_eq!(jd.items()[0].jordan_dimensions, vec![3]);

        let e = c(0.83, 0.0);
        let jd = verify_exponential_structure(e, 4, DEFAULT_TOL).unwrap();
        let mut arg = DMatrix::<Complex64>::identity(4, 4) * (I * e);
        for i in 0..3 {
            arg[(i, i + 1)] = I;
        }
        let direct = expm(&CMatrix::wrap(arg, DEFAULT_TOL)).unwrap();
        assert!(jd.reassemble().max_abs_diff(&direct) < 1e-14);
        let numeric = jordan_structure(&direct).unwrap();
        assert_eq!(numeric.items().len(), 1);
        assert_eq!(numeric.items()[0].jordan_dimensions, vec![4]);
    }
}
