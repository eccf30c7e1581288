//! Small dense helpers over nalgebra: sorted SVDs, rank decisions, kernels.

use nalgebra::{ComplexField, DMatrix, Scalar};
use num_complex::Complex64;

use crate::error::{Error, Result};

const JACOBI_MAX_SWEEPS: usize = 100;

pub(crate) struct SortedSvd<T: Scalar = Complex64> {
    /// Left singular vectors, columns ordered by descending singular value.
    /// Columns belonging to zero singular values are zero.
    pub u: DMatrix<T>,
    pub sigma: Vec<f64>,
    /// Right singular vectors as columns, same order.
    pub v: DMatrix<T>,
}

/// Singular value decomposition by one-sided (Hestenes) Jacobi rotations.
///
/// Chosen over the bidiagonal QR iteration because rank decisions here hinge
/// on singular vectors of nearly rank-deficient matrices, which Jacobi
/// resolves to high relative accuracy. Tall inputs are first reduced to their
/// triangular QR factor, which has the same singular values and right vectors.
pub(crate) fn svd<T: ComplexField<RealField = f64> + Copy>(m: &DMatrix<T>) -> Result<SortedSvd<T>> {
    if m.nrows() < m.ncols() {
        let t = svd(&m.adjoint())?;
        return Ok(SortedSvd { u: t.v, sigma: t.sigma, v: t.u });
    }
    let ncols = m.ncols();
    let reduced = m.nrows() > ncols + ncols / 2;
    let (q, mut w) = if reduced {
        let qr = m.clone().qr();
        (Some(qr.q()), qr.r())
    } else {
        (None, m.clone())
    };
    let mut v = DMatrix::<T>::identity(ncols, ncols);
    let eps = f64::EPSILON;
    let orth = eps * w.nrows().max(1) as f64;
    // pairs of negligible columns are left alone; rotating them never settles
    let floor = eps * eps * w.norm_squared();
    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..ncols {
            for q in (p + 1)..ncols {
                let alpha = w.column(p).norm_squared();
                let beta = w.column(q).norm_squared();
                let gamma = w.column(p).dotc(&w.column(q));
                let g = gamma.modulus();
                if g <= floor || g <= orth * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let e = gamma.unscale(g);
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                rotate(&mut w, p, q, cs, sn, e);
                rotate(&mut v, p, q, cs, sn, e);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence);
    }
    let norms: Vec<f64> = (0..ncols).map(|k| w.column(k).norm()).collect();
    let mut order: Vec<usize> = (0..ncols).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));
    let sigma: Vec<f64> = order.iter().map(|&k| norms[k]).collect();
    let mut u = DMatrix::<T>::zeros(w.nrows(), ncols);
    for (dst, &k) in order.iter().enumerate() {
        if norms[k] > 0.0 {
            u.set_column(dst, &w.column(k).unscale(norms[k]));
        }
    }
    let u = match q {
        Some(q) => q * u,
        None => u,
    };
    let v = DMatrix::from_fn(ncols, ncols, |i, k| v[(i, order[k])]);
    Ok(SortedSvd { u, sigma, v })
}

/// Columns `p`, `q` of `x` ← `[x_p x_q]·[[c, s·e], [−s·ē, c]]`.
fn rotate<T: ComplexField<RealField = f64> + Copy>(x: &mut DMatrix<T>, p: usize, q: usize, cs: f64, sn: f64, e: T) {
    for i in 0..x.nrows() {
        let (a, b) = (x[(i, p)], x[(i, q)]);
        x[(i, p)] = a.scale(cs) - (b * e.conjugate()).scale(sn);
        x[(i, q)] = (a * e).scale(sn) + b.scale(cs);
    }
}

/// Number of singular values above `threshold`.
pub(crate) fn rank_above(sigma: &[f64], threshold: f64) -> usize {
    sigma.iter().filter(|&&s| s > threshold).count()
}

/// Rank of a square matrix `p` under the crate convention: singular values
/// at or below `n·tol·‖p‖₂` count as zero, and `p` is treated as the zero
/// matrix when `‖p‖₂ <= n·tol·scale` for the caller-supplied magnitude scale.
pub(crate) fn numerical_rank(p: &DMatrix<Complex64>, tol: f64, scale: f64) -> Result<(usize, SortedSvd)> {
    let n = p.nrows();
    let s = svd(p)?;
    let top = s.sigma.first().copied().unwrap_or(0.0);
    let nt = n as f64 * tol;
    if top <= nt * scale {
        return Ok((0, s));
    }
    let r = rank_above(&s.sigma, nt * top);
    Ok((r, s))
}

/// Orthonormal basis (as columns) of the kernel of square `p`, given its rank.
pub(crate) fn kernel_basis(s: &SortedSvd, rank: usize) -> DMatrix<Complex64> {
    let n = s.v.nrows();
    s.v.columns(rank, n - rank).into_owned()
}

/// Orthonormal basis of the column span of `c`, keeping `keep` directions.
pub(crate) fn range_basis(c: &DMatrix<Complex64>, keep: usize) -> Result<DMatrix<Complex64>> {
    if keep == 0 || c.ncols() == 0 {
        return Ok(DMatrix::zeros(c.nrows(), 0));
    }
    let s = svd(c)?;
    let keep = keep.min(s.sigma.len());
    let top = s.sigma[0];
    if s.sigma[keep - 1] <= f64::EPSILON * top {
        return Err(Error::IllConditioned("requested range exceeds numerical rank".into()));
    }
    Ok(s.u.columns(0, keep).into_owned())
}

pub(crate) fn hstack(blocks: &[&DMatrix<Complex64>], nrows: usize) -> DMatrix<Complex64> {
    let ncols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = DMatrix::zeros(nrows, ncols);
    let mut at = 0;
    for b in blocks {
        out.columns_mut(at, b.ncols()).copy_from(b);
        at += b.ncols();
    }
    out
}

/// Rotates a vector's phase so its largest-modulus entry is real positive.
pub(crate) fn fix_phase(v: &mut nalgebra::DVector<Complex64>) {
    let mut best = 0;
    for i in 0..v.len() {
        if v[i].norm() > v[best].norm() + 1e-12 {
            best = i;
        }
    }
    let z = v[best];
    if z.norm() > 0.0 {
        let phase = z.conj() / z.norm();
        *v *= phase;
    }
}
