//! Eigenvalues with tolerance-controlled clustering and kernel-dimension queries.
//!
//! Raw eigenvalues come from a complex Schur decomposition. A defective
//! eigenvalue of Jordan size `k` is split by rounding into `k` eigenvalues at
//! distance roughly `(ε‖M‖)^{1/k}`, so clustering cannot use one fixed radius.
//! A group of `k` eigenvalues is merged when it fits within
//! `max(r₀, (n·tol)^{1/k}·‖M‖)` of a seed AND the rank sequence of
//! `(M − λI)^ℓ` at the group mean `λ` certifies an invariant subspace of
//! dimension exactly `k`. Otherwise smaller groups are tried.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::cmatrix::CMatrix;
use super::dense;
use crate::error::{Error, Result};

const SCHUR_MAX_ITER: usize = 100_000;

/// One eigenvalue cluster: the mean of the merged eigenvalues and their count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenCluster {
    pub value: Complex64,
    pub multiplicity: usize,
}

/// A cluster whose rank sequence has been checked, with orthonormal bases of
/// `ker (M − λI)^ℓ` for `ℓ = 1..=index`.
#[derive(Debug, Clone)]
pub(crate) struct ValidatedCluster {
    pub value: Complex64,
    pub multiplicity: usize,
    pub kernels: Vec<DMatrix<Complex64>>,
}

impl ValidatedCluster {
    pub fn kernel_dims(&self) -> Vec<usize> {
        self.kernels.iter().map(|k| k.ncols()).collect()
    }
}

/// Base merge radius `max(1e−8, 1e3·tol)·‖M‖₂`.
pub fn cluster_radius(m: &CMatrix) -> f64 {
    base_radius(m.tol(), m.norm2())
}

fn base_radius(tol: f64, scale: f64) -> f64 {
    (1e3 * tol).max(1e-8) * scale
}

/// Deterministic spectral order: modulus descending, then argument ascending.
pub fn spectral_order(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    let (ma, mb) = (a.norm(), b.norm());
    if (ma - mb).abs() > 1e-12 * ma.max(mb).max(1.0) {
        return mb.total_cmp(&ma);
    }
    a.arg().total_cmp(&b.arg())
}

/// All `n` eigenvalues (unclustered), from the complex Schur form.
pub fn raw_eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>> {
    let schur = nalgebra::linalg::Schur::try_new(m.as_na().clone(), f64::EPSILON, SCHUR_MAX_ITER)
        .ok_or(Error::NonConvergence)?;
    let (_, t) = schur.unpack();
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

/// Eigenvalues with algebraic multiplicity, clustered as described in the
/// module documentation and sorted in [`spectral_order`].
pub fn schur_eigenvalues(m: &CMatrix) -> Result<Vec<EigenCluster>> {
    Ok(clusters(m)?
        .into_iter()
        .map(|c| EigenCluster { value: c.value, multiplicity: c.multiplicity })
        .collect())
}

/// `dim ker (M − zI)^ℓ`, rank decided at the matrix tolerance.
pub fn kernel_dim(m: &CMatrix, z: Complex64, ell: usize) -> Result<usize> {
    if ell == 0 {
        return Err(Error::BadParameter("power must be at least 1".into()));
    }
    let shifted = m.shift(z);
    let p = shifted.pow(ell);
    let scale = (m.norm2() + z.norm()).powi(ell as i32);
    let (rank, _) = dense::numerical_rank(p.as_na(), m.tol(), scale)?;
    Ok(m.n() - rank)
}

/// Kernel bases of `(M − λI)^ℓ` for increasing ℓ until the dimension reaches
/// `k`. Returns `None` when the rank sequence is inconsistent with an
/// invariant subspace of dimension `k` at `λ`.
pub(crate) fn kernel_chain(m: &CMatrix, lambda: Complex64, k: usize) -> Result<Option<Vec<DMatrix<Complex64>>>> {
    let n = m.n();
    let b = m.shift(lambda);
    let base_scale = m.norm2() + lambda.norm();
    let mut power = DMatrix::<Complex64>::identity(n, n);
    let mut kernels = Vec::new();
    let mut prev_dim = 0usize;
    let mut prev_step = usize::MAX;
    for ell in 1..=k {
        power = &power * b.as_na();
        let (rank, svd) = dense::numerical_rank(&power, m.tol(), base_scale.powi(ell as i32))?;
        let dim = n - rank;
        let step = dim.saturating_sub(prev_dim);
        if dim < prev_dim || dim > k || step == 0 || step > prev_step {
            return Ok(None);
        }
        kernels.push(dense::kernel_basis(&svd, rank));
        if dim == k {
            return Ok(Some(kernels));
        }
        prev_dim = dim;
        prev_step = step;
    }
    Ok(None)
}

pub(crate) fn clusters(m: &CMatrix) -> Result<Vec<ValidatedCluster>> {
    let n = m.n();
    let tol = m.tol();
    let scale = m.norm2();
    let mut eigs = raw_eigenvalues(m)?;
    eigs.sort_by(spectral_order);

    let r0 = base_radius(tol, scale);
    let radius = |k: usize| r0.max((n as f64 * tol).powf(1.0 / k as f64) * scale);

    let mut assigned = vec![false; n];
    let mut out: Vec<ValidatedCluster> = Vec::new();
    for seed in 0..n {
        if assigned[seed] {
            continue;
        }
        let mut near: Vec<(f64, usize)> = (0..n)
            .filter(|&j| !assigned[j])
            .map(|j| ((eigs[j] - eigs[seed]).norm(), j))
            .collect();
        near.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        let mut chosen = None;
        for k in (1..=near.len()).rev() {
            if k > 1 && near[k - 1].0 > radius(k) {
                continue;
            }
            let members: Vec<usize> = near[..k].iter().map(|&(_, j)| j).collect();
            let mean = members.iter().map(|&j| eigs[j]).sum::<Complex64>() / k as f64;
            if let Some(kernels) = kernel_chain(m, mean, k)? {
                chosen = Some((members, mean, kernels));
                break;
            }
        }
        let (members, value, kernels) = chosen.ok_or_else(|| {
            Error::IllConditioned(format!(
                "no invariant subspace certified near eigenvalue {} at tolerance {:e}",
                eigs[seed], tol
            ))
        })?;
        for &j in &members {
            assigned[j] = true;
        }
        out.push(ValidatedCluster { value, multiplicity: members.len(), kernels });
    }

    for a in 0..out.len() {
        for b in (a + 1)..out.len() {
            let sep = (out[a].value - out[b].value).norm();
            if sep < 10.0 * r0 {
                return Err(Error::IllConditioned(format!(
                    "eigenvalue clusters {} and {} separated by {:e} < 10·radius {:e}",
                    out[a].value, out[b].value, sep, r0
                )));
            }
        }
    }
    out.sort_by(|a, b| spectral_order(&a.value, &b.value));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_is_one_cluster() {
        let cl = schur_eigenvalues(&CMatrix::identity(3)).unwrap();
        assert_eq!(cl.len(), 1);
        assert_eq!(cl[0].multiplicity, 3);
        assert!((cl[0].value - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn diagonal_two_i_minus_half_i() {
        let m = CMatrix::from_diagonal(&[c(0.0, 2.0), c(0.0, -0.5)]);
        let cl = schur_eigenvalues(&m).unwrap();
        assert_eq!(cl.len(), 2);
        assert!((cl[0].value - c(0.0, 2.0)).norm() < 1e-14);
        assert!((cl[1].value - c(0.0, -0.5)).norm() < 1e-14);
        assert!(cl.iter().all(|e| e.multiplicity == 1));
    }

    #[test]
    fn kernel_dim_of_jordan_block() {
        let j = CMatrix::from_rows(&[vec![c(3.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(3.0, 0.0)]]).unwrap();
        assert_eq!(kernel_dim(&j, c(3.0, 0.0), 1).unwrap(), 1);
        assert_eq!(kernel_dim(&j, c(3.0, 0.0), 2).unwrap(), 2);
        assert_eq!(kernel_dim(&j, c(2.0, 0.0), 1).unwrap(), 0);
        let i = CMatrix::identity(4);
        for ell in 1..4 {
            assert_eq!(kernel_dim(&i, c(1.0, 0.0), ell).unwrap(), 4);
        }
        assert!(kernel_dim(&i, c(1.0, 0.0), 0).is_err());
    }

    #[test]
    fn close_simple_eigenvalues_stay_separate() {
        let m = CMatrix::from_diagonal(&[c(1.0, 0.0), c(1.0 + 5e-5, 0.0), c(-1.0, 0.0)]);
        let cl = schur_eigenvalues(&m).unwrap();
        assert_eq!(cl.len(), 3);
    }

    #[test]
    fn nearly_coincident_clusters_are_ill_conditioned() {
        let m = CMatrix::from_diagonal(&[c(1.0, 0.0), c(1.0 + 2e-6, 0.0)]);
        assert!(matches!(schur_eigenvalues(&m), Err(Error::IllConditioned(_))));
    }
}
