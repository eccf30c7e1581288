//! Numerical Jordan structure: eigenvalues, Jordan dimensions and a
//! biorthonormal system of generalized eigenvectors.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::cmatrix::CMatrix;
use super::dense;
use super::spectrum::{self, ValidatedCluster};
use crate::error::{Error, Result};

/// One distinct eigenvalue with its block sizes (largest first).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JordanItem {
    pub eigenvalue: Complex64,
    pub geometric_multiplicity: usize,
    pub jordan_dimensions: Vec<usize>,
}

impl JordanItem {
    pub fn new(eigenvalue: Complex64, mut jordan_dimensions: Vec<usize>) -> Self {
        jordan_dimensions.sort_unstable_by(|a, b| b.cmp(a));
        Self { eigenvalue, geometric_multiplicity: jordan_dimensions.len(), jordan_dimensions }
    }

    pub fn algebraic_multiplicity(&self) -> usize {
        self.jordan_dimensions.iter().sum()
    }
}

/// Position of one Jordan block inside the basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockRef {
    pub item: usize,
    pub block: usize,
    pub eigenvalue: Complex64,
    pub size: usize,
    pub offset: usize,
}

/// Jordan data of a matrix `M = A J A⁻¹`.
///
/// Columns of `basis` (`A`) are the generalized eigenvectors `|ψ⟩`, block by
/// block, each chain ordered so that `(M − u)ψ₁ = 0` and `(M − u)ψ_{i+1} = ψ_i`.
/// Columns of `cobasis` (`Φ = A^{-†}`) are the dual vectors `|φ⟩`, so that
/// `Φ†A = AΦ† = I`.
#[derive(Debug, Clone)]
pub struct JordanData {
    items: Vec<JordanItem>,
    basis: DMatrix<Complex64>,
    cobasis: DMatrix<Complex64>,
    tol: f64,
    scale: f64,
}

impl JordanData {
    /// Assembles Jordan data from explicit parts, bypassing numerical
    /// decomposition. `basis` must be invertible and its column blocks must
    /// follow the order of `items` (blocks within an item largest first).
    pub fn from_parts(items: Vec<JordanItem>, basis: DMatrix<Complex64>, tol: f64) -> Result<Self> {
        let n = basis.nrows();
        if basis.ncols() != n {
            return Err(Error::InvalidMatrix("basis must be square".into()));
        }
        let total: usize = items.iter().map(JordanItem::algebraic_multiplicity).sum();
        if total != n {
            return Err(Error::DimensionMismatch { expected: n, found: total });
        }
        for it in &items {
            if it.jordan_dimensions.len() != it.geometric_multiplicity || it.jordan_dimensions.contains(&0) {
                return Err(Error::BadParameter("inconsistent Jordan item".into()));
            }
        }
        let inv = basis.clone().lu().try_inverse().ok_or(Error::Singular { min_modulus: 0.0 })?;
        let cobasis = inv.adjoint();
        let mut jd = Self { items, basis, cobasis, tol, scale: 0.0 };
        jd.scale = jd.reassemble().norm2();
        Ok(jd)
    }

    pub fn items(&self) -> &[JordanItem] {
        &self.items
    }

    pub fn basis(&self) -> &DMatrix<Complex64> {
        &self.basis
    }

    pub fn cobasis(&self) -> &DMatrix<Complex64> {
        &self.cobasis
    }

    pub fn n(&self) -> usize {
        self.basis.nrows()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Spectral norm of the decomposed matrix.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn blocks(&self) -> Vec<BlockRef> {
        let mut out = Vec::new();
        let mut offset = 0;
        for (item, it) in self.items.iter().enumerate() {
            for (block, &size) in it.jordan_dimensions.iter().enumerate() {
                out.push(BlockRef { item, block, eigenvalue: it.eigenvalue, size, offset });
                offset += size;
            }
        }
        out
    }

    /// Blocks of one item, in basis order.
    pub fn item_blocks(&self, item: usize) -> Vec<BlockRef> {
        self.blocks().into_iter().filter(|b| b.item == item).collect()
    }

    /// The Jordan matrix `J` in the basis order.
    pub fn jordan_matrix(&self) -> DMatrix<Complex64> {
        let n = self.n();
        let mut j = DMatrix::zeros(n, n);
        for b in self.blocks() {
            for i in 0..b.size {
                j[(b.offset + i, b.offset + i)] = b.eigenvalue;
                if i + 1 < b.size {
                    j[(b.offset + i, b.offset + i + 1)] = Complex64::new(1.0, 0.0);
                }
            }
        }
        j
    }

    /// `Σ u|ψ_i⟩⟨φ_i| + |ψ_i⟩⟨φ_{i+1}|`, i.e. `A J Φ†`.
    pub fn reassemble(&self) -> CMatrix {
        CMatrix::wrap(&self.basis * self.jordan_matrix() * self.cobasis.adjoint(), self.tol)
    }

    /// `(‖Φ†A − I‖_F, ‖AΦ† − I‖_F)`.
    pub fn biorthonormality_residuals(&self) -> (f64, f64) {
        let n = self.n();
        let id = DMatrix::<Complex64>::identity(n, n);
        let left = (self.cobasis.adjoint() * &self.basis - &id).norm();
        let right = (&self.basis * self.cobasis.adjoint() - &id).norm();
        (left, right)
    }

    pub fn basis_condition(&self) -> f64 {
        self.basis.norm() * self.cobasis.norm()
    }
}

/// Recovers the Jordan structure of `m`.
///
/// Block counts come from the rank sequence `r_ℓ = rank (M − λI)^ℓ`: the
/// number of blocks of size at least ℓ is `r_{ℓ−1} − r_ℓ`. Chains are grown
/// from tops chosen orthonormally inside each kernel level, modulo the lower
/// level and the chains already started above it.
pub fn jordan_structure(m: &CMatrix) -> Result<JordanData> {
    let n = m.n();
    let clusters = spectrum::clusters(m)?;
    let mut items = Vec::with_capacity(clusters.len());
    let mut columns: Vec<DVector<Complex64>> = Vec::with_capacity(n);
    for cl in &clusters {
        let (dims, chains) = chains_for_cluster(m, cl)?;
        items.push(JordanItem::new(cl.value, dims));
        for chain in chains {
            columns.extend(chain);
        }
    }
    let basis = DMatrix::from_columns(&columns);
    let mut jd = JordanData::from_parts(items, basis, m.tol())
        .map_err(|_| Error::IllConditioned("generalized eigenvectors are numerically dependent".into()))?;
    jd.scale = m.norm2();
    let residual = (jd.reassemble().as_na() - m.as_na()).norm();
    let bound = (n as f64 * m.tol() * m.norm()).max(f64::MIN_POSITIVE);
    if residual > bound {
        return Err(Error::IllConditioned(format!(
            "Jordan reassembly residual {residual:e} exceeds {bound:e}"
        )));
    }
    Ok(jd)
}

type Chain = Vec<DVector<Complex64>>;

fn chains_for_cluster(m: &CMatrix, cl: &ValidatedCluster) -> Result<(Vec<usize>, Vec<Chain>)> {
    let n = m.n();
    let b = m.shift(cl.value);
    let b = b.as_na();
    let s = cl.kernel_dims();
    let depth = s.len();
    // c[ℓ] = number of blocks of size ≥ ℓ, ℓ = 1..=depth
    let count_at_least = |ell: usize| -> usize {
        if ell == 0 || ell > depth {
            return 0;
        }
        s[ell - 1] - if ell >= 2 { s[ell - 2] } else { 0 }
    };

    let mut tops: Vec<(usize, DVector<Complex64>)> = Vec::new();
    for ell in (1..=depth).rev() {
        let need = count_at_least(ell) - count_at_least(ell + 1);
        if need == 0 {
            continue;
        }
        let inherited: Vec<DVector<Complex64>> = tops
            .iter()
            .map(|(lvl, v)| {
                let mut w = v.clone();
                for _ in ell..*lvl {
                    w = b * w;
                }
                w
            })
            .collect();
        let lower = if ell >= 2 { cl.kernels[ell - 2].clone() } else { DMatrix::zeros(n, 0) };
        let inherited_m = if inherited.is_empty() { DMatrix::zeros(n, 0) } else { DMatrix::from_columns(&inherited) };
        let span = dense::hstack(&[&lower, &inherited_m], n);
        let q = dense::range_basis(&span, lower.ncols() + inherited.len())?;
        let level = &cl.kernels[ell - 1];
        let residual = level - &q * (q.adjoint() * level);
        let fresh = dense::range_basis(&residual, need)?;
        if fresh.ncols() < need {
            return Err(Error::IllConditioned("kernel filtration too small for chain tops".into()));
        }
        for k in 0..need {
            let mut v = fresh.column(k).into_owned();
            dense::fix_phase(&mut v);
            tops.push((ell, v));
        }
    }

    let mut dims = Vec::with_capacity(tops.len());
    let mut chains = Vec::with_capacity(tops.len());
    for (lvl, v) in tops {
        let mut chain = vec![v];
        for _ in 1..lvl {
            let next = b * chain.last().expect("chain is nonempty");
            chain.push(next);
        }
        chain.reverse();
        dims.push(lvl);
        chains.push(chain);
    }
    Ok((dims, chains))
}
