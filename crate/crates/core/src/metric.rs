//! Explicit metric operators for pseudo-unitary matrices.
//!
//! With `U = A J A⁻¹` and cobasis `Φ = A^{-†}`, the ansatz `η = Φ X Φ†`
//! turns `U†ηU = η` into `J†XJ = X`. `X` is block sparse:
//!
//! * a unimodular Jordan block `J_b = u + N` carries a diagonal block `z`
//!   solving the block recurrences with eigenvalue `u`;
//! * an outer block `J₊ = u₊ + N` and its inner partner `J₋ = 1/ū₊ + N`
//!   are coupled by `X[−,+] = x` and `X[+,−] = x†`, where `x` solves the
//!   same recurrences with eigenvalue `u₊`.
//!
//! The inverse is `η⁻¹ = A X⁻¹ A†`, block by block.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{dense, inertia, CMatrix, Inertia, JordanData, Signature};
use crate::pseudospec::{analyze_pseudo_unitary, eta_residual_threshold, PseudoUnitaryAnalysis, SpectralPairing};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Coefficient matrix `x` of one block, with its free last column.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockCoefficients {
    pub p: usize,
    pub u: Complex64,
    pub x: DMatrix<Complex64>,
    pub last_column: Vec<Complex64>,
}

impl BlockCoefficients {
    /// `x` is invertible exactly when `x_{1,p} ≠ 0`: its determinant is, up to
    /// sign, the product of the anti-diagonal entries `(−1)^{i−1} u^{2(i−1)} x_{1,p}`.
    pub fn is_invertible(&self) -> bool {
        self.x[(0, self.p - 1)] != ZERO
    }

    pub fn inverse(&self) -> Result<DMatrix<Complex64>> {
        if !self.is_invertible() {
            return Err(Error::SingularBlock { u: self.u, p: self.p });
        }
        self.x.clone().lu().try_inverse().ok_or(Error::SingularBlock { u: self.u, p: self.p })
    }
}

/// `C(s, r)` for `0 ≤ r`, and 0 when `s < r`.
fn binom(s: usize, r: usize) -> f64 {
    if s < r {
        return 0.0;
    }
    let r = r.min(s - r);
    (0..r).fold(1.0, |acc, k| acc * (s - k) as f64 / (k + 1) as f64)
}

/// Fills the coefficient matrix from its last column by the closed form
///
/// `x_{i,j} = 0` for `i + j ≤ p`, and for `j < p < i + j`
/// `x_{i,j} = Σ_{k=1}^{i+j−p} C(i−k−1, p−j−1) (−1)^{i−k} u^{p+i−j−k} x_{k,p}`.
pub fn solve_block_coeffs(u: Complex64, p: usize, last_column: &[Complex64]) -> Result<BlockCoefficients> {
    if u == ZERO {
        return Err(Error::ZeroEigenvalue(u));
    }
    if p == 0 {
        return Err(Error::BadParameter("block size must be positive".into()));
    }
    if last_column.len() != p {
        return Err(Error::DimensionMismatch { expected: p, found: last_column.len() });
    }
    let mut x = DMatrix::<Complex64>::zeros(p, p);
    for i in 1..=p {
        x[(i - 1, p - 1)] = last_column[i - 1];
        for j in 1..p {
            if i + j <= p {
                continue;
            }
            let mut acc = ZERO;
            for k in 1..=(i + j - p) {
                let sign = if (i - k) % 2 == 0 { 1.0 } else { -1.0 };
                acc += u.powi((p + i - j - k) as i32) * last_column[k - 1] * (binom(i - k - 1, p - j - 1) * sign);
            }
            x[(i - 1, j - 1)] = acc;
        }
    }
    Ok(BlockCoefficients { p, u, x, last_column: last_column.to_vec() })
}

/// Principal square root of `(−1)^{p−1}`: 1 for odd `p`, `i` for even `p`.
pub fn root_sign(p: usize) -> Complex64 {
    if p % 2 == 1 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(0.0, 1.0)
    }
}

/// Minimum-norm least-squares solution and its residual norm.
fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<(DVector<f64>, f64)> {
    let s = dense::svd(a)?;
    let top = s.sigma.first().copied().unwrap_or(0.0);
    let cut = 1e-12 * top;
    let mut sol = DVector::<f64>::zeros(a.ncols());
    for k in 0..s.sigma.len() {
        if s.sigma[k] > cut {
            sol += s.v.column(k) * (s.u.column(k).dot(b) / s.sigma[k]);
        }
    }
    let residual = (a * &sol - b).norm();
    Ok((sol, residual))
}

/// Real and imaginary parts of `x − x†`, entry by entry.
fn anti_hermitian_part(x: &DMatrix<Complex64>) -> DVector<f64> {
    let d = x - x.adjoint();
    DVector::from_iterator(2 * d.len(), d.iter().flat_map(|z| [z.re, z.im]))
}

/// Hermitian, invertible coefficients for a unimodular block.
///
/// Sets `x_{1,p} = sign·√((−1)^{p−1})·u^{1−p}·ρ` (principal root). Since `x`
/// depends complex-linearly on its last column, `x = x†` is a real-linear
/// system in `x_{2,p}, …, x_{p,p}`; its minimum-norm solution is used and the
/// rest of `x` follows from [`solve_block_coeffs`].
pub fn hermitian_unimodular_coeffs(u: Complex64, p: usize, rho: f64, sign: i8, tol: f64) -> Result<BlockCoefficients> {
    if (u.norm() - 1.0).abs() > tol.max(f64::EPSILON * 8.0) {
        return Err(Error::NotUnimodular(u));
    }
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::BadParameter(format!("rho must be positive, got {rho}")));
    }
    if sign != 1 && sign != -1 {
        return Err(Error::BadParameter(format!("sign must be +1 or -1, got {sign}")));
    }
    if p == 0 {
        return Err(Error::BadParameter("block size must be positive".into()));
    }
    let x1p = root_sign(p) * u.powi(1 - p as i32) * (rho * sign as f64);
    let mut col = vec![ZERO; p];
    col[0] = x1p;
    if p == 1 {
        return solve_block_coeffs(u, 1, &col);
    }

    let b = -anti_hermitian_part(&solve_block_coeffs(u, p, &col)?.x);
    let mut a = DMatrix::<f64>::zeros(b.len(), 2 * (p - 1));
    for k in 1..p {
        for (part, unit) in [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)].into_iter().enumerate() {
            let mut e = vec![ZERO; p];
            e[k] = unit;
            a.set_column(2 * (k - 1) + part, &anti_hermitian_part(&solve_block_coeffs(u, p, &e)?.x));
        }
    }
    let (c, residual) = least_squares(&a, &b)?;
    if residual > 1e-10 * (1.0 + b.norm()) {
        return Err(Error::IllConditioned(format!("Hermitian completion inconsistent at u = {u}, p = {p}")));
    }
    for k in 1..p {
        col[k] = Complex64::new(c[2 * (k - 1)], c[2 * (k - 1) + 1]);
    }
    let mut coeffs = solve_block_coeffs(u, p, &col)?;
    let x = &coeffs.x;
    coeffs.x = (x + x.adjoint()) * Complex64::new(0.5, 0.0);
    coeffs.last_column = (0..p).map(|i| coeffs.x[(i, p - 1)]).collect();
    Ok(coeffs)
}

/// Free parameters of [`build_metric`]. Lists are indexed by unimodular
/// block (resp. paired block) in the order of the pairing; missing entries
/// take the defaults `ρ = 1`, `sign = +1`, and the retry ladder for paired
/// blocks.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricParams {
    pub rho: Vec<f64>,
    pub signs: Vec<i8>,
    pub paired_columns: Vec<Option<Vec<Complex64>>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BlockRecord {
    Unimodular { item: usize, block: usize, offset: usize, coefficients: BlockCoefficients, rho: f64, sign: i8 },
    Paired { outer_item: usize, inner_item: usize, block: usize, outer_offset: usize, inner_offset: usize, coefficients: BlockCoefficients },
}

/// A Hermitian invertible `η` with `U†ηU = η`, its inverse and signature.
#[derive(Debug, Clone)]
pub struct MetricOperator {
    pub eta: CMatrix,
    pub eta_inverse: CMatrix,
    pub signature: Inertia,
    pub blocks: Vec<BlockRecord>,
    /// `‖U†ηU − η‖_F / ‖η‖_F` against the reassembled `U`.
    pub witness_residual: f64,
    /// `‖η·η⁻¹ − I‖_F`.
    pub inverse_residual: f64,
}

/// Default paired-block ladder: `e_p`, then `e_{p−1}`, …, `e_1`; the first
/// invertible choice wins.
fn paired_default(u: Complex64, p: usize) -> Result<BlockCoefficients> {
    for k in (0..p).rev() {
        let mut col = vec![ZERO; p];
        col[k] = Complex64::new(1.0, 0.0);
        let c = solve_block_coeffs(u, p, &col)?;
        if c.is_invertible() {
            return Ok(c);
        }
    }
    Err(Error::SingularBlock { u, p })
}

/// Assembles `η` from Jordan data and a complete pairing.
pub fn build_metric(jd: &JordanData, pairing: &SpectralPairing, params: &MetricParams) -> Result<MetricOperator> {
    if !pairing.is_complete() {
        return Err(Error::NotPseudoUnitary { unpaired: pairing.unpaired_eigenvalues() });
    }
    let n = jd.n();
    let tol = jd.tol();
    let mut x = DMatrix::<Complex64>::zeros(n, n);
    let mut x_inv = DMatrix::<Complex64>::zeros(n, n);
    let mut records = Vec::new();

    let mut uni_count = 0usize;
    for entry in &pairing.unimodular {
        for b in jd.item_blocks(entry.item) {
            let rho = params.rho.get(uni_count).copied().unwrap_or(1.0);
            let sign = params.signs.get(uni_count).copied().unwrap_or(1);
            uni_count += 1;
            let u = b.eigenvalue / b.eigenvalue.norm();
            let coefficients = hermitian_unimodular_coeffs(u, b.size, rho, sign, 1e-12)?;
            let inv = coefficients.inverse()?;
            x.view_mut((b.offset, b.offset), (b.size, b.size)).copy_from(&coefficients.x);
            x_inv.view_mut((b.offset, b.offset), (b.size, b.size)).copy_from(&inv);
            records.push(BlockRecord::Unimodular { item: b.item, block: b.block, offset: b.offset, coefficients, rho, sign });
        }
    }
    let mut pair_count = 0usize;
    for pair in &pairing.pairs {
        let outer = jd.item_blocks(pair.outer_item);
        let inner = jd.item_blocks(pair.inner_item);
        for (bo, bi) in outer.iter().zip(inner.iter()) {
            let p = bo.size;
            let coefficients = match params.paired_columns.get(pair_count).cloned().flatten() {
                Some(col) => {
                    let c = solve_block_coeffs(bo.eigenvalue, p, &col)?;
                    if !c.is_invertible() {
                        return Err(Error::SingularBlock { u: bo.eigenvalue, p });
                    }
                    c
                }
                None => paired_default(bo.eigenvalue, p)?,
            };
            pair_count += 1;
            let xb = &coefficients.x;
            let yb = xb.adjoint();
            let y_inv = yb.clone().lu().try_inverse().ok_or(Error::SingularBlock { u: bo.eigenvalue, p })?;
            // X[−,+] = x, X[+,−] = x†; inverse swaps to [[0, (Y†)⁻¹], [Y⁻¹, 0]]
            x.view_mut((bi.offset, bo.offset), (p, p)).copy_from(xb);
            x.view_mut((bo.offset, bi.offset), (p, p)).copy_from(&yb);
            x_inv.view_mut((bo.offset, bi.offset), (p, p)).copy_from(&y_inv.adjoint());
            x_inv.view_mut((bi.offset, bo.offset), (p, p)).copy_from(&y_inv);
            records.push(BlockRecord::Paired {
                outer_item: pair.outer_item,
                inner_item: pair.inner_item,
                block: bo.block,
                outer_offset: bo.offset,
                inner_offset: bi.offset,
                coefficients,
            });
        }
    }

    let phi = jd.cobasis();
    let a = jd.basis();
    let half = Complex64::new(0.5, 0.0);
    let eta = phi * &x * phi.adjoint();
    let eta = (&eta + eta.adjoint()) * half;
    let eta_inv = a * &x_inv * a.adjoint();
    let eta_inv = (&eta_inv + eta_inv.adjoint()) * half;
    let eta = CMatrix::wrap(eta, tol);
    let eta_inverse = CMatrix::wrap(eta_inv, tol);

    let u = jd.reassemble();
    let witness_residual = (&(&(&u.adjoint() * &eta) * &u) - &eta).norm() / eta.norm();
    let inverse_residual = (&(&eta * &eta_inverse) - &CMatrix::identity(n)).norm();
    let bound = eta_residual_threshold(tol, n, jd.scale());
    if witness_residual > bound {
        return Err(Error::IllConditioned(format!(
            "metric witness residual {witness_residual:e} exceeds {bound:e}"
        )));
    }
    let inv_bound = n as f64 * tol;
    if inverse_residual > inv_bound {
        return Err(Error::IllConditioned(format!(
            "metric inverse residual {inverse_residual:e} exceeds {inv_bound:e}"
        )));
    }
    let signature = inertia(&eta)?;
    Ok(MetricOperator { eta, eta_inverse, signature, blocks: records, witness_residual, inverse_residual })
}

/// Runs the pseudo-unitarity analysis of `u` and builds a metric for it.
pub fn metric_for(u: &CMatrix, params: &MetricParams) -> Result<(PseudoUnitaryAnalysis, MetricOperator)> {
    let analysis = analyze_pseudo_unitary(u)?;
    let metric = build_metric(&analysis.jordan, &analysis.pairing, params)?;
    Ok((analysis, metric))
}

/// Invariance group of `η`: `U(p, q)` with `p` negative and `q` positive
/// eigenvalues, written `U(n)` when either count is zero.
#[derive(Debug, Clone)]
pub struct GroupLabel {
    pub negatives: usize,
    pub positives: usize,
    /// `A` with `A† η_{p,q} A = η`, so that `U_η = A⁻¹ U(p,q) A`.
    pub transformer: CMatrix,
}

impl GroupLabel {
    pub fn signature(&self) -> Signature {
        Signature { negatives: self.negatives, positives: self.positives }
    }

    pub fn is_definite(&self) -> bool {
        self.signature().is_definite()
    }
}

impl fmt::Display for GroupLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.signature().fmt(f)
    }
}

pub fn classify_group(eta: &CMatrix) -> Result<GroupLabel> {
    let inn = inertia(eta)?;
    Ok(GroupLabel { negatives: inn.negatives, positives: inn.positives, transformer: inn.transformer })
}

/// `A† η A`.
pub fn congruence_transport(eta: &CMatrix, a: &CMatrix) -> Result<CMatrix> {
    if eta.n() != a.n() {
        return Err(Error::DimensionMismatch { expected: eta.n(), found: a.n() });
    }
    let s = dense::svd(a.as_na())?;
    let bottom = *s.sigma.last().expect("nonempty");
    if bottom <= a.tol() * s.sigma[0] {
        return Err(Error::Singular { min_modulus: bottom });
    }
    Ok(&(&a.adjoint() * eta) * a)
}
