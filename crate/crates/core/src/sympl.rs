//! Real symplectic matrices as `iJ`-pseudo-unitary operators.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{expm, jordan_structure, CMatrix, JordanData};
use crate::metric::{classify_group, GroupLabel};
use crate::pseudospec::{det_tolerance, eta_residual_threshold, pairing_tolerance, Verdict, VerdictReason};

/// `[[0, −1_m], [1_m, 0]]`.
pub fn j_matrix(m: usize) -> CMatrix {
    let n = 2 * m;
    let d = DMatrix::from_fn(n, n, |i, j| {
        if j == i + m {
            Complex64::new(-1.0, 0.0)
        } else if i == j + m {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    CMatrix::wrap(d, crate::matcore::DEFAULT_TOL)
}

/// `η_J = i·J`, Hermitian with eigenvalues `±1`, each `m` times.
pub fn eta_j(m: usize) -> CMatrix {
    j_matrix(m).scale(Complex64::new(0.0, 1.0))
}

/// `exp(J·K)` for real symmetric `K` of even size.
pub fn symplectic_exp(k: &DMatrix<f64>) -> Result<CMatrix> {
    let n = k.nrows();
    if n % 2 == 1 || k.ncols() != n {
        return Err(Error::DimensionNotEven(n));
    }
    let kc = CMatrix::new(k.map(|v| Complex64::new(v, 0.0)), crate::matcore::DEFAULT_TOL)?;
    expm(&(&j_matrix(n / 2) * &kc))
}

/// One orbit `{λ, λ*, 1/λ, 1/λ*}` of the spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quadruple {
    /// Distinct orbit members (1, 2 or 4), the representative first.
    pub members: Vec<Complex64>,
    /// Matched Jordan item per member, if one was found.
    pub items: Vec<Option<usize>>,
    pub geometric_multiplicity: usize,
    pub jordan_dimensions: Vec<usize>,
    /// Every member present with the representative's Jordan dimensions.
    pub complete: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymplecticReport {
    pub is_real: bool,
    pub imag_residual: f64,
    pub is_symplectic: bool,
    /// `‖SᵗJS − J‖_F / ‖J‖_F`.
    pub symplectic_residual: f64,
    pub is_eta_j_pseudo_unitary: bool,
    /// `‖S†(iJ)S − iJ‖_F / ‖J‖_F`.
    pub eta_j_residual: f64,
    pub threshold: f64,
    pub quadruples: Vec<Quadruple>,
    /// `|det S − 1|`.
    pub det_check: f64,
    pub det_threshold: f64,
}

impl SymplecticReport {
    pub fn quadruples_complete(&self) -> bool {
        self.quadruples.iter().all(|q| q.complete)
    }
}

fn half_dim(s: &CMatrix) -> Result<usize> {
    if s.n() % 2 == 1 {
        return Err(Error::DimensionNotEven(s.n()));
    }
    Ok(s.n() / 2)
}

/// Groups the spectrum into orbits under conjugation and inversion.
pub fn quadruples_of(jd: &JordanData) -> Vec<Quadruple> {
    let items = jd.items();
    let tol = pairing_tolerance(jd.tol(), jd.scale());
    let find = |z: Complex64| -> Option<usize> {
        items
            .iter()
            .enumerate()
            .map(|(k, it)| (k, (it.eigenvalue - z).norm()))
            .filter(|&(_, d)| d <= tol * z.norm().max(1.0))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(k, _)| k)
    };
    let mut used = vec![false; items.len()];
    let mut out = Vec::new();
    for (k, it) in items.iter().enumerate() {
        if used[k] {
            continue;
        }
        let l = it.eigenvalue;
        let mut members: Vec<Complex64> = Vec::new();
        for z in [l, l.conj(), l.inv(), l.conj().inv()] {
            if members.iter().all(|&w| (w - z).norm() > tol * z.norm().max(1.0)) {
                members.push(z);
            }
        }
        let matched: Vec<Option<usize>> = members.iter().map(|&z| find(z)).collect();
        let complete = matched.iter().all(|m| match m {
            Some(i) => !used[*i] && items[*i].jordan_dimensions == it.jordan_dimensions,
            None => false,
        });
        for i in matched.iter().flatten() {
            used[*i] = true;
        }
        used[k] = true;
        out.push(Quadruple {
            members,
            items: matched,
            geometric_multiplicity: it.geometric_multiplicity,
            jordan_dimensions: it.jordan_dimensions.clone(),
            complete,
        });
    }
    out
}

/// Realness, `SᵗJS = J`, `S†(iJ)S = iJ`, determinant and spectral orbits.
pub fn is_symplectic(s: &CMatrix) -> Result<SymplecticReport> {
    let m = half_dim(s)?;
    let tol = s.tol();
    let n = s.n();
    let norm2 = s.norm2();
    let j = j_matrix(m);
    let jn = j.norm();
    let imag_residual = s.max_abs_imag();
    let is_real = imag_residual <= tol * norm2.max(1.0);
    let threshold = eta_residual_threshold(tol, n, norm2);
    let symplectic_residual = ((&(&s.transpose() * &j) * s).as_na() - j.as_na()).norm() / jn;
    let eta = eta_j(m);
    let eta_j_residual = ((&(&s.adjoint() * &eta) * s).as_na() - eta.as_na()).norm() / jn;
    let det_check = (s.determinant() - Complex64::new(1.0, 0.0)).norm();
    let jd = jordan_structure(s)?;
    Ok(SymplecticReport {
        is_real,
        imag_residual,
        is_symplectic: symplectic_residual <= threshold,
        symplectic_residual,
        is_eta_j_pseudo_unitary: eta_j_residual <= threshold,
        eta_j_residual,
        threshold,
        quadruples: quadruples_of(&jd),
        det_check,
        det_threshold: det_tolerance(tol, n),
    })
}

/// Spectral orbits of a symplectic matrix.
pub fn spectral_quadruples(s: &CMatrix) -> Result<Vec<Quadruple>> {
    let report = is_symplectic(s)?;
    if !report.is_symplectic {
        return Err(Error::NotSymplectic { residual: report.symplectic_residual });
    }
    Ok(report.quadruples)
}

/// Membership of `S` in the real part of the `iJ`-pseudo-unitary group, with
/// that group's label `U(m, m)`.
pub fn sp_in_umm(s: &CMatrix) -> Result<(Verdict, GroupLabel)> {
    let m = half_dim(s)?;
    let report = is_symplectic(s)?;
    let decision = report.is_real && report.is_eta_j_pseudo_unitary;
    let verdict = Verdict {
        decision,
        reason: if decision { VerdictReason::WithinTolerance } else { VerdictReason::ResidualTooLarge },
        witness: Vec::new(),
        residual: report.eta_j_residual.max(report.imag_residual),
        threshold: report.threshold,
    };
    Ok((verdict, classify_group(&eta_j(m))?))
}
