//! Spectral tests for pseudo-unitarity and pseudo-Hermiticity.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{jordan_structure, CMatrix, JordanData, JordanItem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictReason {
    AllPaired,
    UnpairedEigenvalue,
    MultiplicityMismatch,
    JordanMismatch,
    ResidualTooLarge,
    /// A direct residual check passed.
    WithinTolerance,
}

/// Outcome of a decision procedure.
///
/// `witness` lists offending eigenvalues for spectral failures (empty on
/// success). `residual` is the quantity compared against the threshold: the
/// largest pairing defect for spectral checks, a relative norm for direct ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub decision: bool,
    pub reason: VerdictReason,
    pub witness: Vec<Complex64>,
    pub residual: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnimodularEntry {
    /// Index into the items of the source [`JordanData`].
    pub item: usize,
    pub eigenvalue: Complex64,
    pub geometric_multiplicity: usize,
    pub jordan_dimensions: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairEntry {
    pub outer_item: usize,
    pub inner_item: usize,
    /// `|outer| > 1`.
    pub outer: Complex64,
    /// `≈ 1/conj(outer)`.
    pub inner: Complex64,
    pub geometric_multiplicity: usize,
    pub jordan_dimensions: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnpairedEntry {
    pub eigenvalue: Complex64,
    pub reason: VerdictReason,
}

/// Partition of a spectrum into unimodular eigenvalues, inverse-conjugate
/// pairs and the rest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralPairing {
    pub unimodular: Vec<UnimodularEntry>,
    pub pairs: Vec<PairEntry>,
    pub unpaired: Vec<UnpairedEntry>,
    pub unimodular_tol: f64,
    pub pairing_tol: f64,
    /// Largest `||u| − 1|` over unimodular entries and `|u₊·conj(u₋) − 1|` over pairs.
    pub max_defect: f64,
}

impl SpectralPairing {
    pub fn is_complete(&self) -> bool {
        self.unpaired.is_empty()
    }

    pub fn unpaired_eigenvalues(&self) -> Vec<Complex64> {
        self.unpaired.iter().map(|e| e.eigenvalue).collect()
    }

    /// The verdict implied by this pairing.
    pub fn verdict(&self) -> Verdict {
        let reason = if self.unpaired.is_empty() {
            VerdictReason::AllPaired
        } else {
            [VerdictReason::UnpairedEigenvalue, VerdictReason::MultiplicityMismatch, VerdictReason::JordanMismatch]
                .into_iter()
                .find(|r| self.unpaired.iter().any(|e| e.reason == *r))
                .unwrap_or(VerdictReason::UnpairedEigenvalue)
        };
        Verdict {
            decision: self.unpaired.is_empty(),
            reason,
            witness: self.unpaired_eigenvalues(),
            residual: self.max_defect,
            threshold: self.pairing_tol,
        }
    }
}

/// `1e3·tol·(1 + ‖U‖₂)`, shared by the unimodular and pairing decisions.
pub fn pairing_tolerance(tol: f64, norm2: f64) -> f64 {
    1e3 * tol * (1.0 + norm2)
}

fn mismatch(a: &JordanItem, b: &JordanItem) -> Option<VerdictReason> {
    if a.geometric_multiplicity != b.geometric_multiplicity {
        Some(VerdictReason::MultiplicityMismatch)
    } else if a.jordan_dimensions != b.jordan_dimensions {
        Some(VerdictReason::JordanMismatch)
    } else {
        None
    }
}

/// Splits the spectrum of `jd` into unimodular eigenvalues and
/// inverse-complex-conjugate pairs.
///
/// Eigenvalues are visited in spectral order (modulus descending, argument
/// ascending). An eigenvalue within `unimodular_tol` of the unit circle is
/// unimodular. Each remaining outer eigenvalue `u` is matched to the nearest
/// unvisited inner cluster to `1/conj(u)`. Matches with different geometric
/// multiplicity or Jordan dimensions are reported as unpaired.
pub fn pair_spectrum(jd: &JordanData) -> Result<SpectralPairing> {
    let tol = jd.tol();
    let items = jd.items();
    let unimodular_tol = pairing_tolerance(tol, jd.scale());
    let pairing_tol = unimodular_tol;
    for it in items {
        if it.eigenvalue.norm() <= tol {
            return Err(Error::ZeroEigenvalue(it.eigenvalue));
        }
    }

    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by(|&a, &b| crate::matcore::spectral_order(&items[a].eigenvalue, &items[b].eigenvalue));

    let mut used = vec![false; items.len()];
    let mut out = SpectralPairing {
        unimodular: Vec::new(),
        pairs: Vec::new(),
        unpaired: Vec::new(),
        unimodular_tol,
        pairing_tol,
        max_defect: 0.0,
    };
    let is_unimodular = |u: Complex64| (u.norm() - 1.0).abs() <= unimodular_tol;

    for &i in &order {
        if used[i] {
            continue;
        }
        let it = &items[i];
        let u = it.eigenvalue;
        if is_unimodular(u) {
            used[i] = true;
            out.max_defect = out.max_defect.max((u.norm() - 1.0).abs());
            out.unimodular.push(UnimodularEntry {
                item: i,
                eigenvalue: u,
                geometric_multiplicity: it.geometric_multiplicity,
                jordan_dimensions: it.jordan_dimensions.clone(),
            });
            continue;
        }
        if u.norm() < 1.0 {
            continue;
        }
        used[i] = true;
        let target = u.conj().inv();
        let partner = order
            .iter()
            .copied()
            .filter(|&j| !used[j] && !is_unimodular(items[j].eigenvalue) && items[j].eigenvalue.norm() < 1.0)
            .min_by(|&a, &b| {
                (items[a].eigenvalue - target).norm().total_cmp(&(items[b].eigenvalue - target).norm())
            });
        let Some(j) = partner.filter(|&j| (u * items[j].eigenvalue.conj() - 1.0).norm() <= pairing_tol) else {
            out.unpaired.push(UnpairedEntry { eigenvalue: u, reason: VerdictReason::UnpairedEigenvalue });
            continue;
        };
        used[j] = true;
        let w = items[j].eigenvalue;
        match mismatch(it, &items[j]) {
            Some(reason) => {
                out.unpaired.push(UnpairedEntry { eigenvalue: u, reason });
                out.unpaired.push(UnpairedEntry { eigenvalue: w, reason });
            }
            None => {
                out.max_defect = out.max_defect.max((u * w.conj() - 1.0).norm());
                out.pairs.push(PairEntry {
                    outer_item: i,
                    inner_item: j,
                    outer: u,
                    inner: w,
                    geometric_multiplicity: it.geometric_multiplicity,
                    jordan_dimensions: it.jordan_dimensions.clone(),
                });
            }
        }
    }
    for &i in &order {
        if !used[i] {
            out.unpaired.push(UnpairedEntry { eigenvalue: items[i].eigenvalue, reason: VerdictReason::UnpairedEigenvalue });
        }
    }
    Ok(out)
}

/// Jordan data, pairing and verdict of one pseudo-unitarity decision.
#[derive(Debug, Clone)]
pub struct PseudoUnitaryAnalysis {
    pub jordan: JordanData,
    pub pairing: SpectralPairing,
    pub verdict: Verdict,
}

pub fn analyze_pseudo_unitary(u: &CMatrix) -> Result<PseudoUnitaryAnalysis> {
    let jordan = jordan_structure(u)?;
    let pairing = pair_spectrum(&jordan)?;
    let verdict = pairing.verdict();
    Ok(PseudoUnitaryAnalysis { jordan, pairing, verdict })
}

/// Decides whether some Hermitian invertible `η` satisfies `U†ηU = η`:
/// every eigenvalue is unimodular or belongs to an inverse-complex-conjugate
/// pair with equal geometric multiplicity and Jordan dimensions.
pub fn is_pseudo_unitary(u: &CMatrix) -> Result<Verdict> {
    Ok(analyze_pseudo_unitary(u)?.verdict)
}

/// Rejects `η` that is not Hermitian or not invertible at its tolerance.
pub fn check_metric(eta: &CMatrix) -> Result<()> {
    let residual = eta.hermiticity_residual();
    if residual > eta.tol().max(1e-14) {
        return Err(Error::NotHermitian { residual });
    }
    let s = crate::matcore::dense::svd(eta.as_na())?;
    let top = s.sigma[0];
    let bottom = *s.sigma.last().expect("nonempty");
    if top == 0.0 || bottom <= eta.tol() * top {
        return Err(Error::Singular { min_modulus: bottom });
    }
    Ok(())
}

/// Threshold for the relative residual `‖U†ηU − η‖_F / ‖η‖_F`:
/// `10·n·tol·max(1, ‖U‖₂²)`, the rounding budget of the triple product.
pub fn eta_residual_threshold(tol: f64, n: usize, norm2: f64) -> f64 {
    10.0 * n as f64 * tol * norm2.powi(2).max(1.0)
}

/// Checks `U†ηU = η` for a given metric.
pub fn is_eta_pseudo_unitary(u: &CMatrix, eta: &CMatrix) -> Result<Verdict> {
    if u.n() != eta.n() {
        return Err(Error::DimensionMismatch { expected: u.n(), found: eta.n() });
    }
    check_metric(eta)?;
    let lhs = &(&u.adjoint() * eta) * u;
    let residual = (&lhs - eta).norm() / eta.norm();
    let threshold = eta_residual_threshold(u.tol(), u.n(), u.norm2());
    let decision = residual <= threshold;
    Ok(Verdict {
        decision,
        reason: if decision { VerdictReason::WithinTolerance } else { VerdictReason::ResidualTooLarge },
        witness: Vec::new(),
        residual,
        threshold,
    })
}

/// Decides whether the spectrum of `H` is closed under complex conjugation
/// with matching geometric multiplicities and Jordan dimensions. Eigenvalues
/// with `|Im E| ≤ 1e3·tol·(1 + ‖H‖₂)` count as real.
pub fn is_pseudo_hermitian_spectrum(h: &CMatrix) -> Result<Verdict> {
    let jd = jordan_structure(h)?;
    Ok(conjugation_verdict(&jd))
}

pub(crate) fn conjugation_verdict(jd: &JordanData) -> Verdict {
    let items = jd.items();
    let real_tol = pairing_tolerance(jd.tol(), jd.scale());
    let mut used = vec![false; items.len()];
    let mut witness = Vec::new();
    let mut reasons = Vec::new();
    let mut defect: f64 = 0.0;
    for i in 0..items.len() {
        if used[i] {
            continue;
        }
        let e = items[i].eigenvalue;
        used[i] = true;
        if e.im.abs() <= real_tol {
            defect = defect.max(e.im.abs());
            continue;
        }
        let target = e.conj();
        let partner = (0..items.len())
            .filter(|&j| !used[j] && items[j].eigenvalue.im.abs() > real_tol)
            .min_by(|&a, &b| (items[a].eigenvalue - target).norm().total_cmp(&(items[b].eigenvalue - target).norm()));
        match partner.filter(|&j| (items[j].eigenvalue - target).norm() <= real_tol) {
            None => {
                witness.push(e);
                reasons.push(VerdictReason::UnpairedEigenvalue);
            }
            Some(j) => {
                used[j] = true;
                defect = defect.max((items[j].eigenvalue - target).norm());
                if let Some(r) = mismatch(&items[i], &items[j]) {
                    witness.extend([e, items[j].eigenvalue]);
                    reasons.push(r);
                }
            }
        }
    }
    let reason = if witness.is_empty() {
        VerdictReason::AllPaired
    } else {
        [VerdictReason::UnpairedEigenvalue, VerdictReason::MultiplicityMismatch, VerdictReason::JordanMismatch]
            .into_iter()
            .find(|r| reasons.contains(r))
            .unwrap_or(VerdictReason::UnpairedEigenvalue)
    };
    Verdict { decision: witness.is_empty(), reason, witness, residual: defect, threshold: real_tol }
}

/// `1e3·n·tol`.
pub fn det_tolerance(tol: f64, n: usize) -> f64 {
    1e3 * n as f64 * tol
}

/// Membership in the pseudo-special group: `||det U| − 1| ≤ 1e3·n·tol`.
/// Necessary, not sufficient, for pseudo-unitarity. The witness holds `det U`.
pub fn det_unimodular(u: &CMatrix) -> Verdict {
    let det = u.determinant();
    let residual = (det.norm() - 1.0).abs();
    let threshold = det_tolerance(u.tol(), u.n());
    let decision = residual <= threshold;
    Verdict {
        decision,
        reason: if decision { VerdictReason::WithinTolerance } else { VerdictReason::ResidualTooLarge },
        witness: vec![det],
        residual,
        threshold,
    }
}
