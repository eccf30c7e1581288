//! The classical oscillator `ẍ + ω²x = 0` as a two-level system
//! `iħΨ' = HΨ` with `Ψ = (x + iλẋ, x − iλẋ)`.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::batch;
use crate::canon2::MetricFamily;
use crate::error::{Error, Result};
use crate::matcore::{dense, expm, CMatrix, Signature, DEFAULT_TOL};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone)]
pub struct OscillatorModel {
    pub omega_sq: f64,
    pub lam: f64,
    pub hbar: f64,
    pub h: CMatrix,
}

/// `H = (ħ/2)·[[λω² + 1/λ, λω² − 1/λ], [−λω² + 1/λ, −λω² − 1/λ]]`.
pub fn build_oscillator(omega_sq: f64, lam: f64, hbar: f64) -> Result<OscillatorModel> {
    if !omega_sq.is_finite() {
        return Err(Error::BadParameter(format!("omega^2 must be finite, got {omega_sq}")));
    }
    if !(lam > 0.0 && lam.is_finite()) {
        return Err(Error::BadParameter(format!("lambda must be positive, got {lam}")));
    }
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::BadParameter(format!("hbar must be positive, got {hbar}")));
    }
    let (a, b) = (lam * omega_sq, 1.0 / lam);
    let k = hbar / 2.0;
    let h = CMatrix::from_real_rows(&[vec![k * (a + b), k * (a - b)], vec![k * (b - a), -k * (a + b)]])?;
    Ok(OscillatorModel { omega_sq, lam, hbar, h })
}

impl OscillatorModel {
    /// `Ψ(0)` from real initial data.
    pub fn initial_state(&self, x0: f64, v0: f64) -> [Complex64; 2] {
        [Complex64::new(x0, self.lam * v0), Complex64::new(x0, -self.lam * v0)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpectrumKind {
    Real,
    ConjugatePair,
    /// Single eigenvalue 0 in one Jordan block.
    Degenerate,
}

/// Hermitian solutions of `H†η = ηH`, and which signatures they reach.
#[derive(Debug, Clone)]
pub struct Commutant {
    /// Real basis of the admissible `η`.
    pub basis: Vec<CMatrix>,
    /// `det η` as a quadratic form in the basis coordinates.
    pub det_form: DMatrix<f64>,
    pub admits_positive_definite: bool,
    pub admits_indefinite: bool,
}

impl Commutant {
    /// A positive-definite admissible `η`, if one exists.
    pub fn positive_definite(&self) -> Option<CMatrix> {
        if !self.admits_positive_definite {
            return None;
        }
        let eig = self.det_form.clone().symmetric_eigen();
        let k = eig.eigenvalues.imax();
        let mut eta = DMatrix::<Complex64>::zeros(2, 2);
        for (c, e) in eig.eigenvectors.column(k).iter().zip(&self.basis) {
            eta += e.as_na() * Complex64::new(*c, 0.0);
        }
        // det > 0, so the sign of the trace fixes definiteness
        if eta.trace().re < 0.0 {
            eta = -eta;
        }
        let norm = eta.norm();
        Some(CMatrix::wrap(eta / Complex64::new(norm, 0.0), DEFAULT_TOL))
    }
}

/// Solves `H†η = ηH` over Hermitian 2×2 `η = [[a, ξ], [ξ*, b]]`, a real
/// linear system in `(a, b, Re ξ, Im ξ)`.
///
/// For 2×2 Hermitian `η`, definiteness is `det η > 0` and indefiniteness is
/// `det η < 0`; since `det` is a quadratic form on the solution space, the
/// reachable signatures follow from the signs of its eigenvalues.
pub fn commutant(h: &CMatrix, tol: f64) -> Result<Commutant> {
    if h.n() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: h.n() });
    }
    let units = [
        CMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]])?,
        CMatrix::from_real_rows(&[vec![0.0, 0.0], vec![0.0, 1.0]])?,
        CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]])?,
        CMatrix::from_rows(&[vec![ZERO, Complex64::new(0.0, 1.0)], vec![Complex64::new(0.0, -1.0), ZERO]])?,
    ];
    let hd = h.adjoint();
    let mut sys = DMatrix::<f64>::zeros(8, 4);
    for (k, e) in units.iter().enumerate() {
        let r = (&hd * e).as_na() - (e * h).as_na();
        let col = DVector::from_iterator(8, r.iter().flat_map(|z| [z.re, z.im]));
        sys.set_column(k, &col);
    }
    let s = dense::svd(&sys)?;
    let top = s.sigma[0];
    let rank = if top <= tol { 0 } else { dense::rank_above(&s.sigma, 4.0 * tol * top) };
    let basis: Vec<CMatrix> = (rank..4)
        .map(|k| {
            let v = s.v.column(k);
            let mut m = DMatrix::<Complex64>::zeros(2, 2);
            for (c, e) in v.iter().zip(&units) {
                m += e.as_na() * Complex64::new(*c, 0.0);
            }
            CMatrix::wrap(m, DEFAULT_TOL)
        })
        .collect();
    let d = basis.len();
    let det_form = DMatrix::from_fn(d, d, |i, j| {
        let (ei, ej) = (basis[i].as_na(), basis[j].as_na());
        0.5 * (ei[(0, 0)].re * ej[(1, 1)].re + ej[(0, 0)].re * ei[(1, 1)].re) - (ei[(0, 1)] * ej[(0, 1)].conj()).re
    });
    let (mut pos, mut neg) = (false, false);
    if d > 0 {
        let ev = det_form.clone().symmetric_eigenvalues();
        let scale = ev.amax();
        let cut = tol.sqrt() * scale;
        pos = ev.iter().any(|&v| v > cut);
        neg = ev.iter().any(|&v| v < -cut);
    }
    Ok(Commutant { basis, det_form, admits_positive_definite: pos, admits_indefinite: neg })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Regime {
    pub diagonalizable: bool,
    pub spectrum: SpectrumKind,
    pub metric_family: MetricFamily,
    /// Invariance groups reachable by admissible metrics.
    pub groups: BTreeSet<String>,
}

/// Spectral regime and admissible dynamical groups. The groups come from the
/// commutant of `H`; the remaining fields from the sign of `ω²`.
pub fn classify_oscillator(model: &OscillatorModel) -> Result<Regime> {
    let c = commutant(&model.h, DEFAULT_TOL)?;
    let mut groups = BTreeSet::new();
    if c.admits_positive_definite {
        groups.insert(Signature { negatives: 0, positives: 2 }.to_string());
    }
    if c.admits_indefinite {
        groups.insert(Signature { negatives: 1, positives: 1 }.to_string());
    }
    let (diagonalizable, spectrum, metric_family) = if model.omega_sq > 0.0 {
        (true, SpectrumKind::Real, MetricFamily::Diagonal)
    } else if model.omega_sq < 0.0 {
        (true, SpectrumKind::ConjugatePair, MetricFamily::OffDiagonal)
    } else {
        (false, SpectrumKind::Degenerate, MetricFamily::Jordan)
    };
    Ok(Regime { diagonalizable, spectrum, metric_family, groups })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscState {
    pub t: f64,
    pub psi: [Complex64; 2],
    /// `Re (Ψ₁ + Ψ₂)/2`.
    pub x: f64,
    /// `Re (Ψ₁ − Ψ₂)/(2iλ)`.
    pub xdot: f64,
}

/// `Ψ(t) = e^{−itH/ħ} Ψ(0)` at each time.
pub fn simulate(model: &OscillatorModel, x0: f64, v0: f64, times: &[f64]) -> Result<Vec<OscState>> {
    if let Some(t) = times.iter().find(|t| !t.is_finite()) {
        return Err(Error::BadParameter(format!("time must be finite, got {t}")));
    }
    let psi0 = DVector::from_column_slice(&model.initial_state(x0, v0));
    let gen = model.h.scale(Complex64::new(0.0, -1.0 / model.hbar));
    batch::map(times, |&t| {
        let u = expm(&gen.scale(Complex64::new(t, 0.0)))?;
        let p = u.as_na() * &psi0;
        let psi = [p[0], p[1]];
        let x = ((psi[0] + psi[1]) / 2.0).re;
        let xdot = ((psi[0] - psi[1]) / Complex64::new(0.0, 2.0 * model.lam)).re;
        Ok(OscState { t, psi, x, xdot })
    })
    .into_iter()
    .collect()
}

/// `⟨Ψ(t), ηΨ(t)⟩` along a trajectory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConservedSeries {
    pub values: Vec<Complex64>,
    /// `max_t |v(t) − v(0)|`.
    pub drift: f64,
    /// `max_t ‖Ψ(t)‖²`, the rounding scale of the values.
    pub scale: f64,
    /// `‖H†η − ηH‖_F / (‖H‖_F‖η‖_F)`.
    pub metric_residual: f64,
    /// Set when `η` is not a metric for `H`; the values then need not be constant.
    pub warning: bool,
}

impl ConservedSeries {
    /// Drift allowed for a conserved value: `1e−10·max(|v₀|, max‖Ψ‖²) + 1e−12`.
    /// Rounding alone moves `⟨Ψ, ηΨ⟩` by about `ε‖Ψ‖²`, which dominates `|v₀|`
    /// for growing solutions.
    pub fn drift_tolerance(&self) -> f64 {
        let v0 = self.values.first().map_or(0.0, |v| v.norm());
        1e-10 * v0.max(self.scale) + 1e-12
    }

    pub fn is_conserved(&self) -> bool {
        self.drift <= self.drift_tolerance()
    }
}

pub fn conserved_inner_product(model: &OscillatorModel, states: &[OscState], eta: &CMatrix) -> Result<ConservedSeries> {
    if eta.n() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: eta.n() });
    }
    let residual = eta.hermiticity_residual();
    if residual > eta.tol().max(1e-14) {
        return Err(Error::NotHermitian { residual });
    }
    let h = &model.h;
    let comm = (&h.adjoint() * eta).as_na() - (eta * h).as_na();
    let metric_residual = comm.norm() / (h.norm() * eta.norm()).max(f64::MIN_POSITIVE);
    let values: Vec<Complex64> = states
        .iter()
        .map(|s| {
            let v = DVector::from_column_slice(&s.psi);
            v.dotc(&(eta.as_na() * &v))
        })
        .collect();
    let drift = values.first().map_or(0.0, |&v0| values.iter().fold(0.0_f64, |m, v| m.max((v - v0).norm())));
    let scale = states.iter().fold(0.0_f64, |m, s| m.max(s.psi[0].norm_sqr() + s.psi[1].norm_sqr()));
    Ok(ConservedSeries { values, drift, scale, metric_residual, warning: metric_residual > eta.tol() })
}

/// `σ₃ = diag(1, −1)`, admissible for every `ω²`.
pub fn sigma3() -> CMatrix {
    CMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]]).expect("finite")
}
