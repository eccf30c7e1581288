//! Canonical forms of 2×2 pseudo-unitary matrices, their metric families and
//! logarithms.
//!
//! Every invertible 2×2 pseudo-unitary `U` is `A⁻¹ D A` with `D` one of
//!
//! * `D1 = diag(e^{iθ}, e^{i(φ−θ)})`,
//! * `D2 = diag(r e^{iθ}, e^{iθ}/r)`, `r > 1`,
//! * `D3 = [[e^{iθ}, 1], [0, e^{iθ}]]`.
//!
//! The tabulated logarithm for `D3`, `[[θ, θ(e^{iθ}−1)⁻¹], [0, θ]]`, is only
//! similar to a matrix whose exponential is `D3`; [`log_2x2`] returns the
//! exact value `[[θ, −i e^{−iθ}], [0, θ]]` instead.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::CMatrix;
use crate::pseudospec::analyze_pseudo_unitary;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FormKind {
    D1,
    D2,
    D3,
    NotPseudoUnitary,
}

impl fmt::Display for FormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FormKind::D1 => "D1",
            FormKind::D2 => "D2",
            FormKind::D3 => "D3",
            FormKind::NotPseudoUnitary => "not pseudo-unitary",
        };
        f.write_str(s)
    }
}

/// Shape of the admissible metrics for a canonical `D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MetricFamily {
    /// `diag(a, b)`, `a, b ≠ 0`.
    Diagonal,
    /// Any invertible Hermitian `[[a, ξ], [ξ*, b]]` (`D ∝ 1`).
    General,
    /// `[[0, ξ], [ξ*, 0]]`, `ξ ≠ 0`.
    OffDiagonal,
    /// `[[0, ±i r e^{−iθ}], [∓i r e^{iθ}, 0]]`, `r > 0`.
    Jordan,
}

impl fmt::Display for MetricFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MetricFamily::Diagonal => "diag(a, b), a, b real and nonzero",
            MetricFamily::General => "[[a, xi], [conj(xi), b]], a, b real, ab != |xi|^2",
            MetricFamily::OffDiagonal => "[[0, xi], [conj(xi), 0]], xi nonzero",
            MetricFamily::Jordan => "[[0, ±i r e^{-i theta}], [∓i r e^{i theta}, 0]], r > 0",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub struct CanonicalForm2 {
    pub kind: FormKind,
    /// Principal argument of the first diagonal entry, in `(−π, π]`.
    pub theta: f64,
    /// `D1` only: `θ + Arg u₂`, in `(−2π, 2π]`.
    pub phi: f64,
    /// `D2` only: `r > 1`.
    pub r: f64,
    /// `U = A⁻¹ D A`; absent for `NotPseudoUnitary`.
    pub transformer: Option<CMatrix>,
    pub metric_family: Option<MetricFamily>,
    /// `D1` with `e^{iφ} = e^{2iθ}`, i.e. `D ∝ 1`.
    pub proportional_to_identity: bool,
}

impl CanonicalForm2 {
    fn rejected() -> Self {
        Self {
            kind: FormKind::NotPseudoUnitary,
            theta: 0.0,
            phi: 0.0,
            r: 0.0,
            transformer: None,
            metric_family: None,
            proportional_to_identity: false,
        }
    }

    /// The canonical matrix `D`.
    pub fn d(&self) -> Result<CMatrix> {
        let w = Complex64::from_polar(1.0, self.theta);
        match self.kind {
            FormKind::D1 => Ok(CMatrix::from_diagonal(&[w, Complex64::from_polar(1.0, self.phi - self.theta)])),
            FormKind::D2 => Ok(CMatrix::from_diagonal(&[w * self.r, w / self.r])),
            FormKind::D3 => CMatrix::from_rows(&[vec![w, ONE], vec![ZERO, w]]),
            FormKind::NotPseudoUnitary => Err(Error::NotPseudoUnitary { unpaired: vec![] }),
        }
    }

    fn a(&self) -> Result<&CMatrix> {
        self.transformer.as_ref().ok_or(Error::NotPseudoUnitary { unpaired: vec![] })
    }

    /// `A⁻¹ D A`.
    pub fn reconstruct(&self) -> Result<CMatrix> {
        let a = self.a()?;
        Ok(&(&a.try_inverse()? * &self.d()?) * a)
    }

    /// Carries a metric of `D` to one of `U`: `A† η_D A`.
    pub fn metric_for_u(&self, eta_d: &CMatrix) -> Result<CMatrix> {
        let a = self.a()?;
        Ok(&(&a.adjoint() * eta_d) * a)
    }

    /// Carries `H_D` to `H = A⁻¹ H_D A`, so that `e^{iH} = U`.
    pub fn log_for_u(&self, h_d: &CMatrix) -> Result<CMatrix> {
        let a = self.a()?;
        Ok(&(&a.try_inverse()? * h_d) * a)
    }
}

/// Free parameters of a metric family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FamilyParams {
    Diagonal { a: f64, b: f64 },
    General { a: f64, b: f64, xi: Complex64 },
    OffDiagonal { xi: Complex64 },
    Jordan { r: f64, sign: i8 },
}

fn principal_arg(z: Complex64) -> f64 {
    let a = z.arg();
    if a <= -PI {
        a + 2.0 * PI
    } else {
        a
    }
}

/// Classifies a 2×2 matrix as `D1`, `D2`, `D3` or not pseudo-unitary.
///
/// For `D1`, `u₁` is the eigenvalue with the larger principal argument; for
/// `D2` it is the eigenvalue outside the unit circle.
pub fn canonical_form_2x2(u: &CMatrix) -> Result<CanonicalForm2> {
    if u.n() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: u.n() });
    }
    let analysis = analyze_pseudo_unitary(u)?;
    let pairing = &analysis.pairing;
    if !pairing.is_complete() {
        return Ok(CanonicalForm2::rejected());
    }
    let jd = &analysis.jordan;
    let b = jd.basis();
    let a_of = |cols: [usize; 2]| -> Result<CMatrix> {
        let ordered = DMatrix::from_fn(2, 2, |i, j| b[(i, cols[j])]);
        CMatrix::wrap(ordered, u.tol()).try_inverse()
    };

    if let Some(pair) = pairing.pairs.first() {
        let outer = jd.item_blocks(pair.outer_item)[0].offset;
        let inner = jd.item_blocks(pair.inner_item)[0].offset;
        return Ok(CanonicalForm2 {
            kind: FormKind::D2,
            theta: principal_arg(pair.outer),
            phi: 0.0,
            r: pair.outer.norm(),
            transformer: Some(a_of([outer, inner])?),
            metric_family: Some(MetricFamily::OffDiagonal),
            proportional_to_identity: false,
        });
    }
    let blocks = jd.blocks();
    if blocks.len() == 1 {
        return Ok(CanonicalForm2 {
            kind: FormKind::D3,
            theta: principal_arg(blocks[0].eigenvalue),
            phi: 0.0,
            r: 1.0,
            transformer: Some(a_of([0, 1])?),
            metric_family: Some(MetricFamily::Jordan),
            proportional_to_identity: false,
        });
    }
    let (t0, t1) = (principal_arg(blocks[0].eigenvalue), principal_arg(blocks[1].eigenvalue));
    let same = blocks[0].item == blocks[1].item;
    let (first, second, cols) = if t0 >= t1 { (t0, t1, [0, 1]) } else { (t1, t0, [1, 0]) };
    let (theta, phi) = if same { (first, 2.0 * first) } else { (first, first + second) };
    Ok(CanonicalForm2 {
        kind: FormKind::D1,
        theta,
        phi,
        r: 1.0,
        transformer: Some(a_of(cols)?),
        metric_family: Some(if same { MetricFamily::General } else { MetricFamily::Diagonal }),
        proportional_to_identity: same,
    })
}

/// A metric `η` of the canonical `D` from the family's free parameters.
pub fn metric_family_2x2(form: &CanonicalForm2, params: &FamilyParams) -> Result<CMatrix> {
    let family = form.metric_family.ok_or(Error::NotPseudoUnitary { unpaired: vec![] })?;
    let nonzero = |v: f64, name: &str| {
        if v != 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(Error::BadParameter(format!("{name} must be finite and nonzero, got {v}")))
        }
    };
    let eta = match (*params, family) {
        (FamilyParams::Diagonal { a, b }, MetricFamily::Diagonal | MetricFamily::General) => {
            nonzero(a, "a")?;
            nonzero(b, "b")?;
            CMatrix::from_real_rows(&[vec![a, 0.0], vec![0.0, b]])?
        }
        (FamilyParams::General { a, b, xi }, MetricFamily::General) => {
            nonzero(a * b - xi.norm_sqr(), "ab - |xi|^2")?;
            CMatrix::from_rows(&[vec![Complex64::new(a, 0.0), xi], vec![xi.conj(), Complex64::new(b, 0.0)]])?
        }
        (FamilyParams::OffDiagonal { xi }, MetricFamily::OffDiagonal) => {
            nonzero(xi.norm(), "|xi|")?;
            CMatrix::from_rows(&[vec![ZERO, xi], vec![xi.conj(), ZERO]])?
        }
        (FamilyParams::Jordan { r, sign }, MetricFamily::Jordan) => {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::BadParameter(format!("r must be positive, got {r}")));
            }
            if sign != 1 && sign != -1 {
                return Err(Error::BadParameter(format!("sign must be +1 or -1, got {sign}")));
            }
            let top = I * Complex64::from_polar(r * sign as f64, -form.theta);
            CMatrix::from_rows(&[vec![ZERO, top], vec![top.conj(), ZERO]])?
        }
        (p, f) => return Err(Error::BadParameter(format!("parameters {p:?} do not fit the {f:?} family"))),
    };
    Ok(eta)
}

/// `H_D` with `e^{iH_D} = D`.
pub fn log_2x2(form: &CanonicalForm2) -> Result<CMatrix> {
    let th = Complex64::new(form.theta, 0.0);
    match form.kind {
        FormKind::D1 => Ok(CMatrix::from_diagonal(&[th, Complex64::new(form.phi - form.theta, 0.0)])),
        FormKind::D2 => {
            let l = form.r.ln();
            Ok(CMatrix::from_diagonal(&[Complex64::new(form.theta, -l), Complex64::new(form.theta, l)]))
        }
        FormKind::D3 => CMatrix::from_rows(&[vec![th, -I * Complex64::from_polar(1.0, -form.theta)], vec![ZERO, th]]),
        FormKind::NotPseudoUnitary => Err(Error::NotPseudoUnitary { unpaired: vec![] }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::expm;
    use crate::metric::classify_group;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn witness(d: &CMatrix, eta: &CMatrix) -> f64 {
        (d.adjoint().as_na() * eta.as_na() * d.as_na() - eta.as_na()).norm()
    }

    #[test]
    fn d1_example() {
        let u = CMatrix::from_diagonal(&[Complex64::from_polar(1.0, PI / 4.0), Complex64::from_polar(1.0, PI / 6.0)]);
        let f = canonical_form_2x2(&u).unwrap();
        assert_eq!(f.kind, FormKind::D1);
        assert!((f.theta - PI / 4.0).abs() < 1e-12);
        assert!((f.phi - (PI / 4.0 + PI / 6.0)).abs() < 1e-12);
        assert!(!f.proportional_to_identity);
        assert!(f.reconstruct().unwrap().max_abs_diff(&u) < 1e-12);
        let eta = metric_family_2x2(&f, &FamilyParams::Diagonal { a: 1.0, b: -2.0 }).unwrap();
        assert_eq!(eta, CMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, -2.0]]).unwrap());
        assert_eq!(classify_group(&eta).unwrap().to_string(), "U(1,1)");
        assert!(matches!(metric_family_2x2(&f, &FamilyParams::OffDiagonal { xi: ONE }), Err(Error::BadParameter(_))));
    }

    #[test]
    fn d2_example() {
        let w = Complex64::from_polar(1.0, PI / 7.0);
        let u = CMatrix::from_diagonal(&[w / 3.0, w * 3.0]);
        let f = canonical_form_2x2(&u).unwrap();
        assert_eq!(f.kind, FormKind::D2);
        assert!((f.r - 3.0).abs() < 1e-12);
        assert!((f.theta - PI / 7.0).abs() < 1e-12);
        assert!(f.reconstruct().unwrap().max_abs_diff(&u) < 1e-12);
        let eta = metric_family_2x2(&f, &FamilyParams::OffDiagonal { xi: ONE }).unwrap();
        assert_eq!(eta, CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap());
        assert!(witness(&f.d().unwrap(), &eta) < 1e-15);
        assert_eq!(classify_group(&eta).unwrap().to_string(), "U(1,1)");
    }

    #[test]
    fn d3_example() {
        let th = 1.1;
        let w = Complex64::from_polar(1.0, th);
        let u = CMatrix::from_rows(&[vec![w, ONE], vec![ZERO, w]]).unwrap();
        let f = canonical_form_2x2(&u).unwrap();
        assert_eq!(f.kind, FormKind::D3);
        assert!((f.theta - th).abs() < 1e-12);
        assert!(f.reconstruct().unwrap().max_abs_diff(&u) < 1e-12);
        let eta = metric_family_2x2(&f, &FamilyParams::Jordan { r: 1.0, sign: 1 }).unwrap();
        assert!((eta.get(0, 1) - I * w.conj()).norm() < 1e-15);
        assert!((eta.get(1, 0) + I * w).norm() < 1e-15);
        assert!(witness(&f.d().unwrap(), &eta) < 1e-15);
        assert_eq!(classify_group(&eta).unwrap().to_string(), "U(1,1)");
    }

    #[test]
    fn identity_multiple_is_d1_b() {
        let f = canonical_form_2x2(&CMatrix::from_diagonal(&[c(0.0, 1.0), c(0.0, 1.0)])).unwrap();
        assert_eq!(f.kind, FormKind::D1);
        assert!(f.proportional_to_identity);
        assert!((f.phi - 2.0 * f.theta).abs() < 1e-15);
        let eta = metric_family_2x2(&f, &FamilyParams::General { a: 2.0, b: 1.0, xi: c(0.5, 0.5) }).unwrap();
        assert!(witness(&f.d().unwrap(), &eta) < 1e-15);
        assert!(metric_family_2x2(&f, &FamilyParams::General { a: 1.0, b: 1.0, xi: ONE }).is_err());
    }

    #[test]
    fn not_pseudo_unitary() {
        let f = canonical_form_2x2(&CMatrix::from_diagonal(&[c(0.0, 2.0), c(0.0, -0.5)])).unwrap();
        assert_eq!(f.kind, FormKind::NotPseudoUnitary);
        assert!(log_2x2(&f).is_err());
        assert!(canonical_form_2x2(&CMatrix::identity(3)).is_err());
    }

    #[test]
    fn table_logs() {
        let mut f = canonical_form_2x2(&CMatrix::identity(2)).unwrap();
        f.theta = PI / 4.0;
        f.phi = PI / 2.0;
        let h = log_2x2(&f).unwrap();
        assert!(h.max_abs_diff(&CMatrix::from_diagonal(&[c(PI / 4.0, 0.0), c(PI / 4.0, 0.0)])) == 0.0);

        let f = canonical_form_2x2(&CMatrix::from_diagonal(&[c(2.0, 0.0), c(0.5, 0.0)])).unwrap();
        let h = log_2x2(&f).unwrap();
        let l = 2f64.ln();
        assert!(h.max_abs_diff(&CMatrix::from_diagonal(&[c(0.0, -l), c(0.0, l)])) < 1e-15);

        let th = PI / 3.0;
        let w = Complex64::from_polar(1.0, th);
        let d3 = CMatrix::from_rows(&[vec![w, ONE], vec![ZERO, w]]).unwrap();
        let f = canonical_form_2x2(&d3).unwrap();
        let h = log_2x2(&f).unwrap();
        assert!((h.get(0, 1) + I * w.conj()).norm() < 1e-15);
        assert!(expm(&h.scale(I)).unwrap().max_abs_diff(&d3) < 1e-12);
        let hu = f.log_for_u(&h).unwrap();
        assert!(expm(&hu.scale(I)).unwrap().max_abs_diff(&d3) < 1e-12);
    }
}
