//! Matrix exponential and principal logarithm.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::cmatrix::CMatrix;
use super::jordan::jordan_structure;
use crate::error::{Error, Result};

const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.53939833006323e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA_13: f64 = 5.371920351148152;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

fn one_norm(m: &DMatrix<Complex64>) -> f64 {
    (0..m.ncols()).map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Returns `E` when `m` is upper triangular with constant diagonal `E`.
fn constant_diagonal_triangular(m: &DMatrix<Complex64>) -> Option<Complex64> {
    let n = m.nrows();
    let e = m[(0, 0)];
    for i in 0..n {
        if m[(i, i)] != e {
            return None;
        }
        for j in 0..i {
            if m[(i, j)] != Complex64::new(0.0, 0.0) {
                return None;
            }
        }
    }
    Some(e)
}

/// `e^M`.
///
/// Upper-triangular input with a constant diagonal `E` (a single Jordan
/// block shape `E·1 + N`) is evaluated exactly as `e^E Σ_{ℓ<n} N^ℓ/ℓ!`.
/// Everything else uses scaling and squaring with a diagonal Padé
/// approximant of degree 3, 5, 7, 9 or 13.
pub fn expm(m: &CMatrix) -> Result<CMatrix> {
    let a = m.as_na();
    let n = a.nrows();
    let norm = one_norm(a);
    let out = if let Some(e) = constant_diagonal_triangular(a) {
        let mut nil = a.clone();
        for i in 0..n {
            nil[(i, i)] = Complex64::new(0.0, 0.0);
        }
        let mut term = DMatrix::<Complex64>::identity(n, n);
        let mut sum = term.clone();
        for ell in 1..n {
            term = &term * &nil / Complex64::new(ell as f64, 0.0);
            sum += &term;
        }
        sum * e.exp()
    } else {
        pade_expm(a, norm)?
    };
    if out.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Overflow { norm });
    }
    Ok(CMatrix::wrap(out, m.tol()))
}

fn pade_expm(a: &DMatrix<Complex64>, norm: f64) -> Result<DMatrix<Complex64>> {
    let n = a.nrows();
    let id = DMatrix::<Complex64>::identity(n, n);
    let c = |x: f64| Complex64::new(x, 0.0);

    for &(deg, theta) in &THETA {
        if norm <= theta {
            let b: &[f64] = match deg {
                3 => &B3,
                5 => &B5,
                7 => &B7,
                _ => &B9,
            };
            let a2 = a * a;
            let mut u = &id * c(b[1]);
            let mut v = &id * c(b[0]);
            let mut pow = id.clone();
            for k in 1..=deg / 2 {
                pow = &pow * &a2;
                u += &pow * c(b[2 * k + 1]);
                v += &pow * c(b[2 * k]);
            }
            let u = a * u;
            return solve_pade(&u, &v);
        }
    }

    if !norm.is_finite() {
        return Err(Error::Overflow { norm });
    }
    let s = if norm > THETA_13 { (norm / THETA_13).log2().ceil() as i32 } else { 0 };
    if s > 1000 {
        return Err(Error::Overflow { norm });
    }
    let a = a * c(2f64.powi(-s));
    let b = &B13;
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_inner = &a6 * (&a6 * c(b[13]) + &a4 * c(b[11]) + &a2 * c(b[9]))
        + &a6 * c(b[7])
        + &a4 * c(b[5])
        + &a2 * c(b[3])
        + &id * c(b[1]);
    let u = &a * u_inner;
    let v = &a6 * (&a6 * c(b[12]) + &a4 * c(b[10]) + &a2 * c(b[8]))
        + &a6 * c(b[6])
        + &a4 * c(b[4])
        + &a2 * c(b[2])
        + &id * c(b[0]);
    let mut r = solve_pade(&u, &v)?;
    for _ in 0..s {
        r = &r * &r;
        if r.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Overflow { norm });
        }
    }
    Ok(r)
}

fn solve_pade(u: &DMatrix<Complex64>, v: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let p = v + u;
    let q = v - u;
    q.lu().solve(&p).ok_or(Error::Singular { min_modulus: 0.0 })
}

/// Principal logarithm `ln u = ln|u| + i·Arg u` with `Arg ∈ (−π, π]`.
/// Eigenvalues on the negative real axis (within `tol·|u|`) get `Arg = +π`.
pub fn principal_log(u: Complex64, tol: f64) -> Complex64 {
    let arg = if u.re < 0.0 && u.im.abs() <= tol * u.norm() { std::f64::consts::PI } else { u.arg() };
    Complex64::new(u.norm().ln(), arg)
}

/// `log(u·1 + N)` for a `p×p` Jordan block: `ln u · 1 + Σ_{k=1}^{p−1} (−1)^{k+1} (N/u)^k / k`.
pub fn log_jordan_block(log_u: Complex64, u: Complex64, p: usize) -> DMatrix<Complex64> {
    let mut out = DMatrix::<Complex64>::zeros(p, p);
    for i in 0..p {
        out[(i, i)] = log_u;
    }
    let inv_u = u.inv();
    for k in 1..p {
        let coeff = inv_u.powi(k as i32) * if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
        for i in 0..(p - k) {
            out[(i, i + k)] = coeff;
        }
    }
    out
}

/// Principal matrix logarithm, evaluated block-wise on the Jordan form.
pub fn logm_principal(m: &CMatrix) -> Result<CMatrix> {
    let jd = jordan_structure(m)?;
    for it in jd.items() {
        if it.eigenvalue.norm() < m.tol() {
            return Err(Error::Singular { min_modulus: it.eigenvalue.norm() });
        }
    }
    let n = m.n();
    let mut l = DMatrix::<Complex64>::zeros(n, n);
    for b in jd.blocks() {
        let block = log_jordan_block(principal_log(b.eigenvalue, m.tol()), b.eigenvalue, b.size);
        l.view_mut((b.offset, b.offset), (b.size, b.size)).copy_from(&block);
    }
    Ok(CMatrix::wrap(jd.basis() * l * jd.cobasis().adjoint(), m.tol()))
}
