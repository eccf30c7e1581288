mod common;

use std::f64::consts::PI;

use num_complex::Complex64;

use common::{c, Gen};
use pseudounitary::canon2::{canonical_form_2x2, log_2x2, FormKind};
use pseudounitary::logmap::{evolve, pseudo_hermitian_log, verify_exponential_structure};
use pseudounitary::matcore::{expm, inertia, jordan_structure, logm_principal};
use pseudounitary::metric::{classify_group, hermitian_unimodular_coeffs, metric_for, solve_block_coeffs, MetricParams};
use pseudounitary::oscsim::{build_oscillator, conserved_inner_product, sigma3, simulate};
use pseudounitary::pseudospec::{is_eta_pseudo_unitary, is_pseudo_unitary, pair_spectrum};
use pseudounitary::sympl::{eta_j, is_symplectic, sp_in_umm};
use pseudounitary::synth::{conjugate, jordan_matrix};
use pseudounitary::CMatrix;

fn d3(theta: f64) -> CMatrix {
    let w = Complex64::from_polar(1.0, theta);
    CMatrix::from_rows(&[vec![w, c(1.0, 0.0)], vec![c(0.0, 0.0), w]]).unwrap()
}

#[test]
fn jordan_block_at_five_is_recovered() {
    let mut g = Gen::new(11);
    let u = conjugate(&g.well_conditioned(2), &jordan_matrix(&[(c(5.0, 0.0), 2)])).unwrap();
    let jd = jordan_structure(&u).unwrap();
    assert_eq!(jd.items().len(), 1);
    assert!((jd.items()[0].eigenvalue - c(5.0, 0.0)).norm() < 1e-6);
    assert_eq!(jd.items()[0].jordan_dimensions, vec![2]);
}

#[test]
fn paired_jordan_blocks_are_recovered() {
    let mut g = Gen::new(12);
    let u = conjugate(&g.well_conditioned(4), &jordan_matrix(&[(c(2.0, 0.0), 2), (c(0.5, 0.0), 2)])).unwrap();
    let jd = jordan_structure(&u).unwrap();
    let mut found: Vec<(f64, Vec<usize>)> = jd.items().iter().map(|it| (it.eigenvalue.re, it.jordan_dimensions.clone())).collect();
    found.sort_by(|a, b| a.0.total_cmp(&b.0));
    assert!((found[0].0 - 0.5).abs() < 1e-6 && (found[1].0 - 2.0).abs() < 1e-6);
    assert_eq!(found[0].1, vec![2]);
    assert_eq!(found[1].1, vec![2]);
}

#[test]
fn principal_log_round_trip() {
    let mut g = Gen::new(13);
    for _ in 0..20 {
        let n = 2 + g.index(4);
        let diag: Vec<Complex64> = (0..n).map(|_| Complex64::from_polar(g.uniform(0.3, 3.0), g.uniform(-3.0, 3.0))).collect();
        let u = conjugate(&g.well_conditioned(n), &CMatrix::from_diagonal(&diag)).unwrap();
        let back = expm(&logm_principal(&u).unwrap()).unwrap();
        assert!(back.rel_distance(&u) < 1e-10);
    }
}

#[test]
fn log_of_unimodular_jordan_block() {
    let th = PI / 3.0;
    let l = logm_principal(&d3(th)).unwrap();
    let expected = CMatrix::from_rows(&[vec![c(0.0, th), Complex64::from_polar(1.0, -th)], vec![c(0.0, 0.0), c(0.0, th)]]).unwrap();
    assert!(l.max_abs_diff(&expected) < 1e-12);
}

#[test]
fn off_diagonal_metric_is_indefinite() {
    let xi = c(2.0, 1.0);
    let eta = CMatrix::from_rows(&[vec![c(0.0, 0.0), xi], vec![xi.conj(), c(0.0, 0.0)]]).unwrap();
    let s = inertia(&eta).unwrap().signature();
    assert_eq!((s.negatives, s.positives), (1, 1));
}

#[test]
fn polar_pair_off_the_axis() {
    let w = Complex64::from_polar(1.0, PI / 3.0);
    let u = CMatrix::from_diagonal(&[w * 2.0, w * 0.5]);
    let pairing = pair_spectrum(&jordan_structure(&u).unwrap()).unwrap();
    assert_eq!(pairing.pairs.len(), 1);
    assert!(pairing.unimodular.is_empty() && pairing.unpaired.is_empty());
    let p = &pairing.pairs[0];
    assert!((p.outer * p.inner.conj() - c(1.0, 0.0)).norm() < 1e-12);
}

#[test]
fn transported_d2_is_pseudo_unitary() {
    let mut g = Gen::new(14);
    let w = Complex64::from_polar(1.0, PI / 5.0);
    let d2 = CMatrix::from_diagonal(&[w * 3.0, w / 3.0]);
    for _ in 0..5 {
        let u = conjugate(&g.invertible(2), &d2).unwrap();
        assert!(is_pseudo_unitary(&u).unwrap().decision);
    }
}

#[test]
fn eta_j_checks() {
    let s = CMatrix::from_diagonal(&[c(2.0, 0.0), c(0.5, 0.0)]);
    assert!(is_eta_pseudo_unitary(&s, &eta_j(1)).unwrap().decision);
    assert!(!is_pseudo_unitary(&CMatrix::from_diagonal(&[c(0.0, 1.0), c(0.0, 2.0)])).unwrap().decision);
}

#[test]
fn recurrence_for_p2() {
    let x = solve_block_coeffs(c(1.0, 0.0), 2, &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap().x;
    assert_eq!(x[(1, 0)], c(-1.0, 0.0));
    assert_eq!(x[(0, 0)], c(0.0, 0.0));
}

#[test]
fn recurrence_for_p3_frozen() {
    // x_{2,2} = −u²a, x_{3,1} = u⁴a, x_{3,2} = −u²b + u³a with u = e^{iπ/4}, (a, b, c) = (1, 2i, −1)
    let u = Complex64::from_polar(1.0, PI / 4.0);
    let x = solve_block_coeffs(u, 3, &[c(1.0, 0.0), c(0.0, 2.0), c(-1.0, 0.0)]).unwrap().x;
    let h = 0.5f64.sqrt();
    let expected = [
        [c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        [c(0.0, 0.0), c(0.0, -1.0), c(0.0, 2.0)],
        [c(-1.0, 0.0), c(2.0 - h, h), c(-1.0, 0.0)],
    ];
    for i in 0..3 {
        for j in 0..3 {
            assert!((x[(i, j)] - expected[i][j]).norm() < 1e-14, "({i},{j}): {}", x[(i, j)]);
        }
    }
}

#[test]
fn hermitian_completion_p3() {
    let h = hermitian_unimodular_coeffs(c(1.0, 0.0), 3, 1.0, 1, 1e-12).unwrap();
    assert!((h.x[(0, 2)] - c(1.0, 0.0)).norm() < 1e-14);
    assert!((h.x[(2, 0)] - c(1.0, 0.0)).norm() < 1e-14);
    for i in 0..3 {
        for j in 0..3 {
            assert!((h.x[(i, j)] - h.x[(j, i)].conj()).norm() < 1e-14);
        }
    }
}

#[test]
fn congruence_transport_of_metric() {
    let mut g = Gen::new(15);
    for _ in 0..10 {
        let n = 2 + g.index(4);
        let (u, _) = g.pseudo_unitary(n);
        let (_, m) = metric_for(&u, &MetricParams::default()).unwrap();
        let a = g.invertible(n);
        let moved = &(&a.try_inverse().unwrap() * &u) * &a;
        let eta2 = &(&a.adjoint() * &m.eta) * &a;
        let w = &(&(&moved.adjoint() * &eta2) * &moved) - &eta2;
        assert!(w.norm() <= n as f64 * 1e-9 * eta2.norm());
    }
}

#[test]
fn jordan_block_pseudo_hermitian_log() {
    let th = PI / 3.0;
    let r = pseudo_hermitian_log(&d3(th)).unwrap();
    let expected = CMatrix::from_rows(&[vec![c(th, 0.0), Complex64::from_polar(1.0, -th) * c(0.0, -1.0)], vec![c(0.0, 0.0), c(th, 0.0)]]).unwrap();
    assert!(r.h.max_abs_diff(&expected) < 1e-12);
    assert_eq!(r.structure.items()[0].jordan_dimensions, vec![2]);

    let form = canonical_form_2x2(&d3(th)).unwrap();
    assert_eq!(form.kind, FormKind::D3);
    let h = log_2x2(&form).unwrap();
    assert!(expm(&h.scale(c(0.0, 1.0))).unwrap().max_abs_diff(&d3(th)) < 1e-12);
}

#[test]
fn evolution_of_polar_pair() {
    let l = 2f64.ln();
    let u = evolve(&CMatrix::from_diagonal(&[c(0.0, -l), c(0.0, l)]), 1.0).unwrap();
    assert!(u.max_abs_diff(&CMatrix::from_diagonal(&[c(0.5, 0.0), c(2.0, 0.0)])) < 1e-15);
    let eta = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
    assert!(is_eta_pseudo_unitary(&u, &eta).unwrap().decision);
}

#[test]
fn exponential_of_shifted_nilpotent() {
    let mut g = Gen::new(16);
    let e = c(g.uniform(-3.0, 3.0), 0.0);
    let jd = verify_exponential_structure(e, 4, 1e-9).unwrap();
    let numeric = jordan_structure(&jd.reassemble()).unwrap();
    assert_eq!(numeric.items().len(), 1);
    assert_eq!(numeric.items()[0].jordan_dimensions, vec![4]);
}

#[test]
fn symplectic_examples() {
    let s = CMatrix::from_diagonal(&[c(2.0, 0.0), c(0.5, 0.0)]);
    let r = is_symplectic(&s).unwrap();
    assert!(r.is_symplectic && r.quadruples_complete());
    assert_eq!(r.quadruples[0].members, vec![c(2.0, 0.0), c(0.5, 0.0)]);
    let (v, label) = sp_in_umm(&s).unwrap();
    assert!(v.decision);
    assert_eq!(label.to_string(), "U(1,1)");

    let a = 0.9f64;
    let rot = CMatrix::from_real_rows(&[vec![a.cos(), -a.sin()], vec![a.sin(), a.cos()]]).unwrap();
    let q = &is_symplectic(&rot).unwrap().quadruples;
    assert_eq!(q.len(), 1);
    let mut m = q[0].members.clone();
    m.sort_by(|x, y| x.im.total_cmp(&y.im));
    assert!((m[0] - Complex64::from_polar(1.0, -a)).norm() < 1e-12);
    assert!((m[1] - Complex64::from_polar(1.0, a)).norm() < 1e-12);

    let w = Complex64::from_polar(1.0, PI / 4.0);
    assert!(!sp_in_umm(&CMatrix::from_diagonal(&[w, w.conj()])).unwrap().0.decision);
    assert_eq!(classify_group(&eta_j(2)).unwrap().to_string(), "U(2,2)");
}

#[test]
fn oscillator_closed_forms() {
    let m = build_oscillator(1.0, 1.0, 1.0).unwrap();
    let s = simulate(&m, 1.0, 0.0, &[PI / 2.0]).unwrap();
    assert!(s[0].x.abs() < 1e-9);
    let m = build_oscillator(-1.0, 1.0, 1.0).unwrap();
    let s = simulate(&m, 1.0, 0.0, &[1.0]).unwrap();
    assert!((s[0].x - 1f64.cosh()).abs() < 1e-9);
}

#[test]
fn oscillator_identity_metric_warns() {
    let m = build_oscillator(1.0, 0.5, 1.0).unwrap();
    let times: Vec<f64> = (0..50).map(|k| k as f64 * 0.2).collect();
    let states = simulate(&m, 1.0, 0.0, &times).unwrap();
    let cons = conserved_inner_product(&m, &states, &CMatrix::identity(2)).unwrap();
    assert!(cons.warning);
    assert!(cons.drift > 1e-3);
    let cons = conserved_inner_product(&m, &states, &sigma3()).unwrap();
    assert!(!cons.warning && cons.is_conserved());
}
