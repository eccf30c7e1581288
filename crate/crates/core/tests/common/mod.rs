//! Seeded random generators shared by the integration tests and benches.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pseudounitary::matcore::{eta_pq, expm};
use pseudounitary::{synth, sympl};
use pseudounitary::CMatrix;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Minimum distance kept between distinct generated eigenvalues.
const SEPARATION: f64 = 0.3;

pub struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn coin(&mut self, p: f64) -> bool {
        self.rng.random_bool(p)
    }

    pub fn complex_box(&mut self) -> Complex64 {
        c(self.uniform(-1.0, 1.0), self.uniform(-1.0, 1.0))
    }

    pub fn angle(&mut self) -> f64 {
        self.uniform(-std::f64::consts::PI, std::f64::consts::PI)
    }

    pub fn unitary(&mut self, n: usize) -> DMatrix<Complex64> {
        let m = DMatrix::from_fn(n, n, |_, _| self.complex_box());
        m.qr().q()
    }

    /// `Q₁ · diag(s) · Q₂` with `s ∈ [0.5, 2]`; condition number at most 4.
    pub fn well_conditioned(&mut self, n: usize) -> CMatrix {
        let q1 = self.unitary(n);
        let q2 = self.unitary(n);
        let d: Vec<Complex64> = (0..n).map(|_| c(self.uniform(0.5, 2.0), 0.0)).collect();
        let s = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d));
        CMatrix::from_na(q1 * s * q2).unwrap()
    }

    /// Dense matrix with entries in the unit box, shifted away from singularity.
    pub fn invertible(&mut self, n: usize) -> CMatrix {
        loop {
            let m = CMatrix::from_na(DMatrix::from_fn(n, n, |_, _| self.complex_box())).unwrap();
            let s = m.as_na().clone().singular_values();
            let (hi, lo) = (s.max(), s.min());
            if lo > 0.05 * hi {
                return m;
            }
        }
    }

    pub fn real_symmetric(&mut self, n: usize) -> DMatrix<f64> {
        let mut k = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = self.uniform(-1.0, 1.0);
                k[(i, j)] = v;
                k[(j, i)] = v;
            }
        }
        k
    }

    fn far_from(&self, z: Complex64, taken: &[Complex64]) -> bool {
        taken.iter().all(|&w| (w - z).norm() >= SEPARATION)
    }

    fn fresh_unimodular(&mut self, taken: &[Complex64]) -> Complex64 {
        loop {
            let z = Complex64::from_polar(1.0, self.angle());
            if self.far_from(z, taken) {
                return z;
            }
        }
    }

    fn fresh_pair(&mut self, taken: &[Complex64]) -> (Complex64, Complex64) {
        loop {
            let outer = Complex64::from_polar(self.uniform(1.3, 2.5), self.angle());
            let inner = outer.conj().inv();
            if self.far_from(outer, taken) && self.far_from(inner, taken) {
                return (outer, inner);
            }
        }
    }

    /// Jordan blocks `(eigenvalue, size)` of a pseudo-unitary matrix of size
    /// `n`: unimodular blocks up to size 4 and inverse-conjugate pairs of
    /// blocks up to size 3.
    pub fn pseudo_unitary_blocks(&mut self, n: usize) -> Vec<(Complex64, usize)> {
        let mut blocks = Vec::new();
        let mut unimodular: Vec<Complex64> = Vec::new();
        let mut taken: Vec<Complex64> = Vec::new();
        let mut left = n;
        while left > 0 {
            if left >= 2 && self.coin(0.45) {
                let p = 1 + self.index(3.min(left / 2));
                let (o, i) = self.fresh_pair(&taken);
                taken.extend([o, i]);
                blocks.push((o, p));
                blocks.push((i, p));
                left -= 2 * p;
            } else {
                let p = 1 + self.index(4.min(left));
                let u = if !unimodular.is_empty() && self.coin(0.2) {
                    unimodular[self.index(unimodular.len())]
                } else {
                    let u = self.fresh_unimodular(&taken);
                    taken.push(u);
                    unimodular.push(u);
                    u
                };
                blocks.push((u, p));
                left -= p;
            }
        }
        blocks
    }

    /// `A J A⁻¹` for random pseudo-unitary Jordan data and well-conditioned `A`.
    pub fn pseudo_unitary(&mut self, n: usize) -> (CMatrix, Vec<(Complex64, usize)>) {
        let blocks = self.pseudo_unitary_blocks(n);
        let a = self.well_conditioned(n);
        let u = synth::conjugate(&a, &synth::jordan_matrix(&blocks)).unwrap();
        (u, blocks)
    }

    /// Jordan blocks of a pseudo-Hermitian matrix: real eigenvalues and
    /// complex-conjugate pairs, blocks up to size 3. Real parts stay in
    /// `(−3, 3)` and imaginary parts in `±[0.3, 1]`.
    pub fn pseudo_hermitian_blocks(&mut self, n: usize) -> Vec<(Complex64, usize)> {
        let mut blocks = Vec::new();
        let mut taken: Vec<Complex64> = Vec::new();
        let mut left = n;
        while left > 0 {
            if left >= 2 && self.coin(0.45) {
                let p = 1 + self.index(3.min(left / 2));
                let z = loop {
                    let z = c(self.uniform(-3.0, 3.0), self.uniform(0.3, 1.0));
                    if self.far_from(z, &taken) {
                        break z;
                    }
                };
                taken.extend([z, z.conj()]);
                blocks.push((z, p));
                blocks.push((z.conj(), p));
                left -= 2 * p;
            } else {
                let p = 1 + self.index(3.min(left));
                let z = loop {
                    let z = c(self.uniform(-3.0, 3.0), 0.0);
                    if self.far_from(z, &taken) {
                        break z;
                    }
                };
                taken.push(z);
                blocks.push((z, p));
                left -= p;
            }
        }
        blocks
    }

    pub fn pseudo_hermitian(&mut self, n: usize) -> CMatrix {
        let blocks = self.pseudo_hermitian_blocks(n);
        let a = self.well_conditioned(n);
        synth::conjugate(&a, &synth::jordan_matrix(&blocks)).unwrap()
    }

    /// Random Hermitian matrix with entries in the unit box.
    pub fn hermitian(&mut self, n: usize) -> CMatrix {
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c(self.uniform(-1.0, 1.0), 0.0);
            for j in (i + 1)..n {
                let z = self.complex_box();
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        CMatrix::from_na(m).unwrap()
    }

    /// Element of `U(p, q)`: `exp(i·η_{p,q}·K)` with `K` Hermitian.
    pub fn pq_unitary(&mut self, p: usize, q: usize) -> CMatrix {
        let k = self.hermitian(p + q);
        let h = &eta_pq(p, q) * &k;
        expm(&h.scale(c(0.0, 1.0))).unwrap()
    }

    /// Random Jordan data with arbitrary nonzero eigenvalues, blocks up to size 3.
    pub fn generic_blocks(&mut self, n: usize) -> Vec<(Complex64, usize)> {
        let mut blocks = Vec::new();
        let mut taken: Vec<Complex64> = Vec::new();
        let mut left = n;
        while left > 0 {
            let p = 1 + self.index(3.min(left));
            let z = loop {
                let z = Complex64::from_polar(self.uniform(0.4, 2.5), self.angle());
                if self.far_from(z, &taken) {
                    break z;
                }
            };
            taken.push(z);
            blocks.push((z, p));
            left -= p;
        }
        blocks
    }

    /// Invertible matrix with known Jordan data.
    pub fn with_jordan(&mut self, blocks: &[(Complex64, usize)]) -> CMatrix {
        let n = blocks.iter().map(|b| b.1).sum();
        let a = self.well_conditioned(n);
        synth::conjugate(&a, &synth::jordan_matrix(blocks)).unwrap()
    }

    /// `exp(J·K)` with `K` real symmetric, entries uniform in `[−1, 1]`.
    pub fn symplectic(&mut self, m: usize) -> CMatrix {
        let k = self.real_symmetric(2 * m);
        sympl::symplectic_exp(&k).unwrap()
    }
}
