//! CUE log-determinants: Haar unitary sampling via Gram-Schmidt on a complex
//! Ginibre matrix, eigenphases through the Cayley transform, and the exact
//! Laplace transform of X_n = log det(I - U_n) as a finite Gamma product.

use crate::numeric::gamma::{ln_gamma, ln_gamma_complex};
use crate::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// E[e^{z1 Re X_n + z2 Im X_n}] =
/// prod_{j=1}^n Gamma(j) Gamma(j + z1)
///             / (Gamma(j + (z1 + i z2)/2) Gamma(j + (z1 - i z2)/2)),
/// valid for z1 > -1. The conjugate pair keeps the product real.
pub fn cue_laplace_exact(n: usize, z1: f64, z2: f64) -> Result<f64> {
    if z1 <= -1.0 {
        return Err(Error::domain("cue_laplace_exact needs z1 > -1"));
    }
    let mut log = 0.0;
    for j in 1..=n {
        let jf = j as f64;
        log += ln_gamma(jf) + ln_gamma(jf + z1);
        log -= 2.0 * ln_gamma_complex(Complex64::new(jf + z1 / 2.0, z2 / 2.0)).re;
    }
    Ok(log.exp())
}

/// t_n = (log n) / 2 (the CUE mod-Gaussian scale; K = I_2).
pub fn cue_t_n(n: usize) -> f64 {
    (n as f64).ln() / 2.0
}

struct CMat {
    n: usize,
    a: Vec<Complex64>, // column-major
}

impl CMat {
    fn zeros(n: usize) -> Self {
        CMat {
            n,
            a: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }
    fn at(&self, i: usize, j: usize) -> Complex64 {
        self.a[j * self.n + i]
    }
    fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.a[j * self.n + i] = v;
    }
}

/// Haar unitary via modified Gram-Schmidt on a Ginibre matrix; the positive
/// real diagonal of the implicit R factor makes the law exactly Haar.
fn haar_unitary(n: usize, rng: &mut impl Rng) -> CMat {
    let mut q = CMat::zeros(n);
    for j in 0..n {
        for i in 0..n {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            q.set(i, j, Complex64::new(re, im) / 2f64.sqrt());
        }
    }
    for j in 0..n {
        for k in 0..j {
            let mut dot = Complex64::new(0.0, 0.0);
            for i in 0..n {
                dot += q.at(i, k).conj() * q.at(i, j);
            }
            for i in 0..n {
                let v = q.at(i, j) - dot * q.at(i, k);
                q.set(i, j, v);
            }
        }
        let norm: f64 = (0..n).map(|i| q.at(i, j).norm_sqr()).sum::<f64>().sqrt();
        for i in 0..n {
            let v = q.at(i, j) / norm;
            q.set(i, j, v);
        }
    }
    q
}

/// Solve (I - U) W = (I + U) by complex Gaussian elimination with partial
/// pivoting; returns None when I - U is numerically singular (eigenvalue
/// at 1, probability zero: caller resamples).
fn cayley(u: &CMat) -> Option<CMat> {
    let n = u.n;
    let mut a = CMat::zeros(n);
    let mut b = CMat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let d = if i == j { 1.0 } else { 0.0 };
            a.set(i, j, Complex64::new(d, 0.0) - u.at(i, j));
            b.set(i, j, Complex64::new(d, 0.0) + u.at(i, j));
        }
    }
    for col in 0..n {
        let (mut piv, mut best) = (col, a.at(col, col).norm());
        for i in col + 1..n {
            if a.at(i, col).norm() > best {
                best = a.at(i, col).norm();
                piv = i;
            }
        }
        if best < 1e-13 {
            return None;
        }
        if piv != col {
            for j in 0..n {
                let (x, y) = (a.at(col, j), a.at(piv, j));
                a.set(col, j, y);
                a.set(piv, j, x);
                let (x, y) = (b.at(col, j), b.at(piv, j));
                b.set(col, j, y);
                b.set(piv, j, x);
            }
        }
        let inv = Complex64::new(1.0, 0.0) / a.at(col, col);
        for i in 0..n {
            if i == col {
                continue;
            }
            let f = a.at(i, col) * inv;
            if f.norm() == 0.0 {
                continue;
            }
            for j in col..n {
                let v = a.at(i, j) - f * a.at(col, j);
                a.set(i, j, v);
            }
            for j in 0..n {
                let v = b.at(i, j) - f * b.at(col, j);
                b.set(i, j, v);
            }
        }
    }
    // back-substitute the remaining diagonal
    let mut w = CMat::zeros(n);
    for j in 0..n {
        for i in 0..n {
            w.set(i, j, b.at(i, j) / a.at(i, i));
        }
    }
    Some(w)
}

/// Eigenphases of a Haar unitary in (0, 2 pi): H = i (I + U)(I - U)^{-1} is
/// Hermitian with eigenvalues cot(theta/2); its realification is a symmetric
/// 2n x 2n matrix with doubled spectrum.
pub fn haar_eigenphases(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    loop {
        let u = haar_unitary(n, rng);
        let w = match cayley(&u) {
            Some(w) => w,
            None => continue,
        };
        // H = i W, hermitized
        let mut re = DMatrix::<f64>::zeros(n, n);
        let mut im = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let hij = Complex64::new(0.0, 1.0) * w.at(i, j);
                let hji = Complex64::new(0.0, 1.0) * w.at(j, i);
                let h = (hij + hji.conj()) / 2.0;
                re[(i, j)] = h.re;
                im[(i, j)] = h.im;
            }
        }
        let mut m = DMatrix::<f64>::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = re[(i, j)];
                m[(i + n, j + n)] = re[(i, j)];
                m[(i, j + n)] = -im[(i, j)];
                m[(i + n, j)] = im[(i, j)];
            }
        }
        let eig = SymmetricEigen::new(m);
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // doubled spectrum: take every second value
        return vals
            .into_iter()
            .step_by(2)
            .map(|h| 2.0 * 1.0f64.atan2(h))
            .collect();
    }
}

/// X_n = log det(I - U_n) = sum_j log(1 - e^{i theta_j}), principal branch
/// per factor: log(1 - e^{i t}) = log(2 sin(t/2)) + i (t - pi)/2.
pub fn sample_cue_logdet(n: usize, rng: &mut impl Rng) -> [f64; 2] {
    let phases = haar_eigenphases(n, rng);
    let mut re = 0.0;
    let mut im = 0.0;
    for t in phases {
        re += (2.0 * (t / 2.0).sin()).ln();
        im += (t - std::f64::consts::PI) / 2.0;
    }
    [re, im]
}
