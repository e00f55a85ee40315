//! Walk with steps on S^{d-1} driven by Brownian increments on SO(3)
//! (simulated at d = 3), the sphere heat kernel, and the limiting
//! covariance for any d >= 2.

use crate::numeric::legendre::sphere_legendre;
use crate::numeric::multiindex::binomial;
use crate::numeric::SpdMatrix;
use crate::{Error, Result};
use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Heat-kernel density on S^{d-1} at time t, as a function of the last
/// coordinate, relative to the uniform probability measure:
/// p(x) = sum_k e^{-(k^2 + (d-2)k) t / 2} ((2k+d-2)/(k+d-2)) C(k+d-2, d-2)
///        P^{d-1,k}(x^{(d)}).
pub fn sphere_heat_density(d: usize, t: f64, xd: f64) -> Result<f64> {
    if t <= 0.0 {
        return Err(Error::domain("t must be positive"));
    }
    if d < 2 || xd.abs() > 1.0 {
        return Err(Error::domain("need d >= 2 and |x| <= 1"));
    }
    let mut acc = 0.0;
    for k in 0..100_000usize {
        let decay = (-((k * k + (d - 2) * k) as f64) * t / 2.0).exp();
        let coef = (2 * k + d - 2) as f64 / (k + d - 2).max(1) as f64
            * binomial(k + d - 2, d - 2);
        let term = decay * coef * sphere_legendre(d, k, xd);
        acc += term;
        if k > 0 && decay * coef < 1e-14 {
            break;
        }
    }
    Ok(acc)
}

/// Limiting covariance of the sphere walk: diagonal, with the last entry
/// K_dd and all others K_kk.
pub fn limit_k(d: usize, lambda: f64) -> Result<SpdMatrix> {
    if d < 2 || lambda <= 0.0 {
        return Err(Error::domain("need d >= 2, lambda > 0"));
    }
    let df = d as f64;
    let e1 = (-(df - 1.0) * lambda).exp();
    let e2 = (-df * lambda).exp();
    let kdd = (1.0 + df * (df - 2.0 - (df - 1.0) * lambda) * e1 - (df - 1.0).powi(2) * e2)
        / (df * (df - 1.0) * lambda);
    let kkk = (1.0 - df * e1 + (df - 1.0) * e2) / (df * (df - 1.0) * lambda);
    let mut diag = vec![kkk; d];
    diag[d - 1] = kdd;
    SpdMatrix::from_diagonal(&diag)
}

#[derive(Clone, Copy, Debug)]
pub struct SphereWalkModel {
    pub n_big: usize,
    pub d_big: usize,
    pub lambda: f64,
    pub substeps: usize,
}

impl SphereWalkModel {
    pub fn new(n_big: usize, d_big: usize, lambda: f64, substeps: usize) -> Result<Self> {
        if lambda <= 0.0 || d_big < 1 || substeps < 1 {
            return Err(Error::domain("need lambda > 0, D >= 1, substeps >= 1"));
        }
        if n_big <= 2 * d_big {
            return Err(Error::domain("need N > 2D"));
        }
        Ok(SphereWalkModel {
            n_big,
            d_big,
            lambda,
            substeps,
        })
    }

    /// One Brownian rotation increment on SO(3) of time lambda/D, simulated
    /// as `substeps` geodesic substeps exp(omega x) with omega Gaussian of
    /// variance t/substeps per axis. Bias O(lambda/substeps).
    fn increment(&self, rng: &mut impl Rng) -> Matrix3<f64> {
        let t = self.lambda / self.d_big as f64;
        let sd = (t / self.substeps as f64).sqrt();
        let mut r = Matrix3::identity();
        for _ in 0..self.substeps {
            let g0: f64 = StandardNormal.sample(rng);
            let g1: f64 = StandardNormal.sample(rng);
            let g2: f64 = StandardNormal.sample(rng);
            let w = Vector3::new(sd * g0, sd * g1, sd * g2);
            r = rodrigues(&w) * r;
        }
        r
    }

    /// S_N = sum of the cyclic window products applied to e_3.
    pub fn sample_sum(&self, rng: &mut impl Rng) -> [f64; 3] {
        let n = self.n_big;
        let d = self.d_big;
        let incs: Vec<Matrix3<f64>> = (0..n).map(|_| self.increment(rng)).collect();
        let e3 = Vector3::new(0.0, 0.0, 1.0);
        let mut s = Vector3::zeros();
        for i in 0..n {
            let mut v = e3;
            for j in 0..d {
                v = incs[(i + j) % n] * v;
            }
            s += v;
        }
        [s[0], s[1], s[2]]
    }

    pub fn mean(&self) -> [f64; 3] {
        let m = (-(3.0 - 1.0) * self.lambda / 2.0).exp() * self.n_big as f64;
        [0.0, 0.0, m]
    }
}

/// Rotation exp(w x) by the Rodrigues formula.
pub fn rodrigues(w: &Vector3<f64>) -> Matrix3<f64> {
    let theta = w.norm();
    if theta < 1e-12 {
        return Matrix3::identity();
    }
    let k = w / theta;
    let kx = Matrix3::new(0.0, -k[2], k[1], k[2], 0.0, -k[0], -k[1], k[0], 0.0);
    Matrix3::identity() + theta.sin() * kx + (1.0 - theta.cos()) * kx * kx
}
