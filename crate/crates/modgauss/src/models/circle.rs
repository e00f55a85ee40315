//! Walk with steps on the unit circle: cyclic products X_i = U_i .. U_{i+D-1}
//! of independent wrapped-Gaussian rotations of parameter lambda/D, so each
//! X_i has the circle heat-kernel law L(lambda) and (N, 2D-1) is a
//! dependency-graph parameter pair for the family.

use crate::numeric::SpdMatrix;
use crate::{Error, Result};
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug)]
pub struct CircleWalkModel {
    pub n_big: usize,
    pub d_big: usize,
    pub lambda: f64,
}

impl CircleWalkModel {
    pub fn new(n_big: usize, d_big: usize, lambda: f64) -> Result<Self> {
        if lambda <= 0.0 || d_big < 1 {
            return Err(Error::domain("need lambda > 0 and D >= 1"));
        }
        if n_big <= 2 * d_big {
            return Err(Error::domain("need N > 2D"));
        }
        Ok(CircleWalkModel {
            n_big,
            d_big,
            lambda,
        })
    }

    /// Whether the regime hypothesis N^{1/3} = O(D) plausibly holds.
    pub fn regime_ok(&self) -> bool {
        (self.d_big as f64) >= (self.n_big as f64).powf(1.0 / 3.0) / 4.0
    }

    /// One sample of S_n = sum_i X_i in R^2 (real part first).
    pub fn sample_sum(&self, rng: &mut impl Rng) -> [f64; 2] {
        let n = self.n_big;
        let d = self.d_big;
        let sd = (self.lambda / d as f64).sqrt();
        let inc: Vec<f64> = (0..n)
            .map(|_| {
                let g: f64 = StandardNormal.sample(rng);
                sd * g
            })
            .collect();
        let mut prefix = vec![0.0; n + 1];
        for i in 0..n {
            prefix[i + 1] = prefix[i] + inc[i];
        }
        let mut s = [0.0, 0.0];
        for i in 0..n {
            let angle = if i + d <= n {
                prefix[i + d] - prefix[i]
            } else {
                prefix[n] - prefix[i] + prefix[i + d - n]
            };
            s[0] += angle.cos();
            s[1] += angle.sin();
        }
        s
    }

    /// Exact mean of S_n.
    pub fn mean(&self) -> [f64; 2] {
        [self.n_big as f64 * (-self.lambda / 2.0).exp(), 0.0]
    }

    fn pair_cov(&self, dist: usize) -> [f64; 2] {
        // covariance of (X_i, X_j) at cyclic distance dist < D: the products
        // share D - dist rotation factors
        let l = self.lambda;
        let frac = dist as f64 / self.d_big as f64;
        let rr = ((-frac * l).exp() + (-(2.0 - frac) * l).exp() - 2.0 * (-l).exp()) / 2.0;
        let ii = ((-frac * l).exp() - (-(2.0 - frac) * l).exp()) / 2.0;
        [rr, ii]
    }

    /// Exact covariance matrix of S_n (cross terms vanish).
    pub fn exact_covariance(&self) -> DMatrix<f64> {
        let mut rr = 0.0;
        let mut ii = 0.0;
        for dist in -(self.d_big as i64 - 1)..=(self.d_big as i64 - 1) {
            let c = self.pair_cov(dist.unsigned_abs() as usize);
            rr += c[0];
            ii += c[1];
        }
        let n = self.n_big as f64;
        DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&[n * rr, n * ii]))
    }

    /// Limiting covariance K(lambda) of the rescaling by (2D-1) N.
    pub fn limit_k(&self) -> SpdMatrix {
        limit_k(self.lambda)
    }

    /// Dependency-graph parameters (N_n, D_n) = (N, 2D - 1).
    pub fn graph_params(&self) -> (f64, f64) {
        (self.n_big as f64, (2 * self.d_big - 1) as f64)
    }
}

/// K(lambda) = (1/(2 lambda)) diag(1 - 2 lambda e^{-lambda} - e^{-2 lambda},
///                                 (1 - e^{-lambda})^2).
pub fn limit_k(lambda: f64) -> SpdMatrix {
    let l = lambda;
    let k11 = (1.0 - 2.0 * l * (-l).exp() - (-2.0 * l).exp()) / (2.0 * l);
    let k22 = (1.0 - (-l).exp()).powi(2) / (2.0 * l);
    SpdMatrix::from_diagonal(&[k11, k22]).unwrap()
}

/// Wrapped-Gaussian density on (-pi, pi], direct (theta-shift) series.
pub fn circle_density(lambda: f64, theta: f64) -> Result<f64> {
    if lambda <= 0.0 {
        return Err(Error::domain("lambda must be positive"));
    }
    let mut acc = 0.0;
    let mut k = 0i64;
    loop {
        let t1 = (-(theta + 2.0 * PI * k as f64).powi(2) / (2.0 * lambda)).exp();
        let t2 = if k > 0 {
            (-(theta - 2.0 * PI * k as f64).powi(2) / (2.0 * lambda)).exp()
        } else {
            0.0
        };
        acc += t1 + t2;
        if k > 0 && t1 + t2 < 1e-17 * acc.max(1e-300) {
            break;
        }
        k += 1;
        if k > 10_000 {
            break;
        }
    }
    Ok(acc / (2.0 * PI * lambda).sqrt())
}

/// Fourier representation of the same density (cosine series).
pub fn circle_density_fourier(lambda: f64, theta: f64) -> Result<f64> {
    if lambda <= 0.0 {
        return Err(Error::domain("lambda must be positive"));
    }
    let mut acc = 1.0;
    let mut l = 1i64;
    loop {
        let c = circle_fourier_coeff(lambda, l);
        acc += 2.0 * c * (l as f64 * theta).cos();
        if c < 1e-17 {
            break;
        }
        l += 1;
        if l > 100_000 {
            break;
        }
    }
    Ok(acc / (2.0 * PI))
}

/// Fourier coefficient e^{-lambda l^2 / 2} of L(lambda).
pub fn circle_fourier_coeff(lambda: f64, l: i64) -> f64 {
    (-lambda * (l * l) as f64 / 2.0).exp()
}
