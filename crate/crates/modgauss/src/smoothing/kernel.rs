//! The concentrated smoothing kernel rho(x) = prod_i sinc_{2d+2}(x^{(i)}) / Z
//! with sinc_m(x) = (sinc(x/m))^m, and its compactly supported Fourier
//! transform. The per-axis transform is the density of a sum of m = 2d+2 iid
//! uniforms on [-1/m, 1/m] (an Irwin-Hall piecewise polynomial), normalized
//! to 1 at the origin; it vanishes outside [-1, 1].

use crate::numeric::multiindex::{binomial, fact, MultiIndex};
use std::f64::consts::PI;

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0 + x.powi(4) / 120.0
    } else {
        x.sin() / x
    }
}

/// q-th derivative of the Irwin-Hall density (sum of m iid U[0,1]) at x.
/// Valid classically for q <= m - 2.
fn irwin_hall_deriv(m: usize, q: usize, x: f64) -> f64 {
    debug_assert!(q + 2 <= m);
    let pow = m - 1 - q;
    let mut acc = 0.0;
    let mut sign = 1.0;
    for j in 0..=m {
        let t = x - j as f64;
        if t > 0.0 {
            acc += sign * binomial(m, j) * t.powi(pow as i32);
        }
        sign = -sign;
    }
    acc / fact(pow)
}

/// q-th derivative of the density of a sum of m iid U[-1/m, 1/m] at zeta.
/// This is the (unnormalized) per-axis Fourier transform of sinc_m.
pub fn axis_transform_deriv(m: usize, q: usize, zeta: f64) -> f64 {
    if zeta.abs() >= 1.0 {
        return 0.0;
    }
    let scale = (m as f64 / 2.0).powi(q as i32 + 1);
    scale * irwin_hall_deriv(m, q, m as f64 * (zeta + 1.0) / 2.0)
}

/// Kernel density rho(x) on R^d, total mass 1.
pub fn kernel_density(d: usize, x: &[f64]) -> f64 {
    assert!(d >= 1 && d <= 6 && x.len() == d);
    let m = 2 * d + 2;
    let z_axis = 2.0 * PI * axis_transform_deriv(m, 0, 0.0);
    x.iter()
        .map(|&xi| sinc(xi / m as f64).powi(m as i32) / z_axis)
        .product()
}

/// Normalized Fourier transform rho_hat(zeta), supported on [-1,1]^d with
/// rho_hat(0) = 1.
pub fn kernel_fourier(d: usize, zeta: &[f64]) -> f64 {
    kernel_fourier_deriv(d, &MultiIndex::zero(d), zeta)
}

/// Partial derivative d^beta rho_hat(zeta), exact from the piecewise
/// polynomial structure.
pub fn kernel_fourier_deriv(d: usize, beta: &MultiIndex, zeta: &[f64]) -> f64 {
    assert!(d >= 1 && d <= 6 && zeta.len() == d && beta.dim() == d);
    let m = 2 * d + 2;
    let norm = axis_transform_deriv(m, 0, 0.0);
    beta.0
        .iter()
        .zip(zeta)
        .map(|(&q, &z)| axis_transform_deriv(m, q, z) / norm)
        .product()
}

/// Kernel rescaled so that the ball carrying mass >= 1 - 2/(9 pi) has radius
/// eps: rho_eps(x) = s^{-d} rho(x/s) with s = eps / (2d+2)^{3/2}. Its Fourier
/// transform is supported exactly on the Delta_eps box.
#[derive(Clone, Copy, Debug)]
pub struct SmoothingKernel {
    pub d: usize,
    pub eps: f64,
}

impl SmoothingKernel {
    pub fn new(d: usize, eps: f64) -> crate::Result<Self> {
        if d < 1 || d > 6 || eps <= 0.0 {
            return Err(crate::Error::domain("need 1 <= d <= 6 and eps > 0"));
        }
        Ok(SmoothingKernel { d, eps })
    }

    pub fn scale(&self) -> f64 {
        self.eps / ((2 * self.d + 2) as f64).powf(1.5)
    }

    pub fn density(&self, x: &[f64]) -> f64 {
        let s = self.scale();
        let y: Vec<f64> = x.iter().map(|&xi| xi / s).collect();
        kernel_density(self.d, &y) / s.powi(self.d as i32)
    }

    pub fn fourier(&self, zeta: &[f64]) -> f64 {
        let s = self.scale();
        let y: Vec<f64> = zeta.iter().map(|&z| z * s).collect();
        kernel_fourier(self.d, &y)
    }

    pub fn fourier_deriv(&self, beta: &MultiIndex, zeta: &[f64]) -> f64 {
        let s = self.scale();
        let y: Vec<f64> = zeta.iter().map(|&z| z * s).collect();
        s.powi(beta.weight() as i32) * kernel_fourier_deriv(self.d, beta, &y)
    }
}

/// Upper bound of the kernel lemma: ||d^beta rho_hat||_inf <=
/// 2^{1 + d/2} pi^{-d/2} (2d+2)^{|beta| + d/2}.
pub fn kernel_derivative_bound(d: usize, beta_weight: usize) -> f64 {
    let df = d as f64;
    2.0f64.powf(1.0 + df / 2.0)
        * PI.powf(-df / 2.0)
        * ((2 * d + 2) as f64).powf(beta_weight as f64 + df / 2.0)
}
