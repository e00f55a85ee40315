use crate::Result;
use num_complex::Complex64;
use std::f64::consts::PI;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const KCUT: usize = 64;

/// Hurwitz zeta(s, a) for integer s >= 2 and a >= 2, by Euler-Maclaurin.
fn hurwitz_zeta_int(s: u32, a: f64) -> f64 {
    debug_assert!(s >= 2 && a >= 2.0);
    let j = 8usize;
    let mut sum = 0.0;
    for i in 0..j {
        sum += (a + i as f64).powi(-(s as i32));
    }
    let x = a + j as f64;
    let s_f = s as f64;
    sum += x.powf(1.0 - s_f) / (s_f - 1.0);
    sum += 0.5 * x.powf(-s_f);
    // Bernoulli correction terms B2, B4, B6
    let mut fac = s_f; // s(s+1)...(s+2r-2) running product
    sum += fac / 6.0 / 2.0 * x.powf(-s_f - 1.0);
    fac *= (s_f + 1.0) * (s_f + 2.0);
    sum += fac * (-1.0 / 30.0) / 24.0 * x.powf(-s_f - 3.0);
    fac *= (s_f + 3.0) * (s_f + 4.0);
    sum += fac * (1.0 / 42.0) / 720.0 * x.powf(-s_f - 5.0);
    sum
}

/// log G(1 + z) for the Barnes G-function, principal branch, valid for
/// Re z > -1 and |z| <= 16. Weierstrass product truncated at KCUT factors
/// with the remainder resummed exactly through Hurwitz zeta values:
/// log G(1+z) = (z/2) log(2 pi) - (z + z^2 (1 + gamma))/2
///            + sum_{k=1..K} [ k log(1 + z/k) - z + z^2/(2k) ]
///            + sum_{m>=3} (-1)^{m+1} z^m / m * zeta(m-1, K+1).
pub fn log_barnes_g1p(z: Complex64) -> Result<Complex64> {
    if z.re <= -1.0 {
        return Err(crate::Error::domain(format!(
            "log_barnes_g1p requires Re z > -1, got {}",
            z.re
        )));
    }
    if z.norm() > 16.0 {
        return Err(crate::Error::domain("log_barnes_g1p requires |z| <= 16"));
    }
    let mut acc = z / 2.0 * (2.0 * PI).ln() - (z + z * z * (1.0 + EULER_GAMMA)) / 2.0;
    for k in 1..=KCUT {
        let kf = k as f64;
        acc += kf * (1.0 + z / kf).ln() - z + z * z / (2.0 * kf);
    }
    // tail over k > KCUT
    let a = (KCUT + 1) as f64;
    let mut zp = z * z; // z^{m-1}
    let mut sign = 1.0;
    for m in 3..400u32 {
        zp *= z;
        let term = sign * zp / (m as f64) * hurwitz_zeta_int(m - 1, a);
        acc += term;
        if term.norm() < 1e-18 * acc.norm().max(1.0) {
            break;
        }
        sign = -sign;
    }
    Ok(acc)
}

/// log G(x) for real x > 0, shifting large arguments down through
/// G(x) = Gamma(x - 1) G(x - 1).
pub fn ln_barnes_g(mut x: f64) -> Result<f64> {
    if x <= 0.0 {
        return Err(crate::Error::domain("ln_barnes_g requires x > 0"));
    }
    let mut shift = 0.0;
    while x > 9.0 {
        x -= 1.0;
        shift += super::gamma::ln_gamma(x);
    }
    Ok(shift + log_barnes_g1p(Complex64::new(x - 1.0, 0.0))?.re)
}

/// Barnes G(x) for real x > 0.
pub fn barnes_g(x: f64) -> Result<f64> {
    Ok(ln_barnes_g(x)?.exp())
}

/// G(a + (r/2) e^{i theta}) * G(a + (r/2) e^{-i theta}), which is real
/// positive since the two arguments are conjugate.
pub fn barnes_g_conjugate_product(a: f64, r: f64, theta: f64) -> Result<f64> {
    let w = Complex64::new(a + r / 2.0 * theta.cos() - 1.0, r / 2.0 * theta.sin());
    if w.re <= -1.0 {
        return Err(crate::Error::domain(
            "conjugate product needs Re(a + (r/2) cos theta) > 0",
        ));
    }
    Ok((2.0 * log_barnes_g1p(w)?.re).exp())
}
