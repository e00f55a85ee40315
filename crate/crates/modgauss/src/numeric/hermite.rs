use super::multiindex::MultiIndex;

/// Probabilists' Hermite polynomial He_n(x), three-term recurrence.
/// He_{n+1}(x) = x He_n(x) - n He_{n-1}(x).
pub fn hermite(n: usize, x: f64) -> f64 {
    assert!(n <= 64, "hermite order capped at 64");
    let mut p0 = 1.0;
    if n == 0 {
        return p0;
    }
    let mut p1 = x;
    for k in 1..n {
        let p2 = x * p1 - k as f64 * p0;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Tensor Hermite H_alpha(x) = prod_i He_{alpha_i}(x_i), so that
/// d^alpha e^{-|x|^2/2} = (-1)^{|alpha|} H_alpha(x) e^{-|x|^2/2}.
pub fn hermite_tensor(alpha: &MultiIndex, x: &[f64]) -> f64 {
    alpha
        .0
        .iter()
        .zip(x)
        .map(|(&n, &xi)| hermite(n, xi))
        .product()
}
