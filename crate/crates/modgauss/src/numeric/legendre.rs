/// Legendre-type polynomial P^{d-1,k}(t) attached to the (d-1)-sphere,
/// normalized by P^{d-1,k}(1) = 1. Recurrence:
/// (k + d - 2) P_{k+1} = (2k + d - 2) t P_k - k P_{k-1}, P_0 = 1, P_1 = t.
/// For d = 3 these are the classical Legendre polynomials, for d = 2 the
/// Chebyshev polynomials of the first kind.
pub fn sphere_legendre(d: usize, k: usize, t: f64) -> f64 {
    assert!(d >= 2, "sphere dimension parameter d must be >= 2");
    if k == 0 {
        return 1.0;
    }
    let mut p0 = 1.0;
    let mut p1 = t;
    for j in 1..k {
        let a = (2 * j + d - 2) as f64;
        let b = j as f64;
        let c = (j + d - 2) as f64;
        let p2 = (a * t * p1 - b * p0) / c;
        p0 = p1;
        p1 = p2;
    }
    p1
}
