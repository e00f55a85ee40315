mod common;

use common::assert_close;
use modgauss::cumulants::SampleSet;
use modgauss::numeric::quad::adaptive_simpson;
use modgauss::numeric::{MultiIndex, RngStream, SpdMatrix};
use modgauss::smoothing::distance::{fd_partial, std_normal_cdf, ConvexSet};
use modgauss::smoothing::kernel::{
    kernel_density, kernel_derivative_bound, kernel_fourier, kernel_fourier_deriv,
};
use modgauss::smoothing::fourier::empirical_ft_derivative;
use modgauss::smoothing::*;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::PI;
use std::sync::Arc;

#[test]
fn kernel_density_is_a_probability_density_1d() {
    // sinc_4 tail decays like x^{-4}; the truncation error at L = 1000 is
    // far below the tolerance
    let mass = adaptive_simpson(&|x: f64| kernel_density(1, &[x]), -1000.0, 1000.0, 1e-9);
    assert_close(mass, 1.0, 1e-6, "1d mass");
    for x in [-3.0, -0.7, 0.0, 1.4] {
        assert!(kernel_density(1, &[x]) >= 0.0);
        assert_close(
            kernel_density(1, &[x]),
            kernel_density(1, &[-x]),
            1e-15,
            "even",
        );
    }
    // product structure in higher dimension is relative to its own axis
    // normalization: check symmetry under coordinate permutation
    assert_close(
        kernel_density(2, &[0.3, -1.1]),
        kernel_density(2, &[-1.1, 0.3]),
        1e-15,
        "exchangeable",
    );
}

#[test]
fn kernel_fourier_normalization_and_support() {
    for d in 1..=4usize {
        assert_close(kernel_fourier(d, &vec![0.0; d]), 1.0, 1e-12, "origin");
        // vanishes outside the unit cube
        let mut z = vec![0.0; d];
        z[0] = 1.0 + 1e-9;
        assert_eq!(kernel_fourier(d, &z), 0.0);
        z[0] = -2.5;
        assert_eq!(kernel_fourier(d, &z), 0.0);
    }
}

/// The compact transform against a direct numerical Fourier integral of the
/// density (cosine transform by symmetry).
#[test]
fn kernel_fourier_matches_numerical_transform() {
    for zeta in [0.25, 0.6, 0.9] {
        let want = adaptive_simpson(
            &|x: f64| kernel_density(1, &[x]) * (zeta * x).cos(),
            -800.0,
            800.0,
            1e-9,
        );
        assert_close(kernel_fourier(1, &[zeta]), want, 1e-4, "transform");
    }
}

#[test]
fn kernel_fourier_deriv_matches_finite_differences() {
    // stay away from the Irwin-Hall knots (multiples of 2/m)
    for d in 1..=2usize {
        let z0: Vec<f64> = (0..d).map(|i| 0.13 + 0.2 * i as f64).collect();
        for beta in modgauss::numeric::multiindex::indices_up_to(d, 2) {
            let f = |z: &[f64]| kernel_fourier(d, z);
            let want = fd_partial(&f, &beta.0, &z0, 1e-4);
            let got = kernel_fourier_deriv(d, &beta, &z0);
            assert_close(got, want, 1e-5 * got.abs().max(1.0), "fourier deriv");
        }
    }
}

#[test]
fn axis_derivative_bound_holds_on_grid() {
    // classical derivatives exist for q <= m - 2 = 2d; the criterion uses
    // |beta| <= d + 1
    for d in 1..=2usize {
        for q in 0..=(d + 1) {
            let bound = kernel_derivative_bound(d, q);
            let beta = {
                let mut b = vec![0usize; d];
                b[0] = q;
                MultiIndex(b)
            };
            for i in 0..200 {
                let z = -0.999 + 1.998 * i as f64 / 199.0;
                let mut zeta = vec![z; 1];
                zeta.resize(d, 0.37);
                let v = kernel_fourier_deriv(d, &beta, &zeta).abs();
                assert!(v <= bound, "d={d} q={q} at {z}: {v} > {bound}");
            }
        }
    }
}

#[test]
fn scaled_kernel_identities() {
    let k = SmoothingKernel::new(2, 0.05).unwrap();
    let s = k.scale();
    assert_close(s, 0.05 / 6.0f64.powf(1.5), 1e-15, "scale");
    let z = [3.0, -5.0];
    assert_close(
        k.fourier(&z),
        kernel_fourier(2, &[z[0] * s, z[1] * s]),
        1e-14,
        "fourier scaling",
    );
    let x = [0.01, -0.02];
    assert_close(
        k.density(&x),
        kernel_density(2, &[x[0] / s, x[1] / s]) / (s * s),
        1e-9 * k.density(&x),
        "density scaling",
    );
    assert!(SmoothingKernel::new(0, 0.1).is_err());
    assert!(SmoothingKernel::new(2, -1.0).is_err());
}

#[test]
fn gaussian_ft_derivatives_match_finite_differences() {
    let k = SpdMatrix::new(DMatrix::from_row_slice(2, 2, &[1.3, 0.4, 0.4, 0.9])).unwrap();
    let g = FourierObject::gaussian(k, 3);
    let z0 = [0.35, -0.6];
    for beta in modgauss::numeric::multiindex::indices_up_to(2, 3) {
        let f = |z: &[f64]| g.value(z).re;
        let want = fd_partial(&f, &beta.0, &z0, 1e-3);
        let got = g.derivative(&beta, &z0).re;
        assert_close(got, want, 2e-5, "gaussian deriv");
    }
}

#[test]
fn modified_gaussian_derivatives_match_finite_differences() {
    let k = SpdMatrix::identity(2);
    let g = FourierObject::modified_gaussian(k, vec![0.7, -0.3], 25.0, 3);
    let z0 = [0.2, 0.45];
    for beta in modgauss::numeric::multiindex::indices_up_to(2, 3) {
        let re = |z: &[f64]| g.value(z).re;
        let im = |z: &[f64]| g.value(z).im;
        let want = Complex64::new(
            fd_partial(&re, &beta.0, &z0, 1e-3),
            fd_partial(&im, &beta.0, &z0, 1e-3),
        );
        let got = g.derivative(&beta, &z0);
        assert!((got - want).norm() < 3e-5, "beta {:?}", beta.0);
    }
}

#[test]
fn empirical_ft_matches_hand_computation() {
    let s = Arc::new(SampleSet::new(2, vec![1.0, 0.0, -0.5, 2.0]));
    let zeta = [0.3, -0.8];
    let beta = MultiIndex(vec![1, 1]);
    // (1/2) sum (i x)(i y) e^{i<zeta,x>}
    let mut want = Complex64::new(0.0, 0.0);
    for row in [[1.0, 0.0], [-0.5, 2.0]] {
        let dot = zeta[0] * row[0] + zeta[1] * row[1];
        want += Complex64::from_polar(1.0, dot) * Complex64::new(-1.0, 0.0) * row[0] * row[1];
    }
    want /= 2.0;
    let got = empirical_ft_derivative(&s, &beta, &zeta);
    assert!((got - want).norm() < 1e-14);
    // the batched path agrees with the one-at-a-time path
    let obj = FourierObject::Empirical(s.clone());
    let betas = modgauss::numeric::multiindex::indices_up_to(2, 2);
    let all = obj.derivatives_all(&betas, &zeta);
    for (b, v) in betas.iter().zip(&all) {
        assert!((v - obj.derivative(b, &zeta)).norm() < 1e-13);
    }
}

#[test]
fn delta_epsilon_basic_properties() {
    let ka = SpdMatrix::identity(1);
    let kb = SpdMatrix::from_diagonal(&[1.3]).unwrap();
    let a = FourierObject::gaussian(ka.clone(), 2);
    let a2 = FourierObject::gaussian(ka, 2);
    let b = FourierObject::gaussian(kb, 2);
    // identical transforms short-circuit to exactly zero
    assert_eq!(delta_epsilon(&a, &a2, 0.3, 1, 24).unwrap(), 0.0);
    let dab = delta_epsilon(&a, &b, 0.3, 1, 48).unwrap();
    let dba = delta_epsilon(&b, &a, 0.3, 1, 48).unwrap();
    assert!(dab > 0.0);
    assert_close(dab, dba, 1e-10 * dab, "symmetry");
    assert!(delta_epsilon(&a, &b, -0.1, 1, 8).is_err());
    // dimension guard for empirical inputs
    let s4 = Arc::new(SampleSet::new(4, vec![0.0; 8]));
    let e4 = FourierObject::Empirical(s4);
    let g4 = FourierObject::gaussian(SpdMatrix::identity(4), 5);
    assert!(delta_epsilon(&e4, &g4, 0.2, 4, 4).is_err());
}

#[test]
fn normal_cdf_and_upper_bound_formula() {
    assert_close(std_normal_cdf(0.0), 0.5, 1e-15, "cdf 0");
    assert_close(std_normal_cdf(1.959963984540054), 0.975, 1e-9, "cdf 1.96");
    assert!(convex_distance_upper_bound(0.1, 1.0, 0.9, 2).is_err());
    let got = convex_distance_upper_bound(0.01, 2.0 * 3.0f64.sqrt(), 0.05, 2).unwrap();
    let want = 2.0 / (1.0 - 4.0 / (9.0 * PI))
        * (3.0f64.powf(1.5) * 0.01 + 2.0 * 3.0f64.sqrt() * 0.05);
    assert_close(got, want, 1e-12, "upper bound");
    // d = 2, K = I, M = B = 1 reference value of the explicit constant
    let c = berry_esseen_constant(2, &SpdMatrix::identity(2), 1.0, 1.0).unwrap();
    assert!((c - 5.2e3).abs() < 1.5e2, "constant {c}");
    assert!(berry_esseen_constant(1, &SpdMatrix::identity(1), 1.0, 1.0).is_err());
}

#[test]
fn convex_set_probabilities() {
    let k = SpdMatrix::from_diagonal(&[1.0, 4.0]).unwrap();
    // half-space <u,x> <= c has probability Phi(c / sqrt(u^T K u))
    let hs = ConvexSet::HalfSpace {
        u: vec![0.0, 1.0],
        c: 2.0,
    };
    assert_close(
        hs.gaussian_probability(&k).unwrap(),
        std_normal_cdf(1.0),
        1e-12,
        "half-space",
    );
    let bx = ConvexSet::Box {
        lo: vec![-1.0, -2.0],
        hi: vec![1.0, 2.0],
    };
    let want = (std_normal_cdf(1.0) - std_normal_cdf(-1.0)).powi(2);
    assert_close(bx.gaussian_probability(&k).unwrap(), want, 1e-10, "box");
    // centered ball under sigma^2 I in the plane: 1 - exp(-r^2 / 2 sigma^2)
    let iso = SpdMatrix::from_diagonal(&[0.5, 0.5]).unwrap();
    let ball = ConvexSet::Ball {
        center: vec![0.0, 0.0],
        r: 1.0,
    };
    assert_close(
        ball.gaussian_probability(&iso).unwrap(),
        1.0 - (-1.0f64).exp(),
        1e-6,
        "ball",
    );
    assert!(ball.gaussian_probability(&k).is_err());
    // quadrant as a polytope under K = I
    let quad = ConvexSet::Polytope {
        faces: vec![(vec![1.0, 0.0], 0.0), (vec![0.0, 1.0], 0.0)],
    };
    assert_close(
        quad.gaussian_probability(&SpdMatrix::identity(2)).unwrap(),
        0.25,
        1e-8,
        "quadrant",
    );
    // membership agrees with the geometry
    assert!(quad.contains(&[-0.5, -0.1]));
    assert!(!quad.contains(&[0.5, -0.1]));
    assert!(bx.contains(&[0.9, 1.9]) && !bx.contains(&[1.1, 0.0]));
}

#[test]
fn lower_bound_separates_matching_from_shifted_samples() {
    let k = SpdMatrix::from_diagonal(&[1.0, 2.0]).unwrap();
    let sq = k.sqrt();
    let mut rng = RngStream::new(31, 5).rng();
    let n = 20_000;
    let mut good = Vec::with_capacity(2 * n);
    let mut bad = Vec::with_capacity(2 * n);
    for _ in 0..n {
        let g0: f64 = StandardNormal.sample(&mut rng);
        let g1: f64 = StandardNormal.sample(&mut rng);
        let x = &sq * DVector::from_row_slice(&[g0, g1]);
        good.extend_from_slice(&[x[0], x[1]]);
        bad.extend_from_slice(&[x[0] + 0.5, x[1]]);
    }
    let fam = ConvexFamily::default_halfspaces(2);
    let lb_good =
        convex_distance_lower_bound(&SampleSet::new(2, good), &k, &fam).unwrap();
    let lb_bad = convex_distance_lower_bound(&SampleSet::new(2, bad), &k, &fam).unwrap();
    assert!(lb_good < 0.02, "matching samples: {lb_good}");
    assert!(lb_bad > 0.1, "shifted samples: {lb_bad}");
    assert!(lb_bad > 4.0 * lb_good);
}

#[test]
fn kolmogorov_distance_on_known_samples() {
    // exact uniform quantiles against the uniform cdf: distance 1/(2n) + 1/(2n)
    let n = 100;
    let xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
    let d = kolmogorov_distance_1d(&xs, &|x| x.clamp(0.0, 1.0));
    assert_close(d, 0.5 / n as f64, 1e-12, "uniform quantiles");
    // all mass at 0 against the standard normal cdf: distance 1/2
    let d2 = kolmogorov_distance_1d(&[0.0], &std_normal_cdf);
    assert_close(d2, 0.5, 1e-12, "point mass");
}

#[test]
fn residue_sup_on_simple_functions() {
    let (sup, spacing) = residue_sup_m(&|_: &[f64]| 2.5, 0.01, 1);
    assert_close(sup, 2.5, 1e-9, "constant sup");
    assert!(spacing > 0.0);
    // linear function: sup of max(|x|, |slope|) over the cube
    let half = 0.01 * 4.0f64.powf(1.5);
    let (sup_lin, _) = residue_sup_m(&|x: &[f64]| 3.0 * x[0], 0.01, 1);
    assert_close(sup_lin, (3.0 * half).max(3.0), 1e-6, "linear sup");
}
