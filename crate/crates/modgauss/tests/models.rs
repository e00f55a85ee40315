//! Exercises the example models: lattice walks, circle and sphere walks,
//! CUE log-determinants, Erdos-Renyi motif counts, and Markov chains.

mod common;

use common::{assert_close, assert_rel};
use modgauss::cumulants::{joint_cumulant, CumulantTensor, DiscreteDistribution};
use modgauss::models::circle::{
    circle_density, circle_density_fourier, circle_fourier_coeff, limit_k as circle_limit_k,
    CircleWalkModel,
};
use modgauss::models::cue::{cue_laplace_exact, cue_t_n, haar_eigenphases, sample_cue_logdet};
use modgauss::models::er::{count_embeddings, ErdosRenyiModel, Graph, Motif};
use modgauss::models::lattice::LatticeWalkModel;
use modgauss::models::markov::MarkovModel;
use modgauss::models::sphere::{
    limit_k as sphere_limit_k, rodrigues, sphere_heat_density, SphereWalkModel,
};
use modgauss::numeric::gamma::ln_gamma;
use modgauss::numeric::quad::{adaptive_simpson, gauss_legendre_on};
use modgauss::numeric::RngStream;
use nalgebra::{DMatrix, Vector3};
use std::f64::consts::PI;

// ---------- lattice walk ----------

#[test]
fn lattice_step_cumulants() {
    for d in 2..=4usize {
        let model = LatticeWalkModel::new(d, 1).unwrap();
        let law = model.step_law();
        let df = d as f64;
        // means and covariance of a single step
        for i in 0..d {
            assert_close(joint_cumulant(&law, &[i]), 0.0, 1e-14, "step mean");
            assert_close(
                joint_cumulant(&law, &[i, i]),
                1.0 / df,
                1e-13,
                "step variance",
            );
        }
        assert_close(joint_cumulant(&law, &[0, 1]), 0.0, 1e-14, "step cross cov");
        // fourth order: kappa_iiii = 1/d - 3/d^2, kappa_iijj = -1/d^2
        assert_close(
            joint_cumulant(&law, &[0, 0, 0, 0]),
            1.0 / df - 3.0 / (df * df),
            1e-12,
            "kappa_iiii",
        );
        assert_close(
            joint_cumulant(&law, &[0, 0, 1, 1]),
            -1.0 / (df * df),
            1e-12,
            "kappa_iijj",
        );
        // odd cumulants vanish by symmetry
        assert_close(joint_cumulant(&law, &[0, 0, 1]), 0.0, 1e-13, "kappa_iij");
    }
}

#[test]
fn lattice_tensor_scales_with_n() {
    let model = LatticeWalkModel::new(3, 500).unwrap();
    let step = CumulantTensor::from_oracle(&model.step_law(), 4);
    let walk = model.cumulant_tensor(4);
    for flat in 0..3usize.pow(4) {
        let mut idx = [0usize; 4];
        let mut f = flat;
        for slot in idx.iter_mut() {
            *slot = f % 3;
            f /= 3;
        }
        assert_close(
            walk.get(&idx),
            500.0 * step.get(&idx),
            1e-10,
            "n-fold convolution tensor",
        );
    }
}

#[test]
fn lattice_endpoint_moments() {
    let d = 2;
    let n = 64u64;
    let model = LatticeWalkModel::new(d, n).unwrap();
    let mut rng = RngStream::new(11, 0).rng();
    let reps = 40_000usize;
    let mut mean = [0.0f64; 2];
    let mut cov = [[0.0f64; 2]; 2];
    for _ in 0..reps {
        let x = model.sample_endpoint(&mut rng);
        assert_eq!(x.len(), d);
        // parity: coordinates sum to n mod 2
        assert_eq!((x[0] + x[1]).rem_euclid(2), (n as i64).rem_euclid(2));
        for i in 0..d {
            mean[i] += x[i] as f64;
            for j in 0..d {
                cov[i][j] += (x[i] * x[j]) as f64;
            }
        }
    }
    let rf = reps as f64;
    let sd = (n as f64 / d as f64 / rf).sqrt();
    for i in 0..d {
        assert!(
            (mean[i] / rf).abs() < 5.0 * sd,
            "endpoint mean {} too far from 0",
            mean[i] / rf
        );
        assert_rel(
            cov[i][i] / rf,
            n as f64 / d as f64,
            0.03,
            "endpoint variance n/d",
        );
    }
    assert!(
        (cov[0][1] / rf).abs() < 0.05 * n as f64 / d as f64,
        "endpoint cross covariance should vanish"
    );
}

#[test]
fn lattice_mc_parameters() {
    let model = LatticeWalkModel::new(3, 10_000).unwrap();
    let (v, n, big_d, a, k) = model.mc_params();
    assert_eq!(v, 4);
    assert_close(n, 10_000.0, 0.0, "N = n");
    assert_close(big_d, 1.0, 0.0, "D = 1 for independent steps");
    assert_close(a, 1.0, 0.0, "steps are bounded by 1");
    for i in 0..3 {
        assert_close(k.matrix()[(i, i)], 1.0 / 3.0, 1e-14, "K = I/d");
    }
    assert_close(model.t_n(), 100.0, 1e-10, "t_n = sqrt(n)");
    let psi = model.residue();
    let z: [f64; 3] = [0.0, 0.0, 0.0];
    assert_close(psi.eval(&z).unwrap(), 1.0, 0.0, "residue at the origin");
}

// ---------- circle walk ----------

#[test]
fn circle_limit_covariance_values() {
    let k = circle_limit_k(1.0);
    let e1 = (-1.0f64).exp();
    let e2 = (-2.0f64).exp();
    assert_close(
        k.matrix()[(0, 0)],
        (1.0 - 2.0 * e1 - e2) / 2.0,
        1e-15,
        "K11(1)",
    );
    assert_close(
        k.matrix()[(1, 1)],
        (1.0 - e1) * (1.0 - e1) / 2.0,
        1e-15,
        "K22(1)",
    );
    assert_close(k.matrix()[(0, 1)], 0.0, 0.0, "K is diagonal");
}

#[test]
fn circle_exact_cov_converges_to_limit() {
    let lambda = 0.7;
    let k = circle_limit_k(lambda);
    let mut prev = f64::INFINITY;
    for &d_big in &[10usize, 40, 160] {
        let model = CircleWalkModel::new(20 * d_big, d_big, lambda).unwrap();
        let (n, dd) = model.graph_params();
        let scaled = model.exact_covariance() / (n * dd);
        let err = (scaled[(0, 0)] - k.matrix()[(0, 0)]).abs()
            + (scaled[(1, 1)] - k.matrix()[(1, 1)]).abs();
        assert!(err < prev, "covariance error should decrease with D");
        prev = err;
    }
    assert!(prev < 1e-2, "rescaled covariance far from K: err {prev}");
}

#[test]
fn circle_density_normalization_and_fourier() {
    for &lambda in &[0.3, 1.0, 4.0] {
        let mass = adaptive_simpson(&|t| circle_density(lambda, t).unwrap(), -PI, PI, 1e-10);
        assert_close(mass, 1.0, 1e-8, "wrapped density mass");
        for &theta in &[0.0, 0.5, 1.9, -2.8] {
            assert_close(
                circle_density(lambda, theta).unwrap(),
                circle_density_fourier(lambda, theta).unwrap(),
                1e-12,
                "theta-series vs cosine series",
            );
        }
    }
    assert_close(circle_fourier_coeff(2.0, 3), (-9.0f64).exp(), 1e-18, "c_3");
    assert!(circle_density(0.0, 0.1).is_err());
}

#[test]
fn circle_walk_sample_mean() {
    let model = CircleWalkModel::new(60, 6, 1.0, ).unwrap();
    assert!(model.regime_ok());
    let mut rng = RngStream::new(12, 0).rng();
    let reps = 4000;
    let mut m = [0.0f64; 2];
    for _ in 0..reps {
        let s = model.sample_sum(&mut rng);
        m[0] += s[0];
        m[1] += s[1];
    }
    let exact = model.mean();
    // sd of each component of S_n is of order sqrt(N D K)
    let tol = 5.0 * (60.0 * 11.0f64).sqrt() / (reps as f64).sqrt();
    assert_close(m[0] / reps as f64, exact[0], tol, "E[Re S]");
    assert_close(m[1] / reps as f64, exact[1], tol, "E[Im S]");
}

#[test]
fn circle_walk_domain_checks() {
    assert!(CircleWalkModel::new(10, 5, 1.0).is_err());
    assert!(CircleWalkModel::new(100, 0, 1.0).is_err());
    assert!(CircleWalkModel::new(100, 5, 0.0).is_err());
    // D = 2 with huge N fails the N^{1/3} = O(D) heuristic
    assert!(!CircleWalkModel::new(1_000_000, 2, 1.0).unwrap().regime_ok());
}

// ---------- sphere walk ----------

#[test]
fn sphere_heat_density_matches_circle_at_d2() {
    // on S^1 the heat density relative to uniform is 2 pi times the wrapped
    // Gaussian minus the constant mode
    for &t in &[0.5, 1.5] {
        for &theta in &[0.0f64, 0.8, 2.4] {
            let sphere = sphere_heat_density(2, t, theta.cos()).unwrap();
            let circle = 2.0 * PI * circle_density(t, theta).unwrap();
            assert_close(sphere + 1.0, circle, 1e-10, "S^1 heat kernel");
        }
    }
}

#[test]
fn sphere_heat_density_normalized_on_s2() {
    // the last coordinate of a uniform point on S^2 is uniform on [-1, 1]
    for &t in &[0.4, 1.0] {
        let (nodes, weights) = gauss_legendre_on(64, -1.0, 1.0);
        let mass: f64 = nodes
            .iter()
            .zip(&weights)
            .map(|(&x, &w)| w * sphere_heat_density(3, t, x).unwrap())
            .sum();
        assert_close(mass / 2.0, 1.0, 1e-10, "S^2 heat kernel mass");
    }
    // long time: flat
    assert_close(
        sphere_heat_density(3, 50.0, 0.3).unwrap(),
        1.0,
        1e-12,
        "equilibrium density",
    );
    assert!(sphere_heat_density(3, 0.0, 0.5).is_err());
    assert!(sphere_heat_density(1, 1.0, 0.5).is_err());
    assert!(sphere_heat_density(3, 1.0, 1.5).is_err());
}

#[test]
fn sphere_limit_k_reduces_to_circle() {
    let lambda = 0.9;
    let kc = circle_limit_k(lambda);
    let ks = sphere_limit_k(2, lambda).unwrap();
    // sphere convention puts the distinguished (mean) axis last
    assert_close(ks.matrix()[(1, 1)], kc.matrix()[(0, 0)], 1e-14, "K_dd");
    assert_close(ks.matrix()[(0, 0)], kc.matrix()[(1, 1)], 1e-14, "K_kk");
    assert!(sphere_limit_k(1, 1.0).is_err());
    assert!(sphere_limit_k(3, -1.0).is_err());
}

#[test]
fn rodrigues_rotations() {
    let r = rodrigues(&Vector3::new(0.0, 0.0, PI / 2.0));
    let v = r * Vector3::new(1.0, 0.0, 0.0);
    assert_close(v[0], 0.0, 1e-14, "quarter turn x");
    assert_close(v[1], 1.0, 1e-14, "quarter turn y");
    let w = Vector3::new(0.3, -0.7, 0.2);
    let r = rodrigues(&w);
    let err = (r.transpose() * r - nalgebra::Matrix3::identity()).norm();
    assert!(err < 1e-13, "rodrigues output not orthogonal: {err}");
    assert_close(r.determinant(), 1.0, 1e-13, "proper rotation");
    // the axis is fixed
    assert!((r * w - w).norm() < 1e-13);
}

#[test]
fn sphere_walk_sample_mean() {
    let model = SphereWalkModel::new(30, 3, 0.5, 8).unwrap();
    let mut rng = RngStream::new(13, 0).rng();
    let reps = 600;
    let mut m = [0.0f64; 3];
    for _ in 0..reps {
        let s = model.sample_sum(&mut rng);
        for i in 0..3 {
            m[i] += s[i];
        }
    }
    let exact = model.mean();
    // generous tolerance: MC noise plus the O(lambda/substeps) substep bias
    let tol = 6.0 * (30.0 * 7.0f64).sqrt() / (reps as f64).sqrt() + 0.05 * exact[2];
    for i in 0..3 {
        assert_close(m[i] / reps as f64, exact[i], tol, "sphere walk mean");
    }
    assert!(SphereWalkModel::new(10, 5, 0.5, 8).is_err());
    assert!(SphereWalkModel::new(30, 3, 0.5, 0).is_err());
}

// ---------- CUE ----------

#[test]
fn cue_laplace_basics() {
    for &n in &[1usize, 2, 5, 20] {
        assert_close(cue_laplace_exact(n, 0.0, 0.0).unwrap(), 1.0, 1e-12, "psi_n(0)");
    }
    // real axis: prod Gamma(j) Gamma(j + z) / Gamma(j + z/2)^2
    let (n, z1) = (6usize, 0.8);
    let mut log = 0.0;
    for j in 1..=n {
        let jf = j as f64;
        log += ln_gamma(jf) + ln_gamma(jf + z1) - 2.0 * ln_gamma(jf + z1 / 2.0);
    }
    assert_rel(
        cue_laplace_exact(n, z1, 0.0).unwrap(),
        log.exp(),
        1e-12,
        "real-axis gamma product",
    );
    // even in z2 (conjugate pair)
    assert_rel(
        cue_laplace_exact(5, 0.4, 0.9).unwrap(),
        cue_laplace_exact(5, 0.4, -0.9).unwrap(),
        1e-13,
        "z2 symmetry",
    );
    assert!(cue_laplace_exact(3, -1.0, 0.0).is_err());
    assert_close(cue_t_n(100), 100.0f64.ln() / 2.0, 1e-15, "t_n");
}

#[test]
fn cue_eigenphases_shape() {
    let mut rng = RngStream::new(14, 0).rng();
    let n = 7;
    let mut mean_sum = 0.0;
    let reps = 200;
    for _ in 0..reps {
        let phases = haar_eigenphases(n, &mut rng);
        assert_eq!(phases.len(), n);
        for &t in &phases {
            assert!(t > 0.0 && t < 2.0 * PI, "phase out of range: {t}");
        }
        mean_sum += phases.iter().sum::<f64>();
    }
    // by rotation symmetry each phase is uniform on (0, 2 pi)
    let avg = mean_sum / (reps * n) as f64;
    assert_close(avg, PI, 0.15, "mean eigenphase");
}

#[test]
fn cue_logdet_mc_matches_exact() {
    let n = 8;
    let (z1, z2) = (0.5, 0.0);
    let exact = cue_laplace_exact(n, z1, z2).unwrap();
    let mut rng = RngStream::new(15, 0).rng();
    let reps = 4000usize;
    let (mut acc, mut acc2) = (0.0, 0.0);
    for _ in 0..reps {
        let x = sample_cue_logdet(n, &mut rng);
        let v = (z1 * x[0] + z2 * x[1]).exp();
        acc += v;
        acc2 += v * v;
    }
    let mean = acc / reps as f64;
    let se = ((acc2 / reps as f64 - mean * mean) / reps as f64).sqrt();
    assert!(
        (mean - exact).abs() < 4.0 * se + 0.02 * exact,
        "MC Laplace transform {mean} vs exact {exact} (se {se})"
    );
}

// ---------- Erdos-Renyi ----------

/// Embedding count by brute force over all injective vertex maps.
fn brute_embeddings(motif: &Motif, g: &Graph) -> f64 {
    fn rec(motif: &Motif, g: &Graph, assign: &mut Vec<usize>, used: &mut Vec<bool>) -> f64 {
        let depth = assign.len();
        if depth == motif.k {
            return 1.0;
        }
        let mut total = 0.0;
        'cand: for v in 0..g.n {
            if used[v] {
                continue;
            }
            for &(a, b) in &motif.edges {
                let (lo, hi) = (a.min(b), a.max(b));
                if hi == depth && !g.has(assign[lo], v) {
                    continue 'cand;
                }
            }
            assign.push(v);
            used[v] = true;
            total += rec(motif, g, assign, used);
            used[v] = false;
            assign.pop();
        }
        total
    }
    rec(motif, g, &mut Vec::new(), &mut vec![false; g.n])
}

fn brute_triangles(g: &Graph) -> u64 {
    let mut t = 0;
    for i in 0..g.n {
        for j in i + 1..g.n {
            for k in j + 1..g.n {
                if g.has(i, j) && g.has(j, k) && g.has(i, k) {
                    t += 1;
                }
            }
        }
    }
    t
}

#[test]
fn embedding_counts_match_brute_force() {
    let mut rng = RngStream::new(16, 0).rng();
    let motifs = vec![
        Motif::edge_padded(3),
        Motif::triangle_padded(3),
        Motif::new(3, vec![(0, 1), (1, 2)]).unwrap(),
        Motif::new(4, vec![(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap(),
        Motif::new(4, vec![(0, 1)]).unwrap(),
        Motif::new(3, vec![]).unwrap(),
    ];
    for trial in 0..20 {
        let p = 0.2 + 0.03 * trial as f64;
        let g = Graph::sample(9, p, &mut rng);
        assert_eq!(g.triangle_count(), brute_triangles(&g));
        for m in &motifs {
            assert_close(
                count_embeddings(m, &g),
                brute_embeddings(m, &g),
                1e-9,
                "embedding count",
            );
        }
    }
}

#[test]
fn er_mean_formula() {
    let motifs = vec![Motif::edge_padded(3), Motif::triangle_padded(3)];
    let model = ErdosRenyiModel::new(20, 0.3, motifs.clone()).unwrap();
    // E[I(H)] = n^(falling k) p^h
    assert_close(
        model.mean(&motifs[0]),
        20.0 * 19.0 * 18.0 * 0.3,
        1e-9,
        "edge motif mean",
    );
    assert_close(
        model.mean(&motifs[1]),
        20.0 * 19.0 * 18.0 * 0.3f64.powi(3),
        1e-9,
        "triangle motif mean",
    );
    let mut rng = RngStream::new(17, 0).rng();
    let reps = 3000usize;
    let mut sums = vec![0.0; 2];
    for _ in 0..reps {
        let s = model.sample_counts(&mut rng);
        for i in 0..2 {
            sums[i] += s[i];
        }
    }
    // centered counts should average near zero; scale by the count sd
    // (of order n^{k-1} = n^2)
    for i in 0..2 {
        let avg = sums[i] / reps as f64;
        assert!(
            avg.abs() < 5.0 * 400.0 / (reps as f64).sqrt() * 3.0,
            "centered motif count mean too large: {avg}"
        );
    }
}

#[test]
fn er_projection_identities() {
    let motifs = vec![Motif::edge_padded(3), Motif::triangle_padded(3)];
    let model = ErdosRenyiModel::new(50, 0.3, motifs).unwrap();
    let w = model.w();
    assert_close(w[0], 0.3, 1e-15, "w edge = h p^h");
    assert_close(w[1], 3.0 * 0.3f64.powi(3), 1e-15, "w triangle");
    // projecting a multiple of w recovers the coefficient with no residual
    let s: Vec<f64> = w.iter().map(|x| 7.5 * x).collect();
    assert_close(model.projection(&s), 7.5, 1e-12, "projection of c w");
    assert_close(model.projection_residual(&s), 0.0, 1e-18, "residual of c w");
    // leading covariance is the announced rank-one matrix
    let cov = model.leading_cov();
    let c = 2.0 * (1.0 / 0.3 - 1.0) * 50.0f64.powi(4);
    for i in 0..2 {
        for j in 0..2 {
            assert_rel(cov[(i, j)], c * w[i] * w[j], 1e-12, "leading covariance");
        }
    }
    // standardized projection divides by sqrt of the limiting variance
    let sp = model.standardized_projection(&s);
    assert_close(
        sp,
        7.5 / ((2.0f64 * (1.0 / 0.3 - 1.0)).sqrt() * 50.0f64.powi(2)),
        1e-12,
        "standardized projection",
    );
}

#[test]
fn er_domain_checks() {
    assert!(Motif::new(6, vec![(0, 1)]).is_err());
    assert!(Motif::new(3, vec![(0, 0)]).is_err());
    assert!(Motif::new(3, vec![(0, 1), (1, 0)]).is_err());
    assert!(Motif::new(3, vec![(0, 3)]).is_err());
    assert!(ErdosRenyiModel::new(500, 0.3, vec![Motif::edge_padded(3)]).is_err());
    assert!(ErdosRenyiModel::new(50, 0.0, vec![Motif::edge_padded(3)]).is_err());
    assert!(ErdosRenyiModel::new(50, 1.0, vec![Motif::edge_padded(3)]).is_err());
    assert!(ErdosRenyiModel::new(50, 0.3, vec![]).is_err());
    assert!(
        ErdosRenyiModel::new(50, 0.3, vec![Motif::edge_padded(3), Motif::edge_padded(4)]).is_err()
    );
}

// ---------- Markov chains ----------

fn two_state(a: f64, b: f64) -> MarkovModel {
    MarkovModel::new(DMatrix::from_row_slice(2, 2, &[1.0 - a, a, b, 1.0 - b])).unwrap()
}

#[test]
fn markov_two_state_closed_forms() {
    let (a, b) = (0.3, 0.1);
    let m = two_state(a, b);
    assert_close(m.pi[0], b / (a + b), 1e-12, "pi_0");
    assert_close(m.pi[1], a / (a + b), 1e-12, "pi_1");
    assert!(m.reversible, "every two-state ergodic chain is reversible");
    // second eigenvalue of P is 1 - a - b
    assert_close(m.theta_p(), 1.0 - a - b, 1e-10, "theta_P = |lambda_2|");
    // K_00 = pi_0 pi_1 (1 + r) / (1 - r) with r = lambda_2
    let r = 1.0 - a - b;
    let k = m.markov_k();
    let k00 = m.pi[0] * m.pi[1] * (1.0 + r) / (1.0 - r);
    assert_close(k[(0, 0)], k00, 1e-12, "K_00 closed form");
    assert_close(k[(0, 0)] + k[(0, 1)], 0.0, 1e-12, "K rows sum to zero");
    assert_close(k[(0, 1)], k[(1, 0)], 1e-14, "K symmetric");
}

#[test]
fn markov_exact_cov_approaches_n_k() {
    let p = DMatrix::from_row_slice(
        3,
        3,
        &[0.5, 0.3, 0.2, 0.1, 0.6, 0.3, 0.25, 0.25, 0.5],
    );
    let m = MarkovModel::new(p).unwrap();
    let k = m.markov_k();
    for i in 0..3 {
        let row: f64 = (0..3).map(|j| k[(i, j)]).sum();
        assert_close(row, 0.0, 1e-12, "K row sum");
    }
    let mut prev = f64::INFINITY;
    for &n in &[64usize, 256, 1024] {
        let c = m.exact_cov(n) / n as f64;
        let err = (&c - &k).amax();
        assert!(err < prev, "cov/n should approach K");
        prev = err;
    }
    assert!(prev < 1e-2, "cov/n far from K: {prev}");
}

#[test]
fn markov_iid_rows_reduce_to_multinomial() {
    // all rows equal: the chain is an iid categorical sequence
    let probs = [0.5, 0.3, 0.2];
    let p = DMatrix::from_fn(3, 3, |_, j| probs[j]);
    let m = MarkovModel::new(p).unwrap();
    for i in 0..3 {
        assert_close(m.pi[i], probs[i], 1e-12, "pi = row");
    }
    assert!(m.theta_p() < 1e-7, "theta_P of an iid chain");
    assert!(m.r_matrix().amax() < 1e-14, "R = 0");
    let k = m.markov_k();
    for i in 0..3 {
        for j in 0..3 {
            let del = if i == j { probs[i] } else { 0.0 };
            assert_close(k[(i, j)], del - probs[i] * probs[j], 1e-12, "multinomial K");
        }
    }
    // third tensor: only the coincident-time term survives, so it equals the
    // third joint cumulant tensor of one categorical indicator vector
    let atoms: Vec<(f64, Vec<f64>)> = (0..3)
        .map(|i| {
            let mut e = vec![0.0; 3];
            e[i] = 1.0;
            (probs[i], e)
        })
        .collect();
    let law = DiscreteDistribution::new(atoms).unwrap();
    let oracle = CumulantTensor::from_oracle(&law, 3);
    let tens = m.third_tensor(3);
    for i in 0..3 {
        for j in 0..3 {
            for l in 0..3 {
                assert_close(
                    tens.get(&[i, j, l]),
                    oracle.get(&[i, j, l]),
                    1e-10,
                    "iid third tensor",
                );
            }
        }
    }
}

#[test]
fn markov_empirical_samples() {
    let m = two_state(0.3, 0.2);
    let mut rng = RngStream::new(18, 0).rng();
    let n = 500;
    let reps = 2000usize;
    let mut cov00 = 0.0;
    for _ in 0..reps {
        let s = m.sample_empirical(n, &mut rng);
        assert_close(s[0] + s[1], 0.0, 1e-9, "centered counts sum to zero");
        cov00 += s[0] * s[0];
    }
    let k = m.markov_k();
    assert_rel(
        cov00 / reps as f64 / n as f64,
        k[(0, 0)],
        0.15,
        "empirical variance vs K",
    );
}

#[test]
fn markov_domain_checks() {
    // rows not stochastic
    assert!(MarkovModel::new(DMatrix::from_row_slice(2, 2, &[0.5, 0.4, 0.3, 0.7])).is_err());
    // periodic chain is not ergodic
    assert!(MarkovModel::new(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])).is_err());
    // 1 state rejected
    assert!(MarkovModel::new(DMatrix::from_row_slice(1, 1, &[1.0])).is_err());
}
