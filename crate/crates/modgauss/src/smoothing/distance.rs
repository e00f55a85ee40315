//! The Fourier-derivative distance Delta_eps, Berry-Esseen style constants,
//! and computable distance brackets: convex-family lower bounds and the
//! smoothing-based upper bound.

use crate::cumulants::SampleSet;
use crate::numeric::multiindex::indices_up_to;
use crate::numeric::quad::{adaptive_simpson, gauss_legendre_on};
use crate::numeric::{RngStream, SpdMatrix};
use crate::smoothing::fourier::FourierObject;
use crate::{Error, Result};
use rand::Rng;
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use std::f64::consts::PI;

pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2)
}

/// Half-width of the Delta_eps integration box.
pub fn delta_box_halfwidth(d: usize, eps: f64) -> f64 {
    ((2 * d + 2) as f64).powf(1.5) / eps
}

fn identical(a: &FourierObject, b: &FourierObject) -> bool {
    match (a, b) {
        (FourierObject::Empirical(x), FourierObject::Empirical(y)) => std::sync::Arc::ptr_eq(x, y),
        (FourierObject::Gaussian(x), FourierObject::Gaussian(y)) => {
            x.k.matrix() == y.k.matrix()
        }
        (FourierObject::Kernel(x), FourierObject::Kernel(y)) => {
            x.d == y.d && x.eps == y.eps
        }
        _ => false,
    }
}

/// Delta_eps(A, B): max over |beta| <= d+1 of the L^1 norm of
/// d^beta (A - B) over the box [-(2d+2)^{3/2}/eps, (2d+2)^{3/2}/eps]^d,
/// by tensor Gauss-Legendre quadrature with `nodes` points per axis.
pub fn delta_epsilon(
    a: &FourierObject,
    b: &FourierObject,
    eps: f64,
    d: usize,
    nodes: usize,
) -> Result<f64> {
    if eps <= 0.0 {
        return Err(Error::domain("eps must be positive"));
    }
    if a.dim() != d || b.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: a.dim() });
    }
    let empirical = matches!(a, FourierObject::Empirical(_))
        || matches!(b, FourierObject::Empirical(_));
    if empirical && d > 3 {
        return Err(Error::Order("empirical Delta_eps capped at d = 3".into()));
    }
    if identical(a, b) {
        return Ok(0.0);
    }
    let l = delta_box_halfwidth(d, eps);
    let (x1, w1) = gauss_legendre_on(nodes, -l, l);
    let betas = indices_up_to(d, d + 1);
    let total_nodes = nodes.pow(d as u32);
    // fixed chunking over flattened node indices; chunks reduced in order
    let chunk = 1 << 12;
    let n_chunks = (total_nodes + chunk - 1) / chunk;
    let partials: Vec<Vec<f64>> = (0..n_chunks)
        .into_par_iter()
        .map(|ci| {
            let mut acc = vec![0.0; betas.len()];
            let start = ci * chunk;
            let end = (start + chunk).min(total_nodes);
            let mut zeta = vec![0.0; d];
            for flat in start..end {
                let mut rem = flat;
                let mut w = 1.0;
                for k in 0..d {
                    let i = rem % nodes;
                    rem /= nodes;
                    zeta[k] = x1[i];
                    w *= w1[i];
                }
                let da = a.derivatives_all(&betas, &zeta);
                let db = b.derivatives_all(&betas, &zeta);
                for (j, (va, vb)) in da.iter().zip(&db).enumerate() {
                    acc[j] += w * (va - vb).norm();
                }
            }
            acc
        })
        .collect();
    let mut sums = vec![0.0; betas.len()];
    for p in partials {
        for (s, v) in sums.iter_mut().zip(p) {
            *s += v;
        }
    }
    Ok(sums.into_iter().fold(0.0f64, f64::max))
}

/// Regularity constant of a Gaussian with covariance K:
/// R = 2 sqrt((d+1) rho(K^{-1})).
pub fn gaussian_regularity_constant(k: &SpdMatrix) -> f64 {
    let d = k.dim() as f64;
    2.0 * ((d + 1.0) * k.rho_inv()).sqrt()
}

/// d_convex(mu, nu) <= 2/(1 - 4/(9 pi)) * ((d+1)^{(d+1)/2} Delta + R eps),
/// requiring eps < 1/sqrt(2d+2).
pub fn convex_distance_upper_bound(delta: f64, r_const: f64, eps: f64, d: usize) -> Result<f64> {
    if eps <= 0.0 || eps >= 1.0 / ((2 * d + 2) as f64).sqrt() {
        return Err(Error::domain("need 0 < eps < 1/sqrt(2d+2)"));
    }
    let df = d as f64;
    Ok(2.0 / (1.0 - 4.0 / (9.0 * PI)) * ((df + 1.0).powf((df + 1.0) / 2.0) * delta + r_const * eps))
}

/// The explicit constant of the general Berry-Esseen estimate (d >= 2):
/// 2 rho(K^{-1/2}) / (1 - 4/(9 pi)) *
///   ((2 pi / e)^{d/2} (d+1)^{3d/2 + 13/4} tau(K)^{d/2+1} M(B)
///    + 2 sqrt((d+1) tau(K)) / B).
pub fn berry_esseen_constant(d: usize, k: &SpdMatrix, m_b: f64, b: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::domain("the estimate is stated for d >= 2"));
    }
    if m_b <= 0.0 || b <= 0.0 {
        return Err(Error::domain("M(B) and B must be positive"));
    }
    let df = d as f64;
    let rho_inv_sqrt = k.rho_inv().sqrt(); // rho(K^{-1/2})
    let tau = k.tau();
    let main = (2.0 * PI / std::f64::consts::E).powf(df / 2.0)
        * (df + 1.0).powf(1.5 * df + 3.25)
        * tau.powf(df / 2.0 + 1.0)
        * m_b;
    let tail = 2.0 * ((df + 1.0) * tau).sqrt() / b;
    Ok(2.0 * rho_inv_sqrt / (1.0 - 4.0 / (9.0 * PI)) * (main + tail))
}

/// Mixed partial derivative d^alpha f at x by nested central differences.
pub fn fd_partial(f: &dyn Fn(&[f64]) -> f64, alpha: &[usize], x: &[f64], h: f64) -> f64 {
    match alpha.iter().position(|&a| a > 0) {
        None => f(x),
        Some(i) => {
            let mut a2 = alpha.to_vec();
            a2[i] -= 1;
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] += h;
            xm[i] -= h;
            (fd_partial(f, &a2, &xp, h) - fd_partial(f, &a2, &xm, h)) / (2.0 * h)
        }
    }
}

/// M(B): sup over a 33^d grid on the cube of half-width B (2d+2)^{3/2} of
/// max_{|alpha| <= d+1} |d^alpha theta|. Returns (sup, grid spacing).
pub fn residue_sup_m(theta: &(dyn Fn(&[f64]) -> f64 + Sync), b: f64, d: usize) -> (f64, f64) {
    let half = b * ((2 * d + 2) as f64).powf(1.5);
    let npts = 33usize;
    let spacing = 2.0 * half / (npts - 1) as f64;
    let alphas = indices_up_to(d, d + 1);
    let total = npts.pow(d as u32);
    let sup = (0..total)
        .into_par_iter()
        .map(|flat| {
            let mut rem = flat;
            let mut x = vec![0.0; d];
            for k in 0..d {
                x[k] = -half + spacing * (rem % npts) as f64;
                rem /= npts;
            }
            alphas
                .iter()
                .map(|a| fd_partial(theta, &a.0, &x, 1e-2).abs())
                .fold(0.0f64, f64::max)
        })
        .reduce(|| 0.0f64, f64::max);
    (sup, spacing)
}

/// A single convex test set with decidable membership and an exact Gaussian
/// probability under N(0, K).
#[derive(Clone, Debug)]
pub enum ConvexSet {
    /// {x : <u, x> <= c}, u unit
    HalfSpace { u: Vec<f64>, c: f64 },
    Ball { center: Vec<f64>, r: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// intersection of half-spaces (d = 2 only for probabilities)
    Polytope { faces: Vec<(Vec<f64>, f64)> },
}

impl ConvexSet {
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            ConvexSet::HalfSpace { u, c } => dot(u, x) <= *c,
            ConvexSet::Ball { center, r } => {
                x.iter()
                    .zip(center)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    <= r * r
            }
            ConvexSet::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(&xi, (&l, &h))| xi >= l && xi <= h),
            ConvexSet::Polytope { faces } => faces.iter().all(|(u, c)| dot(u, x) <= *c),
        }
    }

    /// Exact probability under N(0, K).
    pub fn gaussian_probability(&self, k: &SpdMatrix) -> Result<f64> {
        let d = k.dim();
        match self {
            ConvexSet::HalfSpace { u, c } => {
                let sigma = k.quad_form(u).sqrt();
                Ok(std_normal_cdf(c / sigma))
            }
            ConvexSet::Ball { center, r } => {
                // requires K = sigma^2 I
                let s2 = k.matrix()[(0, 0)];
                let iso = (0..d).all(|i| (k.matrix()[(i, i)] - s2).abs() < 1e-12 * s2)
                    && k.is_diagonal(1e-12);
                if !iso {
                    return Err(Error::domain("ball probabilities need K = sigma^2 I"));
                }
                let s = s2.sqrt();
                let delta = dot(center, center).sqrt() / s;
                let rr = r / s;
                if d == 1 {
                    return Ok(std_normal_cdf(delta + rr) - std_normal_cdf(delta - rr));
                }
                let chi = ChiSquared::new((d - 1) as f64).unwrap();
                let f = |x: f64| -> f64 {
                    let rem = rr * rr - (x - delta) * (x - delta);
                    if rem <= 0.0 {
                        return 0.0;
                    }
                    (-0.5 * x * x).exp() / (2.0 * PI).sqrt() * chi.cdf(rem)
                };
                Ok(adaptive_simpson(&f, delta - rr, delta + rr, 1e-10))
            }
            ConvexSet::Box { lo, hi } => {
                if !k.is_diagonal(1e-12) {
                    return Err(Error::domain("box probabilities need diagonal K"));
                }
                let mut p = 1.0;
                for i in 0..d {
                    let s = k.matrix()[(i, i)].sqrt();
                    p *= std_normal_cdf(hi[i] / s) - std_normal_cdf(lo[i] / s);
                }
                Ok(p)
            }
            ConvexSet::Polytope { faces } => {
                if d != 2 {
                    return Err(Error::Order("polytope probabilities implemented for d = 2".into()));
                }
                // whiten: x = K^{1/2} z turns <u,x> <= c into <K^{1/2}u, z> <= c
                let sq = k.sqrt();
                let wfaces: Vec<(f64, f64, f64)> = faces
                    .iter()
                    .map(|(u, c)| {
                        let a = sq[(0, 0)] * u[0] + sq[(1, 0)] * u[1];
                        let b = sq[(0, 1)] * u[0] + sq[(1, 1)] * u[1];
                        (a, b, *c)
                    })
                    .collect();
                let f = |z1: f64| -> f64 {
                    let mut lo = -12.0f64;
                    let mut hi = 12.0f64;
                    for &(a, b, c) in &wfaces {
                        if b.abs() < 1e-14 {
                            if a * z1 > c {
                                return 0.0;
                            }
                        } else if b > 0.0 {
                            hi = hi.min((c - a * z1) / b);
                        } else {
                            lo = lo.max((c - a * z1) / b);
                        }
                    }
                    if hi <= lo {
                        return 0.0;
                    }
                    (-0.5 * z1 * z1).exp() / (2.0 * PI).sqrt()
                        * (std_normal_cdf(hi) - std_normal_cdf(lo))
                };
                Ok(adaptive_simpson(&f, -12.0, 12.0, 1e-10))
            }
        }
    }
}

/// Parametric families of convex test sets.
#[derive(Clone, Debug)]
pub enum ConvexFamily {
    HalfSpaces {
        directions: Vec<Vec<f64>>,
        offsets: Vec<f64>,
    },
    Balls {
        centers: Vec<Vec<f64>>,
        radii: Vec<f64>,
    },
    AxisBoxes {
        grid: Vec<f64>,
    },
    RandomPolytopes {
        seed: u64,
        face_count: usize,
        count: usize,
    },
}

impl ConvexFamily {
    /// Default half-space directions: coordinate axes plus all-ones
    /// diagonals, offsets on a symmetric grid.
    pub fn default_halfspaces(d: usize) -> Self {
        let mut directions = Vec::new();
        for i in 0..d {
            for s in [1.0, -1.0] {
                let mut u = vec![0.0; d];
                u[i] = s;
                directions.push(u);
            }
        }
        let diag = (1.0 / (d as f64).sqrt()).to_owned();
        directions.push(vec![diag; d]);
        directions.push(vec![-diag; d]);
        let offsets = (-8..=8).map(|k| 0.25 * k as f64).collect();
        ConvexFamily::HalfSpaces { directions, offsets }
    }

    pub fn default_balls(d: usize) -> Self {
        let mut centers = vec![vec![0.0; d]];
        for i in 0..d {
            let mut c = vec![0.0; d];
            c[i] = 1.0;
            centers.push(c);
        }
        ConvexFamily::Balls {
            centers,
            radii: vec![0.5, 1.0, 1.5, 2.0, 3.0],
        }
    }

    pub fn default_boxes() -> Self {
        ConvexFamily::AxisBoxes {
            grid: vec![-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0],
        }
    }

    pub fn members(&self, d: usize) -> Vec<ConvexSet> {
        match self {
            ConvexFamily::HalfSpaces { directions, offsets } => directions
                .iter()
                .flat_map(|u| {
                    offsets.iter().map(move |&c| ConvexSet::HalfSpace {
                        u: u.clone(),
                        c,
                    })
                })
                .collect(),
            ConvexFamily::Balls { centers, radii } => centers
                .iter()
                .flat_map(|c| {
                    radii.iter().map(move |&r| ConvexSet::Ball {
                        center: c.clone(),
                        r,
                    })
                })
                .collect(),
            ConvexFamily::AxisBoxes { grid } => {
                // all boxes with per-axis bounds taken from the grid
                let mut intervals = Vec::new();
                for i in 0..grid.len() {
                    for j in i + 1..grid.len() {
                        intervals.push((grid[i], grid[j]));
                    }
                }
                let mut out: Vec<(Vec<f64>, Vec<f64>)> = vec![(vec![], vec![])];
                for _ in 0..d {
                    let mut next = Vec::new();
                    for (lo, hi) in &out {
                        for &(a, b) in &intervals {
                            let mut l = lo.clone();
                            let mut h = hi.clone();
                            l.push(a);
                            h.push(b);
                            next.push((l, h));
                        }
                    }
                    out = next;
                }
                out.into_iter()
                    .map(|(lo, hi)| ConvexSet::Box { lo, hi })
                    .collect()
            }
            ConvexFamily::RandomPolytopes {
                seed,
                face_count,
                count,
            } => {
                let mut rng = RngStream::new(*seed, 0).rng();
                (0..*count)
                    .map(|_| {
                        let faces = (0..*face_count)
                            .map(|_| {
                                let mut u: Vec<f64> = (0..d)
                                    .map(|_| {
                                        let v: f64 = rng.gen::<f64>() * 2.0 - 1.0;
                                        v
                                    })
                                    .collect();
                                let norm = dot(&u, &u).sqrt().max(1e-9);
                                u.iter_mut().for_each(|x| *x /= norm);
                                let c = 0.2 + 1.8 * rng.gen::<f64>();
                                (u, c)
                            })
                            .collect();
                        ConvexSet::Polytope { faces }
                    })
                    .collect()
            }
        }
    }
}

/// Lower bound on d_convex(law of samples, N(0,K)): max over the family of
/// |empirical probability - exact Gaussian probability|.
pub fn convex_distance_lower_bound(
    samples: &SampleSet,
    k: &SpdMatrix,
    family: &ConvexFamily,
) -> Result<f64> {
    let d = samples.dim;
    let n = samples.len();
    let mut best: f64 = 0.0;
    for set in family.members(d) {
        let exact = set.gaussian_probability(k)?;
        let mut hits = 0usize;
        for i in 0..n {
            if set.contains(samples.row(i)) {
                hits += 1;
            }
        }
        best = best.max((hits as f64 / n as f64 - exact).abs());
    }
    Ok(best)
}

/// Kolmogorov distance between an empirical sample and a reference cdf.
pub fn kolmogorov_distance_1d(samples: &[f64], cdf: &dyn Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs());
        d = d.max((f - (i as f64 + 1.0) / n).abs());
    }
    d
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
