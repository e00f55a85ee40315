//! Residue functions psi, the spherical-sector tail formula, the cone
//! asymptotic, conditional angular densities, and tilted Monte Carlo.

use crate::cumulants::CumulantTensor;
use crate::mesh::build_mesh;
use crate::numeric::barnes::{barnes_g, barnes_g_conjugate_product};
use crate::numeric::quad::{adaptive_simpson, gauss_legendre_on};
use crate::numeric::rng::chunk_streams;
use crate::numeric::{RngStream, SpdMatrix};
use crate::{Error, Result};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Limiting residue function psi with psi(0) = 1.
#[derive(Clone, Debug)]
pub enum ResidueFunction {
    One,
    /// exp( (1/v!) L[z, .., z] )
    ExpTensor { v: usize, l: CumulantTensor },
    /// CUE log-determinant residue (d = 2):
    /// G(1 + (z1 + i z2)/2) G(1 + (z1 - i z2)/2) / G(1 + z1)
    CueBarnes,
    /// lattice walk with steps uniform on {+-e_i} in dimension d:
    /// exp( sum_i (1/d - 3/d^2) z_i^4 / 24 - sum_{i<j} z_i^2 z_j^2 / (4 d^2) )
    LatticeWalk4 { d: usize },
    /// nearest-neighbor table; must contain the origin with value 1
    Tabulated {
        points: Vec<Vec<f64>>,
        values: Vec<f64>,
    },
}

impl ResidueFunction {
    pub fn eval(&self, z: &[f64]) -> Result<f64> {
        match self {
            ResidueFunction::One => Ok(1.0),
            ResidueFunction::ExpTensor { v, l } => {
                Ok((l.contract(z) / crate::numeric::multiindex::fact(*v)).exp())
            }
            ResidueFunction::CueBarnes => {
                if z.len() != 2 {
                    return Err(Error::DimensionMismatch { expected: 2, got: z.len() });
                }
                let r = (z[0] * z[0] + z[1] * z[1]).sqrt();
                let theta = z[1].atan2(z[0]);
                let num = barnes_g_conjugate_product(1.0, r, theta)?;
                let den = barnes_g(1.0 + z[0])?;
                Ok(num / den)
            }
            ResidueFunction::LatticeWalk4 { d } => {
                if z.len() != *d {
                    return Err(Error::DimensionMismatch { expected: *d, got: z.len() });
                }
                let df = *d as f64;
                let mut log = 0.0;
                for zi in z {
                    log += (1.0 / df - 3.0 / (df * df)) * zi.powi(4) / 24.0;
                }
                for i in 0..*d {
                    for j in i + 1..*d {
                        // 6 arrangements of (i,i,j,j) times kappa_iijj = -1/d^2,
                        // divided by 4!
                        log -= z[i] * z[i] * z[j] * z[j] / (4.0 * df * df);
                    }
                }
                Ok(log.exp())
            }
            ResidueFunction::Tabulated { points, values } => {
                let (mut best, mut bd) = (0usize, f64::INFINITY);
                for (i, p) in points.iter().enumerate() {
                    let d2: f64 = p.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum();
                    if d2 < bd {
                        bd = d2;
                        best = i;
                    }
                }
                Ok(values[best])
            }
        }
    }

    /// Central-difference gradient.
    pub fn gradient(&self, z: &[f64], h: f64) -> Result<Vec<f64>> {
        let mut g = Vec::with_capacity(z.len());
        for i in 0..z.len() {
            let mut zp = z.to_vec();
            let mut zm = z.to_vec();
            zp[i] += h;
            zm[i] -= h;
            g.push((self.eval(&zp)? - self.eval(&zm)?) / (2.0 * h));
        }
        Ok(g)
    }
}

/// Region of the standardized unit sphere defining a sector.
#[derive(Clone, Debug)]
pub enum SectorRegion {
    Full,
    /// d = 2 angular interval [theta1, theta2]
    Angular { theta1: f64, theta2: f64 },
    /// facet indices of the canonical mesh at resolution m
    FacetCells { m: usize, indices: Vec<usize> },
}

impl SectorRegion {
    /// Membership of a unit direction (or any nonzero point: tested radially).
    pub fn contains(&self, s: &[f64]) -> bool {
        match self {
            SectorRegion::Full => true,
            SectorRegion::Angular { theta1, theta2 } => {
                let mut t = s[1].atan2(s[0]);
                if t < 0.0 {
                    t += 2.0 * PI;
                }
                // tolerate intervals specified beyond [0, 2pi)
                let (a, b) = (*theta1, *theta2);
                (t >= a && t <= b) || (t + 2.0 * PI >= a && t + 2.0 * PI <= b)
            }
            SectorRegion::FacetCells { m, indices } => {
                let d = s.len();
                match build_mesh(d, 1.0, *m) {
                    Ok(mesh) => match mesh.locate(s) {
                        Some(i) => indices.binary_search(&i).is_ok(),
                        None => false,
                    },
                    Err(_) => false,
                }
            }
        }
    }
}

/// Spherical sector B = S x [b, inf) with covariance K: the event
/// {x : ||K^{-1/2} x|| >= b and K^{-1/2} x / ||..|| in S}.
#[derive(Clone, Debug)]
pub struct SphericalSector {
    pub b: f64,
    pub region: SectorRegion,
    pub k: SpdMatrix,
}

impl SphericalSector {
    pub fn new(b: f64, region: SectorRegion, k: SpdMatrix) -> Result<Self> {
        if b <= 0.0 {
            return Err(Error::domain("sector radius must be positive"));
        }
        Ok(SphericalSector { b, region, k })
    }

    /// Membership of a point of the original (unstandardized) space in b*B.
    /// x is in B iff the standardized y = K^{-1/2} x has ||y|| >= b and
    /// direction in the region.
    pub fn contains(&self, x: &[f64]) -> bool {
        let y = self.k.whiten(x);
        let n = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        n >= self.b && self.region.contains(&y)
    }
}

/// Leading-order tail formula:
/// P[X_n in t_n B] ~ (t_n / 2 pi)^{d/2} (1 / (t_n b)) e^{-t_n b^2 / 2}
///                   * integral over the standardized radius-b sphere of
///                     psi(K^{-1/2} s) restricted to the region.
pub fn tail_probability_formula(
    t_n: f64,
    sector: &SphericalSector,
    psi: &ResidueFunction,
    m: usize,
) -> Result<f64> {
    let d = sector.k.dim();
    if t_n <= 0.0 {
        return Err(Error::domain("t_n must be positive"));
    }
    let b = sector.b;
    if d == 1 {
        // counting measure on S^0
        let mut integral = 0.0;
        let ks = sector.k.inv_sqrt()[(0, 0)];
        for s in [b, -b] {
            if sector.region.contains(&[s]) {
                integral += psi.eval(&[ks * s])?;
            }
        }
        if integral == 0.0 {
            return Err(Error::domain("zero-measure region"));
        }
        return Ok((t_n / (2.0 * PI)).sqrt() / (t_n * b) * (-t_n * b * b / 2.0).exp() * integral);
    }
    let mesh = build_mesh(d, b, m)?;
    let inv_sqrt = sector.k.inv_sqrt();
    let psi_fn = |s: &[f64]| -> f64 {
        let w: Vec<f64> = (0..d)
            .map(|i| (0..d).map(|j| inv_sqrt[(i, j)] * s[j]).sum())
            .collect();
        psi.eval(&w).unwrap_or(f64::NAN)
    };
    let region = |s: &[f64]| sector.region.contains(s);
    let integral = mesh.surface_integral(&psi_fn, &region, 16);
    if integral <= 0.0 {
        return Err(Error::domain("zero-measure region"));
    }
    let pref = (t_n / (2.0 * PI)).powf(d as f64 / 2.0) / (t_n * b) * (-t_n * b * b / 2.0).exp();
    Ok(pref * integral)
}

/// Base domain D_0 of a truncated cone, lying in the hyperplane through h
/// orthogonal to h.
#[derive(Clone, Debug)]
pub enum ConeBase {
    /// d = 2: interval [lo, hi] along the unit direction `dir` (orthogonal
    /// to h)
    Interval { dir: Vec<f64>, lo: f64, hi: f64 },
}

/// Cone asymptotic of P[X_n in t_n C] for C = {s w : w in h + D_0, s >= 1}:
/// e^{-t ||h||^2/2} psi_n(h) (2 pi)^{-d/2} t^{d/2 - 1}
///   * integral over D_0 of (1 + <grad psi(h), delta> / psi(h))
///     ||h|| e^{-t ||delta||^2/2} / (||h||^2 + ||delta||^2) d delta.
pub fn cone_tail_asymptotic(
    t_n: f64,
    h: &[f64],
    base: &ConeBase,
    psi: &ResidueFunction,
    psi_n_at_h: f64,
) -> Result<f64> {
    let d = h.len();
    let hn2: f64 = h.iter().map(|v| v * v).sum();
    let hn = hn2.sqrt();
    if hn <= 0.0 {
        return Err(Error::domain("cone foot h must be nonzero"));
    }
    let psi_h = psi.eval(h)?;
    if psi_h.abs() < 1e-300 {
        return Err(Error::domain("psi vanishes at the tilt point"));
    }
    let grad = psi.gradient(h, 1e-5)?;
    let integral = match base {
        ConeBase::Interval { dir, lo, hi } => {
            if d != 2 {
                return Err(Error::Order("interval base requires d = 2".into()));
            }
            let f = |s: f64| -> f64 {
                let delta: Vec<f64> = dir.iter().map(|&u| u * s).collect();
                let gdot: f64 = grad.iter().zip(&delta).map(|(a, b)| a * b).sum();
                (1.0 + gdot / psi_h) * hn * (-t_n * s * s / 2.0).exp() / (hn2 + s * s)
            };
            adaptive_simpson(&f, *lo, *hi, 1e-14)
        }
    };
    Ok((-t_n * hn2 / 2.0).exp() * psi_n_at_h * (2.0 * PI).powf(-(d as f64) / 2.0)
        * t_n.powf(d as f64 / 2.0 - 1.0)
        * integral)
}

/// Bounded law of the toy-model perturbation Y with exact Laplace transform.
#[derive(Clone, Debug)]
pub enum YLaw {
    Zero,
    /// uniform on [-half, half]^d
    UniformCube { half: f64 },
}

/// X_n = sqrt(t_n) G + Y with G standard Gaussian, Y independent bounded;
/// psi_n(z) = psi(z) = E[e^{<z, Y>}] exactly for every n.
#[derive(Clone, Debug)]
pub struct ToyModel {
    pub t_n: f64,
    pub d: usize,
    pub law: YLaw,
}

impl ToyModel {
    pub fn psi(&self, z: &[f64]) -> f64 {
        match &self.law {
            YLaw::Zero => 1.0,
            YLaw::UniformCube { half } => z
                .iter()
                .map(|&zi| {
                    let a = half * zi;
                    if a.abs() < 1e-6 {
                        1.0 + a * a / 6.0
                    } else {
                        a.sinh() / a
                    }
                })
                .product(),
        }
    }

    pub fn sample_y(&self, rng: &mut impl Rng) -> Vec<f64> {
        match &self.law {
            YLaw::Zero => vec![0.0; self.d],
            YLaw::UniformCube { half } => (0..self.d)
                .map(|_| half * (2.0 * rng.gen::<f64>() - 1.0))
                .collect(),
        }
    }

    /// Almost-sure bound on ||Y||.
    pub fn y_bound(&self) -> f64 {
        match &self.law {
            YLaw::Zero => 0.0,
            YLaw::UniformCube { half } => half * (self.d as f64).sqrt(),
        }
    }
}

/// Plain sample of X_n.
pub fn toy_sampler(model: &ToyModel, rng: &mut impl Rng) -> Vec<f64> {
    let st = model.t_n.sqrt();
    let y = model.sample_y(rng);
    (0..model.d)
        .map(|i| {
            let g: f64 = StandardNormal.sample(rng);
            st * g + y[i]
        })
        .collect()
}

/// Importance-sampled tail probability for the toy model: the Gaussian
/// component is tilted to mean sqrt(t_n) h and each sample carries the exact
/// Girsanov weight e^{-sqrt(t_n) <h, G> - t_n ||h||^2 / 2}. Unbiased for any
/// h; h = 0 is plain Monte Carlo. Deterministic under fixed (seed, chunking).
pub fn tilted_mc_tail(
    model: &ToyModel,
    event: &(dyn Fn(&[f64]) -> bool + Sync),
    h: &[f64],
    n_samples: u64,
    base: RngStream,
) -> (f64, f64) {
    let st = model.t_n.sqrt();
    let hn2: f64 = h.iter().map(|v| v * v).sum();
    let chunks = chunk_streams(base, n_samples, 1 << 16);
    let parts: Vec<(f64, f64)> = chunks
        .par_iter()
        .map(|(stream, count)| {
            let mut rng = stream.rng();
            let mut s1 = 0.0;
            let mut s2 = 0.0;
            for _ in 0..*count {
                let g: Vec<f64> = (0..model.d).map(|_| StandardNormal.sample(&mut rng)).collect();
                let y = model.sample_y(&mut rng);
                let x: Vec<f64> = (0..model.d)
                    .map(|i| st * (g[i] + st * h[i]) + y[i])
                    .collect();
                if event(&x) {
                    let hg: f64 = h.iter().zip(&g).map(|(a, b)| a * b).sum();
                    let w = (-st * hg - model.t_n * hn2 / 2.0).exp();
                    s1 += w;
                    s2 += w * w;
                }
            }
            (s1, s2)
        })
        .collect();
    let (sum, sumsq) = parts
        .iter()
        .fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
    let n = n_samples as f64;
    let mean = sum / n;
    let var = (sumsq / n - mean * mean).max(0.0) / n;
    (mean, var.sqrt())
}

/// Angular conditional density of the d = 2 lattice walk at radius r:
/// F(r, theta) = exp(-r^4 sin^2(2 theta) / 6) / normalization over [0, 2pi].
#[derive(Clone, Debug)]
pub struct LatticeAngularDensity {
    pub r: f64,
    norm: f64,
}

impl LatticeAngularDensity {
    pub fn new(r: f64) -> Self {
        let f = |t: f64| (-r.powi(4) * (2.0 * t).sin().powi(2) / 6.0).exp();
        // integrate one octant at a time: on [0, 2pi] the initial Simpson
        // nodes all sit on the period of sin^2(2t) and the estimate aliases
        let norm: f64 = (0..8)
            .map(|k| adaptive_simpson(&f, k as f64 * PI / 4.0, (k + 1) as f64 * PI / 4.0, 2e-13))
            .sum();
        LatticeAngularDensity { r, norm }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        (-self.r.powi(4) * (2.0 * theta).sin().powi(2) / 6.0).exp() / self.norm
    }

    /// Mass of [theta1, theta2].
    pub fn mass(&self, theta1: f64, theta2: f64) -> f64 {
        let f = |t: f64| self.eval(t);
        // split at the octant boundaries for the same aliasing reason
        let mut cuts = vec![theta1];
        let mut k = (theta1 / (PI / 4.0)).floor() + 1.0;
        while k * PI / 4.0 < theta2 {
            if k * PI / 4.0 > theta1 {
                cuts.push(k * PI / 4.0);
            }
            k += 1.0;
        }
        cuts.push(theta2);
        cuts.windows(2)
            .map(|w| adaptive_simpson(&f, w[0], w[1], 1e-13))
            .sum()
    }
}

/// Unnormalized conditional density on the unit sphere for the d >= 3
/// lattice walk: exp(-(r^4 / 12 d) sum_{i<j} (x_i x_j)^2). Caller normalizes
/// against a mesh integral.
pub fn lattice_density_unnormalized(r: f64, x: &[f64]) -> Result<f64> {
    let d = x.len();
    let n2: f64 = x.iter().map(|v| v * v).sum();
    if (n2 - 1.0).abs() > 1e-6 {
        return Err(Error::domain("point must lie on the unit sphere"));
    }
    let mut s = 0.0;
    for i in 0..d {
        for j in i + 1..d {
            s += (x[i] * x[j]).powi(2);
        }
    }
    Ok((-r.powi(4) / (12.0 * d as f64) * s).exp())
}

/// Loss-of-symmetry function of the CUE sector densities:
/// H(r, theta) = G(1 + (r/2) e^{i theta}) G(1 + (r/2) e^{-i theta})
///              / G(1 + r cos theta), for 0 <= r < 1.
pub fn cue_sector_density(r: f64, theta: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::domain("cue_sector_density needs 0 <= r < 1"));
    }
    if 1.0 + r * theta.cos() <= 0.0 {
        return Err(Error::domain("need 1 + r cos theta > 0"));
    }
    Ok(barnes_g_conjugate_product(1.0, r, theta)? / barnes_g(1.0 + r * theta.cos())?)
}

/// Gauss-Legendre helper for integrals of psi over an angular interval,
/// used by the d = 2 sector comparisons: (1/2pi) int psi(2 r e^{i th}) dth.
pub fn angular_residue_integral(
    psi: &ResidueFunction,
    scale: f64,
    theta1: f64,
    theta2: f64,
    nodes: usize,
) -> Result<f64> {
    let (xs, ws) = gauss_legendre_on(nodes, theta1, theta2);
    let mut acc = 0.0;
    for (x, w) in xs.iter().zip(&ws) {
        acc += w * psi.eval(&[scale * x.cos(), scale * x.sin()])?;
    }
    Ok(acc / (2.0 * PI))
}
