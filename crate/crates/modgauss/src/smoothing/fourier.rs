//! Fourier transforms with exact partial derivatives up to order d+1:
//! Gaussians (Hermite-type polynomial recursion), modified Gaussians with a
//! first-order residue correction, empirical transforms, and the smoothing
//! kernel transform.

use crate::cumulants::SampleSet;
use crate::numeric::multiindex::MultiIndex;
use crate::numeric::SpdMatrix;
use crate::smoothing::kernel::SmoothingKernel;
use num_complex::Complex64;
use std::collections::HashMap;
use std::sync::Arc;

/// Sparse polynomial in d variables.
#[derive(Clone, Debug)]
struct Poly {
    d: usize,
    terms: HashMap<Vec<usize>, f64>,
}

impl Poly {
    fn one(d: usize) -> Self {
        let mut terms = HashMap::new();
        terms.insert(vec![0; d], 1.0);
        Poly { d, terms }
    }

    fn add_term(&mut self, mono: Vec<usize>, c: f64) {
        let e = self.terms.entry(mono).or_insert(0.0);
        *e += c;
        if e.abs() < 1e-300 {
            // keep map tidy
        }
    }

    fn diff(&self, i: usize) -> Poly {
        let mut out = Poly {
            d: self.d,
            terms: HashMap::new(),
        };
        for (mono, &c) in &self.terms {
            if mono[i] > 0 {
                let mut m = mono.clone();
                m[i] -= 1;
                out.add_term(m, c * mono[i] as f64);
            }
        }
        out
    }

    /// self * (sum_j coeffs[j] zeta_j)
    fn mul_linear(&self, coeffs: &[f64]) -> Poly {
        let mut out = Poly {
            d: self.d,
            terms: HashMap::new(),
        };
        for (mono, &c) in &self.terms {
            for (j, &a) in coeffs.iter().enumerate() {
                if a != 0.0 {
                    let mut m = mono.clone();
                    m[j] += 1;
                    out.add_term(m, c * a);
                }
            }
        }
        out
    }

    fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (mono, &c) in &other.terms {
            out.add_term(mono.clone(), -c);
        }
        out
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(mono, &c)| {
                c * mono
                    .iter()
                    .zip(x)
                    .map(|(&k, &xi)| xi.powi(k as i32))
                    .product::<f64>()
            })
            .sum()
    }
}

/// Gaussian transform e^{-zeta^T K zeta / 2} with precomputed derivative
/// polynomials: d^beta E = p_beta(zeta) E, obtained from the recursion
/// p_{beta + e_i} = d_i p_beta - (K zeta)_i p_beta.
#[derive(Clone, Debug)]
pub struct GaussianFt {
    pub k: SpdMatrix,
    polys: HashMap<Vec<usize>, Poly>,
}

impl GaussianFt {
    pub fn new(k: SpdMatrix, max_order: usize) -> Self {
        let d = k.dim();
        let mut polys = HashMap::new();
        polys.insert(vec![0; d], Poly::one(d));
        let mut frontier = vec![vec![0usize; d]];
        for _ in 0..max_order {
            let mut next = Vec::new();
            for beta in &frontier {
                let p = polys.get(beta).unwrap().clone();
                for i in 0..d {
                    let mut b = beta.clone();
                    b[i] += 1;
                    if polys.contains_key(&b) {
                        continue;
                    }
                    let krow: Vec<f64> = (0..d).map(|j| k.matrix()[(i, j)]).collect();
                    let q = p.diff(i).sub(&p.mul_linear(&krow));
                    polys.insert(b.clone(), q);
                    next.push(b);
                }
            }
            frontier = next;
        }
        GaussianFt { k, polys }
    }

    fn deriv(&self, beta: &MultiIndex, zeta: &[f64]) -> f64 {
        let p = self
            .polys
            .get(&beta.0)
            .expect("derivative order above precomputed maximum");
        p.eval(zeta) * (-0.5 * self.k.quad_form(zeta)).exp()
    }
}

/// Fourier transform variants with derivatives up to a fixed order.
#[derive(Clone)]
pub enum FourierObject {
    Gaussian(GaussianFt),
    /// e^{-zeta^T K zeta / 2} (1 + i <zeta, grad> / sqrt(t_n)); `grad` is the
    /// imaginary part of the residue log-derivative at 0.
    ModifiedGaussian {
        gaussian: GaussianFt,
        grad: Vec<f64>,
        t_n: f64,
    },
    Empirical(Arc<SampleSet>),
    Kernel(SmoothingKernel),
}

impl FourierObject {
    pub fn gaussian(k: SpdMatrix, max_order: usize) -> Self {
        FourierObject::Gaussian(GaussianFt::new(k, max_order))
    }

    pub fn modified_gaussian(k: SpdMatrix, grad: Vec<f64>, t_n: f64, max_order: usize) -> Self {
        FourierObject::ModifiedGaussian {
            gaussian: GaussianFt::new(k, max_order),
            grad,
            t_n,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            FourierObject::Gaussian(g) => g.k.dim(),
            FourierObject::ModifiedGaussian { gaussian, .. } => gaussian.k.dim(),
            FourierObject::Empirical(s) => s.dim,
            FourierObject::Kernel(k) => k.d,
        }
    }

    pub fn value(&self, zeta: &[f64]) -> Complex64 {
        self.derivative(&MultiIndex::zero(zeta.len()), zeta)
    }

    pub fn derivative(&self, beta: &MultiIndex, zeta: &[f64]) -> Complex64 {
        match self {
            FourierObject::Gaussian(g) => Complex64::new(g.deriv(beta, zeta), 0.0),
            FourierObject::ModifiedGaussian { gaussian, grad, t_n } => {
                // product rule against the affine factor 1 + i<zeta,g>/sqrt(t)
                let lin: f64 = zeta.iter().zip(grad).map(|(a, b)| a * b).sum();
                let factor = Complex64::new(1.0, lin / t_n.sqrt());
                let mut acc = factor * gaussian.deriv(beta, zeta);
                for (j, &g_j) in grad.iter().enumerate() {
                    if beta.0[j] > 0 && g_j != 0.0 {
                        let mut b = beta.clone();
                        b.0[j] -= 1;
                        acc += Complex64::new(0.0, beta.0[j] as f64 * g_j / t_n.sqrt())
                            * gaussian.deriv(&b, zeta);
                    }
                }
                acc
            }
            FourierObject::Empirical(s) => empirical_ft_derivative(s, beta, zeta),
            FourierObject::Kernel(k) => Complex64::new(k.fourier_deriv(beta, zeta), 0.0),
        }
    }

    /// All requested derivatives in one pass; overridden for the empirical
    /// transform where the per-sample phase dominates the cost.
    pub fn derivatives_all(&self, betas: &[MultiIndex], zeta: &[f64]) -> Vec<Complex64> {
        match self {
            FourierObject::Empirical(s) => {
                let n = s.len();
                let mut acc = vec![Complex64::new(0.0, 0.0); betas.len()];
                for i in 0..n {
                    let row = s.row(i);
                    let dot: f64 = zeta.iter().zip(row).map(|(a, b)| a * b).sum();
                    let phase = Complex64::from_polar(1.0, dot);
                    for (k, beta) in betas.iter().enumerate() {
                        let mono = beta.monomial(row);
                        acc[k] += phase * i_pow(beta.weight()) * mono;
                    }
                }
                acc.into_iter().map(|v| v / n as f64).collect()
            }
            _ => betas.iter().map(|b| self.derivative(b, zeta)).collect(),
        }
    }
}

fn i_pow(k: usize) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// d^beta mu_hat(zeta) = (1/n) sum_k (i x_k)^beta e^{i <zeta, x_k>}, exact
/// for the empirical measure.
pub fn empirical_ft_derivative(
    samples: &SampleSet,
    beta: &MultiIndex,
    zeta: &[f64],
) -> Complex64 {
    let n = samples.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let row = samples.row(i);
        let dot: f64 = zeta.iter().zip(row).map(|(a, b)| a * b).sum();
        acc += Complex64::from_polar(1.0, dot) * beta.monomial(row);
    }
    acc * i_pow(beta.weight()) / n as f64
}
