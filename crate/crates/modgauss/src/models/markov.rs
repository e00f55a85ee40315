//! Ergodic Markov chains: stationary measure, the limiting covariance K of
//! the empirical measure, the contraction parameter theta_P, exact finite-n
//! covariances, and the truncated third-cumulant tensor.

use crate::cumulants::CumulantTensor;
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

#[derive(Clone, Debug)]
pub struct MarkovModel {
    pub p: DMatrix<f64>,
    pub pi: DVector<f64>,
    pub reversible: bool,
}

impl MarkovModel {
    pub fn new(p: DMatrix<f64>) -> Result<Self> {
        let d = p.nrows();
        if d < 2 || p.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, got: p.ncols() });
        }
        for i in 0..d {
            let row: f64 = (0..d).map(|j| p[(i, j)]).sum();
            if (row - 1.0).abs() > 1e-12 || (0..d).any(|j| p[(i, j)] < 0.0) {
                return Err(Error::Model("rows must be probability vectors".into()));
            }
        }
        // ergodicity: some power <= d^2 strictly positive
        let mut q = p.clone();
        let mut ok = false;
        for _ in 0..d * d {
            if q.iter().all(|&x| x > 0.0) {
                ok = true;
                break;
            }
            q = &q * &p;
        }
        if !ok {
            return Err(Error::Model("chain is not ergodic".into()));
        }
        // stationary: solve pi (P - I) = 0 with sum(pi) = 1
        let mut a = p.transpose() - DMatrix::identity(d, d);
        for j in 0..d {
            a[(d - 1, j)] = 1.0;
        }
        let mut b = DVector::zeros(d);
        b[d - 1] = 1.0;
        let pi = a
            .lu()
            .solve(&b)
            .ok_or_else(|| Error::Model("stationary solve failed".into()))?;
        let mut model = MarkovModel {
            p,
            pi,
            reversible: false,
        };
        let mut rev = true;
        for i in 0..d {
            for j in 0..d {
                if (model.pi[i] * model.p[(i, j)] - model.pi[j] * model.p[(j, i)]).abs() > 1e-12 {
                    rev = false;
                }
            }
        }
        model.reversible = rev;
        Ok(model)
    }

    pub fn dim(&self) -> usize {
        self.p.nrows()
    }

    /// R = P - P^inf, the part of P acting on the zero-sum hyperplane.
    pub fn r_matrix(&self) -> DMatrix<f64> {
        let d = self.dim();
        let pinf = DMatrix::from_fn(d, d, |_, j| self.pi[j]);
        &self.p - pinf
    }

    /// theta_P = sqrt(max non-unit eigenvalue modulus of P D^{-1} P^T D),
    /// D = diag(pi). Equals |lambda_2(P)| for reversible chains.
    pub fn theta_p(&self) -> f64 {
        let d = self.dim();
        let dinv = DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                1.0 / self.pi[i]
            } else {
                0.0
            }
        });
        let dm = DMatrix::from_fn(d, d, |i, j| if i == j { self.pi[i] } else { 0.0 });
        let m = &self.p * dinv * self.p.transpose() * dm;
        let eigs = m.complex_eigenvalues();
        let mut mods: Vec<f64> = eigs.iter().map(|z| z.norm()).collect();
        // drop the single unit eigenvalue (closest to 1)
        let unit = mods
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - 1.0).abs().partial_cmp(&(b.1 - 1.0).abs()).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        mods.remove(unit);
        mods.into_iter().fold(0.0f64, f64::max).sqrt()
    }

    /// Limiting covariance of the centered empirical measure:
    /// K_ij = pi(i) delta_ij - pi(i) pi(j)
    ///        + sum_{k>=1} [pi(i) R^k(i,j) + pi(j) R^k(j,i)],
    /// summed until ||R^k|| < 1e-14. Symmetric; rows sum to zero.
    pub fn markov_k(&self) -> DMatrix<f64> {
        let d = self.dim();
        let mut k = DMatrix::from_fn(d, d, |i, j| {
            let del = if i == j { self.pi[i] } else { 0.0 };
            del - self.pi[i] * self.pi[j]
        });
        let r = self.r_matrix();
        let mut rk = r.clone();
        for _ in 0..100_000 {
            for i in 0..d {
                for j in 0..d {
                    k[(i, j)] += self.pi[i] * rk[(i, j)] + self.pi[j] * rk[(j, i)];
                }
            }
            if rk.amax() < 1e-14 {
                break;
            }
            rk = &rk * &r;
        }
        k
    }

    /// Exact covariance of S_n = n (pi_n - pi) for the stationary chain:
    /// n (pi(i) delta_ij - pi(i) pi(j))
    /// + sum_{k=1}^{n-1} (n-k) [pi(i) R^k(i,j) + pi(j) R^k(j,i)].
    pub fn exact_cov(&self, n: usize) -> DMatrix<f64> {
        let d = self.dim();
        let nf = n as f64;
        let mut c = DMatrix::from_fn(d, d, |i, j| {
            let del = if i == j { self.pi[i] } else { 0.0 };
            nf * (del - self.pi[i] * self.pi[j])
        });
        let r = self.r_matrix();
        let mut rk = r.clone();
        for k in 1..n {
            let w = (n - k) as f64;
            for i in 0..d {
                for j in 0..d {
                    c[(i, j)] += w * (self.pi[i] * rk[(i, j)] + self.pi[j] * rk[(j, i)]);
                }
            }
            if w * rk.amax() < 1e-14 {
                break;
            }
            rk = &rk * &r;
        }
        c
    }

    /// Truncated limiting third-cumulant tensor:
    /// L_{ijk} = sum_{|a|,|b| <= M} kappa(1_{X_0=i}, 1_{X_a=j}, 1_{X_b=k})
    /// for the stationary two-sided chain, from exact joint probabilities.
    pub fn third_tensor(&self, m: usize) -> CumulantTensor {
        let d = self.dim();
        let mi = m as i64;
        // P^t for t = 0..2M
        let mut powers = Vec::with_capacity(2 * m + 1);
        powers.push(DMatrix::identity(d, d));
        for t in 1..=2 * m {
            let next = &powers[t - 1] * &self.p;
            powers.push(next);
        }
        let pair = |t1: i64, s1: usize, t2: i64, s2: usize| -> f64 {
            let (ta, sa, tb, sb) = if t1 <= t2 {
                (t1, s1, t2, s2)
            } else {
                (t2, s2, t1, s1)
            };
            self.pi[sa] * powers[(tb - ta) as usize][(sa, sb)]
        };
        let triple = |times: [(i64, usize); 3]| -> f64 {
            let mut ts = times;
            ts.sort_by_key(|x| x.0);
            self.pi[ts[0].1]
                * powers[(ts[1].0 - ts[0].0) as usize][(ts[0].1, ts[1].1)]
                * powers[(ts[2].0 - ts[1].0) as usize][(ts[1].1, ts[2].1)]
        };
        let mut tens = CumulantTensor::zeros(d, 3);
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let mut acc = 0.0;
                    for a in -mi..=mi {
                        for b in -mi..=mi {
                            let eabc = triple([(0, i), (a, j), (b, k)]);
                            let e_ab = pair(0, i, a, j);
                            let e_ac = pair(0, i, b, k);
                            let e_bc = pair(a, j, b, k);
                            acc += eabc - e_ab * self.pi[k] - e_ac * self.pi[j]
                                - e_bc * self.pi[i]
                                + 2.0 * self.pi[i] * self.pi[j] * self.pi[k];
                        }
                    }
                    tens.set(&[i, j, k], acc);
                }
            }
        }
        tens
    }

    /// One stationary trajectory's S_n = counts - n pi.
    pub fn sample_empirical(&self, n: usize, rng: &mut impl Rng) -> Vec<f64> {
        let d = self.dim();
        let mut counts = vec![0u64; d];
        let mut state = sample_discrete(self.pi.as_slice(), rng);
        for _ in 0..n {
            counts[state] += 1;
            let row: Vec<f64> = (0..d).map(|j| self.p[(state, j)]).collect();
            state = sample_discrete(&row, rng);
        }
        (0..d)
            .map(|i| counts[i] as f64 - n as f64 * self.pi[i])
            .collect()
    }
}

fn sample_discrete(probs: &[f64], rng: &mut impl Rng) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}
