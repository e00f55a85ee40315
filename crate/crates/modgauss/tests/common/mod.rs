//! Shared helpers for the integration suites: a small double-double
//! arithmetic kit and the finite-difference log-Laplace cumulant oracle
//! built on it. The extended precision keeps the round-off of fourth-order
//! nested central differences far below the 1e-6 comparison tolerance.
#![allow(dead_code)]

use modgauss::cumulants::DiscreteDistribution;
use modgauss::numeric::RngStream;
use rand::Rng;

/// Unevaluated sum hi + lo with |lo| <= ulp(hi)/2, roughly 32 significant
/// decimal digits.
#[derive(Clone, Copy, Debug)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, f64::mul_add(a, b, -p))
}

impl Dd {
    pub fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn zero() -> Dd {
        Dd::from(0.0)
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (hi, lo) = quick_two_sum(s, e + self.lo + o.lo);
        Dd { hi, lo }
    }

    pub fn sub(self, o: Dd) -> Dd {
        self.add(Dd {
            hi: -o.hi,
            lo: -o.lo,
        })
    }

    pub fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let (hi, lo) = quick_two_sum(p, e + self.hi * o.lo + self.lo * o.hi);
        Dd { hi, lo }
    }

    pub fn mul_f64(self, x: f64) -> Dd {
        self.mul(Dd::from(x))
    }

    /// Division by an f64, three refinement steps.
    pub fn div_f64(self, b: f64) -> Dd {
        let q1 = self.hi / b;
        let r1 = self.sub(Dd::from(q1).mul_f64(b));
        let q2 = r1.hi / b;
        let r2 = r1.sub(Dd::from(q2).mul_f64(b));
        let q3 = r2.hi / b;
        let (s, e) = two_sum(q1, q2);
        let (hi, lo) = quick_two_sum(s, e + q3);
        Dd { hi, lo }
    }

    pub fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r1 = self.sub(b.mul_f64(q1));
        let q2 = r1.hi / b.hi;
        let r2 = r1.sub(b.mul_f64(q2));
        let q3 = r2.hi / b.hi;
        let (s, e) = two_sum(q1, q2);
        let (hi, lo) = quick_two_sum(s, e + q3);
        Dd { hi, lo }
    }

    /// exp(x) for |x| <= 1 by a plain Taylor series.
    pub fn exp_small(self) -> Dd {
        assert!(self.hi.abs() <= 1.0);
        let mut term = Dd::from(1.0);
        let mut sum = Dd::from(1.0);
        for k in 1..=48 {
            term = term.mul(self).div_f64(k as f64);
            sum = sum.add(term);
            if term.hi.abs() < 1e-36 {
                break;
            }
        }
        sum
    }

    /// ln(x) for x in (0.5, 2) via the atanh series.
    pub fn ln_near_one(self) -> Dd {
        assert!(self.hi > 0.5 && self.hi < 2.0);
        let u = self.sub(Dd::from(1.0)).div(self.add(Dd::from(1.0)));
        let u2 = u.mul(u);
        let mut term = u;
        let mut sum = u;
        for k in 1..=60 {
            term = term.mul(u2);
            sum = sum.add(term.div_f64((2 * k + 1) as f64));
            if term.hi.abs() < 1e-36 {
                break;
            }
        }
        sum.mul_f64(2.0)
    }
}

/// log E[e^{<z, Y>}] for a finitely supported law, in double-double.
pub fn log_mgf_dd(dist: &DiscreteDistribution, z: &[Dd]) -> Dd {
    let mut s = Dd::zero();
    for (p, x) in &dist.atoms {
        let mut dot = Dd::zero();
        for (zi, &xi) in z.iter().zip(x) {
            dot = dot.add(zi.mul_f64(xi));
        }
        s = s.add(dot.exp_small().mul_f64(*p));
    }
    s.ln_near_one()
}

/// Nested central difference of order r = indices.len() of the log-MGF at
/// zero, step h per differentiation (h a power of two, so all scalings are
/// exact).
fn central_difference(dist: &DiscreteDistribution, indices: &[usize], h: f64, dim: usize) -> Dd {
    let r = indices.len();
    let mut acc = Dd::zero();
    for mask in 0u32..(1 << r) {
        let mut z = vec![Dd::zero(); dim];
        let mut minus = 0;
        for (j, &i) in indices.iter().enumerate() {
            let s = if mask >> j & 1 == 1 {
                minus += 1;
                -h
            } else {
                h
            };
            z[i] = z[i].add(Dd::from(s));
        }
        let v = log_mgf_dd(dist, &z);
        acc = if minus % 2 == 0 { acc.add(v) } else { acc.sub(v) };
    }
    for _ in 0..r {
        acc = acc.div_f64(2.0 * h);
    }
    acc
}

/// Finite-difference joint cumulant oracle: Richardson-extrapolated central
/// differences of log E[e^{<z,Y>}] at z = 0, independent of the
/// set-partition formula.
pub fn fd_joint_cumulant(dist: &DiscreteDistribution, indices: &[usize], dim: usize) -> f64 {
    let h = 2f64.powi(-10);
    let d_h = central_difference(dist, indices, h, dim);
    let d_h2 = central_difference(dist, indices, h / 2.0, dim);
    // central differences carry an O(h^2) error; one Richardson step
    d_h2.mul_f64(4.0).sub(d_h).div_f64(3.0).to_f64()
}

/// Random discrete distribution on `atoms` points in R^dim with coordinates
/// in [-1, 1] and weights bounded away from zero.
pub fn random_distribution(
    stream: RngStream,
    dim: usize,
    atoms: usize,
) -> DiscreteDistribution {
    let mut rng = stream.rng();
    let mut weights: Vec<f64> = (0..atoms).map(|_| 0.1 + rng.gen::<f64>()).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let pts: Vec<Vec<f64>> = (0..atoms)
        .map(|_| (0..dim).map(|_| 2.0 * rng.gen::<f64>() - 1.0).collect())
        .collect();
    DiscreteDistribution::new(weights.into_iter().zip(pts).collect()).unwrap()
}

/// All sorted index tuples of length r over 0..dim.
pub fn sorted_tuples(dim: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; r];
    loop {
        if cur.windows(2).all(|w| w[0] <= w[1]) {
            out.push(cur.clone());
        }
        let mut i = r;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < dim {
                break;
            }
            cur[i] = 0;
        }
    }
}

/// Random exhaustively enumerable family of bounded vectors over a random
/// dependency graph. Each vertex carries a sign latent x_v, each edge a sign
/// latent y_e, and A_v is a centered function of x_v and the latents of the
/// incident edges, so the declared graph is an exact dependency graph. The
/// outcome table enumerates all 2^(V+E) latent sign patterns.
pub fn random_exact_family(
    stream: RngStream,
    dim: usize,
) -> modgauss::depgraph::ExactFamily {
    use modgauss::depgraph::{DependencyGraph, ExactFamily};
    let mut rng = stream.rng();
    let n = rng.gen_range(3..=6usize);
    let max_edges = 12usize.saturating_sub(n).min(n * (n - 1) / 2);
    let n_edges = rng.gen_range(0..=max_edges.min(6));
    let mut edges = Vec::new();
    while edges.len() < n_edges {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b && !edges.contains(&(a.min(b), a.max(b))) {
            edges.push((a.min(b), a.max(b)));
        }
    }
    let graph = DependencyGraph::new(n, edges.iter().copied()).unwrap();
    // incident edge lists
    let incident: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            edges
                .iter()
                .enumerate()
                .filter(|(_, &(a, b))| a == v || b == v)
                .map(|(e, _)| e)
                .collect()
        })
        .collect();
    // random coefficients: vertex term, edge terms, vertex*edge cross terms
    let coef = |rng: &mut rand_chacha::ChaCha8Rng| 2.0 * rng.gen::<f64>() - 1.0;
    let cv: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| coef(&mut rng)).collect()).collect();
    let ce: Vec<Vec<Vec<f64>>> = (0..n)
        .map(|v| {
            incident[v]
                .iter()
                .map(|_| (0..dim).map(|_| coef(&mut rng)).collect())
                .collect()
        })
        .collect();
    let cx: Vec<Vec<Vec<f64>>> = (0..n)
        .map(|v| {
            incident[v]
                .iter()
                .map(|_| (0..dim).map(|_| coef(&mut rng)).collect())
                .collect()
        })
        .collect();
    // latent sign biases
    let pv: Vec<f64> = (0..n).map(|_| 0.2 + 0.6 * rng.gen::<f64>()).collect();
    let pe: Vec<f64> = (0..n_edges).map(|_| 0.2 + 0.6 * rng.gen::<f64>()).collect();
    let total = n + n_edges;
    let mut raw: Vec<(f64, Vec<Vec<f64>>)> = Vec::with_capacity(1 << total);
    for mask in 0u32..(1u32 << total) {
        let sign = |bit: usize| if mask >> bit & 1 == 1 { 1.0 } else { -1.0 };
        let mut p = 1.0;
        for v in 0..n {
            p *= if mask >> v & 1 == 1 { pv[v] } else { 1.0 - pv[v] };
        }
        for e in 0..n_edges {
            p *= if mask >> (n + e) & 1 == 1 { pe[e] } else { 1.0 - pe[e] };
        }
        let vectors: Vec<Vec<f64>> = (0..n)
            .map(|v| {
                (0..dim)
                    .map(|i| {
                        let mut a = cv[v][i] * sign(v);
                        for (j, &e) in incident[v].iter().enumerate() {
                            a += ce[v][j][i] * sign(n + e)
                                + cx[v][j][i] * sign(v) * sign(n + e);
                        }
                        a
                    })
                    .collect()
            })
            .collect();
        raw.push((p, vectors));
    }
    // center each vertex variable coordinatewise
    let mut mean = vec![vec![0.0; dim]; n];
    for (p, vs) in &raw {
        for v in 0..n {
            for i in 0..dim {
                mean[v][i] += p * vs[v][i];
            }
        }
    }
    for (_, vs) in &mut raw {
        for v in 0..n {
            for i in 0..dim {
                vs[v][i] -= mean[v][i];
            }
        }
    }
    ExactFamily {
        graph,
        dim,
        outcomes: raw,
    }
}

/// Law of the coordinate sum S = sum_v A_v of an exact family, as a discrete
/// distribution (atoms not merged; weights already sum to one).
pub fn family_sum_law(fam: &modgauss::depgraph::ExactFamily) -> DiscreteDistribution {
    DiscreteDistribution::new(
        fam.outcomes
            .iter()
            .map(|(p, vs)| {
                let s: Vec<f64> = (0..fam.dim)
                    .map(|i| vs.iter().map(|v| v[i]).sum())
                    .collect();
                (*p, s)
            })
            .collect(),
    )
    .unwrap()
}

pub fn assert_close(got: f64, want: f64, tol: f64, what: &str) {
    assert!(
        (got - want).abs() <= tol,
        "{what}: got {got}, want {want} (tol {tol})"
    );
}

pub fn assert_rel(got: f64, want: f64, tol: f64, what: &str) {
    assert!(
        (got - want).abs() <= tol * want.abs().max(1e-300),
        "{what}: got {got}, want {want} (rel tol {tol})"
    );
}
