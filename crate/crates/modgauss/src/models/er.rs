//! Erdos-Renyi subgraph counts: exact embedding counts I(H, G_n) for motifs
//! padded to a common vertex count k, the rank-one leading covariance, and
//! the projection onto its direction w.

use crate::{Error, Result};
use nalgebra::DMatrix;
use rand::Rng;

/// Motif on k labelled vertices (padded: isolated vertices allowed).
#[derive(Clone, Debug)]
pub struct Motif {
    pub k: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Motif {
    pub fn new(k: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if k > 5 {
            return Err(Error::Order("motif vertex count capped at 5".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for &(a, b) in &edges {
            if a == b || a >= k || b >= k || !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::domain("invalid motif edge list"));
            }
        }
        Ok(Motif { k, edges })
    }

    pub fn edge_padded(k: usize) -> Self {
        Motif::new(k, vec![(0, 1)]).unwrap()
    }

    pub fn triangle_padded(k: usize) -> Self {
        Motif::new(k, vec![(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    pub fn h(&self) -> usize {
        self.edges.len()
    }

    fn active(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.k];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        (0..self.k).filter(|&v| deg[v] > 0).collect()
    }
}

/// Undirected graph on n vertices with bitset adjacency rows.
pub struct Graph {
    pub n: usize,
    words: usize,
    adj: Vec<u64>,
}

impl Graph {
    pub fn sample(n: usize, p: f64, rng: &mut impl Rng) -> Self {
        let words = (n + 63) / 64;
        let mut g = Graph {
            n,
            words,
            adj: vec![0u64; n * words],
        };
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen::<f64>() < p {
                    g.set(i, j);
                }
            }
        }
        g
    }

    fn set(&mut self, i: usize, j: usize) {
        self.adj[i * self.words + j / 64] |= 1 << (j % 64);
        self.adj[j * self.words + i / 64] |= 1 << (i % 64);
    }

    pub fn has(&self, i: usize, j: usize) -> bool {
        self.adj[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.adj[i * self.words..(i + 1) * self.words]
    }

    pub fn edge_count(&self) -> u64 {
        self.adj.iter().map(|w| w.count_ones() as u64).sum::<u64>() / 2
    }

    pub fn triangle_count(&self) -> u64 {
        let mut t = 0u64;
        for i in 0..self.n {
            for j in i + 1..self.n {
                if !self.has(i, j) {
                    continue;
                }
                let (ri, rj) = (self.row(i), self.row(j));
                for w in 0..self.words {
                    let mut common = ri[w] & rj[w];
                    // only count third vertices above j
                    let base = w * 64;
                    if base + 64 <= j + 1 {
                        common = 0;
                    } else if base <= j {
                        common &= !((1u64 << (j + 1 - base)) - 1);
                    }
                    t += common.count_ones() as u64;
                }
            }
        }
        t
    }
}

fn falling(n: usize, k: usize) -> f64 {
    (0..k).map(|i| (n - i) as f64).product()
}

/// Exact number of injective embeddings of the motif into the graph
/// (isolated motif vertices padded by a falling factorial).
pub fn count_embeddings(motif: &Motif, g: &Graph) -> f64 {
    let active = motif.active();
    let a = active.len();
    let pad = if g.n >= motif.k {
        falling(g.n - a, motif.k - a)
    } else {
        0.0
    };
    if active.is_empty() {
        return falling(g.n, motif.k);
    }
    // fast paths for the standard padded motifs
    if motif.edges.len() == 1 {
        return 2.0 * g.edge_count() as f64 * pad;
    }
    if motif.edges.len() == 3 && a == 3 {
        return 6.0 * g.triangle_count() as f64 * pad;
    }
    // general backtracking over the active vertices
    let pos: std::collections::HashMap<usize, usize> =
        active.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut constraints: Vec<Vec<usize>> = vec![Vec::new(); a];
    for &(x, y) in &motif.edges {
        let (px, py) = (pos[&x], pos[&y]);
        if px < py {
            constraints[py].push(px);
        } else {
            constraints[px].push(py);
        }
    }
    let mut assign = vec![usize::MAX; a];
    let mut used = vec![false; g.n];
    fn rec(
        depth: usize,
        a: usize,
        g: &Graph,
        constraints: &[Vec<usize>],
        assign: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> f64 {
        if depth == a {
            return 1.0;
        }
        let mut total = 0.0;
        'cand: for v in 0..g.n {
            if used[v] {
                continue;
            }
            for &earlier in &constraints[depth] {
                if !g.has(assign[earlier], v) {
                    continue 'cand;
                }
            }
            assign[depth] = v;
            used[v] = true;
            total += rec(depth + 1, a, g, constraints, assign, used);
            used[v] = false;
        }
        total
    }
    rec(0, a, g, &constraints, &mut assign, &mut used) * pad
}

#[derive(Clone, Debug)]
pub struct ErdosRenyiModel {
    pub n: usize,
    pub p: f64,
    pub motifs: Vec<Motif>,
}

impl ErdosRenyiModel {
    pub fn new(n: usize, p: f64, motifs: Vec<Motif>) -> Result<Self> {
        if n > 300 {
            return Err(Error::Order("n capped at 300".into()));
        }
        if !(0.0..1.0).contains(&p) || p == 0.0 {
            return Err(Error::domain("p must be in (0,1)"));
        }
        if motifs.is_empty() {
            return Err(Error::domain("need at least one motif"));
        }
        let k = motifs[0].k;
        if motifs.iter().any(|m| m.k != k) {
            return Err(Error::domain("motifs must share the padded vertex count"));
        }
        Ok(ErdosRenyiModel { n, p, motifs })
    }

    pub fn k(&self) -> usize {
        self.motifs[0].k
    }

    /// E[I(H, G_n)] = n^{falling k} p^h.
    pub fn mean(&self, motif: &Motif) -> f64 {
        falling(self.n, motif.k) * self.p.powi(motif.h() as i32)
    }

    /// Centered count vector S_n from one sampled graph.
    pub fn sample_counts(&self, rng: &mut impl Rng) -> Vec<f64> {
        let g = Graph::sample(self.n, self.p, rng);
        self.motifs
            .iter()
            .map(|m| count_embeddings(m, &g) - self.mean(m))
            .collect()
    }

    /// Direction of the rank-one limit: w = (h_1 p^{h_1}, .., h_d p^{h_d}).
    pub fn w(&self) -> Vec<f64> {
        self.motifs
            .iter()
            .map(|m| m.h() as f64 * self.p.powi(m.h() as i32))
            .collect()
    }

    /// Leading covariance 2 (p^{-1} - 1) w w^T n^{2k-2}.
    pub fn leading_cov(&self) -> DMatrix<f64> {
        let w = self.w();
        let d = w.len();
        let c = 2.0 * (1.0 / self.p - 1.0) * (self.n as f64).powi(2 * self.k() as i32 - 2);
        DMatrix::from_fn(d, d, |i, j| c * w[i] * w[j])
    }

    /// Projection coefficient s^{(w)} = <s, w> / ||w||^2 of a centered
    /// count vector, and its normal standardization.
    pub fn projection(&self, s: &[f64]) -> f64 {
        let w = self.w();
        let num: f64 = s.iter().zip(&w).map(|(a, b)| a * b).sum();
        let den: f64 = w.iter().map(|x| x * x).sum();
        num / den
    }

    /// Y^{(w)} standardized by the limiting variance 2(p^{-1}-1) n^{2k-2}.
    pub fn standardized_projection(&self, s: &[f64]) -> f64 {
        let sw = self.projection(s);
        sw / ((2.0 * (1.0 / self.p - 1.0)).sqrt()
            * (self.n as f64).powi(self.k() as i32 - 1))
    }

    /// ||s - s^{(w)} w||^2 of one centered count vector.
    pub fn projection_residual(&self, s: &[f64]) -> f64 {
        let w = self.w();
        let sw = self.projection(s);
        s.iter()
            .zip(&w)
            .map(|(a, b)| (a - sw * b) * (a - sw * b))
            .sum()
    }
}
