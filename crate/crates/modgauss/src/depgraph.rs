//! Dependency graphs, the spanning-tree cumulant bound, and verification of
//! the method-of-cumulants hypotheses MC1-MC5.

use crate::cumulants::{joint_cumulant, CumulantTensor, MomentOracle};
use crate::numeric::SpdMatrix;
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use std::collections::BTreeSet;

/// Simple undirected graph together with the sparsity parameter D, stored as
/// 1 + max neighbor count (every vertex has at most D - 1 neighbors).
#[derive(Clone, Debug)]
pub struct DependencyGraph {
    pub n: usize,
    pub edges: BTreeSet<(usize, usize)>,
    pub d_param: usize,
}

impl DependencyGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("graph needs at least one vertex"));
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b || a >= n || b >= n {
                return Err(Error::domain("invalid edge"));
            }
            set.insert((a.min(b), a.max(b)));
        }
        let mut deg = vec![0usize; n];
        for &(a, b) in &set {
            deg[a] += 1;
            deg[b] += 1;
        }
        let d_param = 1 + deg.iter().max().copied().unwrap_or(0);
        Ok(DependencyGraph {
            n,
            edges: set,
            d_param,
        })
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == v || b == v)
            .count()
    }

    pub fn are_adjacent(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }
}

/// The spanning-tree cumulant bound N (2D)^{r-1} A^r r^{r-2}.
pub fn cumulant_bound(n: f64, d: f64, a: f64, r: usize) -> Result<f64> {
    if r < 2 {
        return Err(Error::Order("cumulant_bound needs r >= 2".into()));
    }
    Ok(n * (2.0 * d).powi(r as i32 - 1) * a.powi(r as i32) * (r as f64).powi(r as i32 - 2))
}

/// Multigraph on r vertices stored by edge multiplicities.
#[derive(Clone, Debug)]
pub struct MultiGraph {
    pub r: usize,
    pub mult: Vec<Vec<u64>>,
}

impl MultiGraph {
    pub fn new(r: usize) -> Self {
        MultiGraph {
            r,
            mult: vec![vec![0; r]; r],
        }
    }

    pub fn complete(r: usize) -> Self {
        let mut g = MultiGraph::new(r);
        for i in 0..r {
            for j in 0..r {
                if i != j {
                    g.mult[i][j] = 1;
                }
            }
        }
        g
    }

    pub fn add_edge(&mut self, a: usize, b: usize, m: u64) {
        assert!(a != b && a < self.r && b < self.r);
        self.mult[a][b] += m;
        self.mult[b][a] += m;
    }
}

/// Exact spanning-tree count of a multigraph (multi-edges counted with
/// multiplicity): Kirchhoff determinant of a Laplacian minor, evaluated by
/// fraction-free Bareiss elimination over the integers.
pub fn spanning_tree_count(g: &MultiGraph) -> Result<u128> {
    let r = g.r;
    if r > 9 {
        return Err(Error::Order("spanning_tree_count capped at r = 9".into()));
    }
    if r <= 1 {
        return Ok(1);
    }
    let m = r - 1;
    let mut a = vec![vec![0i128; m]; m];
    for i in 0..m {
        let mut deg = 0i128;
        for j in 0..r {
            if j != i {
                deg += g.mult[i][j] as i128;
            }
        }
        a[i][i] = deg;
        for j in 0..m {
            if j != i {
                a[i][j] = -(g.mult[i][j] as i128);
            }
        }
    }
    // Bareiss: exact integer determinant
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..m {
        if a[k][k] == 0 {
            let swap = (k + 1..m).find(|&i| a[i][k] != 0);
            match swap {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return Ok(0),
            }
        }
        for i in k + 1..m {
            for j in k + 1..m {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    let det = sign * a[m - 1][m - 1];
    Ok(det.unsigned_abs().min(u128::MAX))
}

/// Family of bounded random vectors on the vertices of a dependency graph,
/// given by an exhaustively enumerable joint law: outcome list of
/// (probability, per-vertex vectors in R^d).
#[derive(Clone, Debug)]
pub struct ExactFamily {
    pub graph: DependencyGraph,
    pub dim: usize,
    pub outcomes: Vec<(f64, Vec<Vec<f64>>)>,
}

impl ExactFamily {
    /// Almost-sure sup-norm bound A over all outcomes and vertices.
    pub fn sup_bound(&self) -> f64 {
        self.outcomes
            .iter()
            .flat_map(|(_, vs)| vs.iter().flat_map(|v| v.iter()))
            .fold(0.0f64, |a, &x| a.max(x.abs()))
    }
}

/// Moment oracle of the coordinate sums S^{(i)} = sum_v A_v^{(i)}.
impl MomentOracle for ExactFamily {
    fn dim(&self) -> usize {
        self.dim
    }
    fn moment(&self, indices: &[usize]) -> f64 {
        self.outcomes
            .iter()
            .map(|(p, vs)| {
                p * indices
                    .iter()
                    .map(|&i| vs.iter().map(|v| v[i]).sum::<f64>())
                    .product::<f64>()
            })
            .sum()
    }
}

#[derive(Clone, Debug)]
pub struct TreeBoundEntry {
    pub indices: Vec<usize>,
    pub kappa: f64,
    pub bound: f64,
}

/// Check |kappa(S^{(i_1)}, .., S^{(i_r)})| <= N (2D)^{r-1} A^r r^{r-2} for
/// every index tuple at each order up to max_r. Returns one entry per sorted
/// tuple; errors if any entry violates the bound (it never should).
pub fn verify_tree_bound(family: &ExactFamily, max_r: usize) -> Result<Vec<TreeBoundEntry>> {
    if max_r < 2 || max_r > 4 {
        return Err(Error::Order("verify_tree_bound supports r in 2..=4".into()));
    }
    let n = family.graph.n as f64;
    let d_param = family.graph.d_param as f64;
    let a = family.sup_bound();
    let mut out = Vec::new();
    for r in 2..=max_r {
        let mut idx = vec![0usize; r];
        loop {
            if idx.windows(2).all(|w| w[0] <= w[1]) {
                let kappa = joint_cumulant(family, &idx);
                let bound = cumulant_bound(n, d_param, a, r)?;
                if kappa.abs() > bound * (1.0 + 1e-9) + 1e-12 {
                    return Err(Error::Model(format!(
                        "tree bound violated at {:?}: |{}| > {}",
                        idx, kappa, bound
                    )));
                }
                out.push(TreeBoundEntry {
                    indices: idx.clone(),
                    kappa,
                    bound,
                });
            }
            if !incr(&mut idx, family.dim) {
                break;
            }
        }
    }
    Ok(out)
}

fn incr(idx: &mut [usize], base: usize) -> bool {
    for i in (0..idx.len()).rev() {
        idx[i] += 1;
        if idx[i] < base {
            return true;
        }
        idx[i] = 0;
    }
    false
}

/// Descriptor of a method-of-cumulants model over an n grid. All quantities
/// are exact (closed forms); `order_v_tensor` supplies the order-v cumulant
/// tensor of S_n when available, for the MC5 limit fit.
pub struct McModel<'a> {
    pub name: String,
    pub v: usize,
    pub k: SpdMatrix,
    pub n_grid: Vec<u64>,
    /// n -> (N_n, D_n, A_n)
    pub params: Box<dyn Fn(u64) -> (f64, f64, f64) + 'a>,
    /// n -> exact mean of S_n
    pub mean: Box<dyn Fn(u64) -> DVector<f64> + 'a>,
    /// n -> exact covariance of S_n
    pub cov: Box<dyn Fn(u64) -> DMatrix<f64> + 'a>,
    /// n -> exact order-v cumulant tensor of S_n (optional)
    pub order_v_tensor: Option<Box<dyn Fn(u64) -> CumulantTensor + 'a>>,
}

#[derive(Clone, Debug)]
pub struct McReport {
    pub mc1_max_mean: f64,
    pub mc1_pass: bool,
    /// (D_n, ||cov/(N D) - K||_inf) per grid point
    pub mc2_defects: Vec<(f64, f64)>,
    /// fitted slope of log defect vs log D_n (or vs log N_n if D constant)
    pub mc2_exponent: Option<f64>,
    /// D_n / N_n over the grid, must be decreasing
    pub mc3_ratios: Vec<f64>,
    pub mc3_pass: bool,
    /// sup over the grid of A_n
    pub mc4_sup_a: f64,
    pub mc4_pass: bool,
    /// per grid point, L tensor estimate kappa_v(S_n)/(N_n D_n^{v-1}),
    /// reported as max-norm distance to the last grid point's estimate
    pub mc5_drift: Option<Vec<f64>>,
    pub mc5_pass: Option<bool>,
}

/// Evaluate the MC1-MC5 hypotheses of the method of cumulants on an n grid.
/// `tol` governs MC1 (centering) and MC4 (boundedness is always true for
/// finite A_n; the check is sup A_n <= tol^{-1}-scaled sanity value 1e6).
pub fn check_mc_hypotheses(model: &McModel, tol: f64) -> Result<McReport> {
    if model.n_grid.len() < 3 {
        return Err(Error::Model("n grid needs at least 3 points".into()));
    }
    if model.v < 3 {
        return Err(Error::Order("method of cumulants needs v >= 3".into()));
    }
    let mut mc1_max: f64 = 0.0;
    let mut defects = Vec::new();
    let mut ratios = Vec::new();
    let mut sup_a: f64 = 0.0;
    let mut ltens: Vec<CumulantTensor> = Vec::new();
    for &n in &model.n_grid {
        let (nn, dn, an) = (model.params)(n);
        let mean = (model.mean)(n);
        mc1_max = mc1_max.max(mean.amax());
        let cov = (model.cov)(n) / (nn * dn);
        let k = model.k.matrix();
        let mut defect: f64 = 0.0;
        for i in 0..k.nrows() {
            for j in 0..k.ncols() {
                defect = defect.max((cov[(i, j)] - k[(i, j)]).abs());
            }
        }
        defects.push((dn, defect));
        ratios.push(dn / nn);
        sup_a = sup_a.max(an);
        if let Some(f) = &model.order_v_tensor {
            let mut t = f(n);
            t.scale(1.0 / (nn * dn.powi(model.v as i32 - 1)));
            ltens.push(t);
        }
    }
    // MC2' exponent: log defect against log D (or log N when D is constant)
    let d_varies = defects.windows(2).any(|w| (w[0].0 - w[1].0).abs() > 1e-12);
    let xs: Vec<f64> = if d_varies {
        defects.iter().map(|&(d, _)| d.ln()).collect()
    } else {
        model.n_grid.iter().map(|&n| (n as f64).ln()).collect()
    };
    let ys: Vec<f64> = defects.iter().map(|&(_, e)| e.max(1e-300).ln()).collect();
    let exponent = if defects.iter().all(|&(_, e)| e > 1e-14) {
        Some(fit_slope(&xs, &ys))
    } else {
        None
    };
    let mc3_pass = ratios.windows(2).all(|w| w[1] < w[0] * (1.0 + 1e-12));
    let (mc5_drift, mc5_pass) = if ltens.is_empty() {
        (None, None)
    } else {
        let last = ltens.last().unwrap();
        let drifts: Vec<f64> = ltens
            .iter()
            .map(|t| {
                let mut m: f64 = 0.0;
                let dim = t.dim;
                let mut idx = vec![0usize; t.order];
                loop {
                    m = m.max((t.get(&idx) - last.get(&idx)).abs());
                    if !incr(&mut idx, dim) {
                        break;
                    }
                }
                m
            })
            .collect();
        // drift to the final estimate must shrink along the grid
        let pass = drifts
            .windows(2)
            .all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-15);
        (Some(drifts), Some(pass))
    };
    Ok(McReport {
        mc1_max_mean: mc1_max,
        mc1_pass: mc1_max <= tol,
        mc2_defects: defects,
        mc2_exponent: exponent,
        mc3_ratios: ratios,
        mc3_pass,
        mc4_sup_a: sup_a,
        mc4_pass: sup_a.is_finite() && sup_a < 1e6,
        mc5_drift,
        mc5_pass,
    })
}

/// Least-squares slope of y against x.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}
