//! Joint cumulants via the Moebius function of the set-partition lattice,
//! cumulant tensors, and log-Laplace expansions.

use crate::numeric::multiindex::fact;
use crate::numeric::SpdMatrix;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Partition of {0, .., r-1} into disjoint blocks, each block sorted,
/// blocks sorted by smallest element.
pub type SetPartition = Vec<Vec<usize>>;

/// Moebius coefficient mu(pi) = (-1)^{l-1} (l-1)! for a partition with l blocks.
pub fn moebius_coefficient(blocks: usize) -> f64 {
    let sign = if blocks % 2 == 1 { 1.0 } else { -1.0 };
    sign * fact(blocks - 1)
}

/// Bell number B_r (number of set partitions), via the Bell triangle.
pub fn bell_number(r: usize) -> u64 {
    let mut row = vec![1u64];
    for _ in 0..r {
        let mut next = vec![*row.last().unwrap()];
        for &v in &row {
            next.push(next.last().unwrap() + v);
        }
        row = next;
    }
    row[0]
}

static PARTITION_CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<SetPartition>>>>> = OnceLock::new();

/// All set partitions of {0, .., r-1}, enumerated through restricted growth
/// strings and cached per order. Orders above 10 are rejected.
pub fn set_partitions(r: usize) -> Arc<Vec<SetPartition>> {
    assert!(r >= 1 && r <= 10, "set partition order must be in 1..=10");
    let cache = PARTITION_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry(r)
        .or_insert_with(|| {
            let mut out = Vec::with_capacity(bell_number(r) as usize);
            let mut rgs = vec![0usize; r];
            enumerate_rgs(&mut rgs, 1, &mut out);
            Arc::new(out)
        })
        .clone()
}

fn enumerate_rgs(rgs: &mut Vec<usize>, pos: usize, out: &mut Vec<SetPartition>) {
    let r = rgs.len();
    if pos == r {
        let nblocks = rgs.iter().max().unwrap() + 1;
        let mut blocks = vec![Vec::new(); nblocks];
        for (i, &b) in rgs.iter().enumerate() {
            blocks[b].push(i);
        }
        out.push(blocks);
        return;
    }
    let maxv = rgs[..pos].iter().max().unwrap() + 1;
    for v in 0..=maxv {
        rgs[pos] = v;
        enumerate_rgs(rgs, pos + 1, out);
    }
    rgs[pos] = 0;
}

/// Source of raw joint moments E[prod_j Y^{(i_j)}] for coordinate indices.
pub trait MomentOracle {
    fn dim(&self) -> usize;
    /// Joint moment for the (multiset of) coordinate indices.
    fn moment(&self, indices: &[usize]) -> f64;
}

/// Joint cumulant kappa(Y^{(i_1)}, .., Y^{(i_r)}) =
/// sum over set partitions of mu(pi) * prod over blocks of the block moment.
pub fn joint_cumulant(oracle: &dyn MomentOracle, indices: &[usize]) -> f64 {
    let r = indices.len();
    assert!(r >= 1);
    let mut acc = 0.0;
    for pi in set_partitions(r).iter() {
        let mut prod = moebius_coefficient(pi.len());
        for block in pi {
            let block_idx: Vec<usize> = block.iter().map(|&j| indices[j]).collect();
            prod *= oracle.moment(&block_idx);
        }
        acc += prod;
    }
    acc
}

/// Dense symmetric tensor of order-r joint cumulants in dimension d.
#[derive(Clone, Debug)]
pub struct CumulantTensor {
    pub dim: usize,
    pub order: usize,
    data: Vec<f64>,
}

impl CumulantTensor {
    pub fn zeros(dim: usize, order: usize) -> Self {
        CumulantTensor {
            dim,
            order,
            data: vec![0.0; dim.pow(order as u32)],
        }
    }

    fn flat(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |a, &i| a * self.dim + i)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.flat(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let f = self.flat(idx);
        self.data[f] = v;
    }

    /// Fill from an oracle, computing each sorted index tuple once and
    /// copying to all permuted positions.
    pub fn from_oracle(oracle: &dyn MomentOracle, order: usize) -> Self {
        let dim = oracle.dim();
        let mut t = CumulantTensor::zeros(dim, order);
        let mut idx = vec![0usize; order];
        loop {
            // only compute on sorted tuples
            if idx.windows(2).all(|w| w[0] <= w[1]) {
                let v = joint_cumulant(oracle, &idx);
                // scatter to all rearrangements via full enumeration of the
                // symmetric positions: walk all tuples with same multiset
                t.scatter_symmetric(&idx, v);
            }
            if !next_tuple(&mut idx, dim) {
                break;
            }
        }
        t
    }

    fn scatter_symmetric(&mut self, sorted_idx: &[usize], v: f64) {
        let mut perm = sorted_idx.to_vec();
        loop {
            let f = self.flat(&perm);
            self.data[f] = v;
            if !next_permutation(&mut perm) {
                break;
            }
        }
    }

    /// Full contraction sum_{i_1..i_r} T[i] z^{i_1} .. z^{i_r}.
    pub fn contract(&self, z: &[f64]) -> f64 {
        assert_eq!(z.len(), self.dim);
        let mut idx = vec![0usize; self.order];
        let mut acc = 0.0;
        loop {
            let mut p = self.data[self.flat(&idx)];
            if p != 0.0 {
                for &i in &idx {
                    p *= z[i];
                }
                acc += p;
            }
            if !next_tuple(&mut idx, self.dim) {
                break;
            }
        }
        acc
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |a, &v| a.max(v.abs()))
    }

    pub fn scale(&mut self, c: f64) {
        for v in &mut self.data {
            *v *= c;
        }
    }
}

fn next_tuple(idx: &mut [usize], base: usize) -> bool {
    for i in (0..idx.len()).rev() {
        idx[i] += 1;
        if idx[i] < base {
            return true;
        }
        idx[i] = 0;
    }
    false
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Truncated log-Laplace expansion sum_{r=1..R} (1/r!) kappa_r[z, .., z].
pub fn log_laplace_expansion(tensors: &[CumulantTensor], z: &[f64]) -> f64 {
    tensors
        .iter()
        .map(|t| t.contract(z) / fact(t.order))
        .sum()
}

/// Finite-n residue psi_n(z) of a method-of-cumulants rescaling: given the
/// cumulant tensors of S_n (orders 1..=R), parameters (N_n, D_n), exponent v
/// and limiting covariance K, with X_n = S_n / (N^{1/v} D^{1-1/v}) and
/// t_n = (N/D)^{1-2/v}:
/// psi_n(z) = exp( sum_r kappa_r(S_n)[z/s]^r / r! - t_n z^T K z / 2 ).
pub fn residue_from_model(
    tensors: &[CumulantTensor],
    n_big: f64,
    d_big: f64,
    v: usize,
    k: &SpdMatrix,
    z: &[f64],
) -> f64 {
    let s = n_big.powf(1.0 / v as f64) * d_big.powf(1.0 - 1.0 / v as f64);
    let t_n = (n_big / d_big).powf(1.0 - 2.0 / v as f64);
    let zs: Vec<f64> = z.iter().map(|&zi| zi / s).collect();
    let log_lap = log_laplace_expansion(tensors, &zs);
    (log_lap - 0.5 * t_n * k.quad_form(z)).exp()
}

/// Finitely supported distribution on R^d given by weighted atoms.
#[derive(Clone, Debug)]
pub struct DiscreteDistribution {
    pub atoms: Vec<(f64, Vec<f64>)>,
    dim: usize,
}

impl DiscreteDistribution {
    pub fn new(atoms: Vec<(f64, Vec<f64>)>) -> crate::Result<Self> {
        if atoms.is_empty() {
            return Err(crate::Error::domain("empty distribution"));
        }
        let dim = atoms[0].1.len();
        let total: f64 = atoms.iter().map(|a| a.0).sum();
        if (total - 1.0).abs() > 1e-9 || atoms.iter().any(|a| a.0 < 0.0) {
            return Err(crate::Error::domain("atom weights must be a probability"));
        }
        if atoms.iter().any(|a| a.1.len() != dim) {
            return Err(crate::Error::DimensionMismatch { expected: dim, got: 0 });
        }
        Ok(DiscreteDistribution { atoms, dim })
    }

    /// log E[e^{<z, Y>}].
    pub fn log_mgf(&self, z: &[f64]) -> f64 {
        self.atoms
            .iter()
            .map(|(p, x)| {
                let dot: f64 = z.iter().zip(x).map(|(a, b)| a * b).sum();
                p * dot.exp()
            })
            .sum::<f64>()
            .ln()
    }
}

impl MomentOracle for DiscreteDistribution {
    fn dim(&self) -> usize {
        self.dim
    }
    fn moment(&self, indices: &[usize]) -> f64 {
        self.atoms
            .iter()
            .map(|(p, x)| p * indices.iter().map(|&i| x[i]).product::<f64>())
            .sum()
    }
}

/// Sample matrix (n rows, d columns, row-major) with plug-in moments.
/// Moments are the biased plug-in estimators (1/n) sum prod.
pub struct SampleSet {
    pub dim: usize,
    pub data: Vec<f64>,
    cache: Mutex<HashMap<Vec<usize>, f64>>,
}

impl SampleSet {
    pub fn new(dim: usize, data: Vec<f64>) -> Self {
        assert!(dim > 0 && data.len() % dim == 0 && !data.is_empty());
        SampleSet {
            dim,
            data,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }
}

impl MomentOracle for SampleSet {
    fn dim(&self) -> usize {
        self.dim
    }
    fn moment(&self, indices: &[usize]) -> f64 {
        let mut key = indices.to_vec();
        key.sort_unstable();
        if let Some(&v) = self.cache.lock().unwrap().get(&key) {
            return v;
        }
        let n = self.len();
        let mut acc = 0.0;
        for i in 0..n {
            let row = self.row(i);
            let mut p = 1.0;
            for &j in &key {
                p *= row[j];
            }
            acc += p;
        }
        let v = acc / n as f64;
        self.cache.lock().unwrap().insert(key, v);
        v
    }
}
