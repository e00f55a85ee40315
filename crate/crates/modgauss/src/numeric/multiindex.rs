/// Multi-index in d coordinates, used for partial derivatives and moments.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex(pub Vec<usize>);

impl MultiIndex {
    pub fn zero(d: usize) -> Self {
        MultiIndex(vec![0; d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Total weight |beta|.
    pub fn weight(&self) -> usize {
        self.0.iter().sum()
    }

    /// beta! as f64.
    pub fn factorial(&self) -> f64 {
        self.0.iter().map(|&k| fact(k)).product()
    }

    /// Monomial x^beta.
    pub fn monomial(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(x)
            .map(|(&k, &xi)| xi.powi(k as i32))
            .product()
    }
}

pub fn fact(k: usize) -> f64 {
    (1..=k).map(|j| j as f64).product()
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut v = 1.0;
    for j in 0..k {
        v = v * (n - j) as f64 / (j + 1) as f64;
    }
    v.round()
}

/// All multi-indices of dimension d with weight exactly w, lexicographic.
pub fn indices_of_weight(d: usize, w: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; d];
    fill(&mut out, &mut cur, 0, w);
    out
}

fn fill(out: &mut Vec<MultiIndex>, cur: &mut Vec<usize>, pos: usize, rem: usize) {
    if pos + 1 == cur.len() {
        cur[pos] = rem;
        out.push(MultiIndex(cur.clone()));
        return;
    }
    for k in 0..=rem {
        cur[pos] = k;
        fill(out, cur, pos + 1, rem - k);
    }
    cur[pos] = 0;
}

/// All multi-indices of dimension d with weight in 0..=max_w.
pub fn indices_up_to(d: usize, max_w: usize) -> Vec<MultiIndex> {
    (0..=max_w).flat_map(|w| indices_of_weight(d, w)).collect()
}
