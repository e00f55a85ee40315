//! Simple lattice walk with steps uniform on {+-e_1, .., +-e_d}.

use crate::cumulants::{CumulantTensor, DiscreteDistribution};
use crate::largedev::ResidueFunction;
use crate::numeric::SpdMatrix;
use crate::{Error, Result};
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Binomial, Distribution};

#[derive(Clone, Copy, Debug)]
pub struct LatticeWalkModel {
    pub d: usize,
    pub n: u64,
}

impl LatticeWalkModel {
    pub fn new(d: usize, n: u64) -> Result<Self> {
        if d < 1 || n < 1 {
            return Err(Error::domain("need d >= 1 and n >= 1"));
        }
        Ok(LatticeWalkModel { d, n })
    }

    /// One-step law as a discrete distribution (2d atoms).
    pub fn step_law(&self) -> DiscreteDistribution {
        let p = 1.0 / (2 * self.d) as f64;
        let mut atoms = Vec::with_capacity(2 * self.d);
        for i in 0..self.d {
            for s in [1.0, -1.0] {
                let mut x = vec![0.0; self.d];
                x[i] = s;
                atoms.push((p, x));
            }
        }
        DiscreteDistribution::new(atoms).unwrap()
    }

    /// Endpoint S_n sampled through multinomial step counts: 2d category
    /// counts drawn as a chain of binomials, so a walk costs O(d) draws
    /// instead of n.
    pub fn sample_endpoint(&self, rng: &mut impl Rng) -> Vec<i64> {
        let cats = 2 * self.d;
        let mut counts = vec![0u64; cats];
        let mut rem = self.n;
        for c in 0..cats - 1 {
            if rem == 0 {
                break;
            }
            let p = 1.0 / (cats - c) as f64;
            let bin = Binomial::new(rem, p).unwrap();
            let k = bin.sample(rng);
            counts[c] = k;
            rem -= k;
        }
        counts[cats - 1] = rem;
        (0..self.d)
            .map(|i| counts[2 * i] as i64 - counts[2 * i + 1] as i64)
            .collect()
    }

    /// Exact order-r cumulant tensor of S_n (n times the step tensor).
    pub fn cumulant_tensor(&self, r: usize) -> CumulantTensor {
        let mut t = CumulantTensor::from_oracle(&self.step_law(), r);
        t.scale(self.n as f64);
        t
    }

    /// Method-of-cumulants parameters: v = 4, N = n, D = 1, A = 1,
    /// K = I/d, t_n = sqrt(n).
    pub fn mc_params(&self) -> (usize, f64, f64, f64, SpdMatrix) {
        let k = SpdMatrix::new(DMatrix::identity(self.d, self.d) / self.d as f64).unwrap();
        (4, self.n as f64, 1.0, 1.0, k)
    }

    pub fn t_n(&self) -> f64 {
        (self.n as f64).sqrt()
    }

    /// Limiting residue of the rescaled walk.
    pub fn residue(&self) -> ResidueFunction {
        ResidueFunction::LatticeWalk4 { d: self.d }
    }
}
