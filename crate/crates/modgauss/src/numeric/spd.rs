use crate::{Error, Result};
use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Symmetric positive definite matrix with a cached eigendecomposition.
/// Construction validates symmetry (relative tolerance 1e-12) and strict
/// positivity of the spectrum.
#[derive(Clone, Debug)]
pub struct SpdMatrix {
    m: DMatrix<f64>,
    eigvals: DVector<f64>,
    eigvecs: DMatrix<f64>,
}

impl SpdMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        let n = m.nrows();
        if n != m.ncols() || n == 0 {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: m.ncols(),
            });
        }
        let scale = m.amax().max(1e-300);
        let mut asym: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                asym = asym.max((m[(i, j)] - m[(j, i)]).abs());
            }
        }
        if asym > 1e-12 * scale {
            return Err(Error::NotSymmetric(asym / scale));
        }
        let sym = (&m + m.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym.clone());
        let min = eig.eigenvalues.min();
        if min <= 0.0 {
            return Err(Error::NotPositiveDefinite(min));
        }
        Ok(SpdMatrix {
            m: sym,
            eigvals: eig.eigenvalues,
            eigvecs: eig.eigenvectors,
        })
    }

    pub fn identity(d: usize) -> Self {
        SpdMatrix::new(DMatrix::identity(d, d)).unwrap()
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        SpdMatrix::new(DMatrix::from_diagonal(&DVector::from_row_slice(diag)))
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigvals
    }

    fn apply_spectral(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let d = DMatrix::from_diagonal(&self.eigvals.map(f));
        &self.eigvecs * d * self.eigvecs.transpose()
    }

    pub fn sqrt(&self) -> DMatrix<f64> {
        self.apply_spectral(f64::sqrt)
    }

    pub fn inv_sqrt(&self) -> DMatrix<f64> {
        self.apply_spectral(|l| 1.0 / l.sqrt())
    }

    pub fn inverse(&self) -> DMatrix<f64> {
        self.apply_spectral(|l| 1.0 / l)
    }

    pub fn det(&self) -> f64 {
        self.eigvals.iter().product()
    }

    /// Spectral radius (largest eigenvalue).
    pub fn rho(&self) -> f64 {
        self.eigvals.max()
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigvals.min()
    }

    /// Spectral radius of the inverse.
    pub fn rho_inv(&self) -> f64 {
        1.0 / self.lambda_min()
    }

    /// Condition number rho(K) rho(K^{-1}).
    pub fn tau(&self) -> f64 {
        self.rho() / self.lambda_min()
    }

    /// Quadratic form x^T K x.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        let v = DVector::from_row_slice(x);
        (v.transpose() * &self.m * &v)[(0, 0)]
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (&self.m * DVector::from_row_slice(x)).iter().copied().collect()
    }

    /// K^{-1/2} x.
    pub fn whiten(&self, x: &[f64]) -> Vec<f64> {
        (self.inv_sqrt() * DVector::from_row_slice(x))
            .iter()
            .copied()
            .collect()
    }

    /// Determinant-one rescaling (det K)^{-1/d} K.
    pub fn normalized(&self) -> SpdMatrix {
        let d = self.dim() as f64;
        let c = self.det().powf(-1.0 / d);
        SpdMatrix::new(&self.m * c).expect("rescaling preserves positivity")
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        let n = self.dim();
        let scale = self.m.amax().max(1e-300);
        for i in 0..n {
            for j in 0..n {
                if i != j && self.m[(i, j)].abs() > tol * scale {
                    return false;
                }
            }
        }
        true
    }
}
