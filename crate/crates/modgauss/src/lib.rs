//! Numerics for multi-dimensional mod-Gaussian approximation schemes:
//! joint cumulants and dependency-graph bounds, smoothing-kernel distance
//! estimates, hypercubic sphere meshes, large-deviation tail formulas, and
//! Monte Carlo validation models.

pub mod cumulants;
pub mod depgraph;
pub mod largedev;
pub mod mesh;
pub mod models;
pub mod numeric;
pub mod smoothing;

pub use numeric::error::Error;
pub type Result<T> = std::result::Result<T, Error>;
