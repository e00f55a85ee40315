//! Shared numeric kernels: SPD matrix calculus, special functions,
//! quadrature rules, multi-indices, and reproducible RNG streams.

pub mod barnes;
pub mod error;
pub mod gamma;
pub mod hermite;
pub mod legendre;
pub mod multiindex;
pub mod quad;
pub mod rng;
pub mod spd;

pub use multiindex::MultiIndex;
pub use rng::RngStream;
pub use spd::SpdMatrix;
