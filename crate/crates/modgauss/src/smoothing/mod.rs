//! Smoothing kernel, Fourier-derivative distance Delta_eps, Berry-Esseen
//! constants, and practical distance estimators.

pub mod distance;
pub mod fourier;
pub mod kernel;

pub use distance::{
    berry_esseen_constant, convex_distance_lower_bound, convex_distance_upper_bound,
    delta_epsilon, gaussian_regularity_constant, kolmogorov_distance_1d, residue_sup_m,
    ConvexFamily,
};
pub use fourier::FourierObject;
pub use kernel::SmoothingKernel;
