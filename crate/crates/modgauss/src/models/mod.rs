//! Example models: lattice walks, circle-Brownian walks, sphere walks,
//! CUE log-determinants, Erdos-Renyi subgraph counts, and Markov empirical
//! measures.

pub mod circle;
pub mod cue;
pub mod er;
pub mod lattice;
pub mod markov;
pub mod sphere;
