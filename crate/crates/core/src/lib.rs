//! Spectral gaps of random graphs and random simplicial complexes.
//!
//! The crate samples Erdős–Rényi graphs and Linial–Meshulam complexes,
//! computes normalized Laplacian spectra and rational Betti numbers, and
//! evaluates the local-to-global certificates (Garland, Żuk) that link
//! them. The [`harness`] module drives reproducible Monte Carlo runs.

// Links the system OpenBLAS that provides the LAPACK symbols.
#[cfg(feature = "system-lapack")]
extern crate openblas_src;

pub mod audit;
pub mod complex;
pub mod criteria;
pub mod error;
pub mod graph;
pub mod harness;
pub mod homology;
pub mod linalg;
pub mod rng;
pub mod spectral;
pub mod tail;

pub use error::{Error, Result};
pub use graph::{Graph, GraphParams};
pub use linalg::{Spectrum, SymMatrix};
