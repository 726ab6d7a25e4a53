//! Exact spectral and mixing analysis for systems of k particles performing
//! simultaneous jumps on the discrete circle Z/nZ, conditioned never to
//! intersect.
//!
//! The state space is the set B_{k,n} of k strictly decreasing positions on
//! the circle. A step distribution p on {-k,...,k} selects how many particles
//! jump (negative = clockwise); the conditioned dynamics is the Doob
//! h-transform of the jump operator by its Perron eigenvector, which turns
//! out to be a Schur polynomial evaluated at roots of unity. This crate
//! builds those kernels exactly, diagonalizes them in closed form, and
//! exposes mixing-time and cutoff diagnostics:
//!
//! * [`config`] — configurations, shift orbits, partition-pair coding of
//!   near-ground configurations, integer-partition generating functions;
//! * [`symm`] — elementary/power-sum/Schur evaluation at arbitrary complex
//!   points, sine-product ground-state formulas, q-binomial and Pieri checks;
//! * [`kernels`] — block moves, adjacency operators, Doob kernels, mixture
//!   kernels, model assumption audits, trajectory simulation;
//! * [`spectral`] — closed-form eigenvalues, the shared eigenbasis f_J,
//!   spectral gaps, heat-kernel densities;
//! * [`mixing`] — exact total-variation curves, l² curves, rigorous lower
//!   bounds, mixing times, cutoff-profile sweeps;
//! * [`asymptotics`] — saddle-point evaluation of the Perron eigenvalues,
//!   transport-map orbit classification, truncation and power-sum bounds;
//! * [`models`] — ready-made families: constant step laws, collision-free
//!   exclusion dynamics, and dimer-measure step laws;
//! * [`report`]/[`cache`] — deterministic CSV/JSON artifacts and a
//!   content-addressed spectrum cache.
//!
//! Everything is deterministic: all randomness flows through explicit seeds,
//! iteration orders are fixed, and artifacts serialize floats with 17
//! significant digits so repeated runs are byte-identical.

#![deny(missing_docs)]

pub mod asymptotics;
pub mod cache;
pub mod config;
pub mod error;
pub mod kernels;
pub mod mixing;
pub mod models;
pub mod report;
pub mod rng;
pub mod spectral;
pub mod symm;

pub use config::{
    enumerate_configs, orbit_decompose, CircleConfig, OrbitClass, PartitionPair,
};
pub use error::{Error, Result};
pub use kernels::{ChainModel, SparseKernel, StateSpace, StepDistribution};
pub use models::{build_asep, build_constant, build_dimer, ModelReport, PresetModel};
pub use spectral::{full_spectrum, gap, GapReport, SpectrumEntry};

/// Version tag written into artifact headers.
pub const SCHEMA_VERSION: u32 = 1;
