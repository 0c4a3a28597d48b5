//! Numerics for comparing spherical random geometric graphs with
//! Erdos-Renyi graphs: exact edge densities and thresholds, the inclusion
//! divergence between Erdos-Renyi laws, characteristic functions of
//! spherical Wishart matrices by steepest descent, and graph inclusion
//! probabilities by contour-deformed Fourier inversion with Monte Carlo
//! oracles.
//!
//! The model `G(n, p, d)` places n uniform points on the unit sphere in
//! `R^d` and joins two vertices when their inner product reaches the
//! threshold `t` that makes each edge appear with probability exactly p.
//! The Gaussian surrogate `G(n, p0)` replaces the Gram matrix of the
//! points with independent N(0, 1/d) entries, `p0 = 1 - Phi(sqrt(d) t)`.
//!
//! Modules:
//! - [`special`]: scalar special functions, edge probabilities, thresholds
//! - [`graphs`]: labeled graphs, statistics, and samplers for both models
//! - [`divergence`]: exact inclusion divergence between Erdos-Renyi laws
//! - [`mat`]: complex symmetric matrices and branch-tracked determinants
//! - [`wishart`]: characteristic functions and the eta sampler
//! - [`contour`]: the Fourier-inversion contour and its tilted density
//! - [`inclusion`]: inclusion-probability engines and condition reports
//! - [`mc`]: substreams, batched errors, deterministic parallelism

pub mod contour;
pub mod divergence;
pub mod error;
pub mod graphs;
pub mod inclusion;
pub mod mat;
pub mod mc;
pub mod quadrature;
pub mod special;
pub mod wishart;

pub use contour::ContourCurve;
pub use divergence::IdivResult;
pub use error::{Error, Result};
pub use graphs::{Graph, GraphStats};
pub use inclusion::{ConditionReport, InclusionEstimate};
pub use mat::ComplexSymMatrix;
pub use mc::{McEstimate, Streams};
pub use special::ModelParams;
