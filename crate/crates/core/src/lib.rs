//! # graphheat
//!
//! Laplacians of weighted graphs `(b, c, m)` and the short-time behavior of
//! their heat semigroup `e^{-tL}` and unitary group `e^{-itL}`.
//!
//! For a locally finite graph and vertices at combinatorial distance `d`,
//!
//! ```text
//! |<1_x, e^{-tL} 1_y> - t^d |<1_x, L^d 1_y>| / d!| <= t^{d+1} C(x,y)
//! ```
//!
//! so `log p_t(x,y) / log t -> d` as `t -> 0` and `t log p_t(x,y) -> 0`: the
//! Gaussian (Varadhan) scaling seen on manifolds does not occur on graphs.
//! This crate evaluates every quantity in that statement and checks the
//! inequality numerically.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`graph`] | weighted graphs, procedural sources, BFS distance, file format |
//! | [`operator`] | `l^2(X,m)`, sparse Laplacian application, quadratic form |
//! | [`moments`] | `<1_x, L^n 1_y>`, first non-vanishing order, walk-sum oracle |
//! | [`spectral`] | eigendecomposition, functional calculus, propagators |
//! | [`asymptotics`] | bound reports, exponent fits, vanishing-order check |
//! | [`generators`] | built-in graph families |
//!
//! ```
//! use graphheat::{generators, Method, Propagator, VertexId};
//!
//! let p = Propagator::for_graph(generators::path(2)).unwrap();
//! let t = 1e-3;
//! let value = p.heat_element(VertexId(0), VertexId(1), t, Method::Auto).unwrap().value;
//! assert!((value - (1.0 - (-2.0 * t).exp()) / 2.0).abs() < 1e-15);
//! ```

pub mod asymptotics;
pub mod error;
pub mod generators;
pub mod graph;
pub mod moments;
pub mod operator;
pub mod report;
pub mod spectral;

pub use asymptotics::{BoundKind, BoundReport, ExponentFit, Group, TimeGrid};
pub use error::{Error, Result};
pub use graph::{Distance, GraphSource, VertexId, WeightedGraph};
pub use moments::{MomentTable, VanishingOrder};
pub use operator::{LaplacianOperator, RealVector, WeightedVector};
pub use spectral::{Method, PhiSpec, Propagator, SpectralDecomposition};
