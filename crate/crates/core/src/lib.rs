//! Exact-arithmetic engine for truncated multivariate formal power series:
//! solvers for nonlinear and linear singular analytic systems parametrized
//! by finite jets, nondegeneracy invariants of real-analytic generic
//! submanifolds in normal coordinates, and reconstruction of truncated
//! automorphisms of hypersurfaces from their finite jet at a point.

pub mod error;
pub mod faa;
pub mod homog;
pub mod index;
pub mod jet;
pub mod linalg;
pub mod manifold;
pub mod maps;
pub mod reduce;
pub mod scalar;
pub mod segre;
pub mod series;
pub mod serialize;
pub mod solve;

pub use error::CoreError;
pub use index::MultiIndex;
pub use jet::{jet_pushforward, Jet};
pub use scalar::{Rational, Scalar};
pub use series::Series;
