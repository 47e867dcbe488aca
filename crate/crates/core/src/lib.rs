//! Sparse polynomial approximation of high-dimensional functions from random
//! samples via weighted l1 minimization.
//!
//! The crate covers the whole pipeline: hyperbolic-cross index sets and lower
//! sets ([`index`]), orthonormal Legendre/Chebyshev bases and design matrices
//! ([`basis`]), a primal-dual solver for the WQCBP, WLASSO, WSR-LASSO and
//! WLAD-LASSO decoders ([`solver`]), tuning recipes and K-fold cross
//! validation ([`tuning`]), error metrics and diagnostics ([`metrics`]), and
//! reproducible experiment drivers ([`harness`]).

pub mod basis;
pub mod error;
pub mod harness;
pub mod index;
pub mod metrics;
pub mod rng;
pub mod solver;
pub mod tuning;

pub use error::{Error, Result};
