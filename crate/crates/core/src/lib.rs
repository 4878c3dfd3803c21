//! MCMC-free posterior means for finite random series priors on B-spline
//! bases.
//!
//! The ratio models ([`density`], [`spectral`], [`regression`]) share the
//! [`engine`], which evaluates posterior means exactly by enumeration or by
//! importance sampling. The Gaussian models in [`linmodel`] are conjugate in
//! closed form. [`oracle`] holds slow reference implementations.

pub mod density;
pub mod engine;
pub mod error;
pub mod estimate;
pub mod laws;
pub mod linmodel;
pub mod numeric;
pub mod oracle;
pub mod priors;
pub mod regression;
pub mod spectral;
pub mod splinebasis;

pub use engine::{EngineOptions, Method, Prepared, Proposal, RatioResult, RatioSumSpec};
pub use error::{Error, Result};
pub use estimate::PosteriorEstimate;
pub use priors::{CoefFamily, CoefficientPrior, DimensionFamily, DimensionPrior};
pub use splinebasis::{ScaledBasis, SparseRow, SplineBasis};
