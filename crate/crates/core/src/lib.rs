//! Asymptotic Bergman kernel coefficients from truncated Kähler potentials,
//! with finite-`k` oracles to check them against.
//!
//! The pipeline runs potential → polarization → division map `θ` → its
//! inverse `z(x, y, θ)` → amplitude base `Δ₀` → recursion for `b₀ … b_N`.
//! Every stage is generic over [`Coefficient`], so the same code runs in exact
//! Gaussian-rational arithmetic and in `f64` complex arithmetic.

pub mod error;
pub mod geometry;
pub mod io;
pub mod jet;
pub mod kuranishi;
pub mod oracle;
pub mod random;
pub mod recursion;
pub mod scalar;
pub mod twisted;

pub use error::{Error, Result};
pub use geometry::{Model, PotentialJet};
pub use jet::{Jet, JetMatrix, MultiIndex};
pub use oracle::kernels::FiniteKKernel;
pub use oracle::sweep::SweepResult;
pub use recursion::{expand, CoefficientSequence};
pub use scalar::{Coefficient, GaussianRational};
pub use twisted::{expand_twisted, BundleMetricJet};
