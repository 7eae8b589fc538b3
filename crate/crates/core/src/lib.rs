//! Analytics for first downward passage times of spectrally negative Levy
//! processes.
//!
//! The crate models a process through its Laplace exponent psi, computes the
//! right inverse Phi and the conjugate subordinator exponent, evaluates
//! q-scale functions by numerical Laplace inversion, extracts fractional
//! moments of passage times through Marchaud differentiation of their
//! Laplace transforms, classifies moment existence exactly from the model
//! parameters, and cross-validates everything by Monte Carlo simulation.

pub mod claims;
pub mod classify;
pub mod error;
pub mod fracmoment;
pub mod inverse;
pub mod model;
pub mod quad;
pub mod roots;
pub mod scale;
pub mod special;

mod bell;
mod invlap;

pub use claims::ClaimDistribution;
pub use classify::{classify_moment, exponential_moment_abscissa, Clause, MomentVerdict, Verdict};
pub use error::{Error, Result};
pub use fracmoment::{
    marchaud, moment_from_laplace, passage_moment, upward_passage_moment, MarchaudConfig,
};
pub use inverse::InverseExponent;
pub use model::{JumpFamily, LevyModel, Regime};
pub use scale::{InversionParams, ScaleEvaluator};
