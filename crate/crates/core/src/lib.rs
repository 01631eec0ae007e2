//! Convex image decomposition through multi-time Hamilton-Jacobi Hopf/Lax
//! formulas.
//!
//! The crate provides:
//!
//! * a convex-functional toolkit with certified proximal maps, the Moreau
//!   decomposition, and grid-based Legendre/inf-convolution oracles
//!   ([`functional`], [`convex`]);
//! * the anisotropic discrete total variation, its dual norm, and ball
//!   projections ([`tv`], [`gnorm`]);
//! * Lax (primal) and Hopf (dual) solvers for multi-time Hamilton-Jacobi
//!   problems with duality-gap certificates, minimizer recovery,
//!   commutation and conjugate-identity checks, and parameter scans
//!   ([`hj`]);
//! * named decomposition models: ROF, A²BC, Meyer's G-ball form, TVL1 and
//!   its regularized variant ([`models`]);
//! * vanishing-time limit experiments and their dual-pair problems
//!   ([`limits`]);
//! * the double-regularization path selecting minimal-norm minimizers and
//!   momenta from degenerate problems ([`selection`]);
//! * brute-force grid oracles for test ground truth ([`oracle`]).
//!
//! Everything numeric is generic over the scalar type through
//! [`scalar::Real`]; `f64` is the type the command-line tool and the
//! acceptance suite use.

pub mod convex;
pub mod error;
pub mod ext;
pub mod functional;
pub mod gnorm;
pub mod grid;
pub mod hj;
pub mod limits;
pub mod models;
pub mod num;
pub mod oracle;
pub mod scalar;
pub mod selection;
pub mod tv;

pub use error::{Error, Result};
pub use ext::ExtReal;
pub use functional::{Convex, Flags, Functional};
pub use grid::ImageGrid;
pub use scalar::Real;
pub use tv::TvVariant;

/// Concrete aliases for the common scalar choices.
pub type ImageGrid64 = grid::ImageGrid<f64>;
pub type ImageGrid32 = grid::ImageGrid<f32>;
pub type Functional64 = functional::Functional<f64>;
pub type MultiTimeProblem64 = hj::MultiTimeProblem<f64>;
pub type DecompositionResult64 = hj::DecompositionResult<f64>;
