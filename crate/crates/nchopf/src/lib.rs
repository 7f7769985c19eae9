//! Exact symbolic engine for the theta-deformed quaternionic Hopf fibration
//! `S^7_theta' -> S^4_theta`.
//!
//! The crate is organised bottom-up:
//!
//! * [`scalars`]: Gaussian-rational Laurent polynomials in the phase `mu`.
//! * [`algebra`]: twisted polynomial *-algebras, sphere reduction, bases.
//! * [`linalg`]: sparse elimination and the ideal-membership oracle.
//! * [`forms`]: first-order (`Omega_D`) and exterior calculi, universal forms.
//! * [`split`]: splitting homomorphism, numerical evaluation, Hodge star.
//! * [`fibration`]: kets, projections, Grassmannian connections.
//! * [`hopf`]: the Hopf algebra `A(SU(2))`, coaction, Galois map, strong connection.
//! * [`chern`]: Chern characters, proportionality constants and the index.
//! * [`classical`]: the commutative limit and its numeric regressions.
//! * [`props`]: seeded random elements and the algebraic laws checked on them.

pub mod algebra;
pub mod chern;
pub mod classical;
pub mod fibration;
pub mod forms;
pub mod hopf;
pub mod linalg;
pub mod props;
pub mod rng;
pub mod scalars;
pub mod split;

use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("unknown generator `{0}` for presentation `{1}`")]
    UnknownGenerator(String, String),
    #[error("unknown presentation `{0}`")]
    UnknownPresentation(String),
    #[error("presentation mismatch: `{0}` vs `{1}`")]
    PresentationMismatch(String, String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("degree mismatch: {0}")]
    Degree(String),
    #[error("bound {0} exceeds the configured cap {1}")]
    BoundOverflow(usize, usize),
    #[error("unsupported presentation `{0}` for this operation")]
    Unsupported(String),
    #[error("point is not on the sphere (norm deviation {0:e})")]
    OffSphere(f64),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("element is not coinvariant: {0}")]
    NotCoinvariant(String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("undecided at bound {0}")]
    Undecided(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
