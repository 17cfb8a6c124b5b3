//! Finite-window realization of the transfer operator `(Γη)_k = η_k − Df(x_{k−1}) η_{k−1}`
//! for torus diffeomorphisms, its inverses, hyperbolicity diagnostics built on them, and a
//! shadowing engine that refines pseudo-orbits into true orbits.
//!
//! Module map:
//! - [`seqspace`]: tangent sequences, graded weights, the shift.
//! - [`dynamics`]: map models, orbits, pseudo-orbits, derivative cocycles.
//! - [`operator`]: assembly of Γ, block matrix representations and their norm bounds.
//! - [`splitting`]: stable/unstable frames along orbits.
//! - [`inverse`]: splitting inverse, minimal-norm solves, decay certificates, approximate
//!   inverses and Neumann inversion.
//! - [`diagnostics`]: Mather-type K-stability tests, Lyapunov exponents, Pesin grading.
//! - [`shadowing`]: the contraction `Φ_y` and its verification.
//! - [`boundary`]: slowed Anosov families and the boundary criterion experiment.

pub mod boundary;
pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod inverse;
pub mod linalg;
pub mod operator;
pub mod rng;
pub mod seqspace;
pub mod shadowing;
pub mod splitting;

pub use dynamics::{
    cocycle, defect, evolve, pseudo_orbit, LinearToral, MapModel, ModelSpec, OrbitWindow, Regularity,
    SlowedCatMap, StandardMap, TorusPoint,
};
pub use error::{BudgetTerm, Error, ErrorKind, Result, Side};
pub use inverse::{DecayCertificate, InverseOperator};
pub use operator::{MatrixRep, TransferOperator};
pub use seqspace::{Grade, TangentSequence, WeightSequence, Window};
pub use splitting::{SplittingConstants, SplittingFrame, SplittingFrames};
