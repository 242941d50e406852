//! Finite-dimensional g-fusion frames in Hilbert C*-modules over the matrix
//! algebra `M_d(C)`.
//!
//! The module `H = A^n` is modelled as `d x (n*d)` complex matrices: a vector
//! `f = (f_1, .., f_n)` is the block row `[f_1 | .. | f_n]`, the left action of
//! `a in A` is left multiplication, and the inner product is `<f, g> = f g^*`.
//! Adjointable operators act by right multiplication with an `(n*d) x (n*d)`
//! matrix, which makes A-linearity structural.
//!
//! On top of that sit the frame machinery ([`frame`]), shift representability
//! ([`representability`]) and perturbation stability ([`perturbation`]).

pub mod cstar;
pub mod document;
pub mod error;
pub mod frame;
pub mod hilbert;
pub mod linalg;
pub mod perturbation;
pub mod random;
pub mod representability;

pub use cstar::AlgebraElement;
pub use document::{ElementDocument, FrameDocument};
pub use error::{Error, Result};
pub use frame::{FrameBounds, FrameElement, GFusionFrame};
pub use hilbert::{
    IndexConvention, ModuleOperator, ModuleSequence, ModuleVector, ShiftMode, Submodule,
};
pub use perturbation::{Interpretation, PerturbationParams, PerturbationVerdict};
pub use representability::{IndependenceReport, RepresentationResult, Structure};

pub use num_complex::Complex64;

/// Dense complex matrix used throughout the crate.
pub type CMatrix = nalgebra::DMatrix<Complex64>;

/// Relative slack for the PSD ordering and Hermitian checks.
pub const PSD_TOL: f64 = 1e-9;
/// Relative singular-value cutoff for every rank decision.
pub const RANK_TOL: f64 = 1e-10;
/// Relative gap `(B - A) / B` below which a frame counts as tight.
pub const TIGHT_TOL: f64 = 1e-9;
/// Smallest admissible `lambda_min / lambda_max` of the frame operator before inversion.
pub const INVERSION_GUARD: f64 = 1e-12;
/// Representability threshold, relative to `max ||Upsilon_xi||`.
pub const REPRESENTATION_TOL: f64 = 1e-8;
