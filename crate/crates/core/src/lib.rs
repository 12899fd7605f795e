//! Numerical and exact-arithmetic toolkit for Rellich and Rellich–Sobolev
//! type inequalities with logarithmic weights.
//!
//! The crate is organised bottom-up:
//!
//! - [`constants`]: closed-form constants as exact rationals.
//! - [`quadrature`]: graded Gauss–Legendre rules on `(0, 1)` that handle
//!   `r^p X(r)^σ` weights, `X(r) = 1/(1 − ln r)`.
//! - [`harmonics`]: spherical-harmonic modes and per-mode radial forms.
//! - [`mellin`]: Mellin symbols of the radial problems and their minima.
//! - [`discretizer`]: Hermite finite elements on log-graded meshes.
//! - [`exactpoly`]: symbolic verification of polynomial identities in `X`.
//! - [`changevar`]: the power and logarithmic changes of variable.
//! - [`extremals`]: test-function families and sharpness sweeps.
//!
//! With the default `parallel` feature, sweeps fan out over rayon; without it
//! every map runs sequentially. Results are identical either way.

// `!(x > 0.0)` style guards reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod changevar;
pub mod constants;
pub mod extremals;
pub mod discretizer;
pub mod error;
pub mod exactpoly;
pub mod harmonics;
pub mod mellin;
pub mod par;
pub mod quadrature;

pub use constants::{Dimension, Rational};
pub use error::{Error, Result};
pub use discretizer::{ElementKind, Mesh1D};
pub use harmonics::{mode, FormKind, ModeSpec, PolyProfile, RadialProfile};
pub use quadrature::WeightedQuadrature;
