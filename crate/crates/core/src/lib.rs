//! Exact SLE(8/3) passage probabilities and bubble connectivity functions,
//! together with the Monte Carlo and quadrature machinery used to check them.
//!
//! Modules, bottom up:
//! - [`special_fn`]: Gamma, Gauss ₂F₁ and the correlation factor `G(σ)`.
//! - [`formulas`]: closed-form one- and two-point probabilities.
//! - [`sle_sim`]: discretized chordal Loewner flow and passage classification.
//! - [`mc_harness`]: reproducible experiments and persisted records.
//! - [`quadrature`]: first and second area moments of the radius-1 bubble.
//! - [`verify`]: the invariant suite run by `sle-passage verify`.

// `!(x > 0.0)` rejects NaN along with nonpositive values
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod error;
pub mod formulas;
pub mod mc_harness;
pub mod point;
pub mod quadrature;
pub mod sle_sim;
pub mod special_fn;
pub mod verify;

pub use error::{Error, Result};
pub use point::{parse_complex, HalfPlanePoint};
