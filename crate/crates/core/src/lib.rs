//! Order-by-order linearization of analytic maps of ℂⁿ near a fixed point.
//!
//! Given a map x' = Λx + v₁(x) + v₂(x) + … with diagonal non-resonant
//! linear part, this crate constructs the near-identity coordinate change
//! conjugating the map to x' = Λx, one homogeneous order at a time, using
//! Lie series and Lie transforms. Alongside the construction it computes
//! every quantitative object of the convergence analysis: small-divisor
//! sequences, the combinatorics that control how divisors accumulate
//! across orders, the iteration-lemma norm bounds, and an explicit lower
//! bound for the radius of the polydisk on which the transformation is
//! certified analytic.
//!
//! Module map:
//! - [`algebra`]: multi-indices, homogeneous polynomials/vector fields,
//!   graded series, norms, canonical text form.
//! - [`lie`]: Lie derivatives, Lie series, the graded transform operators,
//!   composition and inversion.
//! - [`maps`]: spectra, the conjugation operators of the linear part, and
//!   the representation of a map by a generating sequence.
//! - [`normalizer`]: the order-by-order normal-form algorithm.
//! - [`divisors`]: small-divisor sequences and accumulation combinatorics.
//! - [`bounds`]: the iteration-lemma constant chain, analyticity
//!   certificates, and the convergence-radius lower bound.
//! - [`verify`]: independent numerical oracles (direct functional-equation
//!   recursion, conjugacy residuals, empirical radius estimation).

pub mod algebra;
pub mod bounds;
pub mod divisors;
mod error;
pub mod lie;
pub mod maps;
pub mod normalizer;
pub mod verify;

pub use algebra::{
    FieldSeries, FnTuple, Graded, HomPoly, HomVectorField, MultiIndex, ScalarSeries, Series,
    TupleSeries,
};
pub use error::{Error, Result};
pub use lie::GeneratingSequence;
pub use maps::{AnalyticMap, Spectrum};
pub use normalizer::NormalFormResult;
