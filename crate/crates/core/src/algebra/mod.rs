//! Sparse multi-index arithmetic, homogeneous polynomials and vector fields
//! over complex coefficients, graded truncated series, and the polynomial
//! norm used by all quantitative estimates.

mod field;
pub mod io;
mod poly;
mod series;

pub use field::{vf_sup_bound, FnTuple, HomVectorField};
pub use poly::{poly_sup_bound, HomPoly, MultiIndex, PowerTable, COEFF_FLOOR};
pub use series::{FieldSeries, Graded, ScalarSeries, Series, TupleSeries};
