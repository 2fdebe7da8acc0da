use num_complex::Complex64;

use crate::algebra::MultiIndex;

/// Errors produced by the construction and verification pipeline.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),

    #[error("variable count mismatch: {0} vs {1}")]
    VariableMismatch(usize, usize),

    #[error("zero eigenvalue in linear part")]
    ZeroEigenvalue,

    #[error("generator of order 0 rejected: the graded series would not terminate")]
    ZeroOrderGenerator,

    /// A homological divisor fell below the resonance threshold.
    #[error("resonant divisor at k={k}, j={j}: |value| = {abs:.3e}")]
    ResonantDivisor {
        k: MultiIndex,
        j: usize,
        value: Complex64,
        abs: f64,
    },

    /// The map cannot be represented as a Lie transform of its linear part
    /// because a representation divisor vanished.
    #[error("representation obstruction at k={k}, j={j}: |value| = {abs:.3e}")]
    RepresentationObstruction {
        k: MultiIndex,
        j: usize,
        value: Complex64,
        abs: f64,
    },

    #[error("non-resonance violated at order {r}: beta = {beta:.3e}")]
    NonResonanceViolated { r: usize, beta: f64 },

    #[error("enumeration too large: {0} candidate sets exceed the guard")]
    EnumerationTooLarge(u128),

    #[error("divisor floor violated at r = {r}: alpha = {alpha:.6e} < {floor:.6e}")]
    FloorViolated { r: usize, alpha: f64, floor: f64 },

    #[error("weighted divisor sum has no tail bound: supply a Diophantine floor")]
    GammaDiverged,

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub type Result<T> = std::result::Result<T, Error>;
