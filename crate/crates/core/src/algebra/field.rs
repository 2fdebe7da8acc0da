//! Homogeneous polynomial vector fields and function tuples.

use std::fmt;

use num_complex::Complex64;

use crate::algebra::poly::{poly_sup_bound, HomPoly, PowerTable};
use crate::error::Result;

/// Polynomial vector field of order s: n components, each a homogeneous
/// polynomial of degree s+1. Order 0 (linear components) is allowed as a
/// carrier for linear parts; the normalization algorithm itself only
/// produces generators of order ≥ 1.
#[derive(Clone, PartialEq)]
pub struct HomVectorField {
    order: usize,
    components: Vec<HomPoly>,
}

impl HomVectorField {
    pub fn zero(nvars: usize, order: usize) -> Self {
        Self {
            order,
            components: (0..nvars)
                .map(|_| HomPoly::zero(nvars, order as u32 + 1))
                .collect(),
        }
    }

    /// Assemble from components, which must share a degree d ≥ 1; the order
    /// label is d − 1.
    pub fn from_components(components: Vec<HomPoly>) -> Self {
        assert!(!components.is_empty());
        let degree = components[0].degree();
        assert!(degree >= 1, "vector field components must have degree >= 1");
        assert!(
            components.iter().all(|c| c.degree() == degree),
            "all components must share one degree"
        );
        assert!(components.iter().all(|c| c.nvars() == components.len()));
        Self {
            order: degree as usize - 1,
            components,
        }
    }

    /// Single-component field c·x^k ∂/∂x_j.
    pub fn monomial(nvars: usize, j: usize, k: crate::algebra::MultiIndex, c: Complex64) -> Self {
        let mut field = Self::zero(nvars, k.degree() as usize - 1);
        field.components[j].add_term(k, c);
        field
    }

    pub fn nvars(&self) -> usize {
        self.components.len()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Degree of every component polynomial (order + 1).
    pub fn degree(&self) -> u32 {
        self.order as u32 + 1
    }

    pub fn component(&self, j: usize) -> &HomPoly {
        &self.components[j]
    }

    pub fn component_mut(&mut self, j: usize) -> &mut HomPoly {
        &mut self.components[j]
    }

    pub fn components(&self) -> &[HomPoly] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(HomPoly::is_zero)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let components = self
            .components
            .iter()
            .zip(other.components.iter())
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            order: self.order,
            components,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            order: self.order,
            components: self.components.iter().map(|p| p.scale(c)).collect(),
        }
    }

    /// The field norm: sum of the component polynomial norms.
    pub fn norm(&self) -> f64 {
        self.components.iter().map(HomPoly::norm).sum()
    }

    /// Evaluate all components at a point.
    pub fn eval(&self, x: &[Complex64]) -> Vec<Complex64> {
        let pows = PowerTable::new(x, self.degree());
        self.components.iter().map(|p| p.eval_with(&pows)).collect()
    }
}

impl fmt::Debug for HomVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "HomVectorField(order {}, n {}, norm {:.3e})",
            self.order,
            self.nvars(),
            self.norm()
        )
    }
}

/// Upper bound ‖X‖·ρ^(order+1) for the supremum norm |X|_ρ on the polydisk.
pub fn vf_sup_bound(x: &HomVectorField, rho: f64) -> f64 {
    x.components.iter().map(|p| poly_sup_bound(p, rho)).sum()
}

/// An n-tuple of scalar functions of a common degree — one graded slice of a
/// coordinate map y = φ(x). Shares the storage layout of a vector field but
/// transforms componentwise (each entry is an ordinary function, not a field
/// component), which is what distinguishes a point-map series from a
/// vector-field series under Lie derivatives.
#[derive(Clone, PartialEq, Debug)]
pub struct FnTuple(pub HomVectorField);

impl FnTuple {
    pub fn zero(nvars: usize, order: usize) -> Self {
        Self(HomVectorField::zero(nvars, order))
    }

    /// The identity tuple (x_1, …, x_n), order 0.
    pub fn identity(nvars: usize) -> Self {
        let comps = (0..nvars).map(|j| HomPoly::coordinate(nvars, j)).collect();
        Self(HomVectorField::from_components(comps))
    }

    pub fn order(&self) -> usize {
        self.0.order()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }
}
