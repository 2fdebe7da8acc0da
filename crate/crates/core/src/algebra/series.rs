//! Graded truncated series over polynomials, vector fields and function
//! tuples, plus point-map composition and evaluation.

use num_complex::Complex64;

use crate::algebra::field::{vf_sup_bound, FnTuple, HomVectorField};
use crate::algebra::poly::{poly_sup_bound, HomPoly, PowerTable};
use crate::error::Result;

/// A homogeneous item living at one slot of a graded series.
///
/// The grade is the quantity raised by Lie derivatives: the degree for
/// scalar polynomials, the order (degree − 1) for vector fields and
/// function tuples. Keeping both conventions under one trait lets every
/// graded operator run over all three kinds.
pub trait Graded: Clone {
    fn nvars(&self) -> usize;
    fn grade(&self) -> usize;
    fn zero(nvars: usize, grade: usize) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Result<Self>;
    fn scale(&self, c: Complex64) -> Self;
    fn norm(&self) -> f64;
    /// Upper bound for the supremum norm on the polydisk of radius ρ.
    fn sup_bound(&self, rho: f64) -> f64;
}

impl Graded for HomPoly {
    fn nvars(&self) -> usize {
        HomPoly::nvars(self)
    }
    fn grade(&self) -> usize {
        self.degree() as usize
    }
    fn zero(nvars: usize, grade: usize) -> Self {
        HomPoly::zero(nvars, grade as u32)
    }
    fn is_zero(&self) -> bool {
        HomPoly::is_zero(self)
    }
    fn add(&self, other: &Self) -> Result<Self> {
        HomPoly::add(self, other)
    }
    fn scale(&self, c: Complex64) -> Self {
        HomPoly::scale(self, c)
    }
    fn norm(&self) -> f64 {
        HomPoly::norm(self)
    }
    fn sup_bound(&self, rho: f64) -> f64 {
        poly_sup_bound(self, rho)
    }
}

impl Graded for HomVectorField {
    fn nvars(&self) -> usize {
        HomVectorField::nvars(self)
    }
    fn grade(&self) -> usize {
        self.order()
    }
    fn zero(nvars: usize, grade: usize) -> Self {
        HomVectorField::zero(nvars, grade)
    }
    fn is_zero(&self) -> bool {
        HomVectorField::is_zero(self)
    }
    fn add(&self, other: &Self) -> Result<Self> {
        HomVectorField::add(self, other)
    }
    fn scale(&self, c: Complex64) -> Self {
        HomVectorField::scale(self, c)
    }
    fn norm(&self) -> f64 {
        HomVectorField::norm(self)
    }
    fn sup_bound(&self, rho: f64) -> f64 {
        vf_sup_bound(self, rho)
    }
}

impl Graded for FnTuple {
    fn nvars(&self) -> usize {
        self.0.nvars()
    }
    fn grade(&self) -> usize {
        self.0.order()
    }
    fn zero(nvars: usize, grade: usize) -> Self {
        FnTuple::zero(nvars, grade)
    }
    fn is_zero(&self) -> bool {
        FnTuple::is_zero(self)
    }
    fn add(&self, other: &Self) -> Result<Self> {
        Ok(FnTuple(self.0.add(&other.0)?))
    }
    fn scale(&self, c: Complex64) -> Self {
        FnTuple(self.0.scale(c))
    }
    fn norm(&self) -> f64 {
        FnTuple::norm(self)
    }
    fn sup_bound(&self, rho: f64) -> f64 {
        vf_sup_bound(&self.0, rho)
    }
}

/// Truncated graded series: slot g holds the part of grade g, g = 0..=N.
/// Operations never produce parts beyond the truncation grade.
#[derive(Clone, PartialEq, Debug)]
pub struct Series<T: Graded> {
    nvars: usize,
    parts: Vec<T>,
}

pub type ScalarSeries = Series<HomPoly>;
pub type FieldSeries = Series<HomVectorField>;
pub type TupleSeries = Series<FnTuple>;

impl<T: Graded> Series<T> {
    pub fn zero(nvars: usize, max_grade: usize) -> Self {
        Self {
            nvars,
            parts: (0..=max_grade).map(|g| T::zero(nvars, g)).collect(),
        }
    }

    /// Build from parts placed at their own grades; grades beyond
    /// `max_grade` are dropped.
    pub fn from_parts(nvars: usize, max_grade: usize, parts: impl IntoIterator<Item = T>) -> Self {
        let mut s = Self::zero(nvars, max_grade);
        for p in parts {
            if p.grade() <= max_grade {
                s.set_part(p);
            }
        }
        s
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn max_grade(&self) -> usize {
        self.parts.len() - 1
    }

    pub fn part(&self, grade: usize) -> &T {
        &self.parts[grade]
    }

    pub fn parts(&self) -> &[T] {
        &self.parts
    }

    pub fn set_part(&mut self, p: T) {
        let g = p.grade();
        assert!(g < self.parts.len());
        assert_eq!(p.nvars(), self.nvars);
        self.parts[g] = p;
    }

    pub fn add_to_part(&mut self, p: &T) -> Result<()> {
        let g = p.grade();
        if g < self.parts.len() {
            self.parts[g] = self.parts[g].add(p)?;
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(T::is_zero)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut out = self.truncated(self.max_grade().max(other.max_grade()));
        for p in &other.parts {
            out.add_to_part(p)?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            nvars: self.nvars,
            parts: self.parts.iter().map(|p| p.scale(c)).collect(),
        }
    }

    /// Re-truncate (extending with zeros or dropping high parts).
    pub fn truncated(&self, max_grade: usize) -> Self {
        let mut out = Self::zero(self.nvars, max_grade);
        for p in &self.parts {
            if p.grade() <= max_grade {
                out.parts[p.grade()] = p.clone();
            }
        }
        out
    }

    pub fn part_norms(&self) -> Vec<f64> {
        self.parts.iter().map(T::norm).collect()
    }

    /// Σ over parts of their polydisk sup bounds.
    pub fn sup_bound(&self, rho: f64) -> f64 {
        self.parts.iter().map(|p| p.sup_bound(rho)).sum()
    }
}

impl Series<FnTuple> {
    /// The identity map as a tuple series (x at grade 0, zero elsewhere).
    pub fn identity_map(nvars: usize, max_grade: usize) -> Self {
        let mut s = Self::zero(nvars, max_grade);
        s.set_part(FnTuple::identity(nvars));
        s
    }

    /// Evaluate the map at a point.
    pub fn eval(&self, x: &[Complex64]) -> Vec<Complex64> {
        let pows = PowerTable::new(x, self.max_grade() as u32 + 1);
        let mut out = vec![Complex64::new(0.0, 0.0); self.nvars];
        for p in &self.parts {
            for (j, comp) in p.0.components().iter().enumerate() {
                out[j] += comp.eval_with(&pows);
            }
        }
        out
    }

    /// Multiply component j by c_j in every graded part.
    pub fn scale_components(&self, c: &[Complex64]) -> Self {
        assert_eq!(c.len(), self.nvars);
        let parts = self
            .parts
            .iter()
            .map(|p| {
                let comps = p
                    .0
                    .components()
                    .iter()
                    .zip(c.iter())
                    .map(|(poly, &cj)| poly.scale(cj))
                    .collect();
                FnTuple(HomVectorField::from_components(comps))
            })
            .collect();
        Self {
            nvars: self.nvars,
            parts,
        }
    }

    /// Composition of truncated point maps: (self ∘ inner)(x), truncated at
    /// the grade of `self`. Both maps must fix the origin (no grade < 0
    /// parts exist by construction).
    pub fn compose(&self, inner: &Self) -> Self {
        let nvars = self.nvars;
        let max_grade = self.max_grade();
        let max_deg = max_grade + 1;

        // Inner components as scalar truncated series indexed by degree.
        let inner_scalar: Vec<ScalarTrunc> = (0..nvars)
            .map(|m| {
                let mut st = ScalarTrunc::zero(nvars, max_deg);
                for p in &inner.parts {
                    let poly = &p.0.components()[m];
                    if poly.degree() as usize <= max_deg {
                        st.parts[poly.degree() as usize] =
                            st.parts[poly.degree() as usize].add(poly).unwrap();
                    }
                }
                st
            })
            .collect();

        // Power cache per inner component.
        let mut pow_cache: Vec<Vec<ScalarTrunc>> = (0..nvars)
            .map(|m| vec![ScalarTrunc::one(nvars, max_deg), inner_scalar[m].clone()])
            .collect();
        let mut pow = |cache: &mut Vec<Vec<ScalarTrunc>>, m: usize, e: usize| -> ScalarTrunc {
            while cache[m].len() <= e {
                let last = cache[m].last().unwrap().mul(&inner_scalar[m]);
                cache[m].push(last);
            }
            cache[m][e].clone()
        };

        let mut result: Vec<ScalarTrunc> = (0..nvars).map(|_| ScalarTrunc::zero(nvars, max_deg)).collect();
        for p in &self.parts {
            for (j, comp) in p.0.components().iter().enumerate() {
                for (k, &c) in comp.terms() {
                    let mut term = ScalarTrunc::one(nvars, max_deg);
                    for (m, &e) in k.exponents().iter().enumerate() {
                        if e > 0 {
                            term = term.mul(&pow(&mut pow_cache, m, e as usize));
                        }
                    }
                    result[j].add_scaled(&term, c);
                }
            }
        }

        // Reassemble into a tuple series.
        let mut out = Self::zero(nvars, max_grade);
        for g in 0..=max_grade {
            let comps: Vec<HomPoly> = (0..nvars).map(|j| result[j].parts[g + 1].clone()).collect();
            out.parts[g] = FnTuple(HomVectorField::from_components(comps));
        }
        out
    }
}

/// Scalar truncated power series: slot d holds the degree-d homogeneous part.
struct ScalarTrunc {
    parts: Vec<HomPoly>,
}

impl Clone for ScalarTrunc {
    fn clone(&self) -> Self {
        Self {
            parts: self.parts.clone(),
        }
    }
}

impl ScalarTrunc {
    fn zero(nvars: usize, max_deg: usize) -> Self {
        Self {
            parts: (0..=max_deg)
                .map(|d| HomPoly::zero(nvars, d as u32))
                .collect(),
        }
    }

    fn one(nvars: usize, max_deg: usize) -> Self {
        let mut s = Self::zero(nvars, max_deg);
        s.parts[0].add_term(
            crate::algebra::MultiIndex::zeros(nvars),
            Complex64::new(1.0, 0.0),
        );
        s
    }

    fn mul(&self, other: &Self) -> Self {
        let max_deg = self.parts.len() - 1;
        let nvars = self.parts[0].nvars();
        let mut out = Self::zero(nvars, max_deg);
        for (da, a) in self.parts.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (db, b) in other.parts.iter().enumerate() {
                if da + db > max_deg {
                    break;
                }
                if b.is_zero() {
                    continue;
                }
                out.parts[da + db] = out.parts[da + db].add(&a.mul(b)).unwrap();
            }
        }
        out
    }

    fn add_scaled(&mut self, other: &Self, c: Complex64) {
        for (d, p) in other.parts.iter().enumerate() {
            if !p.is_zero() {
                self.parts[d] = self.parts[d].add(&p.scale(c)).unwrap();
            }
        }
    }
}
