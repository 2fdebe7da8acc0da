//! Lie derivatives, Lie series, the graded Lie-transform operators, their
//! composition, and chains of Lie series with inverses.
//!
//! A generating sequence {X_r} of homogeneous vector fields (X_r of order r)
//! defines the transform T_X = Σ_s E_s, with E_0 the identity and
//! E_s = Σ_{j=1}^{s} (j/s) L_{X_j} E_{s-j}. The recursive form is the
//! production path; the direct expansion over index compositions is kept as
//! an independent reference implementation for cross-checking.

use num_complex::Complex64;

use crate::algebra::{FnTuple, Graded, HomPoly, HomVectorField, Series, TupleSeries};
use crate::error::{Error, Result};

/// Graded items a Lie derivative can act on.
pub trait LieOperand: Graded {
    /// L_X applied to the operand; raises the grade by the order of `x`.
    fn lie_derive(x: &HomVectorField, t: &Self) -> Self;
}

impl LieOperand for HomPoly {
    fn lie_derive(x: &HomVectorField, t: &Self) -> Self {
        lie_derivative_fn(x, t)
    }
}

impl LieOperand for HomVectorField {
    fn lie_derive(x: &HomVectorField, t: &Self) -> Self {
        lie_derivative_vf(x, t)
    }
}

impl LieOperand for FnTuple {
    fn lie_derive(x: &HomVectorField, t: &Self) -> Self {
        let comps = t
            .0
            .components()
            .iter()
            .map(|f| lie_derivative_fn(x, f))
            .collect();
        FnTuple(HomVectorField::from_components(comps))
    }
}

/// Lie derivative of a function: L_X f = Σ_j X_j ∂f/∂x_j.
pub fn lie_derivative_fn(x: &HomVectorField, f: &HomPoly) -> HomPoly {
    let nvars = x.nvars();
    let out_degree = x.degree() + f.degree().saturating_sub(1);
    let mut out = HomPoly::zero(nvars, out_degree);
    if f.degree() == 0 {
        return out;
    }
    for j in 0..nvars {
        let df = f.derivative(j);
        if df.is_zero() || x.component(j).is_zero() {
            continue;
        }
        out = out.add(&x.component(j).mul(&df)).expect("degrees agree");
    }
    out
}

/// Lie derivative of a vector field:
/// (L_X v)_j = Σ_l (X_l ∂v_j/∂x_l − v_l ∂X_j/∂x_l).
pub fn lie_derivative_vf(x: &HomVectorField, v: &HomVectorField) -> HomVectorField {
    let nvars = x.nvars();
    let order = x.order() + v.order();
    let mut comps = Vec::with_capacity(nvars);
    for j in 0..nvars {
        let mut acc = HomPoly::zero(nvars, order as u32 + 1);
        for l in 0..nvars {
            if !x.component(l).is_zero() {
                let dvj = v.component(j).derivative(l);
                if !dvj.is_zero() {
                    acc = acc.add(&x.component(l).mul(&dvj)).expect("degrees agree");
                }
            }
            if !v.component(l).is_zero() {
                let dxj = x.component(j).derivative(l);
                if !dxj.is_zero() {
                    acc = acc
                        .add(&v.component(l).mul(&dxj).scale(Complex64::new(-1.0, 0.0)))
                        .expect("degrees agree");
                }
            }
        }
        comps.push(acc);
    }
    HomVectorField::from_components(comps)
}

/// Ordered family {X_r} of homogeneous vector fields, X_r of order r
/// (possibly the zero field), defining a Lie transform.
#[derive(Clone, Debug)]
pub struct GeneratingSequence {
    nvars: usize,
    fields: Vec<HomVectorField>,
}

impl GeneratingSequence {
    /// `fields[i]` must have order i+1.
    pub fn new(nvars: usize, fields: Vec<HomVectorField>) -> Result<Self> {
        for (i, f) in fields.iter().enumerate() {
            if f.order() != i + 1 {
                return Err(Error::DegreeMismatch(i + 1, f.order()));
            }
            if f.nvars() != nvars {
                return Err(Error::VariableMismatch(nvars, f.nvars()));
            }
        }
        Ok(Self { nvars, fields })
    }

    pub fn zero(nvars: usize, nmax: usize) -> Self {
        Self {
            nvars,
            fields: (1..=nmax).map(|r| HomVectorField::zero(nvars, r)).collect(),
        }
    }

    /// Sequence with the single entry `field` at its own order.
    pub fn single(field: HomVectorField) -> Result<Self> {
        if field.order() == 0 {
            return Err(Error::ZeroOrderGenerator);
        }
        let nvars = field.nvars();
        let mut seq = Self::zero(nvars, field.order());
        seq.set(field);
        Ok(seq)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Highest populated order slot.
    pub fn nmax(&self) -> usize {
        self.fields.len()
    }

    /// The field of order r (zero field if r is beyond the truncation).
    pub fn get(&self, r: usize) -> HomVectorField {
        assert!(r >= 1);
        self.fields
            .get(r - 1)
            .cloned()
            .unwrap_or_else(|| HomVectorField::zero(self.nvars, r))
    }

    pub fn get_ref(&self, r: usize) -> Option<&HomVectorField> {
        assert!(r >= 1);
        self.fields.get(r - 1)
    }

    /// Replace the slot matching the field's order, growing as needed.
    pub fn set(&mut self, field: HomVectorField) {
        assert!(field.order() >= 1);
        assert_eq!(field.nvars(), self.nvars);
        while self.fields.len() < field.order() {
            let r = self.fields.len() + 1;
            self.fields.push(HomVectorField::zero(self.nvars, r));
        }
        self.fields[field.order() - 1] = field;
    }

    pub fn is_zero(&self) -> bool {
        self.fields.iter().all(HomVectorField::is_zero)
    }

    pub fn fields(&self) -> &[HomVectorField] {
        &self.fields
    }

    pub fn norms(&self) -> Vec<f64> {
        self.fields.iter().map(HomVectorField::norm).collect()
    }

    /// The graded operators E_0..E_smax applied to `target`, computed by the
    /// recursion. Entry m has grade `target.grade() + m`; this table is the
    /// per-target memo of the recursion.
    pub fn e_table<T: LieOperand>(&self, target: &T, smax: usize) -> Vec<T> {
        let mut table: Vec<T> = Vec::with_capacity(smax + 1);
        table.push(target.clone());
        if target.is_zero() {
            for m in 1..=smax {
                table.push(T::zero(self.nvars, target.grade() + m));
            }
            return table;
        }
        for m in 1..=smax {
            let mut acc = T::zero(self.nvars, target.grade() + m);
            for j in 1..=m.min(self.fields.len()) {
                let xj = &self.fields[j - 1];
                if xj.is_zero() || table[m - j].is_zero() {
                    continue;
                }
                let term = T::lie_derive(xj, &table[m - j]);
                acc = acc
                    .add(&term.scale(Complex64::new(j as f64 / m as f64, 0.0)))
                    .expect("grades agree");
            }
            debug_assert_eq!(acc.grade(), target.grade() + m);
            table.push(acc);
        }
        table
    }

    /// E_s applied to `target` (recursive form).
    pub fn transform_part<T: LieOperand>(&self, s: usize, target: &T) -> T {
        self.e_table(target, s).pop().expect("table is nonempty")
    }

    /// E_s applied to `target` by the direct expansion over compositions
    /// j_1 + … + j_k = s with weights (j_k⋯j_1)/((j_1+…+j_k)⋯j_1).
    /// Reference path used for cross-checking the recursion; compositions
    /// touching an absent or zero field contribute nothing and are skipped,
    /// which realizes the restriction j_i ≥ r when the sequence starts with
    /// r−1 zero fields.
    pub fn transform_part_direct<T: LieOperand>(&self, s: usize, target: &T) -> T {
        assert!(s >= 1);
        let mut out = T::zero(self.nvars, target.grade() + s);
        let mut parts: Vec<usize> = Vec::new();
        self.direct_rec(s, target, &mut parts, &mut out);
        out
    }

    fn direct_rec<T: LieOperand>(&self, left: usize, target: &T, parts: &mut Vec<usize>, out: &mut T) {
        if left == 0 {
            // Weight with exact integer arithmetic, converted at the end.
            let mut num: u128 = 1;
            let mut den: u128 = 1;
            let mut partial = 0u128;
            for &j in parts.iter() {
                partial += j as u128;
                num *= j as u128;
                den *= partial;
                let g = gcd(num, den);
                num /= g;
                den /= g;
            }
            let w = num as f64 / den as f64;
            let mut term = target.clone();
            for &j in parts.iter() {
                term = T::lie_derive(&self.fields[j - 1], &term);
            }
            *out = out
                .add(&term.scale(Complex64::new(w, 0.0)))
                .expect("grades agree");
            return;
        }
        for j in 1..=left.min(self.fields.len()) {
            if self.fields[j - 1].is_zero() {
                continue;
            }
            parts.push(j);
            self.direct_rec(left - j, target, parts, out);
            parts.pop();
        }
    }

    /// T_X applied to a graded series, truncated at the series' grade.
    pub fn apply<T: LieOperand>(&self, series: &Series<T>) -> Series<T> {
        let nmax = series.max_grade();
        let mut out = Series::zero(series.nvars(), nmax);
        for part in series.parts() {
            if part.is_zero() {
                continue;
            }
            let table = self.e_table(part, nmax - part.grade());
            for entry in &table {
                out.add_to_part(entry).expect("grades align");
            }
        }
        out
    }

    /// T_X applied to a single homogeneous polynomial, as a scalar series
    /// truncated at degree `max_degree`.
    pub fn apply_to_poly(&self, f: &HomPoly, max_degree: usize) -> Series<HomPoly> {
        let mut s = Series::zero(f.nvars(), max_degree);
        if f.degree() as usize <= max_degree {
            s.set_part(f.clone());
        }
        self.apply(&s)
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

/// exp(L_X) applied to a graded series, truncated at the series' grade.
/// The generator must have order ≥ 1, otherwise the graded expansion would
/// not terminate.
pub fn lie_series_apply<T: LieOperand>(x: &HomVectorField, series: &Series<T>) -> Result<Series<T>> {
    if x.order() == 0 {
        return Err(Error::ZeroOrderGenerator);
    }
    let nmax = series.max_grade();
    let mut out = Series::zero(series.nvars(), nmax);
    for part in series.parts() {
        if part.is_zero() {
            continue;
        }
        out.add_to_part(part)?;
        if x.is_zero() {
            continue;
        }
        let mut term = part.clone();
        let mut j = 1u32;
        while term.grade() + x.order() <= nmax {
            // term_{j} = L_X term_{j-1} / j accumulates 1/j!.
            term = T::lie_derive(x, &term).scale(Complex64::new(1.0 / f64::from(j), 0.0));
            if term.is_zero() {
                break;
            }
            out.add_to_part(&term)?;
            j += 1;
        }
    }
    Ok(out)
}

/// Generating sequence Z with T_X ∘ T_Y = T_Z up to the common truncation:
/// Z_s = X_s + Y_s + Σ_{j<s} (j/s) E^X_{s−j} Y_j.
pub fn compose_transforms(
    x: &GeneratingSequence,
    y: &GeneratingSequence,
) -> Result<GeneratingSequence> {
    if x.nvars() != y.nvars() {
        return Err(Error::VariableMismatch(x.nvars(), y.nvars()));
    }
    let nmax = x.nmax().max(y.nmax());
    let mut z = GeneratingSequence::zero(x.nvars(), nmax);
    for s in 1..=nmax {
        z.set(x.get(s).add(&y.get(s))?);
    }
    for j in 1..nmax {
        let yj = y.get(j);
        if yj.is_zero() {
            continue;
        }
        let table = x.e_table(&yj, nmax - j);
        for (m, entry) in table.iter().enumerate().skip(1) {
            let s = j + m;
            let w = Complex64::new(j as f64 / s as f64, 0.0);
            z.set(z.get(s).add(&entry.scale(w))?);
        }
    }
    Ok(z)
}

/// Commutator series: part m of {a, b} is Σ_{p+q=m} L_{a_p} b_q.
pub fn bracket_series(
    a: &Series<HomVectorField>,
    b: &Series<HomVectorField>,
) -> Result<Series<HomVectorField>> {
    let nmax = a.max_grade().min(b.max_grade());
    let mut out = Series::zero(a.nvars(), nmax);
    for pa in a.parts() {
        if pa.is_zero() {
            continue;
        }
        for pb in b.parts() {
            if pb.is_zero() || pa.grade() + pb.grade() > nmax {
                continue;
            }
            out.add_to_part(&lie_derivative_vf(pa, pb))?;
        }
    }
    Ok(out)
}

/// A composition of Lie series exp(L_{X_r}) ∘ … ∘ exp(L_{X_1}) applied as an
/// operator chain; the inverse reverses the order and negates the fields.
#[derive(Clone, Debug)]
pub struct LieChain {
    nvars: usize,
    fields: Vec<HomVectorField>,
}

impl LieChain {
    /// Fields are applied first-to-last; each must have order ≥ 1.
    pub fn new(nvars: usize, fields: Vec<HomVectorField>) -> Result<Self> {
        for f in &fields {
            if f.order() == 0 {
                return Err(Error::ZeroOrderGenerator);
            }
            if f.nvars() != nvars {
                return Err(Error::VariableMismatch(nvars, f.nvars()));
            }
        }
        Ok(Self { nvars, fields })
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn fields(&self) -> &[HomVectorField] {
        &self.fields
    }

    /// Apply the chain to a series (first field innermost).
    pub fn apply<T: LieOperand>(&self, series: &Series<T>) -> Result<Series<T>> {
        let mut s = series.clone();
        for f in &self.fields {
            s = lie_series_apply(f, &s)?;
        }
        Ok(s)
    }

    /// Apply the inverse chain (reversed order, negated fields).
    pub fn apply_inverse<T: LieOperand>(&self, series: &Series<T>) -> Result<Series<T>> {
        let mut s = series.clone();
        for f in self.fields.iter().rev() {
            s = lie_series_apply(&f.scale(Complex64::new(-1.0, 0.0)), &s)?;
        }
        Ok(s)
    }

    /// The coordinate transformation y = S x as a truncated tuple series.
    pub fn transform_series(&self, max_grade: usize) -> Result<TupleSeries> {
        self.apply(&TupleSeries::identity_map(self.nvars, max_grade))
    }

    /// The inverse transformation as a truncated tuple series.
    pub fn inverse_transform_series(&self, max_grade: usize) -> Result<TupleSeries> {
        self.apply_inverse(&TupleSeries::identity_map(self.nvars, max_grade))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::MultiIndex;
    use crate::testutil::{random_field, random_poly, random_sequence};
    use approx::assert_relative_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn x_pow_field(p: u32, coeff: Complex64) -> HomVectorField {
        HomVectorField::monomial(1, 0, MultiIndex::new(vec![p]), coeff)
    }

    #[test]
    fn lie_fn_hand_example() {
        // X = x^2 d/dx, f = x^3: L_X f = 3x^4.
        let x = x_pow_field(2, c(1.0, 0.0));
        let f = HomPoly::monomial(MultiIndex::new(vec![3]), c(1.0, 0.0));
        let lf = lie_derivative_fn(&x, &f);
        assert_eq!(lf.coefficient(&MultiIndex::new(vec![4])), c(3.0, 0.0));
        assert_eq!(lf.num_terms(), 1);
    }

    #[test]
    fn lie_fn_of_constant_is_zero() {
        let x = x_pow_field(2, c(1.0, 0.0));
        let f = HomPoly::monomial(MultiIndex::new(vec![0]), c(5.0, 0.0));
        assert!(lie_derivative_fn(&x, &f).is_zero());
    }

    #[test]
    fn lie_fn_norm_bound_random() {
        let mut rng = StdRng::seed_from_u64(101);
        for _ in 0..200 {
            let r = rng.gen_range(1..4);
            let s = rng.gen_range(1..4);
            let x = random_field(&mut rng, 2, r);
            let f = random_poly(&mut rng, 2, s as u32 + 1);
            let lhs = lie_derivative_fn(&x, &f).norm();
            let rhs = (s as f64 + 1.0) * x.norm() * f.norm();
            assert!(lhs <= rhs * (1.0 + 1e-12), "{lhs} > {rhs}");
        }
    }

    #[test]
    fn lie_vf_hand_example() {
        // X = x^2 d/dx, v = x^3 d/dx: L_X v = (3x^4 - 2x^4) d/dx = x^4 d/dx.
        let x = x_pow_field(2, c(1.0, 0.0));
        let v = x_pow_field(3, c(1.0, 0.0));
        let lv = lie_derivative_vf(&x, &v);
        assert_eq!(
            lv.component(0).coefficient(&MultiIndex::new(vec![4])),
            c(1.0, 0.0)
        );
    }

    #[test]
    fn lie_vf_self_is_zero_and_antisymmetric() {
        let mut rng = StdRng::seed_from_u64(7);
        let x = random_field(&mut rng, 2, 2);
        assert!(lie_derivative_vf(&x, &x).norm() < 1e-14);
        let v = random_field(&mut rng, 2, 3);
        let a = lie_derivative_vf(&x, &v);
        let b = lie_derivative_vf(&v, &x);
        let sum = a.add(&b).unwrap();
        assert!(sum.norm() < 1e-12 * (1.0 + a.norm()));
    }

    #[test]
    fn lie_vf_norm_bound_random() {
        let mut rng = StdRng::seed_from_u64(103);
        for _ in 0..200 {
            let r = rng.gen_range(1..4);
            let s = rng.gen_range(1..4);
            let x = random_field(&mut rng, 2, r);
            let v = random_field(&mut rng, 2, s);
            let lhs = lie_derivative_vf(&x, &v).norm();
            let rhs = (r + s + 2) as f64 * x.norm() * v.norm();
            assert!(lhs <= rhs * (1.0 + 1e-12), "{lhs} > {rhs}");
        }
    }

    #[test]
    fn lie_series_zero_generator_is_identity() {
        let x = HomVectorField::zero(1, 1);
        let mut s = Series::<HomPoly>::zero(1, 6);
        s.set_part(HomPoly::monomial(MultiIndex::new(vec![2]), c(1.5, 0.0)));
        let out = lie_series_apply(&x, &s).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn lie_series_rejects_order_zero_generator() {
        let comps = vec![HomPoly::coordinate(1, 0)];
        let x = HomVectorField::from_components(comps);
        let s = Series::<HomPoly>::zero(1, 4);
        assert!(matches!(
            lie_series_apply(&x, &s),
            Err(Error::ZeroOrderGenerator)
        ));
    }

    #[test]
    fn lie_series_inverse_is_exp_of_negated_field() {
        let mut rng = StdRng::seed_from_u64(23);
        let x = random_field(&mut rng, 2, 1).scale(c(0.3, 0.0));
        let mut s = Series::<HomPoly>::zero(2, 8);
        s.set_part(random_poly(&mut rng, 2, 2));
        let fwd = lie_series_apply(&x, &s).unwrap();
        let back = lie_series_apply(&x.scale(c(-1.0, 0.0)), &fwd).unwrap();
        let diff = back.sub(&s).unwrap();
        assert!(diff.part_norms().iter().all(|&n| n < 1e-12));
    }

    #[test]
    fn lie_series_flow_coefficients_all_one() {
        // exp(L_X) x with X = x^2 d/dx equals the time-1 flow of dx/dt = x^2,
        // whose Taylor series is x/(1-x) = x + x^2 + x^3 + ...
        let x = x_pow_field(2, c(1.0, 0.0));
        let mut s = Series::<HomPoly>::zero(1, 10);
        s.set_part(HomPoly::coordinate(1, 0));
        let out = lie_series_apply(&x, &s).unwrap();
        for d in 1..=10 {
            let coeff = out.part(d).coefficient(&MultiIndex::new(vec![d as u32]));
            assert_relative_eq!(coeff.re, 1.0, epsilon = 1e-12);
            assert_relative_eq!(coeff.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn transform_part_order_zero_is_identity() {
        let mut rng = StdRng::seed_from_u64(5);
        let seq = random_sequence(&mut rng, 2, 4, 0.5);
        let f = random_poly(&mut rng, 2, 3);
        assert_eq!(seq.transform_part(0, &f), f);
    }

    #[test]
    fn transform_part_one_is_first_lie_derivative() {
        let mut rng = StdRng::seed_from_u64(6);
        let seq = random_sequence(&mut rng, 2, 4, 0.5);
        let f = random_poly(&mut rng, 2, 2);
        let e1 = seq.transform_part(1, &f);
        let direct = lie_derivative_fn(&seq.get(1), &f);
        assert!(e1.sub(&direct).unwrap().norm() < 1e-13);
    }

    #[test]
    fn transform_part_two_unrolls_as_expected() {
        // E_2 = L_{X_2} + (1/2) L_{X_1}^2.
        let mut rng = StdRng::seed_from_u64(8);
        let seq = random_sequence(&mut rng, 2, 4, 0.5);
        let f = random_poly(&mut rng, 2, 2);
        let e2 = seq.transform_part(2, &f);
        let x1 = seq.get(1);
        let x2 = seq.get(2);
        let expect = lie_derivative_fn(&x2, &f)
            .add(&lie_derivative_fn(&x1, &lie_derivative_fn(&x1, &f)).scale(c(0.5, 0.0)))
            .unwrap();
        assert!(e2.sub(&expect).unwrap().norm() < 1e-12 * (1.0 + expect.norm()));
    }

    #[test]
    fn direct_form_matches_recursion() {
        let mut rng = StdRng::seed_from_u64(9);
        for _ in 0..5 {
            let seq = random_sequence(&mut rng, 2, 6, 0.4);
            let v = random_field(&mut rng, 2, 1);
            for s in 1..=6 {
                let a = seq.transform_part(s, &v);
                let b = seq.transform_part_direct(s, &v);
                let d = a.sub(&b).unwrap().norm();
                assert!(d <= 1e-12 * (1.0 + a.norm()), "order {s}: {d}");
            }
        }
    }

    #[test]
    fn single_entry_sequence_reproduces_lie_series() {
        let mut rng = StdRng::seed_from_u64(10);
        let xk = random_field(&mut rng, 2, 2).scale(c(0.5, 0.0));
        let seq = GeneratingSequence::single(xk.clone()).unwrap();
        let mut s = Series::<HomVectorField>::zero(2, 8);
        s.set_part(random_field(&mut rng, 2, 1));
        let via_transform = seq.apply(&s);
        let via_exp = lie_series_apply(&xk, &s).unwrap();
        for g in 0..=8 {
            let d = via_transform.part(g).sub(via_exp.part(g)).unwrap().norm();
            assert!(d < 1e-12 * (1.0 + via_exp.part(g).norm()));
        }
    }

    #[test]
    fn apply_transform_of_zero_sequence_is_identity() {
        let mut rng = StdRng::seed_from_u64(12);
        let seq = GeneratingSequence::zero(2, 5);
        let mut s = Series::<HomPoly>::zero(2, 5);
        s.set_part(random_poly(&mut rng, 2, 2));
        assert_eq!(seq.apply(&s), s);
    }

    #[test]
    fn transform_preserves_products() {
        // T_X(fg) = (T_X f)(T_X g) up to the truncation order.
        let mut rng = StdRng::seed_from_u64(14);
        let nmax = 8;
        let seq = random_sequence(&mut rng, 2, nmax, 0.3);
        let f = random_poly(&mut rng, 2, 2);
        let g = random_poly(&mut rng, 2, 1);
        let lhs = seq.apply_to_poly(&f.mul(&g), nmax);
        let tf = seq.apply_to_poly(&f, nmax);
        let tg = seq.apply_to_poly(&g, nmax);
        // Truncated product of the two scalar series.
        let mut rhs = Series::<HomPoly>::zero(2, nmax);
        for pf in tf.parts() {
            if pf.is_zero() {
                continue;
            }
            for pg in tg.parts() {
                if pg.is_zero() || pf.grade() + pg.grade() > nmax {
                    continue;
                }
                rhs.add_to_part(&pf.mul(pg)).unwrap();
            }
        }
        for d in 0..=nmax {
            let diff = lhs.part(d).sub(rhs.part(d)).unwrap().norm();
            assert!(diff < 1e-11 * (1.0 + rhs.part(d).norm()), "degree {d}: {diff}");
        }
    }

    #[test]
    fn transform_preserves_commutators() {
        let mut rng = StdRng::seed_from_u64(15);
        let nmax = 7;
        let seq = random_sequence(&mut rng, 2, nmax, 0.3);
        let v = random_field(&mut rng, 2, 1);
        let w = random_field(&mut rng, 2, 2);
        let mut sv = Series::<HomVectorField>::zero(2, nmax);
        sv.set_part(v.clone());
        let mut sw = Series::<HomVectorField>::zero(2, nmax);
        sw.set_part(w.clone());
        let mut s_vw = Series::<HomVectorField>::zero(2, nmax);
        s_vw.set_part(lie_derivative_vf(&v, &w));
        let lhs = seq.apply(&s_vw);
        let rhs = bracket_series(&seq.apply(&sv), &seq.apply(&sw)).unwrap();
        for g in 0..=nmax {
            let diff = lhs.part(g).sub(rhs.part(g)).unwrap().norm();
            assert!(diff < 1e-10 * (1.0 + rhs.part(g).norm()), "order {g}: {diff}");
        }
    }

    #[test]
    fn compose_with_zero_is_identity() {
        let mut rng = StdRng::seed_from_u64(16);
        let x = random_sequence(&mut rng, 2, 5, 0.4);
        let y = GeneratingSequence::zero(2, 5);
        let z = compose_transforms(&x, &y).unwrap();
        for r in 1..=5 {
            assert!(z.get(r).sub(&x.get(r)).unwrap().norm() < 1e-14);
        }
    }

    #[test]
    fn compose_first_order_is_additive() {
        let mut rng = StdRng::seed_from_u64(17);
        let x = random_sequence(&mut rng, 2, 4, 0.4);
        let y = random_sequence(&mut rng, 2, 4, 0.4);
        let z = compose_transforms(&x, &y).unwrap();
        let expect = x.get(1).add(&y.get(1)).unwrap();
        assert!(z.get(1).sub(&expect).unwrap().norm() < 1e-14);
    }

    #[test]
    fn compose_matches_double_application() {
        let mut rng = StdRng::seed_from_u64(18);
        let nmax = 8;
        let x = random_sequence(&mut rng, 2, nmax, 0.3);
        let y = random_sequence(&mut rng, 2, nmax, 0.3);
        let z = compose_transforms(&x, &y).unwrap();
        let f = random_poly(&mut rng, 2, 2);
        let via_z = z.apply_to_poly(&f, nmax);
        let via_xy = x.apply(&y.apply_to_poly(&f, nmax));
        for d in 0..=nmax {
            let diff = via_z.part(d).sub(via_xy.part(d)).unwrap().norm();
            assert!(diff < 1e-10 * (1.0 + via_xy.part(d).norm()), "degree {d}: {diff}");
        }
    }

    #[test]
    fn empty_chain_is_identity() {
        let chain = LieChain::new(2, vec![]).unwrap();
        let s = TupleSeries::identity_map(2, 5);
        assert_eq!(chain.apply(&s).unwrap(), s);
    }

    #[test]
    fn chain_of_one_matches_lie_series() {
        let mut rng = StdRng::seed_from_u64(19);
        let f = random_field(&mut rng, 2, 2).scale(c(0.4, 0.0));
        let chain = LieChain::new(2, vec![f.clone()]).unwrap();
        let s = TupleSeries::identity_map(2, 8);
        let a = chain.apply(&s).unwrap();
        let b = lie_series_apply(&f, &s).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn chain_inverse_cancels_as_series_and_pointwise() {
        let mut rng = StdRng::seed_from_u64(20);
        let fields = vec![
            random_field(&mut rng, 2, 1).scale(c(0.2, 0.0)),
            random_field(&mut rng, 2, 2).scale(c(0.2, 0.0)),
            random_field(&mut rng, 2, 3).scale(c(0.2, 0.0)),
        ];
        let chain = LieChain::new(2, fields).unwrap();
        let nmax = 10;
        let id = TupleSeries::identity_map(2, nmax);
        let fwd = chain.apply(&id).unwrap();
        let round = chain.apply_inverse(&fwd).unwrap();
        for g in 1..=nmax {
            assert!(
                round.part(g).norm() < 1e-10 * (1.0 + fwd.part(g).norm()),
                "grade {g} residual {}",
                round.part(g).norm()
            );
        }
        // Pointwise: evaluate forward then inverse series at small points.
        let fwd_series = chain.transform_series(nmax).unwrap();
        let inv_series = chain.inverse_transform_series(nmax).unwrap();
        for _ in 0..20 {
            let z: Vec<Complex64> = (0..2)
                .map(|_| Complex64::from_polar(rng.gen_range(0.0..0.05), rng.gen_range(0.0..6.28)))
                .collect();
            let w = inv_series.eval(&fwd_series.eval(&z));
            for j in 0..2 {
                assert!((w[j] - z[j]).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn exchange_theorem_spot_check() {
        // f(y) at y = T_X x equals (T_X f)(x), both truncated far beyond
        // where the sampled points contribute.
        let mut rng = StdRng::seed_from_u64(21);
        let nmax = 14;
        let seq = random_sequence(&mut rng, 2, 3, 0.2).clone();
        let f = random_poly(&mut rng, 2, 2);
        let y_series = seq.apply(&TupleSeries::identity_map(2, nmax));
        let tf = seq.apply_to_poly(&f, nmax + 1);
        for _ in 0..20 {
            let x: Vec<Complex64> = (0..2)
                .map(|_| Complex64::from_polar(rng.gen_range(0.0..0.05), rng.gen_range(0.0..6.28)))
                .collect();
            let y = y_series.eval(&x);
            let lhs = f.eval(&y);
            let rhs: Complex64 = tf
                .parts()
                .iter()
                .map(|p| p.eval(&x))
                .sum();
            assert!((lhs - rhs).norm() < 1e-8, "{}", (lhs - rhs).norm());
        }
    }
}
