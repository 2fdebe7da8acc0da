//! Canonical textual form for polynomials and vector fields.
//!
//! One monomial per row: `coeff_re coeff_im k1 k2 ... kn`, rows sorted
//! graded-lexicographically. Vector fields are written as component blocks
//! introduced by a `component j` line (1-based). Floats use the shortest
//! representation that round-trips, so serialize → parse is the identity.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::algebra::field::HomVectorField;
use crate::algebra::poly::{HomPoly, MultiIndex};
use crate::error::{Error, Result};

pub fn write_poly(out: &mut String, p: &HomPoly) {
    for (k, c) in p.terms() {
        write!(out, "{} {}", c.re, c.im).unwrap();
        for e in k.exponents() {
            write!(out, " {e}").unwrap();
        }
        out.push('\n');
    }
}

pub fn poly_to_string(p: &HomPoly) -> String {
    let mut s = String::new();
    write_poly(&mut s, p);
    s
}

/// Parse one monomial row. The degree of every row must match `degree` when
/// given; otherwise it is inferred from the first row.
pub fn parse_poly_rows(nvars: usize, degree: Option<u32>, rows: &str) -> Result<HomPoly> {
    let mut terms: Vec<(MultiIndex, Complex64)> = Vec::new();
    for line in rows.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        terms.push(parse_row(nvars, line)?);
    }
    let degree = match degree {
        Some(d) => d,
        None => terms
            .first()
            .map(|(k, _)| k.degree())
            .ok_or_else(|| Error::InsufficientData("empty polynomial block".into()))?,
    };
    let mut p = HomPoly::zero(nvars, degree);
    for (k, c) in terms {
        if k.degree() != degree {
            return Err(Error::DegreeMismatch(degree as usize, k.degree() as usize));
        }
        p.add_term(k, c);
    }
    Ok(p)
}

pub fn parse_row(nvars: usize, line: &str) -> Result<(MultiIndex, Complex64)> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != nvars + 2 {
        return Err(Error::InsufficientData(format!(
            "monomial row needs {} fields, got {}: {line:?}",
            nvars + 2,
            fields.len()
        )));
    }
    let re: f64 = fields[0]
        .parse()
        .map_err(|_| Error::InsufficientData(format!("bad coefficient: {line:?}")))?;
    let im: f64 = fields[1]
        .parse()
        .map_err(|_| Error::InsufficientData(format!("bad coefficient: {line:?}")))?;
    let exps: Vec<u32> = fields[2..]
        .iter()
        .map(|f| f.parse::<u32>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::InsufficientData(format!("bad exponent: {line:?}")))?;
    Ok((MultiIndex::new(exps), Complex64::new(re, im)))
}

/// Write a vector field as `component j` blocks, skipping zero components
/// only when the whole field is written with `skip_empty`.
pub fn write_field(out: &mut String, v: &HomVectorField) {
    for (j, comp) in v.components().iter().enumerate() {
        writeln!(out, "component {}", j + 1).unwrap();
        write_poly(out, comp);
    }
}

pub fn field_to_string(v: &HomVectorField) -> String {
    let mut s = String::new();
    write_field(&mut s, v);
    s
}

/// Parse `component j` blocks into a vector field of the given order.
pub fn parse_field(nvars: usize, order: usize, text: &str) -> Result<HomVectorField> {
    let mut field = HomVectorField::zero(nvars, order);
    let mut current: Option<usize> = None;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("component ") {
            let j: usize = rest
                .trim()
                .parse()
                .map_err(|_| Error::InsufficientData(format!("bad component header: {line:?}")))?;
            if j == 0 || j > nvars {
                return Err(Error::InsufficientData(format!(
                    "component index {j} out of range 1..={nvars}"
                )));
            }
            current = Some(j - 1);
            continue;
        }
        let j = current.ok_or_else(|| {
            Error::InsufficientData("monomial row before any component header".into())
        })?;
        let (k, c) = parse_row(nvars, line)?;
        if k.degree() as usize != order + 1 {
            return Err(Error::DegreeMismatch(order + 1, k.degree() as usize));
        }
        field.component_mut(j).add_term(k, c);
    }
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_poly() -> impl Strategy<Value = HomPoly> {
        (1usize..3, 1u32..5).prop_flat_map(|(nvars, degree)| {
            let mut idx = Vec::new();
            MultiIndex::for_each_of_degree(nvars, degree, |k| idx.push(k.clone()));
            let n = idx.len();
            proptest::collection::vec((-10.0f64..10.0, -10.0f64..10.0), n).prop_map(move |cs| {
                let mut p = HomPoly::zero(nvars, degree);
                for (k, (re, im)) in idx.iter().zip(cs) {
                    p.add_term(k.clone(), Complex64::new(re, im));
                }
                p
            })
        })
    }

    proptest! {
        #[test]
        fn poly_roundtrip_is_identity(p in arb_poly()) {
            let text = poly_to_string(&p);
            let q = parse_poly_rows(p.nvars(), Some(p.degree()), &text).unwrap();
            prop_assert_eq!(p, q);
        }
    }

    #[test]
    fn field_roundtrip() {
        let mut v = HomVectorField::zero(2, 1);
        v.component_mut(0)
            .add_term(MultiIndex::new(vec![2, 0]), Complex64::new(0.125, -3.5));
        v.component_mut(1)
            .add_term(MultiIndex::new(vec![1, 1]), Complex64::new(1e-17, 2.0));
        let text = field_to_string(&v);
        let w = parse_field(2, 1, &text).unwrap();
        assert_eq!(v, w);
    }
}
