//! Eigenvalue spectra, the conjugation operators of the linear part, and
//! the two-way conversion between a map's Taylor expansion and its
//! generating-sequence representation.
//!
//! The linear part is Λ = diag(λ_1,…,λ_n) with λ_j = e^{μ_j+iω_j}. Powers
//! λ^k are always evaluated in the log domain, e^{⟨k,μ+iω⟩}, so that high
//! orders on the unit circle stay accurate.

use std::fmt;

use num_complex::Complex64;

use crate::algebra::{FieldSeries, FnTuple, HomPoly, HomVectorField, MultiIndex, Series, TupleSeries};
use crate::error::{Error, Result};

/// Resonance threshold: a divisor with modulus at or below this value
/// (relative to 1) is declared resonant, since below double-precision
/// resolution the construction is numerically meaningless.
pub const EPS_RES: f64 = 1e-14;

/// Eigenvalues λ_j = e^{μ_j+iω_j} of the diagonal linear part.
#[derive(Clone, PartialEq)]
pub struct Spectrum {
    mu: Vec<f64>,
    omega: Vec<f64>,
    lambda: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(mu: Vec<f64>, omega: Vec<f64>) -> Self {
        assert_eq!(mu.len(), omega.len());
        let lambda = mu
            .iter()
            .zip(omega.iter())
            .map(|(&m, &w)| Complex64::from_polar(m.exp(), w))
            .collect();
        Self { mu, omega, lambda }
    }

    /// Build from the eigenvalues themselves (μ = ln|λ|, ω = arg λ).
    pub fn from_eigenvalues(lambda: &[Complex64]) -> Result<Self> {
        if lambda.iter().any(|l| l.norm() == 0.0) {
            return Err(Error::ZeroEigenvalue);
        }
        let mu = lambda.iter().map(|l| l.norm().ln()).collect();
        let omega = lambda.iter().map(|l| l.arg()).collect();
        Ok(Self::new(mu, omega))
    }

    pub fn nvars(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn lambda(&self) -> &[Complex64] {
        &self.lambda
    }

    /// All μ_j share a strict sign: no small divisors can accumulate.
    pub fn is_poincare(&self) -> bool {
        self.mu.iter().all(|&m| m > 0.0) || self.mu.iter().all(|&m| m < 0.0)
    }

    pub fn is_siegel(&self) -> bool {
        !self.is_poincare()
    }

    /// λ^k = e^{⟨k,μ+iω⟩}.
    pub fn lambda_pow(&self, k: &MultiIndex) -> Complex64 {
        let (m, w) = self.log_inner(k);
        Complex64::from_polar(m.exp(), w)
    }

    fn log_inner(&self, k: &MultiIndex) -> (f64, f64) {
        let mut m = 0.0;
        let mut w = 0.0;
        for (j, &e) in k.exponents().iter().enumerate() {
            if e > 0 {
                let ef = f64::from(e);
                m += ef * self.mu[j];
                w += ef * self.omega[j];
            }
        }
        (m, w)
    }

    /// λ^k / λ_j = e^{⟨k,μ+iω⟩ − μ_j − iω_j}.
    pub fn ratio_pow(&self, k: &MultiIndex, j: usize) -> Complex64 {
        let (m, w) = self.log_inner(k);
        Complex64::from_polar((m - self.mu[j]).exp(), w - self.omega[j])
    }

    /// The linear part Λx as an order-0 vector field.
    pub fn linear_field(&self) -> HomVectorField {
        let n = self.nvars();
        let comps = (0..n)
            .map(|j| HomPoly::monomial(MultiIndex::unit(n, j), self.lambda[j]))
            .collect();
        HomVectorField::from_components(comps)
    }
}

impl fmt::Debug for Spectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Spectrum(n={}, lambda={:?})", self.nvars(), self.lambda)
    }
}

/// Action of the linear conjugation operator on a function:
/// (R f)(x) = f(Λx), i.e. the coefficient of x^k is multiplied by λ^k.
pub fn r_apply_poly(spec: &Spectrum, f: &HomPoly) -> HomPoly {
    let mut out = HomPoly::zero(f.nvars(), f.degree());
    for (k, c) in f.terms() {
        out.add_term(k.clone(), c * spec.lambda_pow(k));
    }
    out
}

/// Action on a vector field: (R V)(x) = Λ⁻¹V(Λx); the coefficient of
/// x^k in component j is multiplied by λ^k/λ_j.
pub fn r_apply_field(spec: &Spectrum, v: &HomVectorField) -> HomVectorField {
    r_field_scaled(spec, v, false)
}

/// Inverse action on a vector field: coefficients multiplied by λ_j/λ^k.
pub fn r_inv_apply_field(spec: &Spectrum, v: &HomVectorField) -> HomVectorField {
    r_field_scaled(spec, v, true)
}

fn r_field_scaled(spec: &Spectrum, v: &HomVectorField, inverse: bool) -> HomVectorField {
    let comps = v
        .components()
        .iter()
        .enumerate()
        .map(|(j, p)| {
            let mut out = HomPoly::zero(p.nvars(), p.degree());
            for (k, c) in p.terms() {
                let q = spec.ratio_pow(k, j);
                let q = if inverse { q.inv() } else { q };
                out.add_term(k.clone(), c * q);
            }
            out
        })
        .collect();
    HomVectorField::from_components(comps)
}

/// Eigenvalue of the homological operator D = R − 1 on the monomial
/// x^k e_j: λ^k/λ_j − 1. A zero return is legal; callers decide.
pub fn d_eigenvalue(spec: &Spectrum, k: &MultiIndex, j: usize) -> Complex64 {
    spec.ratio_pow(k, j) - Complex64::new(1.0, 0.0)
}

/// Solve D X = rhs coefficientwise. Fails with the offending monomial when
/// a divisor has modulus at or below `eps_res`.
pub fn solve_homological(
    spec: &Spectrum,
    rhs: &HomVectorField,
    eps_res: f64,
) -> Result<HomVectorField> {
    let mut out = HomVectorField::zero(rhs.nvars(), rhs.order());
    for (j, p) in rhs.components().iter().enumerate() {
        for (k, c) in p.terms() {
            let d = d_eigenvalue(spec, k, j);
            let abs = d.norm();
            if abs <= eps_res {
                return Err(Error::ResonantDivisor {
                    k: k.clone(),
                    j: j + 1,
                    value: d,
                    abs,
                });
            }
            out.component_mut(j).add_term(k.clone(), c / d);
        }
    }
    Ok(out)
}

/// Apply D = R − 1 (used to check solve residuals).
pub fn d_apply(spec: &Spectrum, v: &HomVectorField) -> HomVectorField {
    r_apply_field(spec, v)
        .sub(v)
        .expect("orders agree")
}

/// An analytic map x' = Λx + v₁(x) + v₂(x) + … truncated at order N;
/// `nonlinear` holds v_s at grade s (grade 0 stays empty).
#[derive(Clone, Debug)]
pub struct AnalyticMap {
    spectrum: Spectrum,
    nonlinear: FieldSeries,
}

impl AnalyticMap {
    pub fn new(spectrum: Spectrum, nonlinear: FieldSeries) -> Self {
        assert_eq!(spectrum.nvars(), nonlinear.nvars());
        assert!(nonlinear.part(0).is_zero(), "order-0 slot must stay empty");
        Self { spectrum, nonlinear }
    }

    pub fn linear(spectrum: Spectrum, order: usize) -> Self {
        let n = spectrum.nvars();
        Self::new(spectrum, Series::zero(n, order))
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn nvars(&self) -> usize {
        self.spectrum.nvars()
    }

    pub fn order(&self) -> usize {
        self.nonlinear.max_grade()
    }

    pub fn nonlinear(&self) -> &FieldSeries {
        &self.nonlinear
    }

    /// The full series Λx + Σ v_s as a vector-field series (slot 0 = Λx).
    pub fn full_field_series(&self) -> FieldSeries {
        let mut s = self.nonlinear.clone();
        s.set_part(self.spectrum.linear_field());
        s
    }

    /// The map as a point-map tuple series F_j(x) = λ_j x_j + Σ_s v_{s,j}(x).
    pub fn tuple_series(&self, max_grade: usize) -> TupleSeries {
        let mut s = TupleSeries::zero(self.nvars(), max_grade);
        s.set_part(FnTuple(self.spectrum.linear_field()));
        for p in self.nonlinear.parts() {
            if !p.is_zero() && p.grade() <= max_grade {
                s.add_to_part(&FnTuple(p.clone())).expect("grades align");
            }
        }
        s
    }

    /// Evaluate the map at a point.
    pub fn eval(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.tuple_series(self.order()).eval(x)
    }
}

/// Both generating sequences representing a map: x' = T_W ∘ R x and
/// x' = R ∘ T_V x, related by W_s = R V_s.
#[derive(Clone, Debug)]
pub struct Representation {
    pub w: crate::lie::GeneratingSequence,
    pub v: crate::lie::GeneratingSequence,
}

/// Extract the generating sequence W with x' = T_W ∘ R x, order by order.
///
/// At order s the unknown enters through the leading term of the graded
/// recursion, which acts diagonally on monomials with eigenvalue
/// λ_j − ⟨k,λ⟩ on x^k e_j; everything else is known from lower orders.
/// The construction is validated exclusively through the reconstruction
/// round trip (`generating_sequence_to_map`).
pub fn map_to_generating_sequence(map: &AnalyticMap, eps_res: f64) -> Result<Representation> {
    let spec = map.spectrum();
    let n = map.nvars();
    let nmax = map.order();
    let mut w = crate::lie::GeneratingSequence::zero(n, nmax);
    // e_parts[s] = E_s(Λx), which by construction equals v_s once W_s is known.
    let mut e_parts: Vec<HomVectorField> = Vec::with_capacity(nmax + 1);
    e_parts.push(spec.linear_field());

    for s in 1..=nmax {
        // Known contribution (1/s) Σ_{j<s} j·L_{W_j} E_{s−j}(Λx).
        let mut known = HomVectorField::zero(n, s);
        for j in 1..s {
            let wj = w.get(j);
            if wj.is_zero() || e_parts[s - j].is_zero() {
                continue;
            }
            let term = crate::lie::lie_derivative_vf(&wj, &e_parts[s - j]);
            known = known.add(&term.scale(Complex64::new(j as f64 / s as f64, 0.0)))?;
        }
        let rhs = map.nonlinear.part(s).sub(&known)?;
        // Solve L_{W_s}(Λx) = rhs diagonally.
        let mut ws = HomVectorField::zero(n, s);
        for (j, p) in rhs.components().iter().enumerate() {
            for (k, c) in p.terms() {
                let mut kl = Complex64::new(0.0, 0.0);
                for (l, &e) in k.exponents().iter().enumerate() {
                    kl += Complex64::new(f64::from(e), 0.0) * spec.lambda()[l];
                }
                let divisor = spec.lambda()[j] - kl;
                let abs = divisor.norm();
                if abs <= eps_res {
                    return Err(Error::RepresentationObstruction {
                        k: k.clone(),
                        j: j + 1,
                        value: divisor,
                        abs,
                    });
                }
                ws.component_mut(j).add_term(k.clone(), c / divisor);
            }
        }
        w.set(ws);
        e_parts.push(map.nonlinear.part(s).clone());
    }

    let v_fields = (1..=nmax)
        .map(|s| r_inv_apply_field(spec, &w.get(s)))
        .collect();
    let v = crate::lie::GeneratingSequence::new(n, v_fields)?;
    Ok(Representation { w, v })
}

/// Reconstruct the map from its generating sequence: the graded parts of
/// T_W applied to the linear field Λx.
pub fn generating_sequence_to_map(
    w: &crate::lie::GeneratingSequence,
    spec: &Spectrum,
    order: usize,
) -> AnalyticMap {
    let mut series: FieldSeries = Series::zero(spec.nvars(), order);
    series.set_part(spec.linear_field());
    let full = w.apply(&series);
    let mut nonlinear: FieldSeries = Series::zero(spec.nvars(), order);
    for p in full.parts().iter().skip(1) {
        nonlinear.set_part(p.clone());
    }
    AnalyticMap::new(spec.clone(), nonlinear)
}

pub mod io {
    //! The map input file: a header line `n N`, a line of n (μ_j, ω_j)
    //! pairs, then monomial rows in the canonical form grouped by
    //! component (`component j` markers); the order of each row is read
    //! off its degree.

    use super::*;
    use crate::algebra::io::parse_row;
    use std::fmt::Write as _;

    pub fn map_to_string(map: &AnalyticMap) -> String {
        let mut out = String::new();
        let n = map.nvars();
        writeln!(out, "{} {}", n, map.order()).unwrap();
        let pairs: Vec<String> = (0..n)
            .map(|j| format!("{} {}", map.spectrum().mu()[j], map.spectrum().omega()[j]))
            .collect();
        writeln!(out, "{}", pairs.join(" ")).unwrap();
        for j in 0..n {
            writeln!(out, "component {}", j + 1).unwrap();
            for p in map.nonlinear().parts() {
                crate::algebra::io::write_poly(&mut out, &p.components()[j].clone());
            }
        }
        out
    }

    pub fn map_from_string(text: &str) -> Result<AnalyticMap> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::InsufficientData("empty map file".into()))?;
        let hf: Vec<&str> = header.split_whitespace().collect();
        if hf.len() != 2 {
            return Err(Error::InsufficientData(format!(
                "map header must be `n N`, got {header:?}"
            )));
        }
        let n: usize = hf[0]
            .parse()
            .map_err(|_| Error::InsufficientData(format!("bad n in header {header:?}")))?;
        let nmax: usize = hf[1]
            .parse()
            .map_err(|_| Error::InsufficientData(format!("bad N in header {header:?}")))?;
        let spec_line = lines
            .next()
            .ok_or_else(|| Error::InsufficientData("missing spectrum line".into()))?;
        let vals: Vec<f64> = spec_line
            .split_whitespace()
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::InsufficientData(format!("bad spectrum line {spec_line:?}")))?;
        if vals.len() != 2 * n {
            return Err(Error::InsufficientData(format!(
                "spectrum line needs {} values, got {}",
                2 * n,
                vals.len()
            )));
        }
        let mu: Vec<f64> = vals.iter().step_by(2).copied().collect();
        let omega: Vec<f64> = vals.iter().skip(1).step_by(2).copied().collect();
        let spectrum = Spectrum::new(mu, omega);

        let mut nonlinear: FieldSeries = Series::zero(n, nmax);
        let mut current: Option<usize> = None;
        for line in lines {
            if let Some(rest) = line.strip_prefix("component ") {
                let j: usize = rest.trim().parse().map_err(|_| {
                    Error::InsufficientData(format!("bad component header {line:?}"))
                })?;
                if j == 0 || j > n {
                    return Err(Error::InsufficientData(format!(
                        "component index {j} out of range 1..={n}"
                    )));
                }
                current = Some(j - 1);
                continue;
            }
            let j = current.ok_or_else(|| {
                Error::InsufficientData("monomial row before any component header".into())
            })?;
            let (k, c) = parse_row(n, line)?;
            let degree = k.degree() as usize;
            if degree < 2 {
                return Err(Error::InsufficientData(format!(
                    "nonlinear rows must have degree >= 2, got {degree}"
                )));
            }
            let order = degree - 1;
            if order <= nmax {
                let mut part = nonlinear.part(order).clone();
                part.component_mut(j).add_term(k, c);
                nonlinear.set_part(part);
            }
        }
        Ok(AnalyticMap::new(spectrum, nonlinear))
    }
}
