//! Small-divisor arithmetic and accumulation combinatorics: the divisor
//! sequences β, α, σ, the weighted and dyadic logarithmic sums, the
//! extremal index multisets with their domination order, the admissible
//! index sets with their selection rule, the worst accumulated divisor
//! products (exact and bounded), and the composition weight sums.

use std::sync::OnceLock;

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::maps::{d_eigenvalue, Spectrum};
use crate::MultiIndex;

/// Guard on exact enumerations; beyond this only bounds are available.
pub const ENUMERATION_GUARD: u128 = 10_000_000;

/// Worst divisor at order r: β_r = min over |k| = r+1 and all components j
/// of |λ^k/λ_j − 1|, with β_0 = 1.
pub fn beta_seq(spec: &Spectrum, r_max: usize, eps_res: f64) -> Result<Vec<f64>> {
    assert!(r_max >= 1);
    let n = spec.nvars();
    let mut beta = Vec::with_capacity(r_max + 1);
    beta.push(1.0);
    for r in 1..=r_max {
        let mut min = f64::INFINITY;
        MultiIndex::for_each_of_degree(n, r as u32 + 1, |k| {
            for j in 0..n {
                let abs = d_eigenvalue(spec, k, j).norm();
                if abs < min {
                    min = abs;
                }
            }
        });
        if min <= eps_res {
            return Err(Error::NonResonanceViolated { r, beta: min });
        }
        beta.push(min);
    }
    Ok(beta)
}

/// Running minimum α_r = min_{0≤s≤r} β_s.
pub fn alpha_seq(beta: &[f64]) -> Vec<f64> {
    let mut alpha = Vec::with_capacity(beta.len());
    let mut min = f64::INFINITY;
    for &b in beta {
        min = min.min(b);
        alpha.push(min);
    }
    alpha
}

/// Effective divisors σ_0 = 1, σ_r = α_r/r² (the r² absorbs the losses of
/// the generalized Cauchy estimates).
pub fn sigma_seq(alpha: &[f64]) -> Vec<f64> {
    alpha
        .iter()
        .enumerate()
        .map(|(r, &a)| if r == 0 { 1.0 } else { a / (r * r) as f64 })
        .collect()
}

/// Power-law divisor floor α_r ≥ c/r^τ used to bound truncation tails.
#[derive(Clone, Copy, Debug)]
pub struct DiophantineFloor {
    pub c: f64,
    pub tau: f64,
}

/// A logarithmic divisor sum reported as partial value plus optional
/// rigorous tail bound; a bare number is never reported without its
/// truncation.
#[derive(Clone, Copy, Debug)]
pub struct PartialSum {
    pub partial: f64,
    pub tail: Option<f64>,
    pub r_max: usize,
}

impl PartialSum {
    /// Upper bound including the tail when one is available.
    pub fn upper(&self) -> Option<f64> {
        self.tail.map(|t| self.partial + t)
    }

    pub fn upper_or_partial(&self) -> f64 {
        self.upper().unwrap_or(self.partial)
    }
}

/// Weighted sum −Σ_{r≥1} ln α_r/(r(r+1)) over the computed range, plus a
/// tail bound when a divisor floor is supplied. The floor is checked
/// against the computed α before it is trusted.
pub fn gamma_sum(alpha: &[f64], floor: Option<DiophantineFloor>) -> Result<PartialSum> {
    let r_max = alpha.len() - 1;
    if let Some(fl) = floor {
        for (r, &a) in alpha.iter().enumerate().skip(1) {
            let bound = fl.c / (r as f64).powf(fl.tau);
            if a < bound {
                return Err(Error::FloorViolated {
                    r,
                    alpha: a,
                    floor: bound,
                });
            }
        }
    }
    let mut partial = 0.0;
    for r in (1..=r_max).rev() {
        partial -= alpha[r].ln() / (r * (r + 1)) as f64;
    }
    let tail = floor.map(|fl| {
        // -ln alpha_r <= tau ln r - ln c for r > r_max; bound the two pieces
        // with the integral of ln x / x^2 and the telescoping 1/(r(r+1)).
        let rm = r_max as f64;
        fl.tau * (rm.ln() + 1.0) / rm + (-fl.c.ln()).max(0.0) / (rm + 1.0)
    });
    Ok(PartialSum {
        partial,
        tail,
        r_max,
    })
}

/// Running values of the weighted sum, entry r covering orders 1..=r.
pub fn gamma_running(alpha: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(alpha.len());
    let mut acc = 0.0;
    out.push(0.0);
    for (r, &a) in alpha.iter().enumerate().skip(1) {
        acc -= a.ln() / (r * (r + 1)) as f64;
        out.push(acc);
    }
    out
}

/// Dyadic sum −Σ_{k=1..k_max} ln α_{2^k−1}/2^k. Requires α up to 2^k_max−1.
pub fn bruno_sum(alpha: &[f64], k_max: usize) -> PartialSum {
    let mut partial = 0.0;
    let mut last_term = 0.0;
    for k in 1..=k_max {
        let idx = (1usize << k) - 1;
        assert!(idx < alpha.len(), "need alpha up to 2^k_max - 1");
        last_term = -alpha[idx].ln() / (1u64 << k) as f64;
        partial += last_term;
    }
    PartialSum {
        partial,
        // The documented truncation slack of the dyadic comparison is the
        // final term; it is not a full tail bound.
        tail: Some(last_term),
        r_max: (1usize << k_max) - 1,
    }
}

/// All divisor sequences for one spectrum, with the weighted and dyadic
/// sums at the stated truncation.
#[derive(Clone, Debug)]
pub struct DivisorTable {
    pub spectrum: Spectrum,
    pub r_max: usize,
    pub beta: Vec<f64>,
    pub alpha: Vec<f64>,
    pub sigma: Vec<f64>,
    pub gamma: PartialSum,
    pub gamma_running: Vec<f64>,
    pub bruno: Option<PartialSum>,
}

impl DivisorTable {
    pub fn compute(
        spec: &Spectrum,
        r_max: usize,
        eps_res: f64,
        floor: Option<DiophantineFloor>,
    ) -> Result<Self> {
        let beta = beta_seq(spec, r_max, eps_res)?;
        let alpha = alpha_seq(&beta);
        let sigma = sigma_seq(&alpha);
        let gamma = gamma_sum(&alpha, floor)?;
        let gamma_running = gamma_running(&alpha);
        let k_max = (usize::BITS - (r_max + 1).leading_zeros() - 1) as usize;
        let bruno = if k_max >= 1 && (1usize << k_max) - 1 <= r_max {
            Some(bruno_sum(&alpha, k_max))
        } else {
            None
        };
        Ok(Self {
            spectrum: spec.clone(),
            r_max,
            beta,
            alpha,
            sigma,
            gamma,
            gamma_running,
            bruno,
        })
    }
}

/// Sorted multiset of non-negative integer indices. Padding with zeros is
/// normalization, not data.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IndexSet {
    elems: Vec<u32>,
}

impl IndexSet {
    pub fn new(mut elems: Vec<u32>) -> Self {
        elems.sort_unstable();
        Self { elems }
    }

    pub fn empty() -> Self {
        Self { elems: Vec::new() }
    }

    pub fn elems(&self) -> &[u32] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn max(&self) -> u32 {
        self.elems.last().copied().unwrap_or(0)
    }

    /// Multiset union (concatenate and resort).
    pub fn union(&self, other: &Self) -> Self {
        let mut e = self.elems.clone();
        e.extend_from_slice(&other.elems);
        Self::new(e)
    }

    pub fn with_element(&self, x: u32) -> Self {
        let mut e = self.elems.clone();
        e.push(x);
        Self::new(e)
    }

    /// The domination order: pad the shorter set with zeros, sort both
    /// ascending, compare elementwise. Sorted comparison realizes the
    /// existential permutation in the definition.
    pub fn dominated_by(&self, other: &Self) -> bool {
        let n = self.len().max(other.len());
        let a = pad_sorted(&self.elems, n);
        let b = pad_sorted(&other.elems, n);
        a.iter().zip(b.iter()).all(|(x, y)| x <= y)
    }

    /// Product over the elements of 1/σ_j.
    pub fn divisor_product(&self, sigma: &[f64]) -> f64 {
        self.elems
            .iter()
            .map(|&j| 1.0 / sigma[j as usize])
            .product()
    }
}

fn pad_sorted(sorted: &[u32], n: usize) -> Vec<u32> {
    let mut out = vec![0u32; n - sorted.len()];
    out.extend_from_slice(sorted);
    out
}

/// The extremal index multiset of order s: the floors
/// (⌊s/s⌋, ⌊s/(s−1)⌋, …, ⌊s/2⌋), s−1 elements; empty for s ≤ 1.
/// Every admissible index set of order s is dominated by it.
pub fn extremal_index_set(s: usize) -> IndexSet {
    if s <= 1 {
        return IndexSet::empty();
    }
    let elems = (2..=s).rev().map(|m| (s / m) as u32).collect();
    IndexSet::new(elems)
}

/// Report of the exhaustive combinatorial verifications. A failure entry is
/// a counterexample and must never occur.
#[derive(Clone, Debug, Default)]
pub struct CombinatoricsReport {
    pub cases_checked: usize,
    pub failures: Vec<String>,
}

impl CombinatoricsReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    fn merge(&mut self, other: CombinatoricsReport) {
        self.cases_checked += other.cases_checked;
        self.failures.extend(other.failures);
    }
}

/// Exhaustively verify the structure of the extremal sets: the maximal
/// element, the multiplicity of each index, and the union domination
/// {r} ∪ E_r ∪ E_s ◁ E_{r+s}.
pub fn extremal_properties_check(s_max: usize) -> CombinatoricsReport {
    let mut report = CombinatoricsReport::default();
    for s in 2..=s_max {
        let e = extremal_index_set(s);
        report.cases_checked += 1;
        if e.max() as usize != s / 2 {
            report
                .failures
                .push(format!("max of extremal set of order {s} is {} != {}", e.max(), s / 2));
        }
        for k in 1..=(s / 2) {
            report.cases_checked += 1;
            let count = e.elems().iter().filter(|&&x| x as usize == k).count();
            let expect = s / k - s / (k + 1);
            if count != expect {
                report.failures.push(format!(
                    "index {k} appears {count} times in extremal set of order {s}, expected {expect}"
                ));
            }
        }
    }
    for r in 1..=s_max {
        for s in r..=s_max {
            if r + s > s_max {
                break;
            }
            report.cases_checked += 1;
            let lhs = extremal_index_set(r)
                .union(&extremal_index_set(s))
                .with_element(r as u32);
            if !lhs.dominated_by(&extremal_index_set(r + s)) {
                report
                    .failures
                    .push(format!("union domination fails at r={r}, s={s}"));
            }
        }
    }
    report
}

/// Number of multisets of size `len` over values 0..=max_val.
fn multiset_count(len: usize, max_val: usize) -> u128 {
    binom_u128((len + max_val) as u64, max_val as u64)
}

pub fn binom_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num = num.saturating_mul((n - i) as u128);
        den *= (i + 1) as u128;
        let g = gcd_u128(num, den);
        num /= g;
        den /= g;
    }
    num / den
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

/// The cap min(r, ⌊s/2⌋) on admissible indices at (r, s).
fn index_cap(r: usize, s: usize) -> usize {
    r.min(s / 2)
}

/// Membership in the admissible family at (r, s): s−1 elements at most
/// (zero padding is free), every element ≤ min(r, ⌊s/2⌋), and domination by
/// the extremal set of order s (the selection rule).
pub fn is_admissible(set: &IndexSet, r: usize, s: usize) -> bool {
    if set.elems().iter().filter(|&&x| x > 0).count() > s.saturating_sub(1) {
        return false;
    }
    if set.max() as usize > index_cap(r, s) {
        return false;
    }
    set.dominated_by(&extremal_index_set(s))
}

/// Enumerate the admissible index sets at (r, s): all (s−1)-element
/// multisets over {0,…,min(r,⌊s/2⌋)} obeying the selection rule.
pub fn admissible_index_sets(r: usize, s: usize) -> Result<Vec<IndexSet>> {
    assert!(s >= 1);
    let len = s - 1;
    let cap = index_cap(r, s);
    let count = multiset_count(len, cap);
    if count > ENUMERATION_GUARD {
        return Err(Error::EnumerationTooLarge(count));
    }
    let extremal = extremal_index_set(s);
    let mut out = Vec::new();
    let mut cur = vec![0u32; len];
    enumerate_multisets(&mut cur, 0, 0, cap as u32, &mut |elems| {
        let set = IndexSet::new(elems.to_vec());
        if set.dominated_by(&extremal) {
            out.push(set);
        }
    });
    Ok(out)
}

fn enumerate_multisets(
    cur: &mut Vec<u32>,
    pos: usize,
    min: u32,
    max: u32,
    f: &mut impl FnMut(&[u32]),
) {
    if pos == cur.len() {
        f(cur);
        return;
    }
    for v in min..=max {
        cur[pos] = v;
        enumerate_multisets(cur, pos + 1, v, max, f);
    }
}

/// Exact worst accumulated divisor product T at (r, s): the maximum over
/// admissible index sets of Π 1/σ_j; T = 1 at r = 0.
pub fn divisor_product_max(r: usize, s: usize, sigma: &[f64]) -> Result<f64> {
    if r == 0 {
        return Ok(1.0);
    }
    let sets = admissible_index_sets(r, s)?;
    Ok(sets
        .iter()
        .map(|i| i.divisor_product(sigma))
        .fold(1.0f64, f64::max))
}

/// Upper bounds for the accumulated divisor product.
#[derive(Clone, Copy, Debug)]
pub struct DivisorProductBound {
    /// Product of 1/σ_j over {s} ∪ (extremal set of s): the sharp form,
    /// which also dominates (1/σ_s)·T(r,s).
    pub sharp: f64,
    /// Closed form γ^s e^{sΓ} with γ = e^a; uses the partial Γ plus its
    /// tail bound when one is available.
    pub closed: f64,
    /// Whether `closed` includes a rigorous Γ tail.
    pub closed_includes_tail: bool,
}

/// Both bounds for T(r, s). The sharp product only needs σ up to s; the
/// closed form combines the weighted divisor sum with the universal
/// accumulation constant.
pub fn divisor_product_bound(s: usize, table: &DivisorTable) -> DivisorProductBound {
    let sharp = extremal_index_set(s)
        .with_element(s as u32)
        .divisor_product(&table.sigma);
    let (a_partial, a_tail) = accumulation_constant_default();
    let a_up = a_partial + a_tail;
    let gamma_up = table.gamma.upper_or_partial();
    let closed = (s as f64 * (gamma_up + a_up)).exp();
    DivisorProductBound {
        sharp,
        closed,
        closed_includes_tail: table.gamma.tail.is_some(),
    }
}

/// The universal accumulation constant a = Σ_{k≥1} 2 ln k/(k(k+1)),
/// returned as (partial sum, integral tail bound).
pub fn accumulation_constant(terms: usize) -> (f64, f64) {
    let mut partial = 0.0;
    for k in (2..=terms).rev() {
        partial += 2.0 * (k as f64).ln() / (k * (k + 1)) as f64;
    }
    let kf = terms as f64;
    let tail = 2.0 * (kf.ln() + 1.0) / kf;
    (partial, tail)
}

/// Cached default at 10⁷ terms: a = 1.5770577… with tail ≤ 3.5e−6.
pub fn accumulation_constant_default() -> (f64, f64) {
    static CACHE: OnceLock<(f64, f64)> = OnceLock::new();
    *CACHE.get_or_init(|| accumulation_constant(10_000_000))
}

/// Exact composition weight sum: over ordered tuples (j_1,…,j_k) with
/// j_i ≥ r and Σ j_i = s, the sum of Π_i (S_i + r + m)/S_i where S_i are
/// the leading partial sums.
pub fn composition_weight_sum(r: usize, s: usize, k: usize, m: f64) -> Result<f64> {
    assert!(k >= 1 && r >= 1, "need k >= 1 and r >= 1");
    assert!(s >= k * r, "need s >= k*r");
    let count = composition_count(r, s, k);
    if count > ENUMERATION_GUARD {
        return Err(Error::EnumerationTooLarge(count));
    }
    let mut total = 0.0;
    let mut parts = Vec::with_capacity(k);
    compositions_rec(r, s, k, &mut parts, &mut |parts: &[usize]| {
        let mut prod = 1.0;
        let mut partial = 0usize;
        for &j in parts {
            partial += j;
            prod *= (partial as f64 + r as f64 + m) / partial as f64;
        }
        total += prod;
    });
    Ok(total)
}

fn compositions_rec(
    r: usize,
    left: usize,
    slots: usize,
    parts: &mut Vec<usize>,
    f: &mut impl FnMut(&[usize]),
) {
    if slots == 1 {
        if left >= r {
            parts.push(left);
            f(parts);
            parts.pop();
        }
        return;
    }
    let hi = left.saturating_sub(r * (slots - 1));
    for j in r..=hi {
        parts.push(j);
        compositions_rec(r, left - j, slots - 1, parts, f);
        parts.pop();
    }
}

/// Number of ordered compositions of s into k parts each ≥ r
/// (stars and bars: C(s − kr + k − 1, k − 1)).
pub fn composition_count(r: usize, s: usize, k: usize) -> u128 {
    if s < k * r {
        return 0;
    }
    binom_u128((s - k * r + k - 1) as u64, (k - 1) as u64)
}

/// Upper bound r^{k−1} (2 + m/r)^k · C(s/r − 1, k − 1) for the composition
/// weight sum, with the real-argument binomial evaluated through the
/// log-gamma function.
pub fn composition_weight_bound(r: usize, s: usize, k: usize, m: f64) -> f64 {
    assert!(k >= 1 && r >= 1 && s >= k * r);
    let rf = r as f64;
    (rf).powi(k as i32 - 1) * (2.0 + m / rf).powi(k as i32) * binom_real(s as f64 / rf - 1.0, k - 1)
}

/// C(x, m) = Γ(x+1)/(Γ(m+1)Γ(x−m+1)) for real x ≥ m ≥ 0.
pub fn binom_real(x: f64, m: usize) -> f64 {
    if m == 0 {
        return 1.0;
    }
    (ln_gamma(x + 1.0) - ln_gamma(m as f64 + 1.0) - ln_gamma(x - m as f64 + 1.0)).exp()
}

/// Exhaustive verification of the admissible-family properties (nesting and
/// closure under the shifted union) and of the product properties of T
/// (monotonicity in r and the product rule), over all r ≤ s with
/// r + s ≤ max_total, using the supplied σ sequence for the T checks.
pub fn admissible_properties_check(max_total: usize, sigma: &[f64]) -> CombinatoricsReport {
    let mut report = CombinatoricsReport::default();
    assert!(sigma.len() > max_total);

    // Nesting: the family at (r−1, s) is contained in the family at (r, s).
    for s in 1..=max_total {
        for r in 1..=s {
            let smaller = admissible_index_sets(r - 1, s).unwrap();
            report.cases_checked += 1;
            for set in &smaller {
                if !is_admissible(set, r, s) {
                    report
                        .failures
                        .push(format!("nesting fails at r={r}, s={s} for {set:?}"));
                }
            }
        }
    }

    // Closure: I in family(r−1, r), I' in family(r, s) imply
    // {r} ∪ I ∪ I' in family(r, r+s).
    for r in 1..=max_total {
        for s in r..=max_total {
            if r + s > max_total {
                break;
            }
            let fam_a = admissible_index_sets(r - 1, r).unwrap();
            let fam_b = admissible_index_sets(r, s).unwrap();
            for i in &fam_a {
                for ip in &fam_b {
                    report.cases_checked += 1;
                    let joined = i.union(ip).with_element(r as u32);
                    if !is_admissible(&joined, r, r + s) {
                        report.failures.push(format!(
                            "closure fails at r={r}, s={s}: {i:?} + {ip:?}"
                        ));
                    }
                }
            }
        }
    }

    // T monotonicity and the product rule.
    for s in 1..=max_total {
        for r in 1..=s {
            report.cases_checked += 1;
            let t_prev = divisor_product_max(r - 1, s, sigma).unwrap();
            let t_cur = divisor_product_max(r, s, sigma).unwrap();
            if t_prev > t_cur * (1.0 + 1e-12) {
                report
                    .failures
                    .push(format!("monotonicity fails at r={r}, s={s}"));
            }
            if r + s <= max_total {
                let lhs = divisor_product_max(r - 1, r, sigma).unwrap() * t_cur
                    / sigma[r]
                    ;
                let rhs = divisor_product_max(r, r + s, sigma).unwrap();
                report.cases_checked += 1;
                if lhs > rhs * (1.0 + 1e-12) {
                    report
                        .failures
                        .push(format!("product rule fails at r={r}, s={s}: {lhs} > {rhs}"));
                }
            }
        }
    }
    report
}
