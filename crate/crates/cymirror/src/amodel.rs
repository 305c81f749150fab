//! A-model side: cohomology rings, I-functions and the mirror transformation.
//!
//! Every I-function summand is homogeneous in `(classes, α)`, so each term is
//! stored with `α = 1` together with its `α`-degree: the component of ring
//! degree `k` of a term with `α`-degree `a` carries `α^{a−k}`. The overall
//! prefactor `α·exp(Σ tᵢDᵢ/α)` is implicit.

use crate::bmodel::MirrorMap;
use crate::fan::{distinct_intersection, Fan, FanError};
use crate::gkz::{build_abar_parts, build_aext, lift_relation_parts, GkzError, GkzSystem};
use crate::rational::{int, pow, Rational};
use crate::series::{Bound, Series1, SeriesError, SeriesM};
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

/// Failures of the A-model computations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AModelError {
    #[error("ring: {0}")]
    Ring(String),
    #[error("non-integral pairing {0} in the untwisted domain")]
    NonIntegralPairing(String),
    #[error("negative modification degree {0}")]
    NegativeModification(i64),
    #[error("ring shape: {0}")]
    Shape(String),
    #[error("inconsistent diagram data: {0}")]
    Diagram(String),
    #[error("cross-check failed: {0}")]
    CrossCheck(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Gkz(#[from] GkzError),
    #[error(transparent)]
    Fan(#[from] FanError),
}

/// An element of a [`CohRing`]: monomial exponent vectors to coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Coh(pub BTreeMap<Vec<u32>, Rational>);

impl Coh {
    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Coefficient of a monomial.
    pub fn coeff(&self, mono: &[u32]) -> Rational {
        self.0.get(mono).cloned().unwrap_or_else(Rational::zero)
    }

    fn add_term(&mut self, mono: Vec<u32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.0.entry(mono).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            let key: Vec<Vec<u32>> = self.0.iter().filter(|(_, v)| v.is_zero()).map(|(k, _)| k.clone()).collect();
            for k in key {
                self.0.remove(&k);
            }
        }
    }

    pub fn add(&self, other: &Coh) -> Coh {
        let mut out = self.clone();
        for (m, c) in &other.0 {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Coh {
        if c.is_zero() {
            return Coh::default();
        }
        Coh(self.0.iter().map(|(m, x)| (m.clone(), x * c)).collect())
    }

    pub fn sub(&self, other: &Coh) -> Coh {
        self.add(&other.scale(&int(-1)))
    }

    /// Constant term.
    pub fn constant(&self) -> Rational {
        self.0.iter().find(|(m, _)| m.iter().all(|&e| e == 0)).map_or_else(Rational::zero, |(_, c)| c.clone())
    }
}

/// A graded commutative ring presented by homogeneous rewrite rules, with an
/// integration functional on its top degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohRing {
    generators: Vec<String>,
    rules: Vec<(Vec<u32>, Coh)>,
    basis: Vec<Vec<u32>>,
    top: u32,
    integrals: BTreeMap<Vec<u32>, Rational>,
}

fn degree(m: &[u32]) -> u32 {
    m.iter().sum()
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn monomials_of_degree(n: usize, d: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return if d == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=d).rev() {
        for mut rest in monomials_of_degree(n - 1, d - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Rule-selection strategy for normal forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    FirstRule,
    LastRule,
}

impl CohRing {
    /// Builds the ring. Rules rewrite a monomial to a combination of
    /// monomials of the same degree; `integrals` gives the value on
    /// top-degree normal monomials.
    pub fn new(
        generators: &[&str],
        rules: Vec<(Vec<u32>, Coh)>,
        integrals: Vec<(Vec<u32>, Rational)>,
    ) -> Result<Self, AModelError> {
        let n = generators.len();
        for (lhs, rhs) in &rules {
            if lhs.len() != n || rhs.0.keys().any(|m| m.len() != n || degree(m) != degree(lhs)) {
                return Err(AModelError::Ring(format!("rule {lhs:?} is not homogeneous")));
            }
        }
        let mut basis = Vec::new();
        let mut top = 0;
        for d in 0..=64u32 {
            let normal: Vec<Vec<u32>> = monomials_of_degree(n, d)
                .into_iter()
                .filter(|m| !rules.iter().any(|(l, _)| divides(l, m)))
                .collect();
            if normal.is_empty() {
                break;
            }
            top = d;
            basis.extend(normal);
        }
        let mut ring = CohRing { generators: generators.iter().map(|s| s.to_string()).collect(), rules, basis, top, integrals: BTreeMap::new() };
        for (m, v) in integrals {
            if degree(&m) != top || !ring.basis.contains(&m) {
                return Err(AModelError::Ring(format!("integral on non-top or non-normal monomial {m:?}")));
            }
            ring.integrals.insert(m, v);
        }
        Ok(ring)
    }

    /// `ℚ[x]/(x^{top+1})` with `∫x^top = value`.
    pub fn truncated(generator: &str, top: u32, value: Rational) -> Self {
        let rules = vec![(vec![top + 1], Coh::default())];
        CohRing::new(&[generator], rules, vec![(vec![top], value)]).expect("valid truncated ring")
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    /// Normal monomials in increasing degree.
    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }

    /// Top nonvanishing degree.
    pub fn top_degree(&self) -> u32 {
        self.top
    }

    /// The `i`-th generator.
    pub fn gen(&self, i: usize) -> Coh {
        let mut m = vec![0; self.generators.len()];
        m[i] = 1;
        Coh(BTreeMap::from([(m, Rational::one())]))
    }

    /// The constant `c`.
    pub fn constant(&self, c: Rational) -> Coh {
        let mut out = Coh::default();
        out.add_term(vec![0; self.generators.len()], c);
        out
    }

    pub fn one(&self) -> Coh {
        self.constant(Rational::one())
    }

    /// Linear combination `Σ cᵢ·genᵢ`.
    pub fn linear(&self, coeffs: &[i64]) -> Coh {
        coeffs.iter().enumerate().fold(Coh::default(), |acc, (i, &c)| acc.add(&self.gen(i).scale(&int(c))))
    }

    /// Normal form under the given rule-selection strategy.
    pub fn reduce_with(&self, x: &Coh, strategy: Strategy) -> Result<Coh, AModelError> {
        let mut cur = x.clone();
        for _ in 0..100_000 {
            let hit = cur.0.iter().find_map(|(m, c)| {
                let mut it = self.rules.iter().filter(|(l, _)| divides(l, m));
                let rule = match strategy {
                    Strategy::FirstRule => it.next(),
                    Strategy::LastRule => it.last(),
                };
                rule.map(|r| (m.clone(), c.clone(), r))
            });
            let Some((m, c, (lhs, rhs))) = hit else { return Ok(cur) };
            cur.0.remove(&m);
            let quotient: Vec<u32> = m.iter().zip(lhs).map(|(a, b)| a - b).collect();
            for (rm, rc) in &rhs.0 {
                let mono: Vec<u32> = rm.iter().zip(&quotient).map(|(a, b)| a + b).collect();
                cur.add_term(mono, rc * &c);
            }
        }
        Err(AModelError::Ring("rewriting does not terminate".into()))
    }

    /// Normal form.
    pub fn reduce(&self, x: &Coh) -> Coh {
        self.reduce_with(x, Strategy::FirstRule).expect("rules terminate on constructed rings")
    }

    /// Whether both rule-selection strategies agree on every monomial up to
    /// degree `top + 1`.
    pub fn is_confluent(&self) -> bool {
        (0..=self.top + 1).all(|d| {
            monomials_of_degree(self.generators.len(), d).into_iter().all(|m| {
                let x = Coh(BTreeMap::from([(m, Rational::one())]));
                matches!(
                    (self.reduce_with(&x, Strategy::FirstRule), self.reduce_with(&x, Strategy::LastRule)),
                    (Ok(a), Ok(b)) if a == b
                )
            })
        })
    }

    pub fn mul(&self, a: &Coh, b: &Coh) -> Coh {
        let mut out = Coh::default();
        for (ma, ca) in &a.0 {
            for (mb, cb) in &b.0 {
                let m: Vec<u32> = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                if degree(&m) <= self.top {
                    out.add_term(m, ca * cb);
                }
            }
        }
        self.reduce(&out)
    }

    /// `x^k` for `k ≥ 0`.
    pub fn pow(&self, x: &Coh, k: u32) -> Coh {
        (0..k).fold(self.one(), |acc, _| self.mul(&acc, x))
    }

    /// Inverse of an element with nonzero constant term.
    pub fn inverse(&self, x: &Coh) -> Result<Coh, AModelError> {
        let c = x.constant();
        if c.is_zero() {
            return Err(AModelError::Ring("element is not a unit".into()));
        }
        let nil = x.sub(&self.constant(c.clone())).scale(&c.recip());
        let mut term = self.one();
        let mut acc = self.one();
        for _ in 0..self.top {
            term = self.mul(&term, &nil).scale(&int(-1));
            acc = acc.add(&term);
        }
        Ok(acc.scale(&c.recip()))
    }

    /// Component of ring degree `k`.
    pub fn component(&self, x: &Coh, k: u32) -> Coh {
        Coh(x.0.iter().filter(|(m, _)| degree(m) == k).map(|(m, c)| (m.clone(), c.clone())).collect())
    }

    /// Integration: zero outside the top degree.
    pub fn integrate(&self, x: &Coh) -> Rational {
        x.0.iter().filter_map(|(m, c)| self.integrals.get(m).map(|v| v * c)).sum()
    }

    /// Ring map sending generator `i` to `images[i]` in `target`.
    pub fn map_to(&self, target: &CohRing, images: &[Coh], x: &Coh) -> Coh {
        let mut out = Coh::default();
        for (m, c) in &x.0 {
            let mut v = target.one();
            for (i, &e) in m.iter().enumerate() {
                v = target.mul(&v, &target.pow(&images[i], e));
            }
            out = out.add(&v.scale(c));
        }
        out
    }

    /// `1/∏_{m=1}^{n}(D+m)` for `n ≥ 0`, `∏_{m=n+1}^{0}(D+m)` for `n < 0`
    /// (with `α = 1`; the `α`-degree of the factor is `−n`).
    pub fn gamma_factor(&self, d: &Coh, n: i64) -> Result<Coh, AModelError> {
        if n >= 0 {
            let den = (1..=n).fold(self.one(), |acc, m| self.mul(&acc, &d.add(&self.constant(int(m)))));
            self.inverse(&den)
        } else {
            Ok((n + 1..=0).fold(self.one(), |acc, m| self.mul(&acc, &d.add(&self.constant(int(m))))))
        }
    }
}

/// One summand of an I-function: `α`-degree and value at `α = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohTerm {
    pub alpha_degree: i64,
    pub value: Coh,
}

/// Cohomology-valued series `Σ_d q^d·term_d` (prefactor `α·e^{tD/α}` implicit).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohSeries {
    pub ring: CohRing,
    pub vars: Vec<String>,
    pub bound: Bound,
    pub terms: BTreeMap<Vec<u32>, CohTerm>,
}

impl CohSeries {
    /// `{α-power → {degree → coefficient}}` of the sum (without prefactor).
    pub fn alpha_expansion(&self) -> BTreeMap<i64, BTreeMap<Vec<u32>, Coh>> {
        let mut out: BTreeMap<i64, BTreeMap<Vec<u32>, Coh>> = BTreeMap::new();
        for (d, t) in &self.terms {
            for k in 0..=self.ring.top_degree() {
                let part = self.ring.component(&t.value, k);
                if !part.is_zero() {
                    out.entry(t.alpha_degree - k as i64).or_default().insert(d.clone(), part);
                }
            }
        }
        out
    }

    /// Multiplies every summand by a class (degree one, `α`-degree unchanged
    /// in the normalization used here).
    pub fn times(&self, class: &Coh) -> CohSeries {
        let mut out = self.clone();
        for t in out.terms.values_mut() {
            t.value = self.ring.mul(&t.value, class);
        }
        out.terms.retain(|_, t| !t.value.is_zero());
        out
    }

    /// Pushes every summand through a ring map.
    pub fn map_ring(&self, target: &CohRing, images: &[Coh]) -> CohSeries {
        let terms = self
            .terms
            .iter()
            .map(|(d, t)| (d.clone(), CohTerm { alpha_degree: t.alpha_degree, value: self.ring.map_to(target, images, &t.value) }))
            .filter(|(_, t)| !t.value.is_zero())
            .collect();
        CohSeries { ring: target.clone(), vars: self.vars.clone(), bound: self.bound.clone(), terms }
    }
}

fn bound_exponents(bound: &Bound, n: usize) -> Vec<Vec<u32>> {
    let top = bound.max_total_degree();
    let mut out = Vec::new();
    let mut k = vec![0u32; n];
    loop {
        if bound.contains(&k) {
            out.push(k.clone());
        }
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            k[i] += 1;
            if k[i] <= top {
                break;
            }
            k[i] = 0;
            i += 1;
        }
    }
}

fn integral_pairing(d: &[u32], pairings: &[Rational]) -> Result<i64, AModelError> {
    let v: Rational = d.iter().zip(pairings).map(|(&a, p)| int(a as i64) * p).sum();
    if !v.is_integer() {
        return Err(AModelError::NonIntegralPairing(v.to_string()));
    }
    v.to_integer().to_i64().ok_or_else(|| AModelError::NonIntegralPairing(v.to_string()))
}

/// Untwisted toric I-function
/// `Σ_d q^d ∏_j ∏_{m≤0}(D_j+mα)/∏_{m≤D_j·d}(D_j+mα)`.
///
/// `pairings[j][a]` is `D_j·ℓ^{(a)}`; every degree in `bound` must pair
/// integrally with every class.
pub fn toric_i_function(ring: &CohRing, classes: &[Coh], pairings: &[Vec<Rational>], bound: Bound) -> Result<CohSeries, AModelError> {
    let nvars = pairings.first().map_or(0, Vec::len);
    let mut terms = BTreeMap::new();
    for d in bound_exponents(&bound, nvars) {
        let mut value = ring.one();
        let mut alpha = 0i64;
        for (class, p) in classes.iter().zip(pairings) {
            let n = integral_pairing(&d, p)?;
            value = ring.mul(&value, &ring.gamma_factor(class, n)?);
            alpha -= n;
        }
        if !value.is_zero() {
            terms.insert(d, CohTerm { alpha_degree: alpha, value });
        }
    }
    let vars = (1..=nvars).map(|a| format!("q{a}")).collect();
    Ok(CohSeries { ring: ring.clone(), vars, bound, terms })
}

/// One factor `∏_{m=1}^{E·d}(E+mα)` of a hypergeometric modification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Modification {
    pub class: Coh,
    /// `E·ℓ^{(a)}` per Mori generator.
    pub pairings: Vec<i64>,
}

/// Multiplies the degree-`d` summand by `∏_E ∏_{m=1}^{E·d}(E+mα)`.
pub fn hypergeometric_modification(i: &CohSeries, spec: &[Modification]) -> Result<CohSeries, AModelError> {
    let ring = &i.ring;
    let mut out = i.clone();
    for (d, t) in out.terms.iter_mut() {
        for m in spec {
            let n: i64 = d.iter().zip(&m.pairings).map(|(&a, &p)| a as i64 * p).sum();
            if n < 0 {
                return Err(AModelError::NegativeModification(n));
            }
            let num = (1..=n).fold(ring.one(), |acc, k| ring.mul(&acc, &m.class.add(&ring.constant(int(k)))));
            t.value = ring.mul(&t.value, &num);
            t.alpha_degree += n;
        }
    }
    out.terms.retain(|_, t| !t.value.is_zero());
    Ok(out)
}

/// Scalar series `I_k` with `I/α = Σ_k I_k·(H/α)^k` for a ring generated by
/// one class `H`.
pub fn j_components(i: &CohSeries) -> Result<Vec<SeriesM>, AModelError> {
    if i.ring.generators().len() != 1 {
        return Err(AModelError::Shape(format!("{} generators", i.ring.generators().len())));
    }
    let names: Vec<&str> = i.vars.iter().map(String::as_str).collect();
    let mut out: Vec<SeriesM> = (0..=i.ring.top_degree()).map(|_| SeriesM::zero(&names, i.bound.clone())).collect();
    for (d, t) in &i.terms {
        if t.alpha_degree > 0 {
            return Err(AModelError::Shape(format!("positive α-degree {} at {d:?}", t.alpha_degree)));
        }
        // Negative α-degree only feeds powers of 1/α beyond (H/α)^k.
        if t.alpha_degree == 0 {
            for (k, c) in out.iter_mut().enumerate() {
                c.add_term(d.clone(), t.value.coeff(&[k as u32]));
            }
        }
    }
    Ok(out)
}

/// Normalized components `W_k` with `I/(α·I₀) = e^{gH/α}·Σ_k W_k (H/α)^k`,
/// `g = I₁/I₀`, so `W₀ = 1` and `W₁ = 0`.
fn normalized_w(comps: &[SeriesM]) -> Result<(SeriesM, Vec<SeriesM>), AModelError> {
    let i0 = &comps[0];
    let jn: Vec<SeriesM> = comps.iter().map(|c| c.try_div(i0)).collect::<Result<_, _>>()?;
    let g = jn[1].clone();
    let mut w = Vec::with_capacity(jn.len());
    for k in 0..jn.len() {
        let mut acc = jn[k].scale(&Rational::zero());
        let mut gp = SeriesM::one(&names_of(&g), g.bound().clone());
        let mut fact = Rational::one();
        for i in 0..=k {
            if i > 0 {
                gp = gp.try_mul(&g)?.neg();
                fact *= int(i as i64);
            }
            acc = acc.try_add(&jn[k - i].try_mul(&gp)?.scale(&fact.recip()))?;
        }
        w.push(acc);
    }
    Ok((g, w))
}

fn names_of(s: &SeriesM) -> Vec<&str> {
    s.vars().iter().map(String::as_str).collect()
}

fn to_series1(s: &SeriesM, order: usize, var: &str) -> Series1 {
    Series1::from_fn(var, order, |n| s.coeff(&[n as u32]))
}

fn to_series_m(s: &Series1) -> SeriesM {
    let mut out = SeriesM::zero(&[s.var()], Bound::Total(s.order().saturating_sub(1) as u32));
    for (n, c) in s.coeffs().iter().enumerate() {
        out.add_term(vec![n as u32], c.clone());
    }
    out
}

/// Result of the one-parameter mirror transformation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MirrorTransform {
    /// `Q = q·exp(I₁/I₀)` and its inverse.
    pub mirror: MirrorMap,
    /// `W_k(Q)` for `k = 0..=top`.
    pub w: Vec<Series1>,
}

/// Mirror transformation of a one-variable I-function to order `T`.
pub fn mirror_transform(i: &CohSeries, order: usize) -> Result<MirrorTransform, AModelError> {
    if i.vars.len() != 1 {
        return Err(AModelError::Shape("expected one Kähler parameter".into()));
    }
    let comps = j_components(i)?;
    let comps: Vec<SeriesM> = comps.iter().map(|c| to_series_m(&to_series1(c, order, "q"))).collect();
    let (g, w) = normalized_w(&comps)?;
    let g = to_series1(&g, order, "q");
    let forward = Series1::variable("q", order).try_mul(&g.exp()?)?;
    let inverse = forward.revert("Q")?;
    let w = w
        .iter()
        .map(|s| to_series1(s, order, "q").compose(&inverse))
        .collect::<Result<_, _>>()?;
    Ok(MirrorTransform { mirror: MirrorMap { forward, inverse }, w })
}

/// `K(Q) = C + C·θ_Q²W₂`, the three-point function read off from `W₂`.
pub fn correlation_from_w2(w2: &Series1, classical: &Rational) -> Series1 {
    let mut k = w2.theta().theta().scale(classical);
    let mut c = k.coeffs().to_vec();
    if !c.is_empty() {
        c[0] += classical;
    }
    k = Series1::from_coeffs(w2.var(), c);
    k
}

/// Orbifold-quotient intersection data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientDiagram {
    /// `|G′|`.
    pub group_order: u64,
    /// `q*H = scale·h`.
    pub scale: i64,
    /// `∫_{ambient} h^{dim ambient}`.
    pub ambient_integral: Rational,
    /// Degrees of the complete-intersection classes, as multiples of `h`.
    pub ci_degrees: Vec<i64>,
    pub ambient_dim: u32,
}

/// `∫ H^top` on the quotient together with the basis `{1, H, H²/C, H³/C, …}`
/// scalings (the top two entries divided by `C`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientIntersections {
    pub cover_integral: Rational,
    pub quotient_integral: Rational,
    pub basis_scalings: Vec<Rational>,
}

/// Computes `∫_{Y′} h^n = ∫_{ambient} h^{dim}·∏deg` and
/// `∫_{Y′/G′} H^n = (1/|G′|)∫_{Y′}(scale·h)^n`.
pub fn quotient_intersections(d: &QuotientDiagram) -> Result<QuotientIntersections, AModelError> {
    if d.group_order == 0 || d.scale == 0 || d.ci_degrees.iter().any(|&x| x <= 0) {
        return Err(AModelError::Diagram("orders, scales and degrees must be positive".into()));
    }
    let n = d.ambient_dim as i64 - d.ci_degrees.len() as i64;
    if n < 1 || !d.ambient_integral.is_positive() {
        return Err(AModelError::Diagram(format!("dimension {n} or ambient integral is not positive")));
    }
    let cover = d.ci_degrees.iter().fold(d.ambient_integral.clone(), |acc, &k| acc * int(k));
    let quotient = pow(&int(d.scale), n) * &cover / int(d.group_order as i64);
    let mut scalings = vec![Rational::one(); n as usize + 1];
    for s in scalings.iter_mut().skip(2) {
        *s = quotient.recip();
    }
    Ok(QuotientIntersections { cover_integral: cover, quotient_integral: quotient, basis_scalings: scalings })
}

/// `Γ(s+E)/Γ(s+E+ℓ)` in the ring, for `s` rational and `E` nilpotent.
fn ring_gamma_ratio(ring: &CohRing, s: &Rational, e: &Coh, l: i64) -> Result<Coh, AModelError> {
    let shifted = |k: i64| e.add(&ring.constant(s + int(k)));
    if l >= 0 {
        let den = (0..l).fold(ring.one(), |acc, k| ring.mul(&acc, &shifted(k)));
        ring.inverse(&den)
    } else {
        Ok((1..=-l).fold(ring.one(), |acc, k| ring.mul(&acc, &shifted(-k))))
    }
}

/// Coefficients `c_E(nℓ) = ∏_i Γ(γ_i+E_i+1)/Γ(γ_i+E_i+nℓ_i+1)` of the
/// cohomology-valued B-series of a rank-one system, `n < T`.
pub fn b_series(ring: &CohRing, sys: &GkzSystem, classes: &[Coh], order: usize) -> Result<Vec<Coh>, AModelError> {
    if sys.kernel_rank() != 1 || classes.len() != sys.gamma.len() {
        return Err(AModelError::Shape("rank-one system with one class per column".into()));
    }
    let ell = sys.kernel_vector(0)?;
    (0..order as i64)
        .map(|n| {
            sys.gamma.iter().zip(classes).zip(&ell).try_fold(ring.one(), |acc, ((g, e), &l)| {
                Ok(ring.mul(&acc, &ring_gamma_ratio(ring, &(g + int(1)), e, n * l)?))
            })
        })
        .collect()
}

/// Outcome of a coefficientwise comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityReport {
    pub pass: bool,
    /// First degree where the two sides differ.
    pub first_mismatch: Option<usize>,
}

/// Compares `B_X` with the pulled-back `B_{X′}` after `w₀ = −x₀²/(4x_∞)`:
/// `c(nℓ) = c̄(nℓ̄)·∏_i(−4)^{nℓ_{i,0}}`.
pub fn verify_mirror_identity(b: &[Coh], bbar_pulled: &[Coh], heads: &[i64]) -> IdentityReport {
    let s: i64 = heads.iter().sum();
    let first = b.iter().zip(bbar_pulled).enumerate().find_map(|(n, (x, y))| {
        let factor = pow(&int(-4), s * n as i64);
        (*x != y.scale(&factor)).then_some(n)
    });
    let first = first.or_else(|| (b.len() != bbar_pulled.len()).then_some(b.len().min(bbar_pulled.len())));
    IdentityReport { pass: first.is_none(), first_mismatch: first }
}

/// Column classes for `A_ext` (`D_{i,0} = −Σ_j D_{i,j}`) and the pulled-back
/// classes for the per-part `Ā` (`D̄_{i,0} ↦ 2D_{i,0}`, `D̄_{i,∞} ↦ −D_{i,0}`).
pub fn column_classes(ray_classes: &[Coh], partition: &[Vec<usize>]) -> (Vec<Coh>, Vec<Coh>) {
    let mut ext = Vec::new();
    let mut bar = Vec::new();
    for part in partition {
        let d0 = part.iter().fold(Coh::default(), |acc, &j| acc.sub(&ray_classes[j]));
        ext.push(d0.clone());
        bar.push(d0.scale(&int(2)));
        for &j in part {
            ext.push(ray_classes[j].clone());
            bar.push(ray_classes[j].clone());
        }
        bar.push(d0.scale(&int(-1)));
    }
    (ext, bar)
}

/// The B-series identity for a nef-partition of a fan whose ray classes
/// live in `ring`, to order `T`.
pub fn mirror_identity(ring: &CohRing, fan: &Fan, partition: &[Vec<usize>], ray_classes: &[Coh], order: usize) -> Result<IdentityReport, AModelError> {
    let ext = build_aext(fan, partition)?;
    let bar = build_abar_parts(fan, partition)?;
    let (ce, cb) = column_classes(ray_classes, partition);
    let b = b_series(ring, &ext, &ce, order)?;
    let bb = b_series(ring, &bar, &cb, order)?;
    let ell = ext.kernel_vector(0)?;
    let sizes: Vec<usize> = partition.iter().map(Vec::len).collect();
    if bar.kernel_vector(0)? != lift_relation_parts(&ell, &sizes) {
        return Err(AModelError::CrossCheck("Ā kernel is not the lifted relation".into()));
    }
    let mut heads = Vec::new();
    let mut at = 0;
    for k in &sizes {
        heads.push(ell[at]);
        at += k + 1;
    }
    Ok(verify_mirror_identity(&b, &bb, &heads))
}

/// Output of the two-parameter appendix computation.
#[derive(Clone, Debug)]
pub struct AppendixReport {
    /// Inverse mirror map `q₁(Q₁, Q₂)`.
    pub q1: SeriesM,
    pub w2: SeriesM,
    /// `W₃` in the printed normalization `∫h³·W₃`.
    pub w3: SeriesM,
    /// `c_d` from `W₂` and `W₃` along `Q = Q₁Q₂⁴`, which must agree.
    pub generating: Vec<Rational>,
    /// `d³c_d`, comparable with the one-parameter correlation.
    pub correlation: Vec<Rational>,
}

/// `H^•(Z)` for the `ℙ³`-bundle: `ℚ[h, ξ]/(h⁴, ξ² + 4hξ)` with `∫h³ξ` read
/// off the fan of `Z`.
pub fn bundle_ring() -> Result<CohRing, AModelError> {
    let rays = vec![
        vec![1, 0, 0, -1],
        vec![0, 1, 0, -1],
        vec![0, 0, 1, -1],
        vec![-1, -1, -1, -1],
        vec![0, 0, 0, 1],
        vec![0, 0, 0, -1],
    ];
    let mut cones = Vec::new();
    for skip in 0..4 {
        let base: Vec<usize> = (0..4).filter(|&i| i != skip).collect();
        cones.push([base.clone(), vec![4]].concat());
        cones.push([base, vec![5]].concat());
    }
    let z = Fan::standard(rays, cones)?;
    let top = distinct_intersection(&z, &[0, 1, 2, 5])?;
    let mut xi2 = Coh::default();
    xi2.add_term(vec![1, 1], int(-4));
    CohRing::new(&["h", "xi"], vec![(vec![4, 0], Coh::default()), (vec![0, 2], xi2)], vec![(vec![3, 1], top)])
}

/// The two-parameter computation for the quartic double cover, summed over
/// `d₁ ≤ b₁`, `d₂ ≤ b₂`.
pub fn appendix_pipeline(b1: u32, b2: u32) -> Result<AppendixReport, AModelError> {
    let z = bundle_ring()?;
    let h = z.gen(0);
    let xi = z.gen(1);
    let four_h_xi = xi.add(&h.scale(&int(4)));
    let classes = vec![h.clone(), h.clone(), h.clone(), h.clone(), four_h_xi, xi.clone()];
    let pairings: Vec<Vec<Rational>> =
        [[1, 0], [1, 0], [1, 0], [1, 0], [0, 1], [-4, 1]].iter().map(|p| vec![int(p[0]), int(p[1])]).collect();
    let bound = Bound::PerVariable(vec![b1, b2]);
    let i = toric_i_function(&z, &classes, &pairings, bound.clone())?;
    let e = xi.scale(&int(2)).add(&h.scale(&int(8)));
    let i = hypergeometric_modification(&i, &[Modification { class: e.clone(), pairings: vec![0, 2] }])?;

    // Terms killed by ξ(ξ+4h) = 0 are exactly those with d₂ < 4d₁.
    let killed = i.times(&e);
    for d in i.terms.keys() {
        let alive = killed.terms.contains_key(d);
        if alive != (d[1] >= 4 * d[0]) {
            return Err(AModelError::CrossCheck(format!("vanishing pattern at {d:?}")));
        }
    }
    let y = CohRing::truncated("h", 3, z.integrate(&z.mul(&z.pow(&h, 3), &e)));
    let restricted = killed.map_ring(&y, &[y.gen(0), Coh::default()]);
    let mut on_y = i.map_ring(&y, &[y.gen(0), Coh::default()]);
    on_y.terms.retain(|d, _| restricted.terms.contains_key(d));
    let kappa = y.integrate(&y.pow(&y.gen(0), 3));

    let comps = j_components(&on_y)?;
    let (g, w) = normalized_w(&comps)?;
    let vars = ["Q1", "Q2"];
    let q1 = SeriesM::variable(&["q1", "q2"], bound.clone(), 0);
    let big_q1 = q1.try_mul(&g.exp()?)?;
    let big_q2 = SeriesM::variable(&["q1", "q2"], bound.clone(), 1);
    let inv = SeriesM::revert_triangular(&[big_q1, big_q2], &vars)?;
    let w2 = w[2].substitute(&inv)?;
    let w3raw = w[3].substitute(&inv)?;
    let w3 = w3raw.scale(&kappa);

    let mut generating = Vec::new();
    let mut correlation = Vec::new();
    for d in 1..=b1.min(b2 / 4) {
        let key = [d, 4 * d];
        let dd = int(d as i64);
        let from_w2 = &kappa * w2.coeff(&key) / &dd;
        let from_w3 = -&kappa * w3raw.coeff(&key) / int(2);
        if from_w2 != from_w3 {
            return Err(AModelError::CrossCheck(format!("degree {d}: {from_w2} vs {from_w3}")));
        }
        correlation.push(&from_w2 * pow(&dd, 3));
        generating.push(from_w2);
    }
    Ok(AppendixReport { q1: inv[0].clone(), w2, w3, generating, correlation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn truncated_ring_inverse() {
        let r = CohRing::truncated("H", 3, int(2));
        let x = r.one().add(&r.gen(0));
        let inv = r.inverse(&x).unwrap();
        assert_eq!(r.mul(&x, &inv), r.one());
        assert_eq!(r.integrate(&r.pow(&r.gen(0), 3)), int(2));
        assert!(r.is_confluent());
    }

    #[test]
    fn gamma_factor_degrees() {
        let r = CohRing::truncated("H", 3, int(1));
        let f = r.gamma_factor(&r.gen(0), -2).unwrap();
        // (H − 1)·H
        assert_eq!(f.coeff(&[1]), int(-1));
        assert_eq!(f.coeff(&[2]), int(1));
        let g = r.gamma_factor(&r.gen(0), 1).unwrap();
        assert_eq!(g.coeff(&[1]), int(-1));
        assert_eq!(g.constant(), int(1));
        let _ = rat(1, 2);
    }
}
