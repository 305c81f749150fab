use super::SeriesError;
use crate::rational::{int, Rational};
use num_traits::{One, Zero};
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

/// Which monomials a [`SeriesM`] keeps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bound {
    /// Monomials of total degree at most the given value.
    Total(u32),
    /// Monomials whose `i`-th exponent is at most the `i`-th value.
    PerVariable(Vec<u32>),
}

impl Bound {
    pub fn contains(&self, exps: &[u32]) -> bool {
        match self {
            Bound::Total(d) => exps.iter().sum::<u32>() <= *d,
            Bound::PerVariable(b) => exps.len() == b.len() && exps.iter().zip(b).all(|(e, m)| e <= m),
        }
    }

    /// Largest total degree of a kept monomial.
    pub fn max_total_degree(&self) -> u32 {
        match self {
            Bound::Total(d) => *d,
            Bound::PerVariable(b) => b.iter().sum(),
        }
    }

    fn describe(&self) -> String {
        match self {
            Bound::Total(d) => format!("total degree <= {d}"),
            Bound::PerVariable(b) => format!("per-variable <= {b:?}"),
        }
    }
}

/// Sparse multivariate truncated series.
///
/// Only nonzero coefficients are stored, and every stored exponent lies
/// inside the bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesM {
    vars: Vec<String>,
    bound: Bound,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl SeriesM {
    /// The zero series.
    pub fn zero(vars: &[&str], bound: Bound) -> Self {
        Self {
            vars: vars.iter().map(|v| v.to_string()).collect(),
            bound,
            terms: BTreeMap::new(),
        }
    }

    fn empty_like(&self) -> Self {
        Self {
            vars: self.vars.clone(),
            bound: self.bound.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &[&str], bound: Bound, c: Rational) -> Self {
        let mut s = Self::zero(vars, bound);
        let n = s.vars.len();
        s.add_term(vec![0; n], c);
        s
    }

    pub fn one(vars: &[&str], bound: Bound) -> Self {
        Self::constant(vars, bound, Rational::one())
    }

    /// The `i`-th variable as a series.
    pub fn variable(vars: &[&str], bound: Bound, i: usize) -> Self {
        let mut exps = vec![0; vars.len()];
        exps[i] = 1;
        Self::monomial(vars, bound, exps, Rational::one())
    }

    /// `c · x^exps`, dropped when outside the bound.
    pub fn monomial(vars: &[&str], bound: Bound, exps: Vec<u32>, c: Rational) -> Self {
        let mut s = Self::zero(vars, bound);
        s.add_term(exps, c);
        s
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn bound(&self) -> &Bound {
        &self.bound
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Rational> {
        &self.terms
    }

    pub fn coeff(&self, exps: &[u32]) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&vec![0; self.vars.len()])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c · x^exps`; silently ignores monomials outside the bound.
    pub fn add_term(&mut self, exps: Vec<u32>, c: Rational) {
        if c.is_zero() || !self.bound.contains(&exps) {
            return;
        }
        match self.terms.entry(exps) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Adds a term that must lie inside the bound.
    pub fn insert_checked(&mut self, exps: Vec<u32>, c: Rational) -> Result<(), SeriesError> {
        if exps.len() != self.vars.len() || !self.bound.contains(&exps) {
            return Err(SeriesError::OutsideBound(exps));
        }
        self.add_term(exps, c);
        Ok(())
    }

    /// Same coefficients under new variable names.
    pub fn with_vars(mut self, vars: &[&str]) -> Self {
        assert_eq!(vars.len(), self.vars.len(), "variable count must not change");
        self.vars = vars.iter().map(|v| v.to_string()).collect();
        self
    }

    fn check(&self, other: &Self) -> Result<(), SeriesError> {
        if self.vars != other.vars {
            return Err(SeriesError::VariableMismatch(self.vars.clone(), other.vars.clone()));
        }
        if self.bound != other.bound {
            return Err(SeriesError::TruncationMismatch(
                self.bound.describe(),
                other.bound.describe(),
            ));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.try_add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = self.empty_like();
        if !c.is_zero() {
            out.terms = self.terms.iter().map(|(e, a)| (e.clone(), a * c)).collect();
        }
        out
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let mut acc: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        for (ea, a) in &self.terms {
            for (eb, b) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                if !self.bound.contains(&e) {
                    continue;
                }
                *acc.entry(e).or_insert_with(Rational::zero) += a * b;
            }
        }
        acc.retain(|_, v| !v.is_zero());
        Self {
            vars: self.vars.clone(),
            bound: self.bound.clone(),
            terms: acc,
        }
    }

    /// Splits `self = c + v` with `v` having zero constant term.
    fn split_constant(&self) -> (Rational, Self) {
        let c = self.constant_term();
        let mut v = self.clone();
        v.terms.remove(&vec![0; self.vars.len()]);
        (c, v)
    }

    /// Sums `Σ_k coeffs(k) v^k` for nilpotent-in-truncation `v`.
    fn power_sum(&self, v: &Self, mut coeff: impl FnMut(u32) -> Rational) -> Self {
        let mut out = Self::one_like(self);
        let mut power = Self::one_like(self);
        let mut k = 1u32;
        loop {
            power = power.mul_unchecked(v);
            if power.is_zero() {
                break;
            }
            let c = coeff(k);
            out = out.try_add(&power.scale(&c)).expect("same shape");
            k += 1;
        }
        out
    }

    fn one_like(s: &Self) -> Self {
        let mut out = s.empty_like();
        out.add_term(vec![0; s.vars.len()], Rational::one());
        out
    }

    /// Multiplicative inverse of a series with nonzero constant term.
    pub fn inverse(&self) -> Result<Self, SeriesError> {
        let (c, v) = self.split_constant();
        if c.is_zero() {
            return Err(SeriesError::NotAUnit);
        }
        let inv_c = c.recip();
        let w = v.scale(&inv_c);
        let sum = self.power_sum(&w, |k| if k % 2 == 0 { Rational::one() } else { -Rational::one() });
        Ok(sum.scale(&inv_c))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check(other)?;
        Ok(self.mul_unchecked(&other.inverse()?))
    }

    pub fn exp(&self) -> Result<Self, SeriesError> {
        let (c, v) = self.split_constant();
        if !c.is_zero() {
            return Err(SeriesError::ExpConstantTerm);
        }
        let mut fact = Rational::one();
        Ok(self.power_sum(&v, |k| {
            fact /= int(k as i64);
            fact.clone()
        }))
    }

    pub fn log(&self) -> Result<Self, SeriesError> {
        let (c, v) = self.split_constant();
        if !c.is_one() {
            return Err(SeriesError::LogConstantTerm);
        }
        let mut out = self.power_sum(&v, |k| {
            let sign = if k % 2 == 1 { 1 } else { -1 };
            Rational::new(sign.into(), (k as i64).into())
        });
        out.terms.remove(&vec![0; self.vars.len()]);
        Ok(out)
    }

    /// Exponent of `var` that divides every term (the minimal exponent).
    fn min_exponent(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).min().unwrap_or(u32::MAX)
    }

    /// Divides by the `i`-th variable; every term must be divisible.
    pub fn divide_by_variable(&self, i: usize) -> Result<Self, SeriesError> {
        let mut out = self.empty_like();
        for (e, c) in &self.terms {
            if e[i] == 0 {
                return Err(SeriesError::Triangular(format!(
                    "term {e:?} is not divisible by {}",
                    self.vars[i]
                )));
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            out.add_term(e2, c.clone());
        }
        Ok(out)
    }

    /// Substitutes `images[i]` for the `i`-th variable.
    ///
    /// The images share one variable set and bound, which must have the same
    /// shape as the bound of `self`. Substitution is exact modulo the bound
    /// when every image has zero constant term (total-degree bounds) or when
    /// the `i`-th image is divisible by its own `i`-th variable (per-variable
    /// bounds); other inputs are rejected.
    pub fn substitute(&self, images: &[SeriesM]) -> Result<Self, SeriesError> {
        if images.len() != self.vars.len() || images.is_empty() {
            return Err(SeriesError::Malformed(format!(
                "expected {} images, got {}",
                self.vars.len(),
                images.len()
            )));
        }
        let target = &images[0];
        for img in images {
            target.check(img)?;
        }
        let shapes_match = match (&self.bound, &target.bound) {
            (Bound::Total(a), Bound::Total(b)) => a == b,
            (Bound::PerVariable(a), Bound::PerVariable(b)) => a == b,
            _ => false,
        };
        if !shapes_match {
            return Err(SeriesError::TruncationMismatch(
                self.bound.describe(),
                target.bound.describe(),
            ));
        }
        for (i, img) in images.iter().enumerate() {
            let ok = match &self.bound {
                Bound::Total(_) => img.constant_term().is_zero(),
                Bound::PerVariable(_) => img.is_zero() || img.min_exponent(i) >= 1,
            };
            if !ok {
                return Err(SeriesError::CompositionConstantTerm);
            }
        }
        let mut powers: Vec<Vec<SeriesM>> = images.iter().map(|_| vec![Self::one_like(target)]).collect();
        let mut out = target.empty_like();
        for (e, c) in &self.terms {
            let mut term = Self::one_like(target).scale(c);
            for (i, &k) in e.iter().enumerate() {
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().expect("nonempty").mul_unchecked(&images[i]);
                    powers[i].push(next);
                }
                if k > 0 {
                    term = term.mul_unchecked(&powers[i][k as usize]);
                }
            }
            out = out.try_add(&term)?;
        }
        Ok(out)
    }

    /// Inverts a unit-triangular coordinate change.
    ///
    /// `map[i]` expresses `y_i = x_i · u_i(x)` with `u_i(0) ≠ 0`. The result
    /// expresses each `x_i` as a series in the `y` variables (named
    /// `new_vars`), found by the fixed-point iteration
    /// `x_i ← y_i / u_i(x)` and verified by substituting back.
    pub fn revert_triangular(map: &[SeriesM], new_vars: &[&str]) -> Result<Vec<SeriesM>, SeriesError> {
        let n = map.len();
        if n == 0 || new_vars.len() != n {
            return Err(SeriesError::Triangular("variable count mismatch".into()));
        }
        for m in map {
            map[0].check(m)?;
        }
        if map[0].vars.len() != n {
            return Err(SeriesError::Triangular("map must be square".into()));
        }
        let units: Vec<SeriesM> = map
            .iter()
            .enumerate()
            .map(|(i, m)| m.divide_by_variable(i))
            .collect::<Result<_, _>>()?;
        for u in &units {
            if u.constant_term().is_zero() {
                return Err(SeriesError::Triangular("non-unit factor".into()));
            }
        }
        let bound = map[0].bound.clone();
        let ys: Vec<SeriesM> = (0..n).map(|i| SeriesM::variable(new_vars, bound.clone(), i)).collect();
        let mut xs: Vec<SeriesM> = (0..n)
            .map(|i| ys[i].scale(&units[i].constant_term().recip()))
            .collect();
        let max_iter = bound.max_total_degree() as usize + 2;
        let mut stable = false;
        for _ in 0..max_iter {
            let mut next = Vec::with_capacity(n);
            for i in 0..n {
                let u = units[i].substitute(&xs)?;
                next.push(ys[i].mul_unchecked(&u.inverse()?));
            }
            if next == xs {
                stable = true;
                break;
            }
            xs = next;
        }
        if !stable {
            return Err(SeriesError::Triangular("fixed-point iteration did not converge".into()));
        }
        for (i, m) in map.iter().enumerate() {
            if m.substitute(&xs)? != ys[i] {
                return Err(SeriesError::Triangular(format!("round trip failed for variable {i}")));
            }
        }
        Ok(xs)
    }
}

impl std::fmt::Display for SeriesM {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (v, k) in self.vars.iter().zip(e) {
                match k {
                    0 => {}
                    1 => write!(f, "*{v}")?,
                    _ => write!(f, "*{v}^{k}")?,
                }
            }
        }
        Ok(())
    }
}
