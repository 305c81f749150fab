//! Truncated power series with exact rational coefficients.
//!
//! [`Series1`] is a dense univariate series `Σ_{n<T} a_n z^n` that carries its
//! truncation order `T` explicitly. [`SeriesM`] is a sparse multivariate series
//! keyed by exponent tuples. Mixing two series with different truncations is
//! an error rather than a silent truncation to the smaller bound.

mod json;
mod multi;

pub use json::{BoundJson, SeriesJson};
pub use multi::{Bound, SeriesM};

use crate::rational::{int, Rational};
use num_traits::{One, Zero};
use thiserror::Error;

/// Failures of series arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("truncation mismatch: {0} vs {1}")]
    TruncationMismatch(String, String),
    #[error("variable mismatch: {0:?} vs {1:?}")]
    VariableMismatch(Vec<String>, Vec<String>),
    #[error("series has zero constant term and cannot be inverted")]
    NotAUnit,
    #[error("exp needs a series with zero constant term")]
    ExpConstantTerm,
    #[error("log needs a series with constant term 1")]
    LogConstantTerm,
    #[error("composition needs an inner series with zero constant term")]
    CompositionConstantTerm,
    #[error("reversion needs a(0) = 0 and a'(0) != 0")]
    NotRevertible,
    #[error("reversion algorithms disagree at degree {0}")]
    ReversionDisagreement(usize),
    #[error("exponent {0:?} lies outside the truncation bound")]
    OutsideBound(Vec<u32>),
    #[error("triangular map: {0}")]
    Triangular(String),
    #[error("malformed series data: {0}")]
    Malformed(String),
}

/// Dense univariate truncated series `Σ_{n<T} a_n z^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series1 {
    var: String,
    coeffs: Vec<Rational>,
}

impl Series1 {
    /// The zero series of order `order`.
    pub fn zero(var: &str, order: usize) -> Self {
        Self {
            var: var.to_string(),
            coeffs: vec![Rational::zero(); order],
        }
    }

    /// The constant series `c`.
    pub fn constant(var: &str, order: usize, c: Rational) -> Self {
        let mut s = Self::zero(var, order);
        if order > 0 {
            s.coeffs[0] = c;
        }
        s
    }

    /// The constant series 1.
    pub fn one(var: &str, order: usize) -> Self {
        Self::constant(var, order, Rational::one())
    }

    /// The series `z` itself.
    pub fn variable(var: &str, order: usize) -> Self {
        let mut s = Self::zero(var, order);
        if order > 1 {
            s.coeffs[1] = Rational::one();
        }
        s
    }

    /// Wraps an explicit coefficient list; the order is its length.
    pub fn from_coeffs(var: &str, coeffs: Vec<Rational>) -> Self {
        Self {
            var: var.to_string(),
            coeffs,
        }
    }

    /// Builds a series from integer coefficients.
    pub fn from_ints(var: &str, coeffs: &[i64]) -> Self {
        Self::from_coeffs(var, coeffs.iter().map(|&c| int(c)).collect())
    }

    /// Builds a series of order `order` from a coefficient rule.
    pub fn from_fn(var: &str, order: usize, f: impl FnMut(usize) -> Rational) -> Self {
        Self::from_coeffs(var, (0..order).map(f).collect())
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    /// The exclusive truncation degree `T`.
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `z^n`; zero beyond the stored range.
    pub fn coeff(&self, n: usize) -> Rational {
        self.coeffs.get(n).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Renames the variable, keeping the coefficients.
    pub fn with_var(mut self, var: &str) -> Self {
        self.var = var.to_string();
        self
    }

    /// Drops coefficients at and above `order`.
    pub fn truncate(&self, order: usize) -> Self {
        let mut s = self.clone();
        s.coeffs.resize(order.min(self.order()), Rational::zero());
        s
    }

    fn check(&self, other: &Self) -> Result<(), SeriesError> {
        if self.var != other.var {
            return Err(SeriesError::VariableMismatch(
                vec![self.var.clone()],
                vec![other.var.clone()],
            ));
        }
        if self.order() != other.order() {
            return Err(SeriesError::TruncationMismatch(
                format!("order {}", self.order()),
                format!("order {}", other.order()),
            ));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self::from_coeffs(&self.var, coeffs))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self::from_coeffs(&self.var, coeffs))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let t = self.order();
        let mut out = vec![Rational::zero(); t];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..t - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Self::from_coeffs(&self.var, out)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::from_coeffs(&self.var, self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn neg(&self) -> Self {
        Self::from_coeffs(&self.var, self.coeffs.iter().map(|a| -a).collect())
    }

    /// Multiplicative inverse of a series with nonzero constant term.
    pub fn inverse(&self) -> Result<Self, SeriesError> {
        let t = self.order();
        if t == 0 {
            return Ok(self.clone());
        }
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            return Err(SeriesError::NotAUnit);
        }
        let inv0 = a0.recip();
        let mut b: Vec<Rational> = Vec::with_capacity(t);
        b.push(inv0.clone());
        for n in 1..t {
            let mut s = Rational::zero();
            for k in 1..=n {
                if !self.coeffs[k].is_zero() {
                    s += &self.coeffs[k] * &b[n - k];
                }
            }
            b.push(-s * &inv0);
        }
        Ok(Self::from_coeffs(&self.var, b))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check(other)?;
        Ok(self.mul_unchecked(&other.inverse()?))
    }

    /// The formal derivative `d/dz`, keeping the order (top coefficient becomes zero).
    pub fn derivative(&self) -> Self {
        let t = self.order();
        let coeffs = (0..t)
            .map(|n| {
                if n + 1 < t {
                    &self.coeffs[n + 1] * int((n + 1) as i64)
                } else {
                    Rational::zero()
                }
            })
            .collect();
        Self::from_coeffs(&self.var, coeffs)
    }

    /// The Euler operator `θ = z d/dz`.
    pub fn theta(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, a)| a * int(n as i64))
            .collect();
        Self::from_coeffs(&self.var, coeffs)
    }

    /// Divides by `z`, losing one order of precision.
    pub fn shift_down(&self) -> Result<Self, SeriesError> {
        if self.order() == 0 || !self.coeffs[0].is_zero() {
            return Err(SeriesError::CompositionConstantTerm);
        }
        Ok(Self::from_coeffs(&self.var, self.coeffs[1..].to_vec()))
    }

    /// Truncated exponential of a series with zero constant term.
    ///
    /// Uses the recurrence `n e_n = Σ_k k a_k e_{n-k}` coming from `e' = a' e`.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        let t = self.order();
        if t == 0 {
            return Ok(self.clone());
        }
        if !self.coeffs[0].is_zero() {
            return Err(SeriesError::ExpConstantTerm);
        }
        let mut e: Vec<Rational> = Vec::with_capacity(t);
        e.push(Rational::one());
        for n in 1..t {
            let mut s = Rational::zero();
            for k in 1..=n {
                if !self.coeffs[k].is_zero() {
                    s += &self.coeffs[k] * int(k as i64) * &e[n - k];
                }
            }
            e.push(s / int(n as i64));
        }
        Ok(Self::from_coeffs(&self.var, e))
    }

    /// Truncated logarithm of a series with constant term 1.
    pub fn log(&self) -> Result<Self, SeriesError> {
        let t = self.order();
        if t == 0 {
            return Ok(self.clone());
        }
        if !self.coeffs[0].is_one() {
            return Err(SeriesError::LogConstantTerm);
        }
        // log(a)' = a'/a, integrated termwise.
        let q = self.derivative().mul_unchecked(&self.inverse()?);
        let mut coeffs = vec![Rational::zero(); t];
        for n in 1..t {
            coeffs[n] = &q.coeffs[n - 1] / int(n as i64);
        }
        Ok(Self::from_coeffs(&self.var, coeffs))
    }

    /// `self(inner(q))`, returned in the variable and order of `inner`.
    ///
    /// The inner series must have zero constant term and the outer series
    /// must be known at least to the order of the inner one.
    pub fn compose(&self, inner: &Self) -> Result<Self, SeriesError> {
        let t = inner.order();
        if t == 0 {
            return Ok(inner.clone());
        }
        if !inner.coeffs[0].is_zero() {
            return Err(SeriesError::CompositionConstantTerm);
        }
        if self.order() < t {
            return Err(SeriesError::TruncationMismatch(
                format!("outer order {}", self.order()),
                format!("inner order {t}"),
            ));
        }
        let mut acc = Series1::zero(&inner.var, t);
        for k in (0..t).rev() {
            acc = acc.mul_unchecked(inner);
            acc.coeffs[0] += &self.coeffs[k];
        }
        Ok(acc)
    }

    /// Evaluates a polynomial at a series whose constant term may be nonzero.
    pub fn compose_polynomial(poly: &[Rational], inner: &Self) -> Self {
        let mut acc = Series1::zero(&inner.var, inner.order());
        for c in poly.iter().rev() {
            acc = acc.mul_unchecked(inner);
            if acc.order() > 0 {
                acc.coeffs[0] += c;
            }
        }
        acc
    }

    fn check_revertible(&self) -> Result<(), SeriesError> {
        if self.order() < 2 || !self.coeffs[0].is_zero() || self.coeffs[1].is_zero() {
            return Err(SeriesError::NotRevertible);
        }
        Ok(())
    }

    /// Compositional inverse by Lagrange inversion:
    /// `b_n = (1/n) [z^{n-1}] (z/a(z))^n`.
    pub fn revert_lagrange(&self, var: &str) -> Result<Self, SeriesError> {
        self.check_revertible()?;
        let t = self.order();
        let phi = self.shift_down()?.inverse()?;
        let mut out = vec![Rational::zero(); t];
        let mut power = Series1::one(&self.var, t - 1);
        for (n, slot) in out.iter_mut().enumerate().skip(1) {
            power = power.mul_unchecked(&phi);
            *slot = power.coeff(n - 1) / int(n as i64);
        }
        Ok(Series1::from_coeffs(var, out))
    }

    /// Compositional inverse by Newton iteration `b ← b − (a∘b − q)/(a'∘b)`,
    /// which doubles the number of correct coefficients per step.
    pub fn revert_newton(&self, var: &str) -> Result<Self, SeriesError> {
        self.check_revertible()?;
        let t = self.order();
        let q = Series1::variable(var, t);
        let a_prime = self.derivative();
        let mut b = q.scale(&self.coeffs[1].recip());
        let mut correct = 2usize;
        while correct < t {
            let residual = self.compose(&b)?.try_sub(&q)?;
            let slope = a_prime.compose(&b)?;
            b = b.try_sub(&residual.try_div(&slope)?)?;
            correct *= 2;
        }
        Ok(b)
    }

    /// Compositional inverse computed by both algorithms, which must agree.
    pub fn revert(&self, var: &str) -> Result<Self, SeriesError> {
        let lagrange = self.revert_lagrange(var)?;
        let newton = self.revert_newton(var)?;
        if let Some(n) = (0..lagrange.order()).find(|&n| lagrange.coeffs[n] != newton.coeffs[n]) {
            return Err(SeriesError::ReversionDisagreement(n));
        }
        Ok(lagrange)
    }
}

impl std::fmt::Display for Series1 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match n {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*{}", self.var)?,
                _ => write!(f, "({c})*{}^{n}", self.var)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O({}^{})", self.var, self.order())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn z(order: usize) -> Series1 {
        Series1::variable("z", order)
    }

    #[test]
    fn difference_of_squares() {
        let one = Series1::one("z", 3);
        let a = one.try_add(&z(3)).unwrap();
        let b = one.try_sub(&z(3)).unwrap();
        assert_eq!(a.try_mul(&b).unwrap(), Series1::from_ints("z", &[1, 0, -1]));
    }

    #[test]
    fn geometric_series() {
        let s = Series1::from_ints("z", &[1, -1, 0, 0]).inverse().unwrap();
        assert_eq!(s, Series1::from_ints("z", &[1, 1, 1, 1]));
    }

    #[test]
    fn y0_squared() {
        let y0 = Series1::from_coeffs("z", vec![int(1), rat(1, 16), rat(81, 1024)]);
        let sq = y0.try_mul(&y0).unwrap();
        assert_eq!(sq.coeff(1), rat(1, 8));
    }

    #[test]
    fn mixed_orders_are_rejected() {
        let e = Series1::one("z", 3).try_add(&Series1::one("z", 4)).unwrap_err();
        assert!(matches!(e, SeriesError::TruncationMismatch(..)));
        let e = Series1::one("z", 3).try_add(&Series1::one("q", 3)).unwrap_err();
        assert!(matches!(e, SeriesError::VariableMismatch(..)));
    }

    #[test]
    fn division_by_non_unit() {
        assert_eq!(z(3).inverse().unwrap_err(), SeriesError::NotAUnit);
    }

    #[test]
    fn exp_and_log_examples() {
        assert_eq!(Series1::zero("z", 4).exp().unwrap(), Series1::one("z", 4));
        let log = Series1::from_ints("z", &[1, 1, 0, 0]).log().unwrap();
        assert_eq!(
            log,
            Series1::from_coeffs("z", vec![int(0), int(1), rat(-1, 2), rat(1, 3)])
        );
        let a = Series1::from_coeffs("z", vec![int(0), int(1), rat(1, 2)]);
        assert_eq!(a.exp().unwrap(), Series1::from_ints("z", &[1, 1, 1]));
        assert_eq!(
            Series1::one("z", 3).exp().unwrap_err(),
            SeriesError::ExpConstantTerm
        );
        assert_eq!(z(3).log().unwrap_err(), SeriesError::LogConstantTerm);
    }

    #[test]
    fn reversion_of_identity() {
        assert_eq!(z(6).revert("q").unwrap(), Series1::variable("q", 6));
    }

    #[test]
    fn reversion_rejects_degenerate_input() {
        let a = Series1::from_ints("z", &[0, 0, 1]);
        assert_eq!(a.revert("q").unwrap_err(), SeriesError::NotRevertible);
    }

    #[test]
    fn compose_identities() {
        let f = Series1::from_ints("z", &[3, 1, 4, 1, 5]);
        assert_eq!(z(5).compose(&f.try_sub(&Series1::constant("z", 5, int(3))).unwrap()).unwrap().coeff(2), int(4));
        let log1p = Series1::from_ints("z", &[1, 1, 0, 0, 0, 0]).log().unwrap();
        let expm1 = z(6).exp().unwrap().try_sub(&Series1::one("z", 6)).unwrap();
        assert_eq!(log1p.compose(&expm1).unwrap(), z(6));
    }

    #[test]
    fn compose_polynomial_accepts_constant_inner() {
        let inner = Series1::from_ints("z", &[1, 1, 0]);
        let sq = Series1::compose_polynomial(&[int(0), int(0), int(1)], &inner);
        assert_eq!(sq, Series1::from_ints("z", &[1, 2, 1]));
    }
}
