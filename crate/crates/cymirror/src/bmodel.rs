//! B-model pipeline: Frobenius data, mirror map, Yukawa coupling and
//! instanton numbers.
//!
//! The log-derivative of the deformed holomorphic solution splits into a
//! rational series `u` and a constant built from `ψ(1)` and `ψ(1/2)`. The
//! Euler–Mascheroni part must cancel and the `log 2` part exponentiates to
//! the exact scale `λ` of the mirror map `q = λ z exp(u/y₀)`.

use crate::gkz::{holo_coefficient, GkzError, GkzSystem, PfOperator};
use crate::rational::{int, Rational};
use crate::series::{Series1, SeriesError};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Failures of the B-model pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BModelError {
    #[error("Euler-Mascheroni coefficient {0} does not cancel")]
    EulerGamma(String),
    #[error("digamma at a pole or unsupported argument {0}")]
    Digamma(String),
    #[error("expected a rank-one system")]
    KernelRank,
    #[error("operator is not θ^k - c z ∏(θ + a_i) with a_i + a_(k+1-i) = 1")]
    NotSelfDual,
    #[error("constant term {found} differs from the classical value {expected}")]
    Classical { expected: String, found: String },
    #[error(transparent)]
    Gkz(#[from] GkzError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// `ψ(s) = rational + euler·γ_E + log2·log 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digamma {
    pub rational: Rational,
    pub euler: Rational,
    pub log2: Rational,
}

/// `ψ(s)` for positive `s` with fractional part `0` or `1/2`.
pub fn digamma(s: &Rational) -> Result<Digamma, BModelError> {
    if !s.is_positive() {
        return Err(BModelError::Digamma(s.to_string()));
    }
    let base = if s.is_integer() {
        Digamma { rational: Rational::zero(), euler: int(-1), log2: Rational::zero() }
    } else if (s * int(2)).is_integer() {
        Digamma { rational: Rational::zero(), euler: int(-1), log2: int(-2) }
    } else {
        return Err(BModelError::Digamma(s.to_string()));
    };
    let start = if s.is_integer() { int(1) } else { Rational::new(BigInt::one(), BigInt::from(2)) };
    Ok(Digamma { rational: base.rational + digamma_shift(&start, s), ..base })
}

/// `ψ(b) − ψ(a) = Σ_{k=0}^{b−a−1} 1/(a+k)` for `b − a` a non-negative integer.
fn digamma_shift(a: &Rational, b: &Rational) -> Rational {
    let mut x = a.clone();
    let mut acc = Rational::zero();
    while &x < b {
        acc += x.recip();
        x += int(1);
    }
    acc
}

fn is_pole(x: &Rational) -> bool {
    x.is_integer() && !x.is_positive()
}

/// `ψ(s + m) − ψ(s)` for integer `m` of either sign.
fn digamma_difference(s: &Rational, m: i64) -> Result<Rational, BModelError> {
    if m >= 0 {
        if (0..m).any(|k| is_pole(&(s + int(k)))) {
            return Err(BModelError::Digamma(s.to_string()));
        }
        Ok(digamma_shift(s, &(s + int(m))))
    } else {
        let mut acc = Rational::zero();
        for k in 1..=-m {
            let x = s - int(k);
            if is_pole(&x) {
                return Err(BModelError::Digamma(x.to_string()));
            }
            acc -= x.recip();
        }
        Ok(acc)
    }
}

/// Holomorphic period and its first Frobenius partner.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobeniusPair {
    pub y0: Series1,
    /// `Σ_{n≥1} a(n)Δ(n)zⁿ` with `Δ(n) = d/dρ log a(n+ρ)|₀ − d/dρ log a(ρ)|₀`.
    pub u: Series1,
    /// `exp(d/dρ log a(ρ)|₀)`.
    pub lambda: Rational,
}

/// Frobenius data of `a(n) = c(nℓ)` with `c(ℓ) = ∏Γ(γ_j+1)/Γ(γ_j+ℓ_j+1)`.
pub fn frobenius(gamma: &[Rational], ell: &[i64], order: usize) -> Result<FrobeniusPair, BModelError> {
    let shifts: Vec<Rational> = gamma.iter().map(|g| g + int(1)).collect();
    // d/dρ log c(ρℓ)|₀ = −Σ ℓ_j ψ(s_j).
    let mut euler = Rational::zero();
    let mut log2 = Rational::zero();
    for (s, &l) in shifts.iter().zip(ell) {
        if l != 0 {
            let d = digamma(s)?;
            euler -= d.euler * int(l);
            log2 -= d.log2 * int(l);
        }
    }
    if !euler.is_zero() {
        return Err(BModelError::EulerGamma(euler.to_string()));
    }
    let lambda = pow2(&log2)?;
    let mut y0 = Vec::with_capacity(order);
    let mut u = Vec::with_capacity(order);
    for n in 0..order as i64 {
        let v: Vec<i64> = ell.iter().map(|x| x * n).collect();
        let a = holo_coefficient(gamma, &v)?;
        let mut delta = Rational::zero();
        if n > 0 {
            for (s, &l) in shifts.iter().zip(ell) {
                delta -= int(l) * digamma_difference(s, n * l)?;
            }
        }
        u.push(&a * delta);
        y0.push(a);
    }
    Ok(FrobeniusPair { y0: Series1::from_coeffs("z", y0), u: Series1::from_coeffs("z", u), lambda })
}

fn pow2(e: &Rational) -> Result<Rational, BModelError> {
    if !e.is_integer() {
        return Err(BModelError::Digamma(format!("2^{e}")));
    }
    let k = e.to_integer().to_i64().ok_or_else(|| BModelError::Digamma(e.to_string()))?;
    Ok(crate::rational::pow(&int(2), k))
}

/// Frobenius data of a rank-one GKZ system.
pub fn frobenius_system(sys: &GkzSystem, order: usize) -> Result<FrobeniusPair, BModelError> {
    if sys.kernel_rank() != 1 {
        return Err(BModelError::KernelRank);
    }
    frobenius(&sys.gamma, &sys.kernel_vector(0)?, order)
}

/// Checks `L(y₀ log z + log λ·y₀ + u) = 0`, i.e. `Σ z^k P_k′(θ) y₀ + L u = 0`,
/// through degree `T − 1`.
pub fn frobenius_check(op: &PfOperator, fp: &FrobeniusPair, t: usize) -> bool {
    let derived = PfOperator {
        polys: op
            .polys
            .iter()
            .map(|p| p.iter().enumerate().skip(1).map(|(i, c)| c * int(i as i64)).collect())
            .collect(),
    };
    let a = derived.apply(&fp.y0);
    let b = op.apply(&fp.u);
    match a.try_add(&b) {
        Ok(s) => (0..t.min(s.order())).all(|m| s.coeff(m).is_zero()),
        Err(_) => false,
    }
}

/// Mirror map `q(z)` and its inverse `z(q)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MirrorMap {
    pub forward: Series1,
    pub inverse: Series1,
}

/// `q = λ z exp(u/y₀)` and its reversion, both to order `T`.
pub fn mirror_map(fp: &FrobeniusPair, order: usize) -> Result<MirrorMap, BModelError> {
    let y0 = fp.y0.truncate(order);
    let u = fp.u.truncate(order);
    let e = u.try_div(&y0)?.exp()?;
    let z = Series1::variable("z", order);
    let forward = z.try_mul(&e)?.scale(&fp.lambda);
    let inverse = forward.revert("q")?;
    Ok(MirrorMap { forward, inverse })
}

/// Normalized Yukawa coupling `C/((1 − cz) y₀²)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct YukawaB {
    #[serde(with = "crate::rational::serde_rat")]
    pub classical: Rational,
    #[serde(with = "crate::rational::serde_rat")]
    pub slope: Rational,
}

impl YukawaB {
    /// The coupling as a series in `z`.
    pub fn series(&self, y0: &Series1) -> Result<Series1, BModelError> {
        let t = y0.order();
        let mut disc = Series1::one("z", t);
        if t > 1 {
            disc = disc.try_sub(&Series1::variable("z", t).scale(&self.slope))?;
        }
        let den = disc.try_mul(&y0.try_mul(y0)?)?;
        Ok(den.inverse()?.scale(&self.classical))
    }
}

/// Reads `c` from `θ^k − c z ∏(θ + a_i)`, checking the self-duality
/// `P₁(−1−θ) = (−1)^k P₁(θ)`, i.e. `a_i + a_{k+1−i} = 1`.
pub fn yukawa_b(op: &PfOperator, classical: Rational) -> Result<YukawaB, BModelError> {
    if op.polys.len() != 2 {
        return Err(BModelError::NotSelfDual);
    }
    let k = op.order();
    let p0 = &op.polys[0];
    if !(p0.iter().take(k).all(Zero::is_zero) && p0[k].is_one()) || op.polys[1].len() != k + 1 {
        return Err(BModelError::NotSelfDual);
    }
    let p1 = &op.polys[1];
    let lead = p1[k].clone();
    if lead.is_zero() {
        return Err(BModelError::NotSelfDual);
    }
    // Coefficients of P₁(−1−θ).
    let mut reflected = vec![Rational::zero(); k + 1];
    let mut power = vec![Rational::one()];
    for c in p1 {
        for (i, x) in power.iter().enumerate() {
            reflected[i] += c * x;
        }
        let mut next = vec![Rational::zero(); power.len() + 1];
        for (i, x) in power.iter().enumerate() {
            next[i] -= x;
            next[i + 1] -= x;
        }
        power = next;
    }
    let sign = if k % 2 == 0 { int(1) } else { int(-1) };
    if reflected.iter().zip(p1).any(|(r, c)| *r != c * &sign) {
        return Err(BModelError::NotSelfDual);
    }
    Ok(YukawaB { classical, slope: -lead })
}

/// `K(q) = Y(z(q)) · (θ_q log z(q))³`.
///
/// The result has order `min(fp order, mirror map order − 1)`, since
/// `θ_q log z` loses one order.
pub fn a_correlation(y: &YukawaB, fp: &FrobeniusPair, mm: &MirrorMap) -> Result<Series1, BModelError> {
    let t = fp.y0.order().min(mm.inverse.order().saturating_sub(1));
    let zq = &mm.inverse;
    let ratio = zq.theta().shift_down()?.try_div(&zq.shift_down()?)?.truncate(t);
    let yz = y.series(&fp.y0.truncate(t))?;
    let composed = yz.compose(&zq.truncate(t))?;
    let cube = ratio.try_mul(&ratio)?.try_mul(&ratio)?;
    Ok(composed.try_mul(&cube)?)
}

/// Instanton numbers `n_d` with `K = C + Σ n_d d³ q^d/(1 − q^d)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstantonTable {
    pub classical: Rational,
    pub n: BTreeMap<usize, Rational>,
}

impl InstantonTable {
    /// Whether every `n_d` is an integer.
    pub fn all_integral(&self) -> bool {
        self.n.values().all(|x| x.is_integer())
    }

    /// Re-expands `C + Σ n_d d³ q^d/(1 − q^d)` to the given order.
    pub fn correlation(&self, order: usize) -> Series1 {
        Series1::from_fn("q", order, |m| {
            if m == 0 {
                return self.classical.clone();
            }
            (1..=m)
                .filter(|e| m % e == 0)
                .filter_map(|e| self.n.get(&e).map(|n| n * int((e * e * e) as i64)))
                .sum()
        })
    }
}

/// Solves for `n_d` degree by degree.
pub fn extract_instantons(k: &Series1, classical: &Rational) -> Result<InstantonTable, BModelError> {
    let c0 = k.coeff(0);
    if k.order() == 0 || &c0 != classical {
        return Err(BModelError::Classical { expected: classical.to_string(), found: c0.to_string() });
    }
    let mut n: BTreeMap<usize, Rational> = BTreeMap::new();
    for d in 1..k.order() {
        let lower: Rational = (1..d).filter(|e| d % e == 0).map(|e| &n[&e] * int((e * e * e) as i64)).sum();
        n.insert(d, (k.coeff(d) - lower) / int((d * d * d) as i64));
    }
    Ok(InstantonTable { classical: classical.clone(), n })
}

/// Full pipeline output for a rank-one system.
#[derive(Clone, Debug)]
pub struct Pipeline {
    pub frobenius: FrobeniusPair,
    pub mirror: MirrorMap,
    pub yukawa: YukawaB,
    pub correlation: Series1,
    pub instantons: InstantonTable,
}

/// Runs the pipeline so that the correlation and instantons reach degree `T − 1`.
pub fn run(sys: &GkzSystem, op: &PfOperator, classical: Rational, order: usize) -> Result<Pipeline, BModelError> {
    let fp = frobenius_system(sys, order + 1)?;
    let mm = mirror_map(&fp, order + 1)?;
    let y = yukawa_b(op, classical)?;
    let fp_t = FrobeniusPair { y0: fp.y0.truncate(order), u: fp.u.truncate(order), lambda: fp.lambda.clone() };
    let k = a_correlation(&y, &fp_t, &mm)?;
    let inst = extract_instantons(&k, &y.classical)?;
    Ok(Pipeline { frobenius: fp_t, mirror: mm, yukawa: y, correlation: k, instantons: inst })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn digamma_values() {
        let d = digamma(&rat(5, 2)).unwrap();
        assert_eq!(d.rational, int(2) + rat(2, 3));
        assert_eq!(d.log2, int(-2));
        assert!(digamma(&int(0)).is_err());
        assert!(digamma(&rat(1, 3)).is_err());
    }

    #[test]
    fn trivial_rule() {
        let fp = frobenius(&[], &[], 5).unwrap();
        assert_eq!(fp.lambda, int(1));
        assert!(fp.u.is_zero());
        let mm = mirror_map(&fp, 5).unwrap();
        assert_eq!(mm.forward, Series1::variable("z", 5));
    }
}
