//! Exact rational helpers shared by every module.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// The coefficient field of every computation in this crate.
pub type Rational = BigRational;

/// Builds `n/d` from machine integers.
///
/// # Panics
///
/// Panics when `d` is zero.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Builds the integer `n` as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Formats a rational as `num/den`, always with an explicit denominator.
pub fn to_fraction_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `num/den` or a bare integer.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// Smallest integer not below `r`.
pub fn ceil(r: &Rational) -> BigInt {
    r.ceil().to_integer()
}

/// Fractional part in `[0, 1)`.
pub fn frac(r: &Rational) -> Rational {
    r - r.floor()
}

/// Greatest common divisor of a list of integers (zero for the empty or all-zero list).
pub fn gcd_all<'a, I: IntoIterator<Item = &'a BigInt>>(values: I) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::zero(), |acc, v| acc.gcd(v))
}

/// Least common multiple of the denominators of a list of rationals.
pub fn common_denominator<'a, I: IntoIterator<Item = &'a Rational>>(values: I) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Scales a rational vector to the primitive integer vector on the same ray.
///
/// Returns `None` for the zero vector.
pub fn primitive_integer(v: &[Rational]) -> Option<Vec<BigInt>> {
    let den = common_denominator(v);
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &den).to_integer()).collect();
    let g = gcd_all(&ints);
    if g.is_zero() {
        return None;
    }
    Some(ints.into_iter().map(|x| x / &g).collect())
}

/// `r^e` for an integer exponent of either sign.
pub fn pow(r: &Rational, e: i64) -> Rational {
    if e >= 0 {
        num_traits::pow(r.clone(), e as usize)
    } else {
        num_traits::pow(r.recip(), (-e) as usize)
    }
}

/// True when `r` is an integer.
pub fn is_integer(r: &Rational) -> bool {
    r.is_integer()
}

/// Absolute value of an integer as a rational.
pub fn abs_int(n: &BigInt) -> Rational {
    Rational::from_integer(n.abs())
}

/// Serde adapter encoding a rational vector as `"num/den"` strings.
pub mod serde_vec {
    use super::{parse_rational, to_fraction_string, Rational};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let strings: Vec<String> = v.iter().map(to_fraction_string).collect();
        strings.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let strings = Vec::<String>::deserialize(d)?;
        strings
            .iter()
            .map(|x| parse_rational(x).ok_or_else(|| serde::de::Error::custom(format!("bad rational {x:?}"))))
            .collect()
    }
}

/// Serde adapter encoding one rational as a `"num/den"` string.
pub mod serde_rat {
    use super::{parse_rational, to_fraction_string, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&to_fraction_string(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let x = String::deserialize(d)?;
        parse_rational(&x).ok_or_else(|| serde::de::Error::custom(format!("bad rational {x:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fraction_round_trip() {
        for r in [rat(3, 4), rat(-7, 2), int(5), int(0)] {
            assert_eq!(parse_rational(&to_fraction_string(&r)), Some(r));
        }
        assert_eq!(parse_rational("12"), Some(int(12)));
        assert_eq!(parse_rational("1/0"), None);
    }

    #[test]
    fn primitive_scaling() {
        let v = [rat(1, 2), rat(-3, 4), int(0)];
        let p = primitive_integer(&v).unwrap();
        assert_eq!(p, vec![BigInt::from(2), BigInt::from(-3), BigInt::from(0)]);
        assert!(primitive_integer(&[int(0)]).is_none());
    }

    #[test]
    fn ceil_and_frac() {
        assert_eq!(ceil(&rat(1, 4)), BigInt::from(1));
        assert_eq!(ceil(&rat(-1, 4)), BigInt::from(0));
        assert_eq!(frac(&rat(-1, 4)), rat(3, 4));
    }
}
