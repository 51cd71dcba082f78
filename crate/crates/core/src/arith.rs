//! Exact rational helpers: valuations, logarithm rendering, interval square roots.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::is_prime;

/// Arbitrary-precision rational. The backing type keeps numerator and
/// denominator coprime with a positive denominator.
pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational numerator `{num}`")))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational denominator `{den}`")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in `{s}`")));
    }
    Ok(Rat::new(num, den))
}

/// `p/q` or `p` when the denominator is one.
pub fn fmt_rat(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Multiplicity of `p` in the nonzero integer `n`.
pub fn vp_int(n: &BigInt, p: &BigUint) -> u64 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from_biguint(Sign::Plus, p.clone());
    let mut m = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

pub(crate) fn vp_unchecked(x: &Rat, p: &BigUint) -> i64 {
    vp_int(x.numer(), p) as i64 - vp_int(x.denom(), p) as i64
}

/// p-adic valuation of a nonzero rational.
pub fn vp(x: &Rat, p: &BigUint) -> Result<i64> {
    if x.is_zero() {
        return Err(Error::ValuationOfZero);
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p.clone()));
    }
    Ok(vp_unchecked(x, p))
}

/// Natural logarithm of a positive big integer, accurate to f64 precision.
pub fn ln_bigint(n: &BigInt) -> f64 {
    debug_assert!(n.is_positive());
    let bits = n.bits();
    if bits <= 1000 {
        if let Some(f) = n.to_f64() {
            return f.ln();
        }
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().unwrap_or(f64::MAX);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural logarithm of a positive rational, for report rendering only.
pub fn ln_rat(x: &Rat) -> f64 {
    ln_bigint(x.numer()) - ln_bigint(x.denom())
}

pub fn to_f64(x: &Rat) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        let l = ln_rat(&x.abs()).exp();
        if x.is_negative() {
            -l
        } else {
            l
        }
    })
}

pub fn pow(x: &Rat, e: u32) -> Rat {
    num_traits::pow(x.clone(), e as usize)
}

/// `x^e` for a signed exponent; `x` must be nonzero when `e < 0`.
pub fn pow_signed(x: &Rat, e: i64) -> Rat {
    let p = num_traits::pow(x.clone(), e.unsigned_abs() as usize);
    if e < 0 {
        p.recip()
    } else {
        p
    }
}

/// Closed interval with exact rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    #[serde(with = "rat_string")]
    pub lo: Rat,
    #[serde(with = "rat_string")]
    pub hi: Rat,
}

impl Interval {
    pub fn point(x: Rat) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rat) -> bool {
        &self.lo <= x && x <= &self.hi
    }
}

/// Enclosure of `sqrt(x)` for `x >= 0` with width at most `1/scale`.
/// Exact (zero width) when `x` is the square of a rational.
pub fn sqrt_interval(x: &Rat, scale: &BigInt) -> Interval {
    assert!(!x.is_negative(), "sqrt of a negative rational");
    let (n, d) = (x.numer(), x.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    if &(&rn * &rn) == n && &(&rd * &rd) == d {
        return Interval::point(Rat::new(rn, rd));
    }
    // sqrt(n/d) = sqrt(n*d)/d; bracket sqrt(n*d*scale^2) between consecutive integers.
    let m = n * d * scale * scale;
    let lo = m.sqrt();
    let den = d * scale;
    Interval {
        lo: Rat::new(lo.clone(), den.clone()),
        hi: Rat::new(lo + 1, den),
    }
}

/// Serialize rationals as exact `p/q` strings.
pub mod rat_string {
    use super::{fmt_rat, parse_rat, Rat};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rat(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(serde::de::Error::custom)
    }
}

pub mod rat_vec_string {
    use super::{fmt_rat, parse_rat, Rat};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(xs: &[Rat], s: S) -> Result<S::Ok, S::Error> {
        xs.iter().map(fmt_rat).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rat>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| parse_rat(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

pub mod opt_rat_string {
    use super::{fmt_rat, parse_rat, Rat};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Option<Rat>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => s.serialize_some(&fmt_rat(v)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rat>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| parse_rat(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u32) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn vp_examples() {
        assert_eq!(vp(&int(12), &p(2)).unwrap(), 2);
        assert_eq!(vp(&rat(3, 8), &p(2)).unwrap(), -3);
        for q in [2u32, 3, 5, 7, 101] {
            assert_eq!(vp(&int(1), &p(q)).unwrap(), 0);
        }
    }

    #[test]
    fn vp_errors() {
        assert!(matches!(vp(&int(0), &p(2)), Err(Error::ValuationOfZero)));
        assert!(matches!(vp(&int(4), &p(4)), Err(Error::NotPrime(_))));
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rat("6/4").unwrap(), rat(3, 2));
        assert_eq!(parse_rat(" -7 ").unwrap(), int(-7));
        assert_eq!(fmt_rat(&rat(-10, 4)), "-5/2");
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn sqrt_enclosures() {
        let scale = BigInt::from(1_000_000_000u64);
        assert_eq!(sqrt_interval(&int(4), &scale), Interval::point(int(2)));
        assert_eq!(sqrt_interval(&rat(9, 16), &scale), Interval::point(rat(3, 4)));
        let iv = sqrt_interval(&int(10), &scale);
        assert!(&iv.lo * &iv.lo <= int(10) && int(10) <= &iv.hi * &iv.hi);
        assert!(iv.width() <= rat(1, 1_000_000_000));
    }

    #[test]
    fn logs_of_huge_numbers() {
        let big = BigInt::from(10).pow(400);
        assert!((ln_bigint(&big) - 400.0 * 10f64.ln()).abs() < 1e-9);
        assert!((ln_rat(&rat(3, 2)) - 1.5f64.ln()).abs() < 1e-15);
    }
}
