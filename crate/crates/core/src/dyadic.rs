//! Exact dyadic rationals `p / 2^k` and arbitrary-precision rationals.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arbitrary-precision rational numbers (reduced, positive denominator).
pub type Rational = num_rational::BigRational;

/// A dyadic rational `numerator / 2^exponent`.
///
/// Invariants: `numerator` is odd or zero, and `exponent == 0` when
/// `numerator == 0`. Arithmetic is exact.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: BigInt,
    exp: u32,
}

impl Dyadic {
    pub fn new(mut num: BigInt, mut exp: u32) -> Self {
        if num.is_zero() {
            return Dyadic { num, exp: 0 };
        }
        while num.is_even() && exp > 0 {
            num /= 2;
            exp -= 1;
        }
        // A leftover even numerator with exp == 0 is just an even integer.
        Dyadic { num, exp }
    }

    pub fn zero() -> Self {
        Dyadic { num: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Dyadic { num: BigInt::one(), exp: 0 }
    }

    /// `1 / 2^k`.
    pub fn pow2(k: i32) -> Self {
        if k >= 0 {
            Dyadic::new(BigInt::one() << k as usize, 0)
        } else {
            Dyadic::new(BigInt::one(), (-k) as u32)
        }
    }

    pub fn from_int(n: i64) -> Self {
        Dyadic::new(BigInt::from(n), 0)
    }

    /// `p / 2^k` from machine integers.
    pub fn ratio(p: i64, k: u32) -> Self {
        Dyadic::new(BigInt::from(p), k)
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.exp == 0
    }

    pub fn is_negative(&self) -> bool {
        self.num.is_negative()
    }

    pub fn to_rational(&self) -> Rational {
        Rational::new(self.num.clone(), BigInt::one() << self.exp as usize)
    }

    /// Exact conversion from a rational; errors when the denominator is not
    /// a power of two.
    pub fn from_rational(r: &Rational) -> Result<Self> {
        let den = r.denom();
        if den.is_zero() || den.is_negative() {
            return Err(Error::NotDyadic(r.to_string()));
        }
        let mut d = den.clone();
        let mut exp = 0u32;
        while d.is_even() {
            d /= 2;
            exp += 1;
        }
        if !d.is_one() {
            return Err(Error::NotDyadic(r.to_string()));
        }
        Ok(Dyadic::new(r.numer().clone(), exp))
    }

    /// Halve the value (exponent shift).
    pub fn half(&self) -> Self {
        if self.num.is_zero() {
            self.clone()
        } else {
            Dyadic { num: self.num.clone(), exp: self.exp + 1 }
        }
    }

    /// Multiply by `2^k`.
    pub fn mul_pow2(&self, k: i32) -> Self {
        if self.num.is_zero() {
            return self.clone();
        }
        let e = self.exp as i64 - k as i64;
        if e >= 0 {
            Dyadic { num: self.num.clone(), exp: e as u32 }
        } else {
            Dyadic { num: self.num.clone() << (-e) as usize, exp: 0 }
        }
    }

    /// Largest integer `n` with `n <= self`.
    pub fn floor_int(&self) -> BigInt {
        if self.exp == 0 {
            self.num.clone()
        } else {
            self.num.div_floor(&(BigInt::one() << self.exp as usize))
        }
    }

    /// Binary expansion of the fractional part, `len` bits after the point.
    pub fn frac_bits(&self, len: usize) -> Vec<bool> {
        let mut t = self - &Dyadic::new(self.floor_int(), 0);
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            t = &t + &t;
            if t >= Dyadic::one() {
                out.push(true);
                t = &t - &Dyadic::one();
            } else {
                out.push(false);
            }
        }
        out
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.exp)
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        // Compare p/2^a with q/2^b by cross-multiplying with shifts.
        let e = self.exp.max(other.exp);
        let lhs = &self.num << (e - self.exp) as usize;
        let rhs = &other.num << (e - other.exp) as usize;
        lhs.cmp(&rhs)
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        &self + &rhs
    }
}

impl<'b> Add<&'b Dyadic> for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &'b Dyadic) -> Dyadic {
        let e = self.exp.max(rhs.exp);
        let a = &self.num << (e - self.exp) as usize;
        let b = &rhs.num << (e - rhs.exp) as usize;
        Dyadic::new(a + b, e)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        &self - &rhs
    }
}

impl<'b> Sub<&'b Dyadic> for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &'b Dyadic) -> Dyadic {
        let e = self.exp.max(rhs.exp);
        let a = &self.num << (e - self.exp) as usize;
        let b = &rhs.num << (e - rhs.exp) as usize;
        Dyadic::new(a - b, e)
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Dyadic) -> Dyadic {
        &self * &rhs
    }
}

impl<'b> Mul<&'b Dyadic> for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &'b Dyadic) -> Dyadic {
        // odd*odd stays odd, no normalization needed unless zero
        if self.num.is_zero() || rhs.num.is_zero() {
            return Dyadic::zero();
        }
        Dyadic { num: &self.num * &rhs.num, exp: self.exp + rhs.exp }
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { num: -self.num, exp: self.exp }
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { num: -self.num.clone(), exp: self.exp }
    }
}

/// Division is only defined when the quotient is again dyadic
/// (i.e. division by a signed power of two).
impl Div for Dyadic {
    type Output = Dyadic;
    fn div(self, rhs: Dyadic) -> Dyadic {
        let q = self.to_rational() / rhs.to_rational();
        Dyadic::from_rational(&q).expect("dyadic division with non-power-of-two quotient")
    }
}

/// Serialized form: numerator as a decimal string plus the exponent.
#[derive(Serialize, Deserialize)]
struct DyadicRepr {
    num: String,
    exp: u32,
}

impl Serialize for Dyadic {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DyadicRepr { num: self.num.to_string(), exp: self.exp }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = DyadicRepr::deserialize(d)?;
        let num: BigInt = repr
            .num
            .parse()
            .map_err(|e| serde::de::Error::custom(format!("bad numerator: {e}")))?;
        Ok(Dyadic::new(num, repr.exp))
    }
}

/// Odd/2-power decomposition of a rational in (0,1): `r = 2^t * m / n` with
/// `m`, `n` odd and coprime. Returns `(t, m, n)`.
pub fn two_power_decompose(r: &Rational) -> (i64, BigInt, BigInt) {
    assert!(r.numer().sign() != Sign::Minus && !r.numer().is_zero());
    let mut m = r.numer().clone();
    let mut n = r.denom().clone();
    let mut t: i64 = 0;
    while m.is_even() {
        m /= 2;
        t += 1;
    }
    while n.is_even() {
        n /= 2;
        t -= 1;
    }
    (t, m, n)
}

/// Parse a rational from `p/q` or integer literal text.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num.parse().map_err(|_| Error::Parse(format!("bad rational `{s}`")))?;
    let d: BigInt = den.parse().map_err(|_| Error::Parse(format!("bad rational `{s}`")))?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in `{s}`")));
    }
    Ok(Rational::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_to_odd_numerator() {
        let d = Dyadic::new(BigInt::from(4), 3); // 4/8 = 1/2
        assert_eq!(d, Dyadic::ratio(1, 1));
        assert_eq!(d.exponent(), 1);
        let z = Dyadic::new(BigInt::zero(), 7);
        assert_eq!(z.exponent(), 0);
    }

    #[test]
    fn field_ops_exact() {
        let a = Dyadic::ratio(3, 2); // 3/4
        let b = Dyadic::ratio(1, 1); // 1/2
        assert_eq!(&a + &b, Dyadic::ratio(5, 2));
        assert_eq!(&a - &b, Dyadic::ratio(1, 2));
        assert_eq!(&a * &b, Dyadic::ratio(3, 3));
        assert!(b < a);
    }

    #[test]
    fn rational_round_trip() {
        let d = Dyadic::ratio(-13, 5);
        let r = d.to_rational();
        assert_eq!(Dyadic::from_rational(&r).unwrap(), d);
        let third = Rational::new(BigInt::one(), BigInt::from(3));
        assert!(Dyadic::from_rational(&third).is_err());
    }

    #[test]
    fn frac_bits_of_three_quarters() {
        let d = Dyadic::ratio(3, 2);
        assert_eq!(d.frac_bits(4), vec![true, true, false, false]);
    }

    #[test]
    fn decompose_17ths() {
        let r = Rational::new(BigInt::from(4), BigInt::from(17));
        let (t, m, n) = two_power_decompose(&r);
        assert_eq!(t, 2);
        assert_eq!(m, BigInt::one());
        assert_eq!(n, BigInt::from(17));
    }
}
