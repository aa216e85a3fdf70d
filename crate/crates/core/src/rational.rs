use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Mul, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

/// An exact rational kept in lowest terms.
///
/// Every value produced by this crate has a denominator dividing a power of
/// the field order `k`; [`ExactRational::k_power_form`] recovers `num / k^e`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactRational(BigRational);

impl ExactRational {
    pub fn zero() -> Self {
        ExactRational(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactRational(BigRational::one())
    }

    pub fn from_integer<T: Into<BigInt>>(n: T) -> Self {
        ExactRational(BigRational::from_integer(n.into()))
    }

    pub fn new<T: Into<BigInt>, U: Into<BigInt>>(num: T, den: U) -> Self {
        ExactRational(BigRational::new(num.into(), den.into()))
    }

    /// `k^{-e}`.
    pub fn inv_power(k: u32, e: u64) -> Self {
        let den = BigInt::from(k).pow(e as u32);
        ExactRational(BigRational::new(BigInt::one(), den))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn abs(&self) -> Self {
        ExactRational(self.0.abs())
    }

    /// `(num, e)` with `self = num / k^e` and `e` minimal, or `None` when the
    /// denominator does not divide any power of `k`.
    pub fn k_power_form(&self, k: u32) -> Option<(BigInt, u32)> {
        let den = self.0.denom().magnitude().clone();
        let k_big = BigUint::from(k);
        let mut pow = BigUint::one();
        let mut e = 0u32;
        while !(&pow % &den).is_zero() {
            pow *= &k_big;
            e += 1;
            if e > 4096 {
                return None;
            }
        }
        let scale = BigInt::from(pow / &den);
        Some((self.0.numer() * scale, e))
    }

    /// `"num/k^e"`, falling back to `"num/den"` when the denominator is not a
    /// power-of-`k` divisor.
    pub fn to_k_string(&self, k: u32) -> String {
        match self.k_power_form(k) {
            Some((num, e)) => format!("{num}/{k}^{e}"),
            None => format!("{}/{}", self.0.numer(), self.0.denom()),
        }
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_multiple_of(&self, d: u64) -> bool {
        self.0.is_integer() && self.0.numer().is_multiple_of(&BigInt::from(d))
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl Serialize for ExactRational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl Add for ExactRational {
    type Output = ExactRational;
    fn add(self, rhs: Self) -> Self {
        ExactRational(self.0 + rhs.0)
    }
}

impl<'a> Add<&'a ExactRational> for &'a ExactRational {
    type Output = ExactRational;
    fn add(self, rhs: &ExactRational) -> ExactRational {
        ExactRational(&self.0 + &rhs.0)
    }
}

impl Sub for ExactRational {
    type Output = ExactRational;
    fn sub(self, rhs: Self) -> Self {
        ExactRational(self.0 - rhs.0)
    }
}

impl<'a> Sub<&'a ExactRational> for &'a ExactRational {
    type Output = ExactRational;
    fn sub(self, rhs: &ExactRational) -> ExactRational {
        ExactRational(&self.0 - &rhs.0)
    }
}

impl Mul for ExactRational {
    type Output = ExactRational;
    fn mul(self, rhs: Self) -> Self {
        ExactRational(self.0 * rhs.0)
    }
}

impl<'a> Mul<&'a ExactRational> for &'a ExactRational {
    type Output = ExactRational;
    fn mul(self, rhs: &ExactRational) -> ExactRational {
        ExactRational(&self.0 * &rhs.0)
    }
}

impl Sum for ExactRational {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(ExactRational::zero(), |a, b| a + b)
    }
}

impl From<BigRational> for ExactRational {
    fn from(r: BigRational) -> Self {
        ExactRational(r)
    }
}
