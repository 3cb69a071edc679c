use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use super::Rational;

/// A dyadic rational `mantissa * 2^exponent`.
///
/// Canonical form: the mantissa is odd, or it is zero with exponent zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("malformed dyadic `{0}` (expected `m/2^k`)")]
pub struct ParseDyadicError(pub String);

impl Dyadic {
    pub fn new(mantissa: BigInt, exponent: i64) -> Self {
        if mantissa.is_zero() {
            return Dyadic::zero();
        }
        let tz = mantissa.trailing_zeros().unwrap_or(0);
        Dyadic {
            mantissa: mantissa >> tz,
            exponent: exponent + tz as i64,
        }
    }

    pub fn zero() -> Self {
        Dyadic { mantissa: BigInt::zero(), exponent: 0 }
    }

    pub fn one() -> Self {
        Dyadic::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Dyadic::new(BigInt::from(n), 0)
    }

    /// `n / 2^k`.
    pub fn from_ratio_pow2(n: impl Into<BigInt>, k: i64) -> Self {
        Dyadic::new(n.into(), -k)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn signum(&self) -> i32 {
        if self.mantissa.is_zero() {
            0
        } else if self.mantissa.is_negative() {
            -1
        } else {
            1
        }
    }

    /// Multiply by `2^k`.
    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic { mantissa: self.mantissa.clone(), exponent: self.exponent + k }
    }

    pub fn midpoint(a: &Dyadic, b: &Dyadic) -> Dyadic {
        (a + b).mul_pow2(-1)
    }

    pub fn abs(&self) -> Self {
        Dyadic { mantissa: self.mantissa.abs(), exponent: self.exponent }
    }

    pub fn to_rational(&self) -> Rational {
        if self.exponent >= 0 {
            Rational::from_integer(&self.mantissa << self.exponent as usize)
        } else {
            Rational::new(self.mantissa.clone(), BigInt::one() << (-self.exponent) as usize)
        }
    }

    pub fn to_f64(&self) -> f64 {
        let bits = self.mantissa.bits() as i64;
        if bits <= 60 {
            let m = self.mantissa.to_f64().unwrap_or(f64::NAN);
            m * 2f64.powi(self.exponent.clamp(-2000, 2000) as i32)
        } else {
            let shift = bits - 60;
            let m = (&self.mantissa >> shift as usize).to_f64().unwrap_or(f64::NAN);
            m * 2f64.powi((self.exponent + shift).clamp(-2000, 2000) as i32)
        }
    }

    /// Integer `n` with `self = n / 2^k`, if `self * 2^k` is an integer.
    pub fn numerator_at_scale(&self, k: i64) -> Option<BigInt> {
        let e = self.exponent + k;
        if self.is_zero() {
            Some(BigInt::zero())
        } else if e >= 0 {
            Some(&self.mantissa << e as usize)
        } else {
            None
        }
    }

    /// Significant bits of the mantissa.
    pub fn bits(&self) -> u64 {
        self.mantissa.bits()
    }

    /// Largest dyadic `<= self` whose mantissa fits in `precision` bits.
    pub fn round_down(&self, precision: u32) -> Dyadic {
        self.round(precision, false)
    }

    /// Smallest dyadic `>= self` whose mantissa fits in `precision` bits.
    pub fn round_up(&self, precision: u32) -> Dyadic {
        self.round(precision, true)
    }

    fn round(&self, precision: u32, up: bool) -> Dyadic {
        let bits = self.mantissa.bits();
        if bits <= precision as u64 {
            return self.clone();
        }
        let shift = bits - precision as u64;
        let divisor = BigInt::one() << shift as usize;
        let m = if up {
            num_integer::Integer::div_ceil(&self.mantissa, &divisor)
        } else {
            self.mantissa.div_floor(&divisor)
        };
        Dyadic::new(m, self.exponent + shift as i64)
    }

    /// Floor of `q` at a scale giving about `precision` significant bits.
    pub fn floor_rational(q: &Rational, precision: u32) -> Dyadic {
        let k = Self::scale_for(q, precision);
        Dyadic::new(scaled_floor(q, k, false), -k)
    }

    pub fn ceil_rational(q: &Rational, precision: u32) -> Dyadic {
        let k = Self::scale_for(q, precision);
        Dyadic::new(scaled_floor(q, k, true), -k)
    }

    /// Exact conversion when the denominator of `q` is a power of two.
    pub fn try_from_rational(q: &Rational) -> Option<Dyadic> {
        let d = q.denom();
        let tz = d.trailing_zeros().unwrap_or(0);
        if (d >> tz as usize).is_one() {
            Some(Dyadic::new(q.numer().clone(), -(tz as i64)))
        } else {
            None
        }
    }

    fn scale_for(q: &Rational, precision: u32) -> i64 {
        if q.is_zero() {
            return precision as i64;
        }
        let nb = q.numer().bits() as i64;
        let db = q.denom().bits() as i64;
        precision as i64 - (nb - db) + 1
    }
}

/// `floor(q * 2^k)` (or ceiling).
fn scaled_floor(q: &Rational, k: i64, ceil: bool) -> BigInt {
    let (n, d) = if k >= 0 {
        (q.numer() << k as usize, q.denom().clone())
    } else {
        (q.numer().clone(), q.denom() << (-k) as usize)
    };
    if ceil {
        num_integer::Integer::div_ceil(&n, &d)
    } else {
        n.div_floor(&d)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = align(self, other);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Mantissas of `x` and `y` brought to their common (smaller) exponent.
fn align(x: &Dyadic, y: &Dyadic) -> (BigInt, BigInt) {
    if x.is_zero() || y.is_zero() {
        // The shift would be meaningless; only signs matter.
        return (x.mantissa.clone(), y.mantissa.clone());
    }
    let e = x.exponent.min(y.exponent);
    let a = &x.mantissa << (x.exponent - e) as usize;
    let b = &y.mantissa << (y.exponent - e) as usize;
    (a, b)
}

impl Add<&Dyadic> for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let (a, b) = align(self, rhs);
        Dyadic::new(a + b, self.exponent.min(rhs.exponent))
    }
}

impl Sub<&Dyadic> for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        self + &(-rhs)
    }
}

impl Mul<&Dyadic> for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mantissa * &rhs.mantissa, self.exponent + rhs.exponent)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { mantissa: -&self.mantissa, exponent: self.exponent }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr<Dyadic> for Dyadic {
            type Output = Dyadic;
            fn $method(self, rhs: Dyadic) -> Dyadic {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        -&self
    }
}

/// Renders as `m/2^k` with `value = m / 2^k`; `k` may be negative.
impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.mantissa, -self.exponent)
    }
}

impl FromStr for Dyadic {
    type Err = ParseDyadicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseDyadicError(s.to_string());
        let s = s.trim();
        match s.split_once("/2^") {
            Some((m, k)) => {
                let m: BigInt = m.parse().map_err(|_| err())?;
                let k: i64 = k.parse().map_err(|_| err())?;
                Ok(Dyadic::new(m, -k))
            }
            None => {
                let m: BigInt = s.parse().map_err(|_| err())?;
                Ok(Dyadic::new(m, 0))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rat;

    #[test]
    fn canonical_form() {
        let d = Dyadic::new(BigInt::from(12), -4);
        assert_eq!(d.mantissa(), &BigInt::from(3));
        assert_eq!(d.exponent(), -2);
        assert_eq!(Dyadic::new(BigInt::from(0), 7), Dyadic::zero());
        assert_eq!(d.to_rational(), rat(3, 4));
    }

    #[test]
    fn arithmetic_and_order() {
        let a = Dyadic::from_ratio_pow2(3, 2); // 3/4
        let b = Dyadic::from_ratio_pow2(-5, 3); // -5/8
        assert_eq!((&a + &b).to_rational(), rat(1, 8));
        assert_eq!((&a - &b).to_rational(), rat(11, 8));
        assert_eq!((&a * &b).to_rational(), rat(-15, 32));
        assert!(b < a);
        assert!(Dyadic::zero() < a);
        assert!(b < Dyadic::zero());
        assert_eq!(Dyadic::midpoint(&a, &b).to_rational(), rat(1, 16));
    }

    #[test]
    fn text_form() {
        let a = Dyadic::from_ratio_pow2(-7, 5);
        assert_eq!(a.to_string(), "-7/2^5");
        assert_eq!("-7/2^5".parse::<Dyadic>().unwrap(), a);
        assert_eq!(Dyadic::from_int(6).to_string(), "3/2^-1");
        assert_eq!("3/2^-1".parse::<Dyadic>().unwrap(), Dyadic::from_int(6));
        assert_eq!("0/2^0".parse::<Dyadic>().unwrap(), Dyadic::zero());
        assert!("1/3".parse::<Dyadic>().is_err());
    }

    #[test]
    fn directed_rounding() {
        let third = rat(1, 3);
        let lo = Dyadic::floor_rational(&third, 64);
        let hi = Dyadic::ceil_rational(&third, 64);
        assert!(lo.to_rational() <= third && third <= hi.to_rational());
        let x = Dyadic::from_ratio_pow2(-0b1011_0111, 0);
        assert_eq!(x.round_down(4).to_rational(), rat(-192, 1));
        assert_eq!(x.round_up(4).to_rational(), rat(-176, 1));
    }
}
