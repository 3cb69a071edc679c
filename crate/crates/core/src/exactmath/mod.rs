//! Exact arithmetic foundation.
//!
//! Rationals are `num_rational::BigRational`; everything else here is built on
//! top of arbitrary-precision integers. All values are immutable and `Send +
//! Sync`.

mod dyadic;
mod interval;
mod poly;
mod ratfn;
mod sturm;

pub use dyadic::{Dyadic, ParseDyadicError};
pub use interval::{interval_add, interval_mul, DyadicInterval, DEFAULT_PRECISION};
pub use poly::Poly;
pub use ratfn::{ratfn_eval, RatFn};
pub use sturm::{
    count_real_roots, count_roots_halfline, int_positive_root_count, is_negative_on_halfline,
    HalfLine, SturmInt,
};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational number with `gcd(num, den) = 1` and `den >= 1`.
pub type Rational = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Decimal rendering of a rational, truncated toward zero after `places` digits.
pub fn rational_to_decimal(q: &Rational, places: usize) -> String {
    let neg = q.is_negative();
    let scale = num_traits::pow(BigInt::from(10), places);
    let scaled = (q.abs() * Rational::from_integer(scale)).to_integer();
    let digits = scaled.to_string();
    let (int_part, frac_part) = if places == 0 {
        (digits, String::new())
    } else if digits.len() > places {
        let split = digits.len() - places;
        (digits[..split].to_string(), digits[split..].to_string())
    } else {
        ("0".to_string(), format!("{digits:0>places$}"))
    };
    let sign = if neg && !(scaled.is_zero()) { "-" } else { "" };
    if places == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

/// Decimal rendering rounded to the nearest value at `places` digits.
pub fn rational_round_decimal(q: &Rational, places: usize) -> String {
    let half = Rational::new(BigInt::one(), BigInt::from(2) * num_traits::pow(BigInt::from(10), places));
    let shifted = if q.is_negative() { q - &half } else { q + &half };
    rational_to_decimal(&shifted, places)
}

/// Decimal rendering rounded toward `-inf` (`up = false`) or `+inf`.
pub fn rational_directed_decimal(q: &Rational, places: usize, up: bool) -> String {
    let scale = Rational::from_integer(num_traits::pow(BigInt::from(10), places));
    let scaled = q * scale;
    let n = if up { scaled.ceil() } else { scaled.floor() };
    let r = Rational::new(n.to_integer(), num_traits::pow(BigInt::from(10), places));
    // exact at this many places, so truncation is the identity
    rational_to_decimal(&r, places)
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// `p`-adic valuation of a nonzero integer; `None` for zero.
pub fn valuation(n: &BigInt, p: u64) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut v = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = num_integer::Integer::div_rem(&m, &p);
        if !r.is_zero() {
            return Some(v);
        }
        m = q;
        v += 1;
    }
}
