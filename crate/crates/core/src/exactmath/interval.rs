use std::fmt;

use super::{Dyadic, Rational};

/// Default working precision (mantissa bits) of interval endpoints.
pub const DEFAULT_PRECISION: u32 = 128;

/// A closed interval `[lo, hi]` with dyadic endpoints. Every operation
/// returns an interval containing the exact result; endpoints are rounded
/// outward to `precision` significant bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DyadicInterval {
    lo: Dyadic,
    hi: Dyadic,
    precision: u32,
}

impl DyadicInterval {
    /// Panics if `lo > hi` or `precision == 0`.
    pub fn new(lo: Dyadic, hi: Dyadic, precision: u32) -> Self {
        assert!(precision > 0, "interval precision must be positive");
        assert!(lo <= hi, "interval endpoints out of order: {lo} > {hi}");
        DyadicInterval {
            lo: lo.round_down(precision),
            hi: hi.round_up(precision),
            precision,
        }
    }

    pub fn point(x: Dyadic, precision: u32) -> Self {
        DyadicInterval::new(x.clone(), x, precision)
    }

    /// Tightest enclosure of `q` at the given precision.
    pub fn from_rational(q: &Rational, precision: u32) -> Self {
        match Dyadic::try_from_rational(q) {
            Some(d) if d.bits() <= precision as u64 => DyadicInterval::point(d, precision),
            _ => DyadicInterval {
                lo: Dyadic::floor_rational(q, precision).round_down(precision),
                hi: Dyadic::ceil_rational(q, precision).round_up(precision),
                precision,
            },
        }
    }

    /// Enclosure of `[lo, hi]` for rational endpoints.
    pub fn from_rational_bounds(lo: &Rational, hi: &Rational, precision: u32) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        let l = DyadicInterval::from_rational(lo, precision).lo;
        let h = DyadicInterval::from_rational(hi, precision).hi;
        DyadicInterval { lo: l, hi: h, precision }
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn width(&self) -> Dyadic {
        &self.hi - &self.lo
    }

    pub fn contains(&self, q: &Rational) -> bool {
        &self.lo.to_rational() <= q && q <= &self.hi.to_rational()
    }

    pub fn contains_interval(&self, other: &DyadicInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersects(&self, other: &DyadicInterval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn add(&self, other: &DyadicInterval) -> DyadicInterval {
        let precision = self.precision.max(other.precision);
        DyadicInterval {
            lo: (&self.lo + &other.lo).round_down(precision),
            hi: (&self.hi + &other.hi).round_up(precision),
            precision,
        }
    }

    pub fn mul(&self, other: &DyadicInterval) -> DyadicInterval {
        let precision = self.precision.max(other.precision);
        let products = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = products.iter().min().cloned().unwrap_or_else(Dyadic::zero);
        let hi = products.iter().max().cloned().unwrap_or_else(Dyadic::zero);
        DyadicInterval {
            lo: lo.round_down(precision),
            hi: hi.round_up(precision),
            precision,
        }
    }
}

pub fn interval_add(a: &DyadicInterval, b: &DyadicInterval) -> DyadicInterval {
    a.add(b)
}

pub fn interval_mul(a: &DyadicInterval, b: &DyadicInterval) -> DyadicInterval {
    a.mul(b)
}

impl fmt::Display for DyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{rat, rat_int};
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn iv(lo: i64, hi: i64) -> DyadicInterval {
        DyadicInterval::new(Dyadic::from_int(lo), Dyadic::from_int(hi), DEFAULT_PRECISION)
    }

    #[test]
    fn products_of_small_intervals() {
        let p = iv(1, 2).mul(&iv(3, 4));
        assert_eq!((p.lo().clone(), p.hi().clone()), (Dyadic::from_int(3), Dyadic::from_int(8)));
        let q = iv(-1, 1).mul(&iv(-1, 1));
        assert_eq!((q.lo().clone(), q.hi().clone()), (Dyadic::from_int(-1), Dyadic::from_int(1)));
        let s = iv(-1, 2).add(&iv(3, 4));
        assert_eq!((s.lo().clone(), s.hi().clone()), (Dyadic::from_int(2), Dyadic::from_int(6)));
    }

    #[test]
    fn enclosure_of_one_third() {
        let third = rat(1, 3);
        let e = DyadicInterval::from_rational(&third, 64);
        assert!(e.contains(&third));
        let bound = Dyadic::from_ratio_pow2(1, 62);
        assert!(e.width() <= bound);
    }

    #[test]
    fn exact_points_stay_exact() {
        let e = DyadicInterval::from_rational(&rat(3, 8), 16);
        assert!(e.width().is_zero());
        let big = DyadicInterval::from_rational(&rat_int(1_000_001), 8);
        assert!(big.contains(&rat_int(1_000_001)));
        assert!(!big.width().is_zero());
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-10_000i64..10_000, 1i64..10_000).prop_map(|(n, d)| rat(n, d))
    }

    proptest! {
        #[test]
        fn arithmetic_is_sound(x in small_rational(), y in small_rational(), prec in 8u32..80) {
            let ex = DyadicInterval::from_rational(&x, prec);
            let ey = DyadicInterval::from_rational(&y, prec);
            prop_assert!(ex.mul(&ey).contains(&(&x * &y)));
            prop_assert!(ex.add(&ey).contains(&(&x + &y)));
        }

        #[test]
        fn width_shrinks_with_precision(x in small_rational(), prec in 8u32..60) {
            let coarse = DyadicInterval::from_rational(&x, prec);
            let fine = DyadicInterval::from_rational(&x, prec + 8);
            prop_assert!(fine.width() <= coarse.width());
            let y = Rational::new(BigInt::from(7), BigInt::from(3));
            let c = coarse.mul(&DyadicInterval::from_rational(&y, prec));
            let f = fine.mul(&DyadicInterval::from_rational(&y, prec + 8));
            prop_assert!(f.width() <= c.width());
        }
    }
}
