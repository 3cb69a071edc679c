use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{Poly, Rational};
use crate::error::{domain, Result};

/// A rational function `num(t) / den(t)` over `Q`, kept in lowest terms with
/// a monic denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFn {
    num: Poly,
    den: Poly,
}

impl RatFn {
    /// Panics if `den` is zero.
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        if num.is_zero() {
            return RatFn { num, den: Poly::one() };
        }
        let g = Poly::gcd(&num, &den);
        let num = num.div_rem(&g).0;
        let den = den.div_rem(&g).0;
        let lead = Rational::one() / den.leading();
        RatFn { num: num.scale(&lead), den: den.scale(&lead) }
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFn { num: p, den: Poly::one() }
    }

    pub fn constant(c: Rational) -> Self {
        RatFn::from_poly(Poly::constant(c))
    }

    pub fn from_int(n: i64) -> Self {
        RatFn::constant(Rational::from_integer(BigInt::from(n)))
    }

    /// The indeterminate `t`.
    pub fn t() -> Self {
        RatFn::from_poly(Poly::x())
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &RatFn) -> RatFn {
        if self.den == o.den {
            return RatFn::new(&self.num + &o.num, self.den.clone());
        }
        RatFn::new(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den)
    }

    pub fn sub(&self, o: &RatFn) -> RatFn {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> RatFn {
        RatFn { num: -&self.num, den: self.den.clone() }
    }

    pub fn mul(&self, o: &RatFn) -> RatFn {
        RatFn::new(&self.num * &o.num, &self.den * &o.den)
    }

    pub fn inv(&self) -> Option<RatFn> {
        if self.num.is_zero() {
            None
        } else {
            Some(RatFn::new(self.den.clone(), self.num.clone()))
        }
    }

    /// Exact value at `t0`; a pole is a domain error.
    pub fn eval(&self, t0: &Rational) -> Result<Rational> {
        let d = self.den.eval(t0);
        if d.is_zero() {
            return domain(format!("rational function has a pole at t = {t0}"));
        }
        Ok(self.num.eval(t0) / d)
    }

    /// Integer numerator and denominator coefficient vectors (lowest degree
    /// first) with overall content removed and positive leading denominator
    /// coefficient.
    pub fn integer_form(&self) -> (Vec<BigInt>, Vec<BigInt>) {
        let l = num_integer::Integer::lcm(&self.num.denominator_lcm(), &self.den.denominator_lcm());
        let lr = Rational::from_integer(l);
        let n: Vec<BigInt> = self.num.coeffs().iter().map(|c| (c * &lr).to_integer()).collect();
        let d: Vec<BigInt> = self.den.coeffs().iter().map(|c| (c * &lr).to_integer()).collect();
        let g = n
            .iter()
            .chain(d.iter())
            .fold(BigInt::zero(), |acc, c| num_integer::Integer::gcd(&acc, c));
        let sign = if d.last().is_some_and(|c| c.is_negative()) { -BigInt::one() } else { BigInt::one() };
        let g = g * sign;
        (n.into_iter().map(|c| c / &g).collect(), d.into_iter().map(|c| c / &g).collect())
    }
}

pub fn ratfn_eval(r: &RatFn, t0: &Rational) -> Result<Rational> {
    r.eval(t0)
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n, d) = self.integer_form();
        write!(f, "({}) / ({})", Poly::from_bigints(&n), Poly::from_bigints(&d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{rat, rat_int};
    use proptest::prelude::*;

    fn r_formula() -> RatFn {
        let n = Poly::from_ints(&[3, 3, 2, 3, 1, 2, 4, 4]);
        let d = &(&Poly::from_ints(&[1, 1]) * &Poly::from_ints(&[1, 1, 1])) * &Poly::from_ints(&[1, 0, 0, 1, 0, 0, 1]);
        RatFn::from_int(1).sub(&RatFn::new(n, d.scale(&rat_int(8))))
    }

    #[test]
    fn evaluates_the_density_function() {
        assert_eq!(r_formula().eval(&rat_int(2)).unwrap(), rat(1625, 1752));
        assert_eq!(r_formula().eval(&rat_int(3)).unwrap(), rat(151285, 157456));
        let id = RatFn::t().mul(&RatFn::t().inv().unwrap());
        assert_eq!(id.eval(&rat_int(5)).unwrap(), rat_int(1));
    }

    #[test]
    fn pole_is_a_domain_error() {
        let r = RatFn::new(Poly::one(), Poly::from_ints(&[-2, 1]));
        assert!(r.eval(&rat_int(2)).is_err());
    }

    #[test]
    fn canonical_denominator() {
        let r = RatFn::new(Poly::from_ints(&[2, 2]), Poly::from_ints(&[-4, 0, 4]));
        // (2t+2)/(4t^2-4) = 1/(2t-2) -> (1/2)/(t-1)
        assert_eq!(r.denom(), &Poly::from_ints(&[-1, 1]));
        assert_eq!(r.numer(), &Poly::constant(rat(1, 2)));
        let (n, d) = r.integer_form();
        assert_eq!(n, vec![BigInt::from(1)]);
        assert_eq!(d, vec![BigInt::from(-2), BigInt::from(2)]);
    }

    proptest! {
        #[test]
        fn eval_invariant_under_common_factor(
            n in prop::collection::vec(-9i64..=9, 1..5),
            d in prop::collection::vec(-9i64..=9, 1..5),
            k in prop::collection::vec(-9i64..=9, 1..4),
            t0 in -20i64..20,
        ) {
            let np = Poly::from_ints(&n);
            let dp = Poly::from_ints(&d);
            let kp = Poly::from_ints(&k);
            prop_assume!(!dp.is_zero() && !kp.is_zero());
            let t = rat_int(t0);
            prop_assume!(!dp.eval(&t).is_zero() && !kp.eval(&t).is_zero());
            let plain = RatFn::new(np.clone(), dp.clone());
            let padded = RatFn::new(&np * &kp, &dp * &kp);
            prop_assert_eq!(&plain, &padded);
            prop_assert_eq!(plain.eval(&t).unwrap(), padded.eval(&t).unwrap());
        }
    }
}
