//! The global density `rho = rho(inf) * prod_p rho(p)`.
//!
//! The product over `p <= P` is an outward-rounded interval product of the
//! exact local densities. The rest is enclosed in `[1 - 3/(4P), 1]`, which
//! follows from `1 - R(t) <= (3/4) t^-2` for `t >= 3` and
//! `sum_{n > P} n^-2 < 1/P`.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::Signed;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{domain, Result};
use crate::exactmath::{rational_directed_decimal, Dyadic, DyadicInterval, Poly, Rational};
use crate::model::ModelKind;
use crate::primes::{primes_up_to, SIEVE_CAP};
use crate::realvol::{BoundsReport, RealMcReport};
use crate::recursion::local_density;

/// Extra bits carried through the product before the final rounding.
const GUARD_BITS: u32 = 32;

/// Coefficients, in powers of `t - 3`, of
/// `6 (t+1)(t^2+t+1)(t^6+t^3+1) - t^2 (4t^7 + 4t^6 + 2t^5 + t^4 + 3t^3 + 2t^2 + 3t + 3)`.
/// All of them are nonnegative, which proves `1 - R(t) <= (3/4) t^-2` on
/// `t >= 3`. Checked once; a failure aborts.
pub fn tail_certificate() -> &'static [BigInt] {
    static CERT: OnceLock<Vec<BigInt>> = OnceLock::new();
    CERT.get_or_init(|| {
        let den = &(&Poly::from_ints(&[1, 1]) * &Poly::from_ints(&[1, 1, 1])) * &Poly::from_ints(&[1, 0, 0, 1, 0, 0, 1]);
        let num = Poly::from_ints(&[3, 3, 2, 3, 1, 2, 4, 4]);
        let t2 = Poly::from_ints(&[0, 0, 1]);
        let diff = &den.scale(&Rational::from_integer(6.into())) - &(&t2 * &num);
        let shifted = diff.shift(&Rational::from_integer(3.into()));
        let coeffs: Vec<BigInt> = shifted.coeffs().iter().map(|c| c.to_integer()).collect();
        assert!(
            coeffs.iter().all(|c| !c.is_negative()) && shifted.coeffs().iter().all(|c| c.is_integer()),
            "tail certificate failed: {coeffs:?}"
        );
        coeffs
    })
}

/// Encloses `prod_{p > P} R(p)` in `[1 - 3/(4P), 1]`.
pub fn tail_bound(pmax: u64, precision: u32) -> Result<DyadicInterval> {
    if pmax < 3 {
        return domain(format!("tail bound needs P >= 3, got {pmax}"));
    }
    tail_certificate();
    let lo = Rational::from_integer(1.into()) - Rational::new(3.into(), BigInt::from(4) * BigInt::from(pmax));
    Ok(DyadicInterval::from_rational_bounds(&lo, &Rational::from_integer(1.into()), precision))
}

/// Outward-rounded `prod_{p <= P} rho(p)` in ascending prime order.
pub fn finite_product(pmax: u64, model: ModelKind, precision: u32) -> Result<DyadicInterval> {
    if pmax < 2 {
        return domain(format!("finite product needs P >= 2, got {pmax}"));
    }
    if pmax > SIEVE_CAP {
        return domain(format!("P = {pmax} is above the sieve cap {SIEVE_CAP}"));
    }
    let work = precision + GUARD_BITS;
    let factors: Vec<DyadicInterval> = primes_up_to(pmax)
        .par_iter()
        .map(|&p| local_density(p, model).map(|r| DyadicInterval::from_rational(&r, work)))
        .collect::<Result<_>>()?;
    let one = DyadicInterval::point(Dyadic::one(), work);
    let prod = factors.iter().fold(one, |acc, f| acc.mul(f));
    Ok(DyadicInterval::new(prod.lo().clone(), prod.hi().clone(), precision))
}

/// The real factor fed into [`rho_interval`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealPart {
    pub interval: DyadicInterval,
    /// A proven enclosure, as opposed to a statistical estimate.
    pub rigorous: bool,
    pub source: String,
}

impl RealPart {
    pub fn from_bounds(r: &BoundsReport, precision: u32) -> Self {
        RealPart {
            interval: r.interval(precision),
            rigorous: true,
            source: format!("real-bounds method={} depth={}", r.method, r.depth),
        }
    }

    /// `estimate +- 4 sigma`; never rigorous.
    pub fn from_monte_carlo(r: &RealMcReport, precision: u32) -> Self {
        let (lo, hi) = r.error_bar();
        let q = |x: f64| Rational::from_float(x).unwrap_or_else(|| Rational::from_integer(0.into()));
        RealPart {
            interval: DyadicInterval::from_rational_bounds(&q(lo.max(0.0)), &q(hi.min(1.0)), precision),
            rigorous: false,
            source: format!("real-mc model={} n={} seed={}", r.model, r.n, r.seed),
        }
    }

    /// An externally supplied enclosure.
    pub fn given(lo: &Rational, hi: &Rational, rigorous: bool, precision: u32) -> Self {
        RealPart {
            interval: DyadicInterval::from_rational_bounds(lo, hi, precision),
            rigorous,
            source: "given".to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalReport {
    pub model: ModelKind,
    pub real_part: RealPart,
    pub finite_product: DyadicInterval,
    pub tail: DyadicInterval,
    pub rho: DyadicInterval,
    pub pmax: u64,
    pub precision: u32,
    /// Set only for the plain model fed with a proven real enclosure.
    pub rigorous: bool,
}

/// `rho = real_part * finite_product(P) * tail_bound(P)`.
pub fn rho_interval(model: ModelKind, real_part: RealPart, pmax: u64, precision: u32) -> Result<GlobalReport> {
    let tail = tail_bound(pmax, precision)?;
    let finite = finite_product(pmax, model, precision)?;
    let rho = real_part.interval.mul(&finite).mul(&tail);
    Ok(GlobalReport {
        model,
        rigorous: real_part.rigorous && model == ModelKind::PlainBQ,
        real_part,
        finite_product: finite,
        tail,
        rho,
        pmax,
        precision,
    })
}

/// `{"exact": "m/2^k", "decimal": ...}`, the decimal rounded toward `-inf`
/// or `+inf` as asked.
pub fn dyadic_json(d: &Dyadic, decimals: usize, up: bool) -> Value {
    json!({ "exact": d.to_string(), "decimal": rational_directed_decimal(&d.to_rational(), decimals, up) })
}

/// Endpoints are rendered outward.
pub fn interval_json(iv: &DyadicInterval, decimals: usize) -> Value {
    json!({ "lo": dyadic_json(iv.lo(), decimals, false), "hi": dyadic_json(iv.hi(), decimals, true) })
}

pub fn rational_json(q: &Rational, decimals: usize) -> Value {
    json!({ "exact": q.to_string(), "decimal": crate::exactmath::rational_round_decimal(q, decimals) })
}

impl GlobalReport {
    pub fn to_json(&self, decimals: usize) -> Value {
        json!({
            "model": self.model.as_str(),
            "pmax": self.pmax,
            "precision": self.precision,
            "real_part": {
                "interval": interval_json(&self.real_part.interval, decimals),
                "rigorous": self.real_part.rigorous,
                "source": self.real_part.source,
            },
            "finite_product": interval_json(&self.finite_product, decimals),
            "tail": interval_json(&self.tail, decimals),
            "rho": interval_json(&self.rho, decimals),
            "rigorous": self.rigorous,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rat;

    #[test]
    fn certificate_coefficients() {
        let c: Vec<i64> = tail_certificate().iter().map(|c| c.try_into().unwrap()).collect();
        assert_eq!(c, vec![125106, 330168, 388215, 266565, 117676, 34605, 6773, 850, 62, 2]);
    }

    #[test]
    fn directed_json() {
        let iv = DyadicInterval::from_rational(&rat(1, 3), 64);
        let v = interval_json(&iv, 4);
        assert_eq!(v["lo"]["decimal"], "0.3333");
        assert_eq!(v["hi"]["decimal"], "0.3334");
        let lo: Dyadic = v["lo"]["exact"].as_str().unwrap().parse().unwrap();
        assert_eq!(&lo, iv.lo());
    }
}
