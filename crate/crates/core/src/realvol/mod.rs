//! The real place: `1 - rho(inf)` is the probability that a quartic with
//! coefficients uniform in `[-1, 1]` is negative definite.
//!
//! Boxes of coefficients are classified with the corner polynomials
//! `f_l, f_u` (valid for `x >= 0`) and `s, t` (valid for `x <= 0`), so the
//! bounds on the negative definite volume are exact dyadics.

mod bounds;
mod mc;

pub use bounds::{
    collect_leaves, run_bounds, run_bounds_with, BoundsConfig, BoundsReport, Checkpoint, Method, RegionReport,
    DEFAULT_MAX_PENDING,
};
pub use mc::{monte_carlo_real, monte_carlo_real_with_workers, sample_real, RealMcReport};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{domain, Result};
use crate::exactmath::{int_positive_root_count, Dyadic};

/// `a x^4 + b x^3 + c x^2 + d x + e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quartic5 {
    pub a: Dyadic,
    pub b: Dyadic,
    pub c: Dyadic,
    pub d: Dyadic,
    pub e: Dyadic,
}

impl Quartic5 {
    pub fn new(coeffs: [Dyadic; 5]) -> Self {
        let [a, b, c, d, e] = coeffs;
        Quartic5 { a, b, c, d, e }
    }

    pub fn from_ints(c: [i64; 5]) -> Self {
        Quartic5::new(c.map(Dyadic::from_int))
    }

    pub fn coeffs(&self) -> [&Dyadic; 5] {
        [&self.a, &self.b, &self.c, &self.d, &self.e]
    }

    /// Integer coefficients with the same signs for every homogeneous
    /// quantity (a common power of two is cleared).
    fn integer_coeffs(&self) -> [BigInt; 5] {
        let scale = self.coeffs().iter().map(|c| -c.exponent()).max().unwrap_or(0).max(0);
        self.coeffs().map(|c| c.numerator_at_scale(scale).expect("scale clears every denominator"))
    }
}

/// Discriminant of `a x^4 + b x^3 + c x^2 + d x + e`.
pub(crate) fn discriminant(q: &[BigInt; 5]) -> BigInt {
    let [a, b, c, d, e] = q;
    let a2 = a * a;
    let b2 = b * b;
    let c2 = c * c;
    let d2 = d * d;
    let e2 = e * e;
    let i = |n: i64| BigInt::from(n);
    i(256) * &a2 * a * &e2 * e - i(192) * &a2 * b * d * &e2 - i(128) * &a2 * &c2 * &e2 + i(144) * &a2 * c * &d2 * e
        - i(27) * &a2 * &d2 * &d2
        + i(144) * a * &b2 * c * &e2
        - i(6) * a * &b2 * &d2 * e
        - i(80) * a * b * &c2 * d * e
        + i(18) * a * b * c * &d2 * d
        + i(16) * a * &c2 * &c2 * e
        - i(4) * a * &c2 * c * &d2
        - i(27) * &b2 * &b2 * &e2
        + i(18) * &b2 * b * c * d * e
        - i(4) * &b2 * b * &d2 * d
        - i(4) * &b2 * &c2 * c * e
        + &b2 * &c2 * &d2
}

fn no_real_roots_int(q: &[BigInt; 5]) -> bool {
    let [a, b, c, d, e] = q;
    if !discriminant(q).is_positive() {
        return false;
    }
    let i = |n: i64| BigInt::from(n);
    let h = i(8) * a * c - i(3) * b * b;
    if h.is_positive() {
        return true;
    }
    let a2 = a * a;
    let b2 = b * b;
    let qq = i(3) * &b2 * &b2 - i(16) * a * &b2 * c + i(16) * &a2 * c * c + i(16) * &a2 * b * d - i(64) * &a2 * a * e;
    qq.is_negative()
}

/// The no-real-roots test `Delta > 0 and (H > 0 or Q < 0)`, all in exact
/// integer arithmetic.
pub fn no_real_roots(f: &Quartic5) -> Result<bool> {
    if f.a.is_zero() {
        return domain("no_real_roots needs a nonzero leading coefficient");
    }
    Ok(no_real_roots_int(&f.integer_coeffs()))
}

/// `f(x, y) < 0` for all real `(x, y) != 0`. The boundary `a = 0` counts as
/// not negative definite.
pub fn is_negative_definite(f: &Quartic5) -> bool {
    f.a.signum() < 0 && f.e.signum() < 0 && no_real_roots_int(&f.integer_coeffs())
}

/// Integer-coefficient version of [`is_negative_definite`].
pub(crate) fn is_negative_definite_int(q: &[BigInt; 5]) -> bool {
    q[0].is_negative() && q[4].is_negative() && no_real_roots_int(q)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum BoxVerdict {
    AllNegDef,
    NoneNegDef,
    Undecided,
}

/// `l_i <= coefficient_i <= u_i`. In the scaled 4D mode one coordinate is
/// pinned to `+-1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DyadicBox {
    pub l: [Dyadic; 5],
    pub u: [Dyadic; 5],
    pub fixed_face: Option<(usize, i8)>,
}

impl DyadicBox {
    pub fn new(l: [Dyadic; 5], u: [Dyadic; 5]) -> Self {
        DyadicBox { l, u, fixed_face: None }
    }

    pub fn from_ints(l: [i64; 5], u: [i64; 5]) -> Self {
        DyadicBox::new(l.map(Dyadic::from_int), u.map(Dyadic::from_int))
    }

    pub fn is_valid(&self) -> bool {
        let ordered = self.l.iter().zip(&self.u).all(|(l, u)| l <= u);
        let face_ok = match self.fixed_face {
            None => true,
            Some((k, s)) => {
                let v = Dyadic::from_int(s as i64);
                k < 5 && (s == 1 || s == -1) && self.l[k] == v && self.u[k] == v
            }
        };
        ordered && face_ok
    }

    /// Numerators of `l` and `u` over a common power of two.
    fn integer_corners(&self) -> ([BigInt; 5], [BigInt; 5]) {
        let scale = self.l.iter().chain(&self.u).map(|c| -c.exponent()).max().unwrap_or(0).max(0);
        let at = |c: &Dyadic| c.numerator_at_scale(scale).expect("scale clears every denominator");
        (self.l.each_ref().map(at), self.u.each_ref().map(at))
    }
}

/// Coefficients `(x^4, ..., x^0)` of a quartic; true iff it is `< 0` on all
/// of `[0, inf)`.
fn negative_on_nonneg_big(q: &[BigInt; 5]) -> bool {
    if !q[4].is_negative() {
        return false;
    }
    match q.iter().find(|c| !c.is_zero()) {
        Some(lead) if lead.is_positive() => return false,
        _ => {}
    }
    if q.iter().all(|c| !c.is_positive()) {
        return true;
    }
    let low_first: Vec<BigInt> = q.iter().rev().cloned().collect();
    int_positive_root_count(&low_first) == Some(0)
}

/// The `i64` fast path of [`negative_on_nonneg_big`]; falls back to big
/// integers when the Sturm chain overflows `i128`.
fn negative_on_nonneg(q: [i64; 5]) -> bool {
    if q[4] >= 0 {
        return false;
    }
    match q.iter().find(|&&c| c != 0) {
        Some(&lead) if lead > 0 => return false,
        _ => {}
    }
    if q.iter().all(|&c| c <= 0) {
        return true;
    }
    // Cheap witnesses of a nonnegative value: x = 2^k for small k.
    for k in [0i32, 1, -1, 2, -2] {
        let v: i128 = if k >= 0 {
            q.iter().fold(0i128, |acc, &c| (acc << k) + c as i128)
        } else {
            let s = -k;
            q.iter().enumerate().map(|(i, &c)| (c as i128) << (s as usize * i)).sum()
        };
        if v >= 0 {
            return false;
        }
    }
    let low: [i128; 5] = [q[4] as i128, q[3] as i128, q[2] as i128, q[1] as i128, q[0] as i128];
    match int_positive_root_count(&low) {
        Some(n) => n == 0,
        None => negative_on_nonneg_big(&q.map(BigInt::from)),
    }
}

/// Box test on `i64` corners. Signs are invariant under a common positive
/// scale, so the corners may be numerators over any power of two.
pub(crate) fn classify_grid(l: &[i64; 5], u: &[i64; 5]) -> BoxVerdict {
    if u[0] < 0
        && u[4] < 0
        && negative_on_nonneg(*u)
        && negative_on_nonneg([u[0], -l[1], u[2], -l[3], u[4]])
    {
        return BoxVerdict::AllNegDef;
    }
    if !negative_on_nonneg(*l) || !negative_on_nonneg([l[0], -u[1], l[2], -u[3], l[4]]) {
        return BoxVerdict::NoneNegDef;
    }
    BoxVerdict::Undecided
}

/// Three-way box test.
///
/// `AllNegDef` iff `f_u < 0` on `[0, inf)` and `t < 0` on `(-inf, 0]`, which
/// is exact because `f <= f_u` and `f <= t` on those half-lines and the
/// corners are in the box. `NoneNegDef` when `f_l` or `s` reaches a value
/// `>= 0` on its half-line; that direction is only sufficient.
pub fn classify_box(b: &DyadicBox) -> BoxVerdict {
    let (l, u) = b.integer_corners();
    let small = |v: &[BigInt; 5]| -> Option<[i64; 5]> {
        let out: Vec<i64> = v.iter().map(|c| c.to_i64().filter(|x| x.unsigned_abs() < 1 << 40)).collect::<Option<_>>()?;
        out.try_into().ok()
    };
    if let (Some(ls), Some(us)) = (small(&l), small(&u)) {
        return classify_grid(&ls, &us);
    }
    let neg = |c: [&BigInt; 5], flip: bool| {
        let q: [BigInt; 5] = std::array::from_fn(|i| if flip && i % 2 == 1 { -c[i].clone() } else { c[i].clone() });
        negative_on_nonneg_big(&q)
    };
    let s = [&l[0], &u[1], &l[2], &u[3], &l[4]];
    let t = [&u[0], &l[1], &u[2], &l[3], &u[4]];
    if neg(u.each_ref(), false) && neg(t, true) {
        BoxVerdict::AllNegDef
    } else if !neg(l.each_ref(), false) || !neg(s, true) {
        BoxVerdict::NoneNegDef
    } else {
        BoxVerdict::Undecided
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn criterion_examples() {
        assert!(no_real_roots(&Quartic5::from_ints([1, 0, 0, 0, 1])).unwrap());
        assert!(!no_real_roots(&Quartic5::from_ints([1, 0, -5, 0, 4])).unwrap());
        assert!(no_real_roots(&Quartic5::from_ints([-1, 0, 0, 0, -1])).unwrap());
        assert!(no_real_roots(&Quartic5::from_ints([0, 1, 0, 0, 1])).is_err());
        assert!(is_negative_definite(&Quartic5::from_ints([-1, 0, 0, 0, -1])));
        assert!(!is_negative_definite(&Quartic5::from_ints([-1, 0, 0, 0, 1])));
        assert!(!is_negative_definite(&Quartic5::from_ints([0, 0, 0, 0, -1])));
    }

    #[test]
    fn box_examples() {
        assert_eq!(classify_box(&DyadicBox::from_ints([-1, 0, 0, 0, -1], [-1, 0, 0, 0, -1])), BoxVerdict::AllNegDef);
        assert_eq!(classify_box(&DyadicBox::from_ints([0; 5], [1; 5])), BoxVerdict::NoneNegDef);
        assert_eq!(classify_box(&DyadicBox::from_ints([-1; 5], [1; 5])), BoxVerdict::Undecided);
    }

    #[test]
    fn fast_and_big_paths_agree() {
        let cases: [[i64; 5]; 6] =
            [[-1, 0, 0, 0, -1], [-1, 3, -4, 3, -1], [-1, 2, -3, 2, -1], [-4, 1, -1, 7, -2], [-1, 0, 2, 0, -1], [-9, 9, -9, 9, -3]];
        for q in cases {
            assert_eq!(negative_on_nonneg(q), negative_on_nonneg_big(&q.map(BigInt::from)), "{q:?}");
        }
    }
}
