//! Exact real-root counting with Sturm sequences.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::{Poly, Rational};
use crate::error::{domain, Result};

/// A closed real half-line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HalfLine {
    /// `[0, +inf)`
    NonNegative,
    /// `(-inf, 0]`
    NonPositive,
}

fn sign(q: &Rational) -> i32 {
    if q.is_zero() {
        0
    } else if q.is_negative() {
        -1
    } else {
        1
    }
}

fn sturm_chain(f: &Poly) -> Vec<Poly> {
    let mut chain = vec![f.clone(), f.derivative()];
    loop {
        let n = chain.len();
        if chain[n - 1].is_zero() {
            chain.pop();
            break;
        }
        let r = chain[n - 2].div_rem(&chain[n - 1]).1;
        if r.is_zero() {
            break;
        }
        chain.push(-&r);
    }
    chain
}

fn variations(signs: impl Iterator<Item = i32>) -> usize {
    let mut last = 0;
    let mut count = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

fn at_zero(chain: &[Poly]) -> usize {
    variations(chain.iter().map(|p| sign(&p.coeff(0))))
}

fn at_pos_inf(chain: &[Poly]) -> usize {
    variations(chain.iter().map(|p| sign(&p.leading())))
}

fn at_neg_inf(chain: &[Poly]) -> usize {
    variations(chain.iter().map(|p| {
        let s = sign(&p.leading());
        if p.degree().unwrap_or(0) % 2 == 1 {
            -s
        } else {
            s
        }
    }))
}

/// Number of distinct real roots of a nonzero polynomial.
pub fn count_real_roots(f: &Poly) -> Result<usize> {
    if f.is_zero() {
        return domain("root count of the zero polynomial");
    }
    let g = f.squarefree_part();
    let chain = sturm_chain(&g);
    Ok(at_neg_inf(&chain) - at_pos_inf(&chain))
}

/// Number of distinct real roots of `f` in the closed half-line.
pub fn count_roots_halfline(f: &Poly, side: HalfLine) -> Result<usize> {
    if f.is_zero() {
        return domain("root count of the zero polynomial");
    }
    let f = match side {
        HalfLine::NonNegative => f.clone(),
        HalfLine::NonPositive => f.reflect(),
    };
    let mut g = f.squarefree_part();
    let mut at_origin = 0;
    if g.coeff(0).is_zero() {
        // Squarefree, so the root at zero is simple.
        g = g.div_rem(&Poly::x()).0;
        at_origin = 1;
    }
    let chain = sturm_chain(&g);
    Ok(at_origin + at_zero(&chain) - at_pos_inf(&chain))
}

/// True iff `f(x) < 0` for every `x` in the closed half-line. That requires
/// `f(0) < 0`, a negative dominant term on that side, and no roots.
pub fn is_negative_on_halfline(f: &Poly, side: HalfLine) -> bool {
    if f.is_zero() || !f.coeff(0).is_negative() {
        return false;
    }
    let deg = f.degree().unwrap_or(0);
    let lead = sign(&f.leading());
    let dominant = match side {
        HalfLine::NonNegative => lead,
        HalfLine::NonPositive if deg % 2 == 1 => -lead,
        HalfLine::NonPositive => lead,
    };
    if dominant >= 0 {
        return false;
    }
    matches!(count_roots_halfline(f, side), Ok(0))
}

/// Integer arithmetic used by [`int_positive_root_count`]. Implemented for
/// `i128` (checked, overflow reported as `None`) and `BigInt` (never fails).
pub trait SturmInt: Clone + Sized {
    fn int_zero() -> Self;
    fn from_i64(v: i64) -> Self;
    fn vanishes(&self) -> bool;
    fn sign_of(&self) -> i32;
    fn neg(&self) -> Option<Self>;
    fn mul(&self, o: &Self) -> Option<Self>;
    fn sub(&self, o: &Self) -> Option<Self>;
    /// Nonnegative gcd.
    fn gcd(&self, o: &Self) -> Self;
    /// Exact division.
    fn div_exact(&self, o: &Self) -> Self;
}

impl SturmInt for i128 {
    fn int_zero() -> Self {
        0
    }
    fn from_i64(v: i64) -> Self {
        v as i128
    }
    fn vanishes(&self) -> bool {
        *self == 0
    }
    fn sign_of(&self) -> i32 {
        i128::signum(*self) as i32
    }
    fn neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        self.checked_sub(*o)
    }
    fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.unsigned_abs(), o.unsigned_abs());
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a as i128
    }
    fn div_exact(&self, o: &Self) -> Self {
        self / o
    }
}

impl SturmInt for BigInt {
    fn int_zero() -> Self {
        BigInt::zero()
    }
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn vanishes(&self) -> bool {
        Zero::is_zero(self)
    }
    fn sign_of(&self) -> i32 {
        match self.sign() {
            num_bigint::Sign::Minus => -1,
            num_bigint::Sign::NoSign => 0,
            num_bigint::Sign::Plus => 1,
        }
    }
    fn neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn gcd(&self, o: &Self) -> Self {
        num_integer::Integer::gcd(self, o)
    }
    fn div_exact(&self, o: &Self) -> Self {
        self / o
    }
}

fn trim<T: SturmInt>(v: &mut Vec<T>) {
    while v.last().is_some_and(|c| c.vanishes()) {
        v.pop();
    }
}

/// Divide out the (positive) content.
fn make_primitive<T: SturmInt>(v: &mut [T]) {
    let g = v.iter().fold(T::int_zero(), |acc, c| acc.gcd(c));
    if g.vanishes() || g.sign_of() == 0 {
        return;
    }
    let one = T::from_i64(1);
    if g.sub(&one).is_some_and(|d| d.vanishes()) {
        return;
    }
    for c in v.iter_mut() {
        *c = c.div_exact(&g);
    }
}

/// Pseudo-remainder of `a` by `b` with a positive multiplier
/// `|lc(b)|^(deg a - deg b + 1)`, so the sign of the true remainder is kept.
fn signed_prem<T: SturmInt>(a: &[T], b: &[T]) -> Option<Vec<T>> {
    let db = b.len() - 1;
    let lc = b[db].clone();
    let mut r: Vec<T> = a.to_vec();
    let steps = a.len() - db;
    for step in 0..steps {
        let top = a.len() - 1 - step;
        let t = r[top].clone();
        let k = top - db;
        for c in r.iter_mut().take(top + 1) {
            *c = c.mul(&lc)?;
        }
        if !t.vanishes() {
            for (i, bc) in b.iter().enumerate() {
                r[k + i] = r[k + i].sub(&t.mul(bc)?)?;
            }
        }
        r.pop();
    }
    if lc.sign_of() < 0 && steps % 2 == 1 {
        for c in r.iter_mut() {
            *c = c.neg()?;
        }
    }
    trim(&mut r);
    Some(r)
}

/// Number of distinct roots in `(0, +inf)` of an integer polynomial
/// (lowest degree first) whose constant term is nonzero. `None` means the
/// integer type overflowed.
pub fn int_positive_root_count<T: SturmInt>(coeffs: &[T]) -> Option<usize> {
    let mut p0: Vec<T> = coeffs.to_vec();
    trim(&mut p0);
    if p0.len() <= 1 {
        return Some(0);
    }
    make_primitive(&mut p0);
    let mut p1: Vec<T> = Vec::with_capacity(p0.len() - 1);
    for (i, c) in p0.iter().enumerate().skip(1) {
        p1.push(c.mul(&T::from_i64(i as i64))?);
    }
    trim(&mut p1);
    make_primitive(&mut p1);
    let mut zero_signs = vec![p0[0].sign_of(), p1[0].sign_of()];
    let mut inf_signs = vec![p0.last()?.sign_of(), p1.last()?.sign_of()];
    let (mut a, mut b) = (p0, p1);
    while b.len() > 1 {
        let mut r = signed_prem(&a, &b)?;
        if r.is_empty() {
            break;
        }
        for c in r.iter_mut() {
            *c = c.neg()?;
        }
        make_primitive(&mut r);
        zero_signs.push(r[0].sign_of());
        inf_signs.push(r.last()?.sign_of());
        a = b;
        b = r;
    }
    let v0 = variations(zero_signs.into_iter());
    let vinf = variations(inf_signs.into_iter());
    Some(v0.saturating_sub(vinf))
}
