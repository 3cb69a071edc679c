//! Deciding `Q_p`-solubility of `z^2 + h(x,y) z = f(x,y)` and estimating
//! local densities by sampling.
//!
//! Two charts cover the weighted projective plane: `(x, y) = (X, 1)` with
//! `X` in `Z_p`, and `(x, y) = (1, pY)` with `Y` in `Z_p`. Since `z` is a root
//! of a monic quadratic over `Z_p` it is integral in either chart.
//!
//! [`decide`] uses a univariate refinement of `h^2 + 4f` for odd `p` and the
//! bivariate refinement of [`decide_generic`] for `p = 2`. Both return a
//! witness for soluble inputs which [`verify_witness`] rechecks from scratch.

mod engine;
mod mc;
mod odd;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{domain, Result};
use crate::primes::is_prime;

pub use engine::decide_generic_with_precision;
pub use mc::{monte_carlo_local, monte_carlo_local_with_workers, sample, LocalMcReport, DEFAULT_SAMPLE_DIGITS};

/// Refinement depth used when the caller has no preference.
pub const DEFAULT_MAX_DEPTH: u32 = 64;
/// Upper bound on explored nodes per decision.
pub const NODE_BUDGET: usize = 200_000;

/// A generalized binary quartic with integer coefficients.
///
/// `h = [l, m, n]` is `l x^2 + m x y + n y^2` and `f = [a, b, c, d, e]` is
/// `a x^4 + b x^3 y + c x^2 y^2 + d x y^3 + e y^4`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GBQInt {
    pub h: [BigInt; 3],
    pub f: [BigInt; 5],
}

impl GBQInt {
    pub fn new(h: [i64; 3], f: [i64; 5]) -> Self {
        GBQInt { h: h.map(BigInt::from), f: f.map(BigInt::from) }
    }

    /// `z^2 = f(x, y)`.
    pub fn plain(f: [i64; 5]) -> Self {
        GBQInt::new([0; 3], f)
    }

    pub fn is_plain(&self) -> bool {
        self.h.iter().all(Zero::is_zero)
    }

    pub fn h_at(&self, x: &BigInt, y: &BigInt) -> BigInt {
        binary_form(&self.h, x, y)
    }

    pub fn f_at(&self, x: &BigInt, y: &BigInt) -> BigInt {
        binary_form(&self.f, x, y)
    }

    /// `h^2 + 4 f` as a binary quartic.
    pub fn discriminant_form(&self) -> [BigInt; 5] {
        let mut d: [BigInt; 5] = std::array::from_fn(|i| BigInt::from(4) * &self.f[i]);
        for i in 0..3 {
            for j in 0..3 {
                d[i + j] += &self.h[i] * &self.h[j];
            }
        }
        d
    }

    /// `F(x, y, z) = z^2 + h z - f`.
    pub fn eval(&self, x: &BigInt, y: &BigInt, z: &BigInt) -> BigInt {
        z * z + self.h_at(x, y) * z - self.f_at(x, y)
    }

    /// `(F_x, F_y, F_z)` at a point.
    pub fn gradient(&self, x: &BigInt, y: &BigInt, z: &BigInt) -> [BigInt; 3] {
        let (hx, hy) = form_partials(&self.h, x, y);
        let (fx, fy) = form_partials(&self.f, x, y);
        [z * hx - fx, z * hy - fy, BigInt::from(2) * z + self.h_at(x, y)]
    }
}

/// Evaluates `sum c[i] x^(deg - i) y^i`.
fn binary_form(c: &[BigInt], x: &BigInt, y: &BigInt) -> BigInt {
    let deg = c.len() - 1;
    let mut acc = BigInt::zero();
    for (i, ci) in c.iter().enumerate() {
        if !ci.is_zero() {
            acc += ci * num_traits::pow(x.clone(), deg - i) * num_traits::pow(y.clone(), i);
        }
    }
    acc
}

fn form_partials(c: &[BigInt], x: &BigInt, y: &BigInt) -> (BigInt, BigInt) {
    let deg = c.len() - 1;
    let mut gx = BigInt::zero();
    let mut gy = BigInt::zero();
    for (i, ci) in c.iter().enumerate() {
        let ex = deg - i;
        if ex > 0 {
            gx += ci * BigInt::from(ex) * num_traits::pow(x.clone(), ex - 1) * num_traits::pow(y.clone(), i);
        }
        if i > 0 {
            gy += ci * BigInt::from(i) * num_traits::pow(x.clone(), ex) * num_traits::pow(y.clone(), i - 1);
        }
    }
    (gx, gy)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Chart {
    /// `(x, y) = (X, 1)`.
    A,
    /// `(x, y) = (1, p Y)`.
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum LiftVar {
    X,
    Y,
    Z,
}

/// A point `(x : y : z)` with `x, y` not both divisible by `p`, together with
/// the variable along which Hensel's lemma applies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub chart: Chart,
    pub x: BigInt,
    pub y: BigInt,
    pub z: BigInt,
    pub var: LiftVar,
    /// The point lifts to a zero congruent to it modulo `p^modulus_exp`.
    pub modulus_exp: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum VerdictKind {
    Soluble,
    Insoluble,
    Undecided,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolubilityVerdict {
    pub kind: VerdictKind,
    pub witness: Option<Witness>,
    pub depth_used: u32,
}

/// Decides `Q_p`-solubility exactly, refining to at most `max_depth` levels.
pub fn decide(p: u64, q: &GBQInt, max_depth: u32) -> Result<SolubilityVerdict> {
    decide_with_precision(p, q, max_depth, None)
}

/// As [`decide`], but with the coefficients known only modulo
/// `p^precision` when `precision` is set; inputs whose answer depends on
/// unknown digits are reported undecided.
pub fn decide_with_precision(
    p: u64,
    q: &GBQInt,
    max_depth: u32,
    precision: Option<u32>,
) -> Result<SolubilityVerdict> {
    check_args(p, max_depth)?;
    if p == 2 {
        Ok(engine::decide_generic_with_precision(p, q, max_depth, precision, true))
    } else {
        Ok(odd::decide_odd(p, q, max_depth, precision, true))
    }
}

/// The bivariate refinement for any prime. For odd `p` this is an
/// independent cross-check of [`decide`].
pub fn decide_generic(p: u64, q: &GBQInt, max_depth: u32) -> Result<SolubilityVerdict> {
    check_args(p, max_depth)?;
    Ok(engine::decide_generic_with_precision(p, q, max_depth, None, true))
}

fn check_args(p: u64, max_depth: u32) -> Result<()> {
    if !is_prime(p) {
        return domain(format!("{p} is not prime"));
    }
    if max_depth == 0 {
        return domain("max_depth must be at least 1");
    }
    Ok(())
}

/// Rechecks a witness: the point must be primitive in `(x, y)` and satisfy
/// `v(F) > 2 v(dF/d var)` (or `F = 0` exactly).
pub fn verify_witness(p: u64, q: &GBQInt, w: &Witness) -> Result<bool> {
    if !is_prime(p) {
        return domain(format!("{p} is not prime"));
    }
    let pb = BigInt::from(p);
    if w.x.is_multiple_of(&pb) && w.y.is_multiple_of(&pb) {
        return domain("witness has x and y both divisible by p");
    }
    let value = q.eval(&w.x, &w.y, &w.z);
    if value.is_zero() {
        return Ok(true);
    }
    let grad = q.gradient(&w.x, &w.y, &w.z);
    let d = match w.var {
        LiftVar::X => &grad[0],
        LiftVar::Y => &grad[1],
        LiftVar::Z => &grad[2],
    };
    if d.is_zero() {
        return Ok(false);
    }
    let vf = val(&value, p).expect("nonzero");
    let vd = val(d, p).expect("nonzero");
    Ok(vf > 2 * vd)
}

/// Valuation of a nonzero integer, `None` for zero.
pub(crate) fn val(n: &BigInt, p: u64) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    if p == 2 {
        return n.trailing_zeros().map(|t| t as u32);
    }
    let pb = BigInt::from(p);
    let mut m = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return Some(v);
        }
        m = q;
        v += 1;
    }
}

/// Minimum valuation over a list of integers, `None` if all vanish.
pub(crate) fn min_val<'a>(xs: impl IntoIterator<Item = &'a BigInt>, p: u64) -> Option<u32> {
    xs.into_iter().filter_map(|c| val(c, p)).min()
}

pub(crate) fn pow_big(p: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

/// Picks the gradient component of least valuation and records the Hensel
/// congruence exponent; `None` if the certificate does not hold.
pub(crate) fn certify(p: u64, q: &GBQInt, chart: Chart, x: BigInt, y: BigInt, z: BigInt) -> Option<Witness> {
    let value = q.eval(&x, &y, &z);
    let grad = q.gradient(&x, &y, &z);
    let vars = [LiftVar::X, LiftVar::Y, LiftVar::Z];
    let best = (0..3)
        .filter_map(|i| val(&grad[i], p).map(|v| (v, i)))
        .min_by_key(|&(v, i)| (v, std::cmp::Reverse(i)));
    if value.is_zero() {
        let var = best.map(|(_, i)| vars[i]).unwrap_or(LiftVar::Z);
        return Some(Witness { chart, x, y, z, var, modulus_exp: u32::MAX });
    }
    let (vd, i) = best?;
    let vf = val(&value, p)?;
    (vf > 2 * vd).then(|| Witness { chart, x, y, z, var: vars[i], modulus_exp: vf - vd })
}

/// `a^{-1} mod m` for `a` a unit.
pub(crate) fn inv_mod(a: &BigInt, m: &BigInt) -> BigInt {
    a.mod_floor(m).modinv(m).expect("unit modulo p")
}

impl SolubilityVerdict {
    pub(crate) fn undecided(depth: u32) -> Self {
        SolubilityVerdict { kind: VerdictKind::Undecided, witness: None, depth_used: depth }
    }
}

/// Whether `u` is a unit modulo odd `p` that is a square.
pub(crate) fn is_qr(u: u64, p: u64) -> bool {
    u % p != 0 && pow_mod(u, (p - 1) / 2, p) == 1
}

pub(crate) fn pow_mod(b: u64, mut e: u64, p: u64) -> u64 {
    let m = p as u128;
    let mut b = b as u128 % m;
    let mut r = 1u128 % m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r as u64
}

/// A square root of the quadratic residue `a` modulo odd `p` (Tonelli-Shanks).
pub(crate) fn sqrt_mod(a: u64, p: u64) -> u64 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    let mul = |x: u64, y: u64| ((x as u128 * y as u128) % p as u128) as u64;
    let mut q = p - 1;
    let mut s = 0;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul(tt, tt);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul(b, b);
        t = mul(t, c);
        r = mul(r, b);
    }
    r
}

/// `n mod p` as a `u64` in `[0, p)`.
pub(crate) fn residue(n: &BigInt, p: u64) -> u64 {
    let r = n.mod_floor(&BigInt::from(p));
    let (_, digits) = r.to_u64_digits();
    digits.first().copied().unwrap_or(0)
}
