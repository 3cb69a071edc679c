//! Counting generalized binary quartics and binary quartics over `F_p`.
//!
//! Binary forms are stored as coefficient arrays with `form[i]` the
//! coefficient of `x^(deg-i) y^i`, so `[a, b, c, d, e]` is
//! `a x^4 + b x^3 y + c x^2 y^2 + d x y^3 + e y^4` and `[l, m, n]` is
//! `l x^2 + m x y + n y^2`.

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::exactmath::Rational;
use crate::primes::is_prime;

/// Largest prime for which the `p^8` pairs `(h, f)` are enumerated.
pub const GBQ_ENUMERATION_CAP: u64 = 3;
/// Largest prime for which all quartics are enumerated.
pub const QUARTIC_ENUMERATION_CAP: u64 = 7;
/// Largest prime accepted by the closed-form tables (keeps `p^8` in `u128`).
pub const FORMULA_CAP: u64 = 1 << 15;

/// `z^2 + h(x,y) z - f(x,y)` reduced mod `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FpGBQ {
    pub p: u64,
    pub h: [u64; 3],
    pub f: [u64; 5],
}

impl FpGBQ {
    /// Reduces the given integer coefficients mod `p`.
    pub fn new(p: u64, h: [i64; 3], f: [i64; 5]) -> Self {
        let r = |c: i64| c.rem_euclid(p as i64) as u64;
        FpGBQ { p, h: h.map(r), f: f.map(r) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum FactorizationType {
    AbsIrred = 1,
    SplitDistinct = 2,
    ConjugatePair = 3,
    RepeatedFactor = 4,
}

impl FactorizationType {
    pub const ALL: [FactorizationType; 4] = [
        FactorizationType::AbsIrred,
        FactorizationType::SplitDistinct,
        FactorizationType::ConjugatePair,
        FactorizationType::RepeatedFactor,
    ];

    pub fn label(self) -> &'static str {
        match self {
            FactorizationType::AbsIrred => "absolutely irreducible",
            FactorizationType::SplitDistinct => "distinct factors over F_p",
            FactorizationType::ConjugatePair => "conjugate factors over F_p^2",
            FactorizationType::RepeatedFactor => "repeated factor",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum RootPattern {
    NoRoots = 0,
    SimpleRoot = 1,
    OneDouble = 2,
    TwoDoubles = 3,
    QuadrupleRoot = 4,
}

impl RootPattern {
    pub const ALL: [RootPattern; 5] = [
        RootPattern::NoRoots,
        RootPattern::SimpleRoot,
        RootPattern::OneDouble,
        RootPattern::TwoDoubles,
        RootPattern::QuadrupleRoot,
    ];

    pub fn label(self) -> &'static str {
        match self {
            RootPattern::NoRoots => "no roots",
            RootPattern::SimpleRoot => "simple root",
            RootPattern::OneDouble => "one double, no simple root",
            RootPattern::TwoDoubles => "two double roots",
            RootPattern::QuadrupleRoot => "quadruple root",
        }
    }
}

/// Per-class counts with their total.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountTable {
    pub p: u64,
    pub labels: Vec<&'static str>,
    pub counts: Vec<u128>,
    pub total: u128,
}

impl CountTable {
    /// `count / total` for each class.
    pub fn probabilities(&self) -> Vec<Rational> {
        self.counts
            .iter()
            .map(|&c| Rational::new(BigInt::from(c), BigInt::from(self.total)))
            .collect()
    }

    pub fn is_consistent(&self) -> bool {
        self.counts.iter().sum::<u128>() == self.total
    }
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        domain(format!("{p} is not prime"))
    }
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// `h^2` as a binary quartic.
fn square_quadratic(h: &[u64; 3], p: u64) -> [u64; 5] {
    let mut out = [0u64; 5];
    for i in 0..3 {
        for j in 0..3 {
            out[i + j] = (out[i + j] + h[i] * h[j]) % p;
        }
    }
    out
}

/// Whether `g` (not identically zero) is a constant times the square of a
/// quadratic form; returns that constant.
fn square_class(g: &[u64; 5], p: u64) -> Option<u64> {
    // work with G(X) = g(X, 1); coefficient of X^k is g[4 - k]
    let coef = |k: usize| g[4 - k];
    let k = (0..5).rev().find(|&k| coef(k) != 0)?;
    if k % 2 == 1 {
        return None;
    }
    let lead = coef(k);
    let li = inv_mod(lead, p);
    let monic: Vec<u64> = (0..=k).map(|i| coef(i) * li % p).collect();
    let m = k / 2;
    let half = inv_mod(2, p);
    // sigma = X^m + s[m-1] X^(m-1) + ... + s[0]
    let mut s = vec![0u64; m + 1];
    s[m] = 1;
    for j in 1..=m {
        let mut acc = monic[2 * m - j];
        for i in 1..j {
            acc = (acc + p * p - s[m - i] * s[m - (j - i)] % p) % p;
        }
        s[m - j] = acc * half % p;
    }
    let mut sq = vec![0u64; 2 * m + 1];
    for i in 0..=m {
        for j in 0..=m {
            sq[i + j] = (sq[i + j] + s[i] * s[j]) % p;
        }
    }
    (sq == monic).then_some(lead)
}

fn is_square_mod(c: u64, p: u64) -> bool {
    c % p == 0 || p == 2 || pow_mod(c, (p - 1) / 2, p) == 1
}

/// Elements of `F_4 = F_2[w]/(w^2 + w + 1)` as two bits `a + b w`.
fn f4_mul(x: u8, y: u8) -> u8 {
    let (a, b) = (x & 1, x >> 1);
    let (c, d) = (y & 1, y >> 1);
    // (a + b w)(c + d w) = ac + (ad + bc) w + bd (w + 1)
    let lo = (a & c) ^ (b & d);
    let hi = (a & d) ^ (b & c) ^ (b & d);
    lo | (hi << 1)
}

/// Whether some quadratic form `s` over `F_4` (or over `F_2` when
/// `base_only`) satisfies `s^2 + h s = f` over characteristic 2.
fn char2_solution(h: &[u64; 3], f: &[u64; 5], base_only: bool) -> bool {
    let range: u8 = if base_only { 2 } else { 4 };
    let h = h.map(|c| c as u8);
    let f = f.map(|c| c as u8);
    for s0 in 0..range {
        for s1 in 0..range {
            for s2 in 0..range {
                let s = [s0, s1, s2];
                let mut lhs = [0u8; 5];
                for i in 0..3 {
                    for j in 0..3 {
                        lhs[i + j] ^= f4_mul(s[i], s[j]) ^ f4_mul(h[i], s[j]);
                    }
                }
                if lhs == f {
                    return true;
                }
            }
        }
    }
    false
}

/// Factorization type of `z^2 + h z - f` over the algebraic closure of `F_p`.
pub fn classify_gbq_type(q: &FpGBQ) -> FactorizationType {
    let p = q.p;
    if p == 2 {
        if q.h == [0, 0, 0] && q.f[1] == 0 && q.f[3] == 0 {
            return FactorizationType::RepeatedFactor;
        }
        if char2_solution(&q.h, &q.f, true) {
            return FactorizationType::SplitDistinct;
        }
        if char2_solution(&q.h, &q.f, false) {
            return FactorizationType::ConjugatePair;
        }
        return FactorizationType::AbsIrred;
    }
    // (s1 - s2)^2 = h^2 + 4 f
    let hh = square_quadratic(&q.h, p);
    let g: [u64; 5] = std::array::from_fn(|i| (hh[i] + 4 * q.f[i]) % p);
    if g == [0; 5] {
        return FactorizationType::RepeatedFactor;
    }
    match square_class(&g, p) {
        Some(c) if is_square_mod(c, p) => FactorizationType::SplitDistinct,
        Some(_) => FactorizationType::ConjugatePair,
        None => FactorizationType::AbsIrred,
    }
}

/// Whether `z^2 + l z - a` is irreducible over `F_p`.
pub fn satisfies_star(q: &FpGBQ) -> bool {
    let (l, a, p) = (q.h[0], q.f[0], q.p);
    !(0..p).any(|r| (r * r + l * r + p - a) % p == 0)
}

/// Order of vanishing of the univariate `G` at `x0`, where `coefs[k]` is the
/// coefficient of `X^k`.
fn multiplicity_at(coefs: &[u64], x0: u64, p: u64) -> usize {
    let mut c: Vec<u64> = coefs.to_vec();
    while c.last() == Some(&0) {
        c.pop();
    }
    let mut mult = 0;
    while !c.is_empty() {
        // synthetic division by X - x0
        let n = c.len();
        let mut quot = vec![0u64; n - 1];
        let mut acc = 0u64;
        for k in (0..n).rev() {
            acc = (acc * x0 + c[k]) % p;
            if k > 0 {
                quot[k - 1] = acc;
            }
        }
        if acc != 0 {
            break;
        }
        mult += 1;
        c = quot;
    }
    mult
}

/// Multiplicities of the roots of `f` in `P^1(F_p)`.
fn root_multiplicities(p: u64, f: &[u64; 5]) -> Vec<usize> {
    let coefs: Vec<u64> = (0..5).map(|k| f[4 - k] % p).collect();
    let mut out = Vec::new();
    for x0 in 0..p {
        let m = multiplicity_at(&coefs, x0, p);
        if m > 0 {
            out.push(m);
        }
    }
    // the point (1:0) has multiplicity 4 - deg f(X, 1)
    let deg = (0..5).rev().find(|&k| coefs[k] != 0).unwrap_or(0);
    if deg < 4 {
        out.push(4 - deg);
    }
    out
}

/// Root pattern of a nonzero binary quartic over `F_p`.
pub fn classify_quartic_pattern(p: u64, f: &[u64; 5]) -> Result<RootPattern> {
    if f.iter().all(|c| c % p == 0) {
        return domain("zero quartic has no root pattern");
    }
    let mut mults = root_multiplicities(p, f);
    mults.sort_unstable();
    Ok(match mults.as_slice() {
        [] => RootPattern::NoRoots,
        m if m.contains(&1) => RootPattern::SimpleRoot,
        [2] => RootPattern::OneDouble,
        [2, 2] => RootPattern::TwoDoubles,
        [4] => RootPattern::QuadrupleRoot,
        other => return Err(Error::Internal(format!("impossible multiplicities {other:?}"))),
    })
}

fn digits<const N: usize>(mut idx: u64, p: u64) -> [u64; N] {
    std::array::from_fn(|_| {
        let d = idx % p;
        idx /= p;
        d
    })
}

/// Counts the `p^8` pairs by factorization type, by exhaustive enumeration.
pub fn count_gbq_types(p: u64, restrict_star: bool) -> Result<CountTable> {
    check_prime(p)?;
    if p > GBQ_ENUMERATION_CAP {
        return Err(Error::Capability(format!(
            "enumeration of generalized binary quartics is limited to p <= {GBQ_ENUMERATION_CAP}; use the formula tables"
        )));
    }
    let per_h = p.pow(5);
    let counts = (0..p.pow(3))
        .into_par_iter()
        .map(|hi| {
            let h = digits::<3>(hi, p);
            let mut c = [0u128; 4];
            for fi in 0..per_h {
                let q = FpGBQ { p, h, f: digits::<5>(fi, p) };
                if restrict_star && !satisfies_star(&q) {
                    continue;
                }
                c[classify_gbq_type(&q) as usize - 1] += 1;
            }
            c
        })
        .reduce(|| [0; 4], |a, b| std::array::from_fn(|i| a[i] + b[i]));
    Ok(CountTable {
        p,
        labels: FactorizationType::ALL.iter().map(|t| t.label()).collect(),
        counts: counts.to_vec(),
        total: counts.iter().sum(),
    })
}

/// Counts quartics by root pattern: all monic quartics, or nonzero quartics
/// up to scaling (first nonzero coefficient equal to 1).
pub fn count_quartic_patterns(p: u64, monic: bool) -> Result<CountTable> {
    check_prime(p)?;
    if p > QUARTIC_ENUMERATION_CAP {
        return Err(Error::Capability(format!(
            "enumeration of quartics is limited to p <= {QUARTIC_ENUMERATION_CAP}; use the formula tables"
        )));
    }
    let counts = (0..p.pow(5))
        .into_par_iter()
        .filter_map(|idx| {
            let mut f = digits::<5>(idx, p);
            f.reverse();
            let first = f.iter().copied().find(|&c| c != 0)?;
            let keep = if monic { f[0] == 1 } else { first == 1 };
            keep.then(|| classify_quartic_pattern(p, &f).expect("nonzero form"))
        })
        .fold(
            || [0u128; 5],
            |mut acc, pat| {
                acc[pat as usize] += 1;
                acc
            },
        )
        .reduce(|| [0; 5], |a, b| std::array::from_fn(|i| a[i] + b[i]));
    Ok(CountTable {
        p,
        labels: RootPattern::ALL.iter().map(|t| t.label()).collect(),
        counts: counts.to_vec(),
        total: counts.iter().sum(),
    })
}

fn check_formula_prime(p: u64) -> Result<u128> {
    check_prime(p)?;
    if p > FORMULA_CAP {
        return Err(Error::Capability(format!("formula tables are limited to p <= {FORMULA_CAP}")));
    }
    Ok(p as u128)
}

/// Closed-form factorization type counts.
pub fn gbq_type_formulas(p: u64, restrict_star: bool) -> Result<CountTable> {
    let p128 = check_formula_prime(p)?;
    let q = p128;
    let counts = if restrict_star {
        vec![q.pow(5) * (q * q - 1) * (q - 1) / 2, 0, q.pow(5) * (q - 1) / 2, 0]
    } else {
        vec![q.pow(6) * (q * q - 1), q.pow(3) * (q.pow(3) - 1) / 2, q.pow(3) * (q.pow(3) - 1) / 2, q.pow(3)]
    };
    let total = if restrict_star { q.pow(7) * (q - 1) / 2 } else { q.pow(8) };
    Ok(CountTable {
        p,
        labels: FactorizationType::ALL.iter().map(|t| t.label()).collect(),
        counts,
        total,
    })
}

/// Closed-form root pattern counts.
pub fn quartic_pattern_formulas(p: u64, monic: bool) -> Result<CountTable> {
    let q = check_formula_prime(p)?;
    let counts = if monic {
        vec![
            q * (q - 1) * (3 * q * q + q + 2) / 8,
            q * (q - 1) * (5 * q * q + 3 * q + 2) / 8,
            q * q * (q - 1) / 2,
            q * (q - 1) / 2,
            q,
        ]
    } else {
        vec![
            q * (q - 1) * (3 * q * q + q + 2) / 8,
            q * (q + 1) * (5 * q * q + q + 2) / 8,
            q * (q * q - 1) / 2,
            q * (q + 1) / 2,
            q + 1,
        ]
    };
    let total = if monic { q.pow(4) } else { q.pow(4) + q.pow(3) + q * q + q + 1 };
    Ok(CountTable {
        p,
        labels: RootPattern::ALL.iter().map(|t| t.label()).collect(),
        counts,
        total,
    })
}
