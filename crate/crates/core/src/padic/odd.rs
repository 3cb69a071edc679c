//! Odd `p`: `z^2 + hz = f` has a point over `Q_p` exactly when
//! `D = h^2 + 4f` takes a square value at some primitive `(x, y)`, since
//! `z = (-h + sqrt D) / 2`. The search refines `t` in one chart variable.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{certify, inv_mod, is_qr, min_val, pow_big, residue, sqrt_mod, val, Chart, GBQInt, SolubilityVerdict, VerdictKind, Witness, NODE_BUDGET};

/// `g(t')` with `t = off + p^e t'`, where `D(t) = p^scale g(t')`.
struct UNode {
    g: Vec<BigInt>,
    off: BigInt,
    e: u32,
    scale: u32,
    prec: Option<u32>,
    depth: u32,
}

enum Hit {
    /// `t' = 0` gives `D = 0` exactly.
    Exact,
    /// `t' = r` gives `D = p^even * square unit`.
    Unit(u64),
    /// `r` is a simple root of `gbar`.
    SimpleRoot(u64),
}

enum Outcome {
    Soluble(UNode, Hit),
    Insoluble,
    Undecided,
}

fn eval(c: &[BigInt], x: &BigInt) -> BigInt {
    c.iter().rev().fold(BigInt::zero(), |acc, ci| acc * x + ci)
}

fn deriv_eval(c: &[BigInt], x: &BigInt) -> BigInt {
    c.iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(BigInt::zero(), |acc, (i, ci)| acc * x + ci * BigInt::from(i))
}

/// `c(x0 + p t)` by repeated synthetic division (Taylor shift), then scaling.
fn shift_scale(c: &[BigInt], x0: &BigInt, p: &BigInt) -> Vec<BigInt> {
    let mut a = c.to_vec();
    let n = a.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let t = &a[j + 1] * x0;
            a[j] += t;
        }
    }
    let mut pk = BigInt::one();
    for ai in a.iter_mut() {
        *ai *= &pk;
        pk *= p;
    }
    a
}

struct Search {
    p: u64,
    pb: BigInt,
    max_depth: u32,
    nodes: usize,
    deepest: u32,
}

impl Search {
    fn explore(&mut self, mut node: UNode) -> Outcome {
        let p = self.p;
        self.deepest = self.deepest.max(node.depth);
        self.nodes += 1;
        let Some(v) = min_val(&node.g, p) else {
            return if node.prec.is_none() { Outcome::Soluble(node, Hit::Exact) } else { Outcome::Undecided };
        };
        if let Some(prec) = node.prec {
            if v >= prec {
                return Outcome::Undecided;
            }
            node.prec = Some(prec - v);
        }
        if v > 0 {
            let d = pow_big(p, v);
            node.g.iter_mut().for_each(|c| *c /= &d);
            node.scale += v;
        }
        if node.prec.is_none() && node.g.first().is_none_or(Zero::is_zero) {
            return Outcome::Soluble(node, Hit::Exact);
        }
        if node.depth > self.max_depth || self.nodes > NODE_BUDGET {
            return Outcome::Undecided;
        }
        let r: Vec<u64> = node.g.iter().map(|c| residue(c, p)).collect();
        let even = node.scale % 2 == 0;
        let mut roots = Vec::new();
        for x0 in 0..p {
            let value = eval_mod(&r, x0, p);
            if value != 0 {
                if even && is_qr(value, p) {
                    return Outcome::Soluble(node, Hit::Unit(x0));
                }
                continue;
            }
            if deriv_mod(&r, x0, p) != 0 {
                return Outcome::Soluble(node, Hit::SimpleRoot(x0));
            }
            roots.push(x0);
        }
        let mut undecided = false;
        for x0 in roots {
            let x0b = BigInt::from(x0);
            let child = UNode {
                g: shift_scale(&node.g, &x0b, &self.pb),
                off: &node.off + pow_big(p, node.e) * &x0b,
                e: node.e + 1,
                scale: node.scale,
                prec: node.prec,
                depth: node.depth + 1,
            };
            match self.explore(child) {
                s @ Outcome::Soluble(..) => return s,
                Outcome::Undecided => undecided = true,
                Outcome::Insoluble => {}
            }
        }
        if undecided {
            Outcome::Undecided
        } else {
            Outcome::Insoluble
        }
    }
}

fn eval_mod(c: &[u64], x: u64, p: u64) -> u64 {
    let m = p as u128;
    c.iter().rev().fold(0u128, |acc, &ci| (acc * x as u128 + ci as u128) % m) as u64
}

fn deriv_mod(c: &[u64], x: u64, p: u64) -> u64 {
    let m = p as u128;
    c.iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(0u128, |acc, (i, &ci)| (acc * x as u128 + (ci as u128 * i as u128) % m) % m) as u64
}

/// The chart variable `t` of a soluble hit.
fn hit_point(p: u64, node: &UNode, hit: &Hit) -> BigInt {
    let local = match *hit {
        Hit::Exact => BigInt::zero(),
        Hit::Unit(r) => BigInt::from(r),
        Hit::SimpleRoot(r) => {
            // solve g(t') = p^j with j making the total exponent even
            let j = if node.scale % 2 == 0 { 2 } else { 1 };
            let target = pow_big(p, j);
            let modulus = pow_big(p, j + 3);
            let mut t = BigInt::from(r);
            for _ in 0..64 {
                let value = eval(&node.g, &t) - &target;
                if value.is_zero() || val(&value, p).unwrap() >= j + 2 {
                    break;
                }
                let d = deriv_eval(&node.g, &t);
                t = (t - value * inv_mod(&d, &modulus)).mod_floor(&modulus);
            }
            t
        }
    };
    &node.off + pow_big(p, node.e) * local
}

/// A Hensel witness at a primitive `(x, y)` where `D(x, y)` is a square.
pub(crate) fn witness_at(p: u64, q: &GBQInt, chart: Chart, x: BigInt, y: BigInt) -> Option<Witness> {
    let h = q.h_at(&x, &y);
    let d = &h * &h + BigInt::from(4) * q.f_at(&x, &y);
    if d.is_zero() {
        // z = -h/2 after scaling (x, y, z) by 2 in weights (1, 1, 2)
        let two = BigInt::from(2);
        return certify(p, q, chart, &x * &two, &y * &two, -(h * two));
    }
    let k2 = val(&d, p)?;
    if k2 % 2 == 1 {
        return None;
    }
    let k = k2 / 2;
    let unit = &d / pow_big(p, k2);
    let digits = 3;
    let m = pow_big(p, digits);
    let mut r = BigInt::from(sqrt_mod(residue(&unit, p), p));
    for _ in 0..8 {
        let e = (&r * &r - &unit).mod_floor(&m);
        if e.is_zero() {
            break;
        }
        r = (&r - e * inv_mod(&(&r * BigInt::from(2)), &m)).mod_floor(&m);
    }
    let w = pow_big(p, k) * r;
    let big_m = pow_big(p, 2 * k + digits);
    let z = ((w - h) * inv_mod(&BigInt::from(2), &big_m)).mod_floor(&big_m);
    certify(p, q, chart, x, y, z)
}

pub(crate) fn decide_odd(p: u64, q: &GBQInt, max_depth: u32, precision: Option<u32>, want_witness: bool) -> SolubilityVerdict {
    let d = q.discriminant_form();
    let pb = BigInt::from(p);
    let mut undecided = false;
    let mut deepest = 0;
    for chart in [Chart::A, Chart::B] {
        let (g, e) = match chart {
            Chart::A => ((0..5).map(|i| d[4 - i].clone()).collect::<Vec<_>>(), 0),
            Chart::B => ((0..5).map(|i| &d[i] * pow_big(p, i as u32)).collect(), 1),
        };
        let mut search = Search { p, pb: pb.clone(), max_depth, nodes: 0, deepest: 0 };
        let root = UNode { g, off: BigInt::zero(), e, scale: 0, prec: precision, depth: 1 };
        let outcome = search.explore(root);
        deepest = deepest.max(search.deepest);
        match outcome {
            Outcome::Soluble(node, hit) => {
                let witness = want_witness.then(|| {
                    let t = hit_point(p, &node, &hit);
                    let (x, y) = match chart {
                        Chart::A => (t, BigInt::one()),
                        Chart::B => (BigInt::one(), t),
                    };
                    witness_at(p, q, chart, x, y)
                });
                return SolubilityVerdict { kind: VerdictKind::Soluble, witness: witness.flatten(), depth_used: deepest };
            }
            Outcome::Undecided => undecided = true,
            Outcome::Insoluble => {}
        }
    }
    if undecided {
        SolubilityVerdict::undecided(deepest)
    } else {
        SolubilityVerdict { kind: VerdictKind::Insoluble, witness: None, depth_used: deepest }
    }
}
