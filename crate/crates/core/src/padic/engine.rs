//! Bivariate residue refinement on `G(X, Z) = 0` over `Z_p^2`.
//!
//! A node holds `G` together with the substitution that produced it. At each
//! node `G` is divided by its content, reduced mod `p`, and its `F_p`-points
//! are inspected: a smooth point lifts by Hensel's lemma, no points means no
//! zeros on the class, and otherwise the singular points are blown up:
//!
//! * `Gbar = c (Z - s(X))^2` is handled by the single shift `Z = s(X) + pZ`;
//! * a residue `x0` all of whose fibre points are singular is refined by
//!   `X = x0 + pX` alone;
//! * remaining singular points `(x0, z0)` are refined by
//!   `X = x0 + pX, Z = z0 + pZ`.
//!
//! `G` keeps `Z`-degree at most 2 with a constant `Z^2` coefficient, so every
//! substitution keeps the `X`-degrees bounded by those of the chart.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{certify, inv_mod, min_val, pow_big, residue, val, Chart, GBQInt, SolubilityVerdict, VerdictKind, NODE_BUDGET};

/// `rows[j][i]` is the coefficient of `Z^j X^i`.
#[derive(Clone, Debug)]
struct Biv {
    rows: [Vec<BigInt>; 3],
}

fn trim(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

fn poly_eval(c: &[BigInt], x: &BigInt) -> BigInt {
    c.iter().rev().fold(BigInt::zero(), |acc, ci| acc * x + ci)
}

fn poly_deriv_eval(c: &[BigInt], x: &BigInt) -> BigInt {
    c.iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(BigInt::zero(), |acc, (i, ci)| acc * x + ci * BigInt::from(i))
}

fn poly_add(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| a.get(i).cloned().unwrap_or_default() + b.get(i).cloned().unwrap_or_default())
            .collect(),
    )
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn poly_scale(a: &[BigInt], k: &BigInt) -> Vec<BigInt> {
    trim(a.iter().map(|x| x * k).collect())
}

/// `c(x0 + p X)`.
fn compose_shift(c: &[BigInt], x0: &BigInt, p: &BigInt) -> Vec<BigInt> {
    // Horner in the polynomial ring
    let lin = [x0.clone(), p.clone()];
    let mut acc: Vec<BigInt> = Vec::new();
    for ci in c.iter().rev() {
        acc = poly_add(&poly_mul(&acc, &lin), std::slice::from_ref(ci));
    }
    acc
}

impl Biv {
    fn from_chart(q: &GBQInt, chart: Chart, p: u64) -> Biv {
        let (h, f): (Vec<BigInt>, Vec<BigInt>) = match chart {
            // h(X, 1), f(X, 1): coefficient of X^i is h[2 - i], f[4 - i]
            Chart::A => ((0..3).map(|i| q.h[2 - i].clone()).collect(), (0..5).map(|i| q.f[4 - i].clone()).collect()),
            // h(1, pY), f(1, pY)
            Chart::B => (
                (0..3).map(|i| &q.h[i] * pow_big(p, i as u32)).collect(),
                (0..5).map(|i| &q.f[i] * pow_big(p, i as u32)).collect(),
            ),
        };
        Biv { rows: [trim(f.iter().map(|c| -c).collect()), trim(h), vec![BigInt::one()]] }
    }

    fn eval(&self, x: &BigInt, z: &BigInt) -> BigInt {
        let r: Vec<BigInt> = self.rows.iter().map(|row| poly_eval(row, x)).collect();
        (&r[2] * z + &r[1]) * z + &r[0]
    }

    fn dx(&self, x: &BigInt, z: &BigInt) -> BigInt {
        let r: Vec<BigInt> = self.rows.iter().map(|row| poly_deriv_eval(row, x)).collect();
        (&r[2] * z + &r[1]) * z + &r[0]
    }

    fn dz(&self, x: &BigInt, z: &BigInt) -> BigInt {
        BigInt::from(2) * poly_eval(&self.rows[2], x) * z + poly_eval(&self.rows[1], x)
    }

    fn content_val(&self, p: u64) -> Option<u32> {
        min_val(self.rows.iter().flatten(), p)
    }

    fn div_exact(&self, d: &BigInt) -> Biv {
        Biv { rows: self.rows.clone().map(|row| row.iter().map(|c| c / d).collect()) }
    }

    /// `X -> x0 + pX`.
    fn subst_x(&self, x0: &BigInt, p: &BigInt) -> Biv {
        Biv { rows: self.rows.clone().map(|row| compose_shift(&row, x0, p)) }
    }

    /// `Z -> s(X) + pZ`.
    fn subst_z(&self, s: &[BigInt], p: &BigInt) -> Biv {
        let [c0, c1, c2] = &self.rows;
        let s2 = poly_mul(s, s);
        let row0 = poly_add(&poly_add(c0, &poly_mul(c1, s)), &poly_mul(c2, &s2));
        let two_p = p * BigInt::from(2);
        let row1 = poly_add(&poly_scale(c1, p), &poly_scale(&poly_mul(c2, s), &two_p));
        let row2 = poly_scale(c2, &(p * p));
        Biv { rows: [row0, row1, row2] }
    }

    fn reduce(&self, p: u64) -> [Vec<u64>; 3] {
        self.rows.clone().map(|row| row.iter().map(|c| residue(c, p)).collect())
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

/// Original chart coordinates `X = x_off + p^x_exp X'` and
/// `Z = zs(X') + p^z_exp Z'`.
#[derive(Clone, Debug)]
struct Transform {
    x_off: BigInt,
    x_exp: u32,
    zs: Vec<BigInt>,
    z_exp: u32,
}

impl Transform {
    fn identity() -> Self {
        Transform { x_off: BigInt::zero(), x_exp: 0, zs: Vec::new(), z_exp: 0 }
    }

    fn after_x(&self, x0: &BigInt, p: u64) -> Self {
        let pb = BigInt::from(p);
        Transform {
            x_off: &self.x_off + pow_big(p, self.x_exp) * x0,
            x_exp: self.x_exp + 1,
            zs: compose_shift(&self.zs, x0, &pb),
            z_exp: self.z_exp,
        }
    }

    fn after_z(&self, s: &[BigInt], p: u64) -> Self {
        Transform {
            x_off: self.x_off.clone(),
            x_exp: self.x_exp,
            zs: poly_add(&self.zs, &poly_scale(s, &pow_big(p, self.z_exp))),
            z_exp: self.z_exp + 1,
        }
    }

    fn apply(&self, x: &BigInt, z: &BigInt, p: u64) -> (BigInt, BigInt) {
        (&self.x_off + pow_big(p, self.x_exp) * x, poly_eval(&self.zs, x) + pow_big(p, self.z_exp) * z)
    }
}

struct Node {
    g: Biv,
    t: Transform,
    /// Total power of `p` divided out so far.
    scale: u32,
    /// Digits of the coefficients known, `None` when exact.
    prec: Option<u32>,
    depth: u32,
}

enum Outcome {
    Soluble(Box<Node>, BigInt, BigInt, bool),
    Insoluble,
    Undecided,
}

struct Search<'a> {
    p: u64,
    pb: BigInt,
    q: &'a GBQInt,
    chart: Chart,
    max_depth: u32,
    nodes: usize,
    deepest: u32,
}

impl Search<'_> {
    fn explore(&mut self, mut node: Node) -> Outcome {
        let p = self.p;
        self.deepest = self.deepest.max(node.depth);
        self.nodes += 1;
        let Some(v) = node.g.content_val(p) else {
            // G vanishes identically: every point is a zero
            return if node.prec.is_none() {
                Outcome::Soluble(Box::new(node), BigInt::zero(), BigInt::zero(), true)
            } else {
                Outcome::Undecided
            };
        };
        if let Some(prec) = node.prec {
            if v >= prec {
                return Outcome::Undecided;
            }
            node.prec = Some(prec - v);
        }
        if v > 0 {
            node.g = node.g.div_exact(&pow_big(p, v));
            node.scale += v;
        }
        if node.prec.is_none() && node.g.eval(&BigInt::zero(), &BigInt::zero()).is_zero() {
            return Outcome::Soluble(Box::new(node), BigInt::zero(), BigInt::zero(), true);
        }
        if node.depth > self.max_depth || self.nodes > NODE_BUDGET {
            return Outcome::Undecided;
        }

        let r = node.g.reduce(p);
        let mut any_point = false;
        // children: (x0, Some(z0)) for point blow-ups, (x0, None) for X-only
        let mut children: Vec<(u64, Option<u64>)> = Vec::new();
        for x0 in 0..p {
            let c: Vec<u64> = r.iter().map(|row| eval_mod(row, x0, p)).collect();
            let d: Vec<u64> = r.iter().map(|row| deriv_mod(row, x0, p)).collect();
            let mut singular = Vec::new();
            for z0 in 0..p {
                let m = p as u128;
                let (zz, z) = (z0 as u128, z0 as u128);
                let value = (c[2] as u128 * zz % m * zz + c[1] as u128 * z + c[0] as u128) % m;
                if value != 0 {
                    continue;
                }
                any_point = true;
                let gz = (2 * c[2] as u128 * z + c[1] as u128) % m;
                let gx = (d[2] as u128 * zz % m * zz + d[1] as u128 * z + d[0] as u128) % m;
                if gz != 0 || gx != 0 {
                    let (x, z) = (BigInt::from(x0), BigInt::from(z0));
                    return Outcome::Soluble(Box::new(node), x, z, gz != 0);
                }
                singular.push(z0);
            }
            if singular.len() as u64 == p {
                children.push((x0, None));
            } else {
                children.extend(singular.into_iter().map(|z0| (x0, Some(z0))));
            }
        }
        if !any_point {
            return Outcome::Insoluble;
        }

        if let Some(s) = self.square_root_in_z(&r) {
            let child = Node {
                g: node.g.subst_z(&s, &self.pb),
                t: node.t.after_z(&s, p),
                scale: node.scale,
                prec: node.prec,
                depth: node.depth + 1,
            };
            return self.explore(child);
        }

        let mut undecided = false;
        for (x0, z0) in children {
            let x0b = BigInt::from(x0);
            let mut g = node.g.subst_x(&x0b, &self.pb);
            let mut t = node.t.after_x(&x0b, p);
            if let Some(z0) = z0 {
                let s = vec![BigInt::from(z0)];
                g = g.subst_z(&s, &self.pb);
                t = t.after_z(&s, p);
            }
            let child = Node { g, t, scale: node.scale, prec: node.prec, depth: node.depth + 1 };
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

    /// `s` with `Gbar = c (Z - s(X))^2` and `c` a unit, if it exists.
    fn square_root_in_z(&self, r: &[Vec<u64>; 3]) -> Option<Vec<BigInt>> {
        let p = self.p;
        let c2 = r[2].first().copied().unwrap_or(0);
        if c2 == 0 || r[2].iter().skip(1).any(|&c| c != 0) {
            return None;
        }
        let get = |row: &Vec<u64>, i: usize| row.get(i).copied().unwrap_or(0);
        let len = r[0].len().max(r[1].len() * 2).max(1);
        if p == 2 {
            // (Z + s)^2 = Z^2 + s(X)^2 and s^2 = s(X^2) over F_2
            if r[1].iter().any(|&c| c != 0) || (0..len).any(|i| i % 2 == 1 && get(&r[0], i) != 0) {
                return None;
            }
            return Some(trim((0..len.div_ceil(2)).map(|i| BigInt::from(get(&r[0], 2 * i))).collect()));
        }
        // c1^2 - 4 c2 c0 must vanish
        let m = p as u128;
        for k in 0..len {
            let mut acc = (m * m - (4 * c2 as u128 % m) * get(&r[0], k) as u128 % m) % m;
            for i in 0..=k {
                acc = (acc + get(&r[1], i) as u128 * get(&r[1], k - i) as u128) % m;
            }
            if acc != 0 {
                return None;
            }
        }
        let pb = BigInt::from(p);
        let inv = inv_mod(&BigInt::from(2 * c2), &pb);
        Some(trim(r[1].iter().map(|&c| (BigInt::from(p - c % p) * &inv).mod_floor(&pb)).collect()))
    }

    /// Lifts a smooth node point and maps it back to `(x, y, z)`.
    fn witness(&self, node: &Node, x0: BigInt, z0: BigInt, lift_z: bool, exact: bool) -> Option<super::Witness> {
        let p = self.p;
        let (mut x, mut z) = (x0, z0);
        let mut target = node.scale + node.t.x_exp + node.t.z_exp + 2;
        for _ in 0..6 {
            if !exact {
                let modulus = pow_big(p, target + 1);
                for _ in 0..64 {
                    let value = node.g.eval(&x, &z);
                    if value.is_zero() || val(&value, p).unwrap() >= target {
                        break;
                    }
                    let d = if lift_z { node.g.dz(&x, &z) } else { node.g.dx(&x, &z) };
                    let step = (value * inv_mod(&d, &modulus)).mod_floor(&modulus);
                    if lift_z {
                        z -= step;
                    } else {
                        x -= step;
                    }
                }
            }
            let (xo, zo) = node.t.apply(&x, &z, p);
            let (px, py) = match self.chart {
                Chart::A => (xo, BigInt::one()),
                Chart::B => (BigInt::one(), xo * BigInt::from(p)),
            };
            if let Some(w) = certify(p, self.q, self.chart, px, py, zo) {
                return Some(w);
            }
            target *= 2;
        }
        None
    }
}

/// Bivariate decision for any prime.
pub fn decide_generic_with_precision(
    p: u64,
    q: &GBQInt,
    max_depth: u32,
    precision: Option<u32>,
    want_witness: bool,
) -> SolubilityVerdict {
    let mut undecided = false;
    let mut deepest = 0;
    for chart in [Chart::A, Chart::B] {
        let mut search = Search { p, pb: BigInt::from(p), q, chart, max_depth, nodes: 0, deepest: 0 };
        let root = Node { g: Biv::from_chart(q, chart, p), t: Transform::identity(), scale: 0, prec: precision, depth: 1 };
        let outcome = search.explore(root);
        deepest = deepest.max(search.deepest);
        match outcome {
            Outcome::Soluble(node, x, z, lift_z) => {
                let exact = x.is_zero() && z.is_zero() && node.prec.is_none() && node.g.eval(&x, &z).is_zero();
                let witness = if want_witness { search.witness(&node, x, z, lift_z, exact) } else { None };
                return SolubilityVerdict { kind: VerdictKind::Soluble, witness, depth_used: deepest };
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
