//! The density recursion for `z^2 + h z = f` over `Z_p`.
//!
//! The same system is solved over `Q` for a fixed prime and over `Q(t)` with
//! `t` standing for `p`, so one code path drives both [`solve_recursion`] and
//! [`solve_recursion_symbolic`].

use std::fmt::Debug;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::exactmath::{Poly, RatFn, Rational};
use crate::model::ModelKind;
use crate::primes::is_prime;

/// The minimal field interface the recursion needs.
pub trait Field: Clone + PartialEq + Debug {
    fn from_int(n: i64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    /// `None` on division by zero.
    fn div(&self, o: &Self) -> Option<Self>;

    fn ratio(n: i64, d: i64) -> Self {
        Self::from_int(n).div(&Self::from_int(d)).expect("nonzero literal denominator")
    }

    fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::from_int(1), |acc, _| acc.mul(self))
    }

    /// Evaluates an integer polynomial (lowest degree first) at `self`.
    fn poly(&self, coeffs: &[i64]) -> Self {
        coeffs
            .iter()
            .rev()
            .fold(Self::from_int(0), |acc, &c| acc.mul(self).add(&Self::from_int(c)))
    }
}

impl Field for Rational {
    fn from_int(n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Option<Self> {
        if o.is_zero() {
            None
        } else {
            Some(self / o)
        }
    }
}

impl Field for RatFn {
    fn from_int(n: i64) -> Self {
        RatFn::from_int(n)
    }
    fn add(&self, o: &Self) -> Self {
        RatFn::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        RatFn::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        RatFn::mul(self, o)
    }
    fn div(&self, o: &Self) -> Option<Self> {
        o.inv().map(|i| RatFn::mul(self, &i))
    }
}

/// Every probability of the recursion for one prime (or for symbolic `t`).
///
/// Index conventions: `xi[i]` is `xi_{i+1}`, `sigma[i]` is `sigma_{i+1}`,
/// `eta[i]` and `tau[i]` are indexed from zero, and the chains hold
/// `lambda_1..lambda_7` and `nu_1..nu_7`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityReport<T = Rational> {
    pub p: T,
    pub xi: [T; 4],
    pub xi_star: [T; 4],
    pub eta: [T; 5],
    pub eta_prime: [T; 5],
    pub alpha: T,
    pub beta: T,
    pub alpha_prime: T,
    pub beta_prime: T,
    pub tau: [T; 5],
    pub lambda_chain: [T; 7],
    pub nu_chain: [T; 7],
    pub lambda: T,
    pub rho_star: T,
    pub sigma: [T; 4],
    pub sigma3_star: T,
    pub sigma4_prime: T,
    pub rho: T,
}

impl<T: Field> DensityReport<T> {
    /// All fields paired with their names, in a fixed order.
    pub fn fields(&self) -> Vec<(String, &T)> {
        let mut out: Vec<(String, &T)> = vec![("p".into(), &self.p)];
        for (i, x) in self.xi.iter().enumerate() {
            out.push((format!("xi{}", i + 1), x));
        }
        for (i, x) in self.xi_star.iter().enumerate() {
            out.push((format!("xi{}*", i + 1), x));
        }
        for (i, x) in self.eta.iter().enumerate() {
            out.push((format!("eta{i}"), x));
        }
        for (i, x) in self.eta_prime.iter().enumerate() {
            out.push((format!("eta{i}'"), x));
        }
        out.push(("alpha".into(), &self.alpha));
        out.push(("beta".into(), &self.beta));
        out.push(("alpha'".into(), &self.alpha_prime));
        out.push(("beta'".into(), &self.beta_prime));
        for (i, x) in self.tau.iter().enumerate() {
            out.push((format!("tau{i}"), x));
        }
        for (i, x) in self.lambda_chain.iter().enumerate() {
            out.push((format!("lambda{}", i + 1), x));
        }
        for (i, x) in self.nu_chain.iter().enumerate() {
            out.push((format!("nu{}", i + 1), x));
        }
        out.push(("lambda".into(), &self.lambda));
        out.push(("rho*".into(), &self.rho_star));
        for (i, x) in self.sigma.iter().enumerate() {
            out.push((format!("sigma{}", i + 1), x));
        }
        out.push(("sigma3*".into(), &self.sigma3_star));
        out.push(("sigma4'".into(), &self.sigma4_prime));
        out.push(("rho".into(), &self.rho));
        out
    }
}

/// Probabilities of the four factorization types, unrestricted and under the
/// irreducibility condition on `z^2 + l z - a`.
fn xi_tables<T: Field>(p: &T) -> ([T; 4], [T; 4]) {
    let p2 = p.pow(2);
    let p5 = p.pow(5);
    let half_p3m1 = p.pow(3).sub(&T::from_int(1)).mul(&T::ratio(1, 2));
    let xi = [
        p2.sub(&T::from_int(1)).div(&p2).unwrap(),
        half_p3m1.div(&p5).unwrap(),
        half_p3m1.div(&p5).unwrap(),
        T::from_int(1).div(&p5).unwrap(),
    ];
    let xi_star = [
        p2.sub(&T::from_int(1)).div(&p2).unwrap(),
        T::from_int(0),
        T::from_int(1).div(&p2).unwrap(),
        T::from_int(0),
    ];
    (xi, xi_star)
}

/// Root-pattern probabilities of a random nonzero quartic (`eta`) and of a
/// random monic quartic (`eta_prime`).
fn eta_tables<T: Field>(p: &T) -> ([T; 5], [T; 5]) {
    let eighth = T::ratio(1, 8);
    let half = T::ratio(1, 2);
    let pm1 = p.sub(&T::from_int(1));
    let pp1 = p.add(&T::from_int(1));
    let up_to_scaling = [
        p.mul(&pm1).mul(&p.poly(&[2, 1, 3])).mul(&eighth),
        p.mul(&pp1).mul(&p.poly(&[2, 1, 5])).mul(&eighth),
        p.mul(&p.pow(2).sub(&T::from_int(1))).mul(&half),
        p.mul(&pp1).mul(&half),
        pp1.clone(),
    ];
    let monic = [
        p.mul(&pm1).mul(&p.poly(&[2, 1, 3])).mul(&eighth),
        p.mul(&pm1).mul(&p.poly(&[2, 3, 5])).mul(&eighth),
        p.pow(2).mul(&pm1).mul(&half),
        p.mul(&pm1).mul(&half),
        p.clone(),
    ];
    // a class up to scaling holds p - 1 nonzero forms out of p^5 - 1
    let classes = p.pow(5).sub(&T::from_int(1)).div(&pm1).unwrap();
    let p4 = p.pow(4);
    let eta = up_to_scaling.map(|c| c.div(&classes).unwrap());
    let eta_prime = monic.map(|c| c.div(&p4).unwrap());
    (eta, eta_prime)
}

fn lambda_chain<T: Field>(p: &T, beta_prime: &T, lambda7: &T) -> [T; 7] {
    let q = T::from_int(1).div(p).unwrap();
    let one_q = T::from_int(1).sub(&q);
    let half_one_q = one_q.mul(&T::ratio(1, 2));
    let l7 = lambda7.clone();
    let l6 = q.mul(&l7);
    let l5 = one_q.add(&q.mul(&l6));
    let l4 = one_q.mul(beta_prime).add(&q.mul(&l5));
    let l3 = half_one_q.add(&q.mul(&l4));
    let l2 = one_q.add(&q.mul(&l3));
    let l1 = q.mul(&l2);
    [l1, l2, l3, l4, l5, l6, l7]
}

fn nu_chain<T: Field>(p: &T, alpha: &T, nu7: &T) -> [T; 7] {
    let q = T::from_int(1).div(p).unwrap();
    let one_q = T::from_int(1).sub(&q);
    let half_one_q = one_q.mul(&T::ratio(1, 2));
    let n7 = nu7.clone();
    let n6 = half_one_q.add(&q.mul(&n7));
    let n5 = one_q.add(&q.mul(&n6));
    let n4 = half_one_q.mul(alpha).add(&half_one_q).add(&q.mul(&n5));
    let n3 = q.mul(&n4);
    let n2 = one_q.add(&q.mul(&n3));
    let n1 = half_one_q.add(&q.mul(&n2));
    [n1, n2, n3, n4, n5, n6, n7]
}

/// Writes a chain value affine in its last entry as `c0 + c1 * last`.
fn affine<T: Field>(f: impl Fn(&T) -> T) -> (T, T) {
    let c0 = f(&T::from_int(0));
    let c1 = f(&T::from_int(1)).sub(&c0);
    (c0, c1)
}

fn singular() -> Error {
    Error::Internal("singular recursion system".into())
}

/// `sigma_3^*` as a function of `lambda`.
fn sigma3_star_of<T: Field>(p: &T, beta: &T, lambda: &T) -> T {
    let one = T::from_int(1);
    let split = p.sub(&one).div(&p.mul(&T::from_int(2))).unwrap();
    let lifts_one = one.sub(&one.sub(beta).pow(2));
    split.mul(&lifts_one).add(&lambda.div(p).unwrap())
}

/// `sigma_3` as a function of `lambda`.
fn sigma3_of<T: Field>(p: &T, lambda: &T) -> T {
    let one = T::from_int(1);
    let p2m1 = p.pow(2).sub(&one);
    let p3m1 = p.pow(3).sub(&one);
    let pp1 = p.add(&one);
    let first = p
        .mul(&p2m1)
        .div(&p3m1.mul(&T::from_int(2)))
        .unwrap()
        .mul(&p.poly(&[1, 2]).div(&pp1.pow(2)).unwrap());
    first.add(&p2m1.div(&p3m1).unwrap().mul(lambda))
}

/// `sigma_4'` as a function of `tau_4`.
fn sigma4_prime_of<T: Field>(eta_prime: &[T; 5], tau4: &T) -> T {
    eta_prime[1]
        .add(&eta_prime[2].mul(&T::ratio(1, 2)))
        .add(&eta_prime[3].mul(&T::ratio(3, 4)))
        .add(&eta_prime[4].mul(tau4))
}

/// Solves the recursion over any field, given `p` as a field element.
pub fn solve_generic<T: Field>(p: &T) -> Result<DensityReport<T>> {
    let one = T::from_int(1);
    let (xi, xi_star) = xi_tables(p);
    let (eta, eta_prime) = eta_tables(p);
    let q = one.div(p).ok_or_else(singular)?;
    let one_q = one.sub(&q);

    // alpha = (1 - q) + q beta, beta = q alpha
    let alpha = one_q.div(&one.sub(&q.pow(2))).ok_or_else(singular)?;
    let beta = q.mul(&alpha);
    // alpha' = (1 - q)/2 + q beta', beta' = (1 - q)/2 + q alpha'
    let half_one_q = one_q.mul(&T::ratio(1, 2));
    let alpha_prime = half_one_q.div(&one_q).ok_or_else(singular)?;
    let beta_prime = half_one_q.add(&q.mul(&alpha_prime));

    // lambda = lambda_1 is affine in lambda_7 = rho*,
    // rho* = xi1* + xi3* sigma3*(lambda)
    let (l0, l1) = affine(|r: &T| lambda_chain(p, &beta_prime, r)[0].clone());
    let s0 = sigma3_star_of(p, &beta, &l0);
    let s1 = sigma3_star_of(p, &beta, &l0.add(&l1)).sub(&s0);
    let rho_star = xi_star[0]
        .add(&xi_star[2].mul(&s0))
        .div(&one.sub(&xi_star[2].mul(&s1)))
        .ok_or_else(singular)?;
    let lambda_chain = lambda_chain(p, &beta_prime, &rho_star);
    let lambda = lambda_chain[0].clone();
    let sigma3_star = sigma3_star_of(p, &beta, &lambda);
    let sigma3 = sigma3_of(p, &lambda);

    // tau_4 = nu_1 is affine in nu_7 = sigma4'(tau_4)
    let (n0, n1) = affine(|s: &T| nu_chain(p, &alpha, s)[0].clone());
    let k0 = sigma4_prime_of(&eta_prime, &T::from_int(0));
    let tau4 = n0
        .add(&n1.mul(&k0))
        .div(&one.sub(&n1.mul(&eta_prime[4])))
        .ok_or_else(singular)?;
    let sigma4_prime = sigma4_prime_of(&eta_prime, &tau4);
    let nu_chain = nu_chain(p, &alpha, &sigma4_prime);
    let tau = [T::from_int(0), one.clone(), T::ratio(1, 2), T::ratio(3, 4), tau4];

    // sigma4 = rho/p^5 + (1 - 1/p^5) sum eta_i tau_i, rho = sum xi_i sigma_i
    let mixed = eta.iter().zip(&tau).fold(T::from_int(0), |acc, (e, t)| acc.add(&e.mul(t)));
    let inv_p5 = one.div(&p.pow(5)).ok_or_else(singular)?;
    let rest = one.sub(&inv_p5).mul(&mixed);
    let rho = xi[0]
        .add(&xi[1])
        .add(&xi[2].mul(&sigma3))
        .add(&xi[3].mul(&rest))
        .div(&one.sub(&xi[3].mul(&inv_p5)))
        .ok_or_else(singular)?;
    let sigma4 = rho.mul(&inv_p5).add(&rest);

    Ok(DensityReport {
        p: p.clone(),
        xi,
        xi_star,
        eta,
        eta_prime,
        alpha,
        beta,
        alpha_prime,
        beta_prime,
        tau,
        lambda_chain,
        nu_chain,
        lambda,
        rho_star,
        sigma: [one.clone(), one, sigma3, sigma4],
        sigma3_star,
        sigma4_prime,
        rho,
    })
}

/// The displayed closed forms, evaluated over any field.
pub fn closed_forms_generic<T: Field>(p: &T) -> DensityReport<T> {
    let one = T::from_int(1);
    let (xi, xi_star) = xi_tables(p);
    let (eta, eta_prime) = eta_tables(p);
    let pm1 = p.sub(&one);
    let pp1 = p.add(&one);
    let p3m1 = p.pow(3).sub(&one);
    let p9m1 = p.pow(9).sub(&one);
    let d2 = pp1.pow(2).mul(&p9m1).mul(&T::from_int(2));
    let d8 = pp1.mul(&p9m1).mul(&T::from_int(8));
    let div = |a: T, b: &T| a.div(b).expect("closed form denominators vanish only at p = 0, 1, -1");

    let alpha = div(p.clone(), &pp1);
    let beta = div(one.clone(), &pp1);
    let half = T::ratio(1, 2);
    let sigma3 = div(
        pm1.pow(2).mul(&p.poly(&[1, 4, 5, 4, 3, 5, 3, 5, 3, 2])),
        &p3m1.mul(&p9m1).mul(&T::from_int(2)),
    );
    let sigma3_star = div(pm1.mul(&p.poly(&[2, 6, 6, 4, 5, 5, 5, 5, 3, 2])), &d2);
    let rho_star = div(p.mul(&pm1).mul(&p.poly(&[2, 5, 5, 5, 5, 3, 4, 6, 6, 2])), &d2);
    let lambda = div(p.poly(&[-1, -3, -2, 0, 2, -1, 0, 0, 0, 3, 2]), &d2);
    let tau4 = div(p.poly(&[-5, -5, 0, 1, -3, 0, 4, 0, -4, 8, 4]), &d8);
    let sigma4_prime = div(p.poly(&[-4, -8, 0, 4, 0, -4, 3, -1, 0, 5, 5]), &d8);
    let sigma4 = div(p.poly(&[-6, -10, 0, 4, 0, -3, 2, -1, 1, 8, 5]), &d8);
    let rho = div(p.poly(&[-5, -8, -1, 1, -2, 1, 2, 0, -4, 8, 8]), &d8);

    let lambda_chain = lambda_chain(p, &half, &rho_star);
    let nu_chain = nu_chain(p, &alpha, &sigma4_prime);
    DensityReport {
        p: p.clone(),
        xi,
        xi_star,
        eta,
        eta_prime,
        alpha,
        beta,
        alpha_prime: half.clone(),
        beta_prime: half.clone(),
        tau: [T::from_int(0), one.clone(), half, T::ratio(3, 4), tau4],
        lambda_chain,
        nu_chain,
        lambda,
        rho_star,
        sigma: [one.clone(), one, sigma3, sigma4],
        sigma3_star,
        sigma4_prime,
        rho,
    }
}

fn prime_element(p: u64) -> Result<Rational> {
    if !is_prime(p) {
        return domain(format!("{p} is not prime"));
    }
    Ok(Rational::from_integer(BigInt::from(p)))
}

/// Exact closed forms at a prime.
pub fn closed_forms(p: u64) -> Result<DensityReport> {
    Ok(closed_forms_generic(&prime_element(p)?))
}

/// Solves the system at a prime by back-substitution.
pub fn solve_recursion(p: u64) -> Result<DensityReport> {
    solve_generic(&prime_element(p)?)
}

/// Solves the system over `Q(t)`.
pub fn solve_recursion_symbolic() -> Result<DensityReport<RatFn>> {
    solve_generic(&RatFn::t())
}

/// `R(t) = 1 - (4t^7+4t^6+2t^5+t^4+3t^3+2t^2+3t+3) / (8(t+1)(t^2+t+1)(t^6+t^3+1))`.
pub fn r_function() -> RatFn {
    let n = Poly::from_ints(&[3, 3, 2, 3, 1, 2, 4, 4]);
    let d = &(&Poly::from_ints(&[1, 1]) * &Poly::from_ints(&[1, 1, 1]))
        * &Poly::from_ints(&[1, 0, 0, 1, 0, 0, 1]);
    let d = d.scale(&Rational::from_integer(BigInt::from(8)));
    RatFn::from_int(1).sub(&RatFn::new(n, d))
}

/// `R(p)` by integer Horner evaluation; equal to `r_function()` at `p`.
pub fn r_value(p: u64) -> Rational {
    let horner = |c: &[i64]| c.iter().rev().fold(BigInt::zero(), |acc, &k| acc * p + k);
    let num = horner(&[3, 3, 2, 3, 1, 2, 4, 4]);
    let den = BigInt::from(8) * horner(&[1, 1]) * horner(&[1, 1, 1]) * horner(&[1, 0, 0, 1, 0, 0, 1]);
    Rational::new(&den - num, den)
}

/// The local density at `p` for the given model.
pub fn local_density(p: u64, model: ModelKind) -> Result<Rational> {
    prime_element(p)?;
    match (model, p) {
        (ModelKind::PlainBQ, 2) => {
            let s4 = solve_recursion(2)?.sigma[3].clone();
            Ok(Rational::new(3.into(), 4.into()) + s4 / Rational::from_integer(4.into()))
        }
        _ => Ok(r_value(p)),
    }
}

/// `true` when every field lies in `[0, 1]`.
pub fn all_probabilities(report: &DensityReport) -> bool {
    report
        .fields()
        .into_iter()
        .filter(|(name, _)| name != "p")
        .all(|(_, v)| *v >= Rational::zero() && *v <= Rational::one())
}
