use locsol_core::assembly::*;
use locsol_core::exactmath::{rat, DEFAULT_PRECISION};
use locsol_core::primes::primes_up_to;
use locsol_core::recursion::{closed_forms, local_density, r_function};
use locsol_core::{Dyadic, ModelKind, Rational};
use num_bigint::BigInt;

/// One unit in the last place at 128 bits, for values below 1.
fn ulp() -> Rational {
    Rational::new(BigInt::from(1), BigInt::from(1) << 127usize)
}

#[test]
fn tail_examples() {
    let one = Rational::from_integer(1.into());
    for (pmax, lo) in [(10u64, rat(37, 40)), (10_000, one.clone() - rat(3, 40_000))] {
        let t = tail_bound(pmax, DEFAULT_PRECISION).unwrap();
        assert!(t.contains(&lo) && t.contains(&one));
        assert!(t.lo().to_rational() >= &lo - ulp());
        assert_eq!(t.hi(), &Dyadic::one());
    }
    assert!(tail_bound(2, DEFAULT_PRECISION).is_err());
    assert!(tail_bound(0, DEFAULT_PRECISION).is_err());
}

#[test]
fn tail_encloses_partial_products() {
    // prod_{P < p <= 5000} R(p) must already sit inside the tail interval
    for pmax in [3u64, 10, 101] {
        let tail = tail_bound(pmax, DEFAULT_PRECISION).unwrap();
        let (mut num, mut den) = (BigInt::from(1), BigInt::from(1));
        for p in primes_up_to(5000).into_iter().filter(|&p| p > pmax) {
            let r = local_density(p, ModelKind::PlainBQ).unwrap();
            num *= r.numer();
            den *= r.denom();
        }
        assert!(tail.contains(&Rational::new(num, den)));
    }
}

#[test]
fn finite_product_examples() {
    let p2 = finite_product(2, ModelKind::PlainBQ, 128).unwrap();
    assert!(p2.contains(&rat(23087, 24528)));
    let p3 = finite_product(3, ModelKind::GeneralizedBQ, 128).unwrap();
    assert!(p3.contains(&(rat(1625, 1752) * rat(151285, 157456))));
    assert!(finite_product(1, ModelKind::PlainBQ, 128).is_err());
}

#[test]
fn finite_product_is_exact_and_narrow() {
    // independent routes: the rational function R, and for small p the
    // full closed-form report
    let r = r_function();
    let reports: Vec<(u64, Rational)> = primes_up_to(1000)
        .into_iter()
        .map(|p| {
            let via_ratfn = r.eval(&Rational::from_integer(p.into())).unwrap();
            if p < 30 {
                assert_eq!(closed_forms(p).unwrap().rho, via_ratfn);
            }
            (p, via_ratfn)
        })
        .collect();
    for model in [ModelKind::PlainBQ, ModelKind::GeneralizedBQ] {
        let mut exact = Rational::from_integer(1.into());
        let mut count = 0u32;
        let mut checkpoints = [2u64, 50, 300, 1000].into_iter().peekable();
        for (p, rho) in &reports {
            let p = *p;
            let rp = match (model, p) {
                (ModelKind::PlainBQ, 2) => rat(23087, 24528),
                _ => rho.clone(),
            };
            exact *= rp;
            count += 1;
            let next_prime_exceeds = |c: u64| primes_up_to(c).last() == Some(&p);
            while let Some(&c) = checkpoints.peek() {
                if !next_prime_exceeds(c) {
                    break;
                }
                checkpoints.next();
                let iv = finite_product(c, model, 128).unwrap();
                assert!(iv.contains(&exact), "{model} P={c}");
                let bound = Rational::from_integer(count.into()) * Rational::new(2.into(), BigInt::from(1) << 128usize);
                assert!(iv.width().to_rational() <= bound, "{model} P={c}");
            }
        }
    }
}

#[test]
fn enclosures_nest_as_p_grows() {
    let real = RealPart::given(&rat(873954, 1_000_000), &rat(874124, 1_000_000), true, 128);
    let mut prev: Option<GlobalReport> = None;
    for pmax in [3u64, 10, 100, 1000, 10_000] {
        let r = rho_interval(ModelKind::PlainBQ, real.clone(), pmax, 128).unwrap();
        assert!(r.rigorous);
        if let Some(p) = &prev {
            assert!(p.rho.contains_interval(&r.rho), "P={pmax}");
        }
        prev = Some(r);
    }
}

#[test]
fn global_enclosures() {
    let real = RealPart::given(&rat(873954, 1_000_000), &rat(874124, 1_000_000), true, 128);
    let r = rho_interval(ModelKind::PlainBQ, real, 100_000, 128).unwrap();
    assert!(r.rho.contains(&rat(75965, 100_000)));
    assert!(r.rho.lo().to_rational() >= rat(7590, 10_000) && r.rho.hi().to_rational() <= rat(7602, 10_000));

    let est = RealPart::given(&rat(871743, 1_000_000), &rat(875743, 1_000_000), false, 128);
    let g = rho_interval(ModelKind::GeneralizedBQ, est, 10_000, 128).unwrap();
    assert!(g.rho.contains(&rat(748248, 1_000_000)));
    assert!(!g.rigorous);

    // a rigorous real factor does not make the generalized model rigorous
    let trusted = RealPart::given(&rat(87, 100), &rat(88, 100), true, 128);
    assert!(!rho_interval(ModelKind::GeneralizedBQ, trusted, 10, 128).unwrap().rigorous);
}

#[test]
fn json_round_trips() {
    let real = RealPart::given(&rat(873954, 1_000_000), &rat(874124, 1_000_000), true, 128);
    let r = rho_interval(ModelKind::PlainBQ, real, 1000, 128).unwrap();
    let v = r.to_json(6);
    for key in ["model", "real_part", "finite_product", "tail", "rho", "rigorous"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    let lo: Dyadic = v["rho"]["lo"]["exact"].as_str().unwrap().parse().unwrap();
    let hi: Dyadic = v["rho"]["hi"]["exact"].as_str().unwrap().parse().unwrap();
    assert_eq!((&lo, &hi), (r.rho.lo(), r.rho.hi()));
    assert_eq!(serde_json::to_string(&v).unwrap(), serde_json::to_string(&r.to_json(6)).unwrap());
}
