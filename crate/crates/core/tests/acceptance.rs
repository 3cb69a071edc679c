//! End-to-end acceptance run. One PASS/FAIL line per criterion; the process
//! exits nonzero if any criterion fails.
//!
//! Run with `cargo test -p locsol-core --test acceptance`.

use std::time::{Duration, Instant};

use locsol_core::assembly::{rho_interval, RealPart};
use locsol_core::exactmath::{rat, Poly, RatFn};
use locsol_core::fpcount::{count_gbq_types, count_quartic_patterns};
use locsol_core::padic::{decide, monte_carlo_local_with_workers, sample, verify_witness, VerdictKind, DEFAULT_MAX_DEPTH};
use locsol_core::primes::first_primes;
use locsol_core::realvol::{
    collect_leaves, is_negative_definite, monte_carlo_real_with_workers, run_bounds, run_bounds_with, BoundsConfig,
    BoundsReport, BoxVerdict, Checkpoint, Method, Quartic5,
};
use locsol_core::recursion::{closed_forms, local_density, solve_recursion, solve_recursion_symbolic};
use locsol_core::{Dyadic, ModelKind, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn f(q: &Rational) -> f64 {
    locsol_core::exactmath::rational_to_f64(q)
}

fn field<'a>(r: &'a locsol_core::recursion::DensityReport, name: &str) -> &'a Rational {
    r.fields().into_iter().find(|(n, _)| n == name).unwrap_or_else(|| panic!("no field {name}")).1
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut mismatched = Vec::new();
    for p in first_primes(25) {
        if solve_recursion(p).unwrap() != closed_forms(p).unwrap() {
            mismatched.push(p);
        }
    }
    // 1 - N/(8D), typed in directly rather than taken from r_function
    let n = Poly::from_ints(&[3, 3, 2, 3, 1, 2, 4, 4]);
    let d = &(&Poly::from_ints(&[1, 1]) * &Poly::from_ints(&[1, 1, 1])) * &Poly::from_ints(&[1, 0, 0, 1, 0, 0, 1]);
    let d8 = d.scale(&Rational::from_integer(8.into()));
    let r = RatFn::new(&d8 - &n, d8);
    let symbolic_ok = solve_recursion_symbolic().unwrap().rho == r;
    let t = start.elapsed();
    check(
        mismatched.is_empty() && symbolic_ok && t < Duration::from_secs(5),
        format!("25 primes, mismatches {mismatched:?}, symbolic rho = R(t): {symbolic_ok}, {}", secs(t)),
    )
}

fn criterion_2() -> Outcome {
    let mut bad = Vec::new();
    let mut expect = |what: &str, got: &Rational, want: Rational| {
        if *got != want {
            bad.push(format!("{what}: {got} != {want}"));
        }
    };
    expect("rho'(2)", &local_density(2, ModelKind::GeneralizedBQ).unwrap(), rat(1625, 1752));
    expect("rho(2)", &local_density(2, ModelKind::PlainBQ).unwrap(), rat(23087, 24528));
    let two = solve_recursion(2).unwrap();
    expect("sigma4(2)", field(&two, "sigma4"), rat(4691, 6132));
    for p in first_primes(25) {
        let r = solve_recursion(p).unwrap();
        let p_i = p as i64;
        expect("tau2", field(&r, "tau2"), rat(1, 2));
        expect("tau3", field(&r, "tau3"), rat(3, 4));
        expect("alpha", field(&r, "alpha"), rat(p_i, p_i + 1));
        expect("beta", field(&r, "beta"), rat(1, p_i + 1));
        expect("alpha'", field(&r, "alpha'"), rat(1, 2));
        expect("beta'", field(&r, "beta'"), rat(1, 2));
    }
    let detail = if bad.is_empty() { "all constants exact".to_string() } else { bad.join("; ") };
    check(bad.is_empty(), detail)
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    for p in [2u128, 3] {
        let all = vec![p.pow(6) * (p * p - 1), p.pow(3) * (p.pow(3) - 1) / 2, p.pow(3) * (p.pow(3) - 1) / 2, p.pow(3)];
        let star = vec![p.pow(5) * (p * p - 1) * (p - 1) / 2, 0, p.pow(5) * (p - 1) / 2, 0];
        let a = count_gbq_types(p as u64, false).unwrap();
        let s = count_gbq_types(p as u64, true).unwrap();
        if a.counts != all || a.total != p.pow(8) || s.counts != star || s.total != p.pow(7) * (p - 1) / 2 {
            bad.push(format!("gbq p={p}"));
        }
    }
    for p in [2u128, 3, 5, 7] {
        let scaled = vec![
            p * (p - 1) * (3 * p * p + p + 2) / 8,
            p * (p + 1) * (5 * p * p + p + 2) / 8,
            p * (p * p - 1) / 2,
            p * (p + 1) / 2,
            p + 1,
        ];
        let monic = vec![
            p * (p - 1) * (3 * p * p + p + 2) / 8,
            p * (p - 1) * (5 * p * p + 3 * p + 2) / 8,
            p * p * (p - 1) / 2,
            p * (p - 1) / 2,
            p,
        ];
        let a = count_quartic_patterns(p as u64, false).unwrap();
        let m = count_quartic_patterns(p as u64, true).unwrap();
        if a.counts != scaled || a.total != p.pow(4) + p.pow(3) + p * p + p + 1 || m.counts != monic || m.total != p.pow(4) {
            bad.push(format!("quartic p={p}"));
        }
    }
    let t = start.elapsed();
    check(bad.is_empty() && t < Duration::from_secs(60), format!("mismatches {bad:?}, {}", secs(t)))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let n = 100_000u64;
    let mut pass = true;
    let mut parts = Vec::new();
    for p in [2u64, 3, 5] {
        for model in [ModelKind::PlainBQ, ModelKind::GeneralizedBQ] {
            let r = monte_carlo_local_with_workers(p, model, n, 2024 + p, 24, 0).unwrap();
            let want = f(&local_density(p, model).unwrap());
            let got = f(&r.soluble_frac());
            let z = (got - want) / (want * (1.0 - want) / n as f64).sqrt();
            let und = f(&r.undecided_frac());
            pass &= z.abs() <= 4.0 && und <= 1e-3;
            parts.push(format!("p={p} {model} z={z:+.2} und={und}"));
        }
    }
    let t = start.elapsed();
    pass &= t < Duration::from_secs(600);
    check(pass, format!("{}; {}", parts.join(", "), secs(t)))
}

fn enclosure(r: &BoundsReport) -> String {
    format!("[{:.6}, {:.6}] width {:.6}", f(&r.rho_inf_lower), f(&r.rho_inf_upper), f(&r.width()))
}

fn criterion_5() -> (Outcome, BoundsReport) {
    let (lo, hi) = (rat(873954, 1_000_000), rat(874124, 1_000_000));
    let s = Instant::now();
    let d20 = run_bounds(20, Method::Scaled4D, 0, None).unwrap();
    let t20 = s.elapsed();
    let s = Instant::now();
    let d25 = run_bounds(25, Method::Scaled4D, 0, None).unwrap();
    let t25 = s.elapsed();
    let pass = t20 <= Duration::from_secs(300)
        && d20.width() <= rat(3, 100)
        && d20.rho_inf_lower <= lo
        && hi <= d20.rho_inf_upper
        && t25 <= Duration::from_secs(1800)
        && d25.width() <= rat(12, 1000)
        && d25.rho_inf_lower <= lo
        && hi <= d25.rho_inf_upper;
    let detail = format!("depth 20 {} in {}; depth 25 {} in {}", enclosure(&d20), secs(t20), enclosure(&d25), secs(t25));
    (check(pass, detail), d25)
}

fn criterion_6() -> Outcome {
    let s = Instant::now();
    let plain = monte_carlo_real_with_workers(ModelKind::PlainBQ, 1_000_000, 1, 0).unwrap();
    let gbq = monte_carlo_real_with_workers(ModelKind::GeneralizedBQ, 1_000_000, 1, 0).unwrap();
    let t = s.elapsed();
    let plain_ok = (plain.estimate() - 0.87411).abs() <= 0.002;
    let gbq_ok = (gbq.estimate() - 0.873743).abs() <= 0.002;
    let note = if gbq_ok {
        String::new()
    } else {
        // h^2 + 4f is negative definite only if f is, so rho'(inf) >= rho(inf)
        // for this model; the target lies below rho(inf) and cannot be met
        " (target below rho(inf) ~ 0.8741, unreachable since h^2 + 4f <= 0 forces f <= 0)".to_string()
    };
    check(
        plain_ok && gbq_ok && t < Duration::from_secs(120),
        format!(
            "plain {:.6} [{}], generalized {:.6} [{}]{note}, {}",
            plain.estimate(),
            if plain_ok { "ok" } else { "off" },
            gbq.estimate(),
            if gbq_ok { "ok" } else { "off" },
            secs(t)
        ),
    )
}

fn criterion_7(d25: &BoundsReport) -> Outcome {
    let target = rat(75965, 100_000);
    let s = Instant::now();
    let given = RealPart::given(&rat(873954, 1_000_000), &rat(874124, 1_000_000), true, 128);
    let big = rho_interval(ModelKind::PlainBQ, given, 1_000_000, 128).unwrap();
    let t_big = s.elapsed();
    let big_ok = big.rho.contains(&target)
        && big.rho.lo().to_rational() >= rat(7590, 10_000)
        && big.rho.hi().to_rational() <= rat(7602, 10_000)
        && big.rigorous
        && t_big <= Duration::from_secs(120);

    let native = rho_interval(ModelKind::PlainBQ, RealPart::from_bounds(d25, 128), 10_000, 128).unwrap();
    let native_ok = native.rho.contains(&target) && native.rho.width().to_rational() <= rat(12, 1000) && native.rigorous;

    let est = RealPart::given(&rat(871743, 1_000_000), &rat(875743, 1_000_000), false, 128);
    let gbq = rho_interval(ModelKind::GeneralizedBQ, est, 10_000, 128).unwrap();
    let gbq_ok = gbq.rho.contains(&rat(748248, 1_000_000)) && !gbq.rigorous;

    let iv = |i: &locsol_core::DyadicInterval| format!("[{:.7}, {:.7}]", f(&i.lo().to_rational()), f(&i.hi().to_rational()));
    check(
        big_ok && native_ok && gbq_ok,
        format!(
            "P=1e6 {} in {}; depth-25 P=1e4 {} width {:.6}; generalized {} rigorous={}",
            iv(&big.rho),
            secs(t_big),
            iv(&native.rho),
            f(&native.rho.width().to_rational()),
            iv(&gbq.rho),
            gbq.rigorous
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut failures = Vec::new();

    // witnesses
    let mut witnessed = 0;
    for p in [2u64, 3, 5] {
        for model in [ModelKind::PlainBQ, ModelKind::GeneralizedBQ] {
            for i in 0..1500u64 {
                let q = sample(p, model, 16, 77, i);
                let v = decide(p, &q, DEFAULT_MAX_DEPTH).unwrap();
                if v.kind == VerdictKind::Soluble {
                    witnessed += 1;
                    if !v.witness.as_ref().is_some_and(|w| verify_witness(p, &q, w).unwrap()) {
                        failures.push(format!("witness p={p} {q:?}"));
                    }
                }
            }
        }
    }

    // leaf labels
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let leaves: Vec<_> =
        collect_leaves(Method::Scaled4D, 12).into_iter().filter(|(_, v)| *v != BoxVerdict::Undecided).collect();
    for _ in 0..400 {
        let (b, v) = &leaves[rng.random_range(0..leaves.len())];
        for _ in 0..50 {
            let q = Quartic5::new(std::array::from_fn(|i| {
                let t = Dyadic::from_ratio_pow2(rng.random_range(0..=1i64 << 20), 20);
                &b.l[i] + &(&t * &(&b.u[i] - &b.l[i]))
            }));
            if is_negative_definite(&q) != (*v == BoxVerdict::AllNegDef) {
                failures.push(format!("leaf {b:?}"));
            }
        }
    }

    // volume accounting
    let total = Rational::from_integer(32.into());
    for method in [Method::Plain5D, Method::Scaled4D] {
        for depth in [0, 5, 10, 15] {
            let r = run_bounds(depth, method, 0, None).unwrap();
            let regions_ok = r.regions.iter().all(|g| &(&g.v1 + &g.v2) + &g.undecided == g.volume);
            if r.total() != total || !regions_ok {
                failures.push(format!("accounting {method} {depth}"));
            }
        }
    }

    // checkpoints
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ck");
    let mut cfg = BoundsConfig::new(15, Method::Scaled4D);
    cfg.checkpoint = Some(path.clone());
    cfg.max_pending = 80;
    let overflowed = run_bounds_with(&cfg).is_err();
    let text = std::fs::read_to_string(&path).unwrap_or_default();
    let round_trip = Checkpoint::parse(&text).map(|c| c.render() == text).unwrap_or(false);
    let mut resume = BoundsConfig::new(15, Method::Scaled4D);
    resume.resume = Some(path.clone());
    let fresh = run_bounds(15, Method::Scaled4D, 0, None).unwrap();
    if !(overflowed && round_trip && run_bounds_with(&resume).ok().as_ref() == Some(&fresh)) {
        failures.push("checkpoint".to_string());
    }

    // determinism across worker counts
    let same = run_bounds(14, Method::Plain5D, 1, None).unwrap() == run_bounds(14, Method::Plain5D, 3, None).unwrap()
        && monte_carlo_real_with_workers(ModelKind::GeneralizedBQ, 30_000, 5, 1).unwrap()
            == monte_carlo_real_with_workers(ModelKind::GeneralizedBQ, 30_000, 5, 3).unwrap()
        && monte_carlo_local_with_workers(3, ModelKind::PlainBQ, 3000, 5, 24, 1).unwrap()
            == monte_carlo_local_with_workers(3, ModelKind::PlainBQ, 3000, 5, 24, 3).unwrap();
    if !same {
        failures.push("determinism".to_string());
    }

    check(
        failures.is_empty(),
        format!("{witnessed} witnesses, 400 leaves x 50 points, accounting, checkpoint, determinism; failures {failures:?}"),
    )
}

fn main() {
    // `cargo test` passes harness flags such as `--nocapture`; nothing to filter
    let report = |n: usize, o: &Outcome| {
        println!("criterion {n}: {}  {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        o.pass
    };
    let mut all = true;
    all &= report(1, &criterion_1());
    all &= report(2, &criterion_2());
    all &= report(3, &criterion_3());
    all &= report(4, &criterion_4());
    let (c5, d25) = criterion_5();
    all &= report(5, &c5);
    all &= report(6, &criterion_6());
    all &= report(7, &criterion_7(&d25));
    all &= report(8, &criterion_8());
    if !all {
        std::process::exit(1);
    }
}
