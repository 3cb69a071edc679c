use locsol_core::fpcount::*;
use proptest::prelude::*;

/// `F_{p^2}` for p in {2, 3}: pairs `a + b w` with `w^2 = w + 1` (p = 2) or
/// `w^2 = -1` (p = 3).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
struct Fq {
    a: u64,
    b: u64,
}

fn fq_mul(p: u64, x: Fq, y: Fq) -> Fq {
    let ac = x.a * y.a;
    let bd = x.b * y.b;
    let cross = x.a * y.b + x.b * y.a;
    if p == 2 {
        Fq { a: (ac + bd) % 2, b: (cross + bd) % 2 }
    } else {
        Fq { a: (ac + (p - 1) * bd) % p, b: cross % p }
    }
}

fn fq_add(p: u64, x: Fq, y: Fq) -> Fq {
    Fq { a: (x.a + y.a) % p, b: (x.b + y.b) % p }
}

/// All quadratic forms `s` over `F_{p^2}` with `s^2 + h s = f`.
fn roots_over_fp2(q: &FpGBQ) -> Vec<[Fq; 3]> {
    let p = q.p;
    let elems: Vec<Fq> = (0..p * p).map(|i| Fq { a: i % p, b: i / p }).collect();
    let lift = |c: u64| Fq { a: c, b: 0 };
    let mut out = Vec::new();
    for &s0 in &elems {
        for &s1 in &elems {
            for &s2 in &elems {
                let s = [s0, s1, s2];
                let mut lhs = [Fq { a: 0, b: 0 }; 5];
                for i in 0..3 {
                    for j in 0..3 {
                        let t = fq_add(p, fq_mul(p, s[i], s[j]), fq_mul(p, lift(q.h[i]), s[j]));
                        lhs[i + j] = fq_add(p, lhs[i + j], t);
                    }
                }
                if (0..5).all(|k| lhs[k] == lift(q.f[k])) {
                    out.push(s);
                }
            }
        }
    }
    out
}

fn oracle_type(q: &FpGBQ) -> FactorizationType {
    let roots = roots_over_fp2(q);
    match roots.len() {
        0 => FactorizationType::AbsIrred,
        1 => FactorizationType::RepeatedFactor,
        _ if roots.iter().any(|s| s.iter().all(|c| c.b == 0)) => FactorizationType::SplitDistinct,
        _ => FactorizationType::ConjugatePair,
    }
}

#[test]
fn classification_matches_fp2_search() {
    for p in [2u64, 3] {
        for idx in 0..p.pow(8) {
            let mut d = idx;
            let mut next = || {
                let r = d % p;
                d /= p;
                r
            };
            let h = [next(), next(), next()];
            let f = [next(), next(), next(), next(), next()];
            let q = FpGBQ { p, h, f };
            assert_eq!(classify_gbq_type(&q), oracle_type(&q), "{q:?}");
        }
    }
}

#[test]
fn gbq_counts_match_formulas() {
    for p in [2u64, 3] {
        for star in [false, true] {
            let counted = count_gbq_types(p, star).unwrap();
            assert_eq!(counted, gbq_type_formulas(p, star).unwrap());
            assert!(counted.is_consistent());
        }
    }
    assert_eq!(count_gbq_types(3, false).unwrap().counts, vec![5832, 351, 351, 27]);
    assert_eq!(count_gbq_types(3, true).unwrap().total, 3u128.pow(7));
}

#[test]
fn pattern_counts_match_formulas() {
    for p in [2u64, 3, 5, 7] {
        for monic in [false, true] {
            let counted = count_quartic_patterns(p, monic).unwrap();
            assert_eq!(counted, quartic_pattern_formulas(p, monic).unwrap());
        }
    }
}

#[test]
fn probabilities_sum_to_one() {
    use num_traits::One;
    for p in [2u64, 3, 5, 7, 11, 101] {
        for flag in [false, true] {
            for table in [gbq_type_formulas(p, flag).unwrap(), quartic_pattern_formulas(p, flag).unwrap()] {
                let sum = table.probabilities().into_iter().fold(locsol_core::Rational::from_integer(0.into()), |a, b| a + b);
                assert!(sum.is_one());
            }
        }
    }
}

/// Coefficients of `(alpha x + beta y)^(n-i) (gamma x + delta y)^i`.
fn linear_power(p: u64, n: usize, i: usize, m: [u64; 4]) -> Vec<u64> {
    let mut out = vec![1u64];
    let mul = |acc: &Vec<u64>, u: u64, v: u64| {
        let mut r = vec![0u64; acc.len() + 1];
        for (k, &c) in acc.iter().enumerate() {
            r[k] = (r[k] + c * u) % p;
            r[k + 1] = (r[k + 1] + c * v) % p;
        }
        r
    };
    for _ in 0..n - i {
        out = mul(&out, m[0], m[1]);
    }
    for _ in 0..i {
        out = mul(&out, m[2], m[3]);
    }
    out
}

fn substitute<const N: usize>(p: u64, form: &[u64; N], m: [u64; 4]) -> [u64; N] {
    let mut out = [0u64; N];
    for (i, &c) in form.iter().enumerate() {
        for (k, t) in linear_power(p, N - 1, i, m).into_iter().enumerate() {
            out[k] = (out[k] + c * t) % p;
        }
    }
    out
}

proptest! {
    #[test]
    fn invariant_under_substitutions(
        p in prop::sample::select(vec![2u64, 3, 5, 7]),
        h in prop::array::uniform3(0u64..7),
        f in prop::array::uniform5(0u64..7),
        s in prop::array::uniform3(0u64..7),
        m in prop::array::uniform4(0u64..7),
    ) {
        let h = h.map(|c| c % p);
        let f = f.map(|c| c % p);
        let s = s.map(|c| c % p);
        let m = m.map(|c| c % p);
        let q = FpGBQ { p, h, f };
        let before = classify_gbq_type(&q);

        // z -> z + s: h' = h + 2 s, f' = f - s^2 - h s
        let mut h2 = h;
        for i in 0..3 {
            h2[i] = (h[i] + 2 * s[i]) % p;
        }
        let mut f2 = f;
        for i in 0..3 {
            for j in 0..3 {
                f2[i + j] = (f2[i + j] + 2 * p * p - s[i] * s[j] % p - h[i] * s[j] % p) % p;
            }
        }
        prop_assert_eq!(classify_gbq_type(&FpGBQ { p, h: h2, f: f2 }), before);

        let det = (m[0] * m[3] + p * p - m[1] * m[2] % p) % p;
        if det != 0 {
            let moved = FpGBQ { p, h: substitute(p, &h, m), f: substitute(p, &f, m) };
            prop_assert_eq!(classify_gbq_type(&moved), before);
        }
    }
}
