//! Monte Carlo estimates of local densities.
//!
//! Sample `i` draws its coefficients uniformly modulo `p^K` from a ChaCha8
//! stream keyed by `(seed, i)`, so the tallies do not depend on how the
//! indices are split across workers.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{engine, odd, GBQInt, VerdictKind, DEFAULT_MAX_DEPTH};
use crate::error::{domain, Error, Result};
use crate::exactmath::Rational;
use crate::model::ModelKind;
use crate::parallel::with_workers;
use crate::primes::is_prime;

/// Default number of `p`-adic digits sampled per coefficient.
pub const DEFAULT_SAMPLE_DIGITS: u32 = 24;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalMcReport {
    pub p: u64,
    pub model: ModelKind,
    pub n: u64,
    pub seed: u64,
    pub digits: u32,
    pub soluble: u64,
    pub insoluble: u64,
    pub undecided: u64,
}

impl LocalMcReport {
    fn frac(&self, k: u64) -> Rational {
        Rational::new(BigInt::from(k), BigInt::from(self.n))
    }

    pub fn soluble_frac(&self) -> Rational {
        self.frac(self.soluble)
    }

    pub fn insoluble_frac(&self) -> Rational {
        self.frac(self.insoluble)
    }

    pub fn undecided_frac(&self) -> Rational {
        self.frac(self.undecided)
    }
}

/// The `i`-th sample of the stream keyed by `seed`.
pub fn sample(p: u64, model: ModelKind, digits: u32, seed: u64, index: u64) -> GBQInt {
    let modulus = (p as u128).pow(digits);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut draw = || BigInt::from(rng.random_range(0..modulus));
    let h = match model {
        ModelKind::GeneralizedBQ => std::array::from_fn(|_| draw()),
        ModelKind::PlainBQ => std::array::from_fn(|_| BigInt::zero()),
    };
    let f = std::array::from_fn(|_| draw());
    GBQInt { h, f }
}

/// Classifies `n` samples with the global rayon pool.
pub fn monte_carlo_local(p: u64, model: ModelKind, n: u64, seed: u64, digits: u32) -> Result<LocalMcReport> {
    monte_carlo_local_with_workers(p, model, n, seed, digits, 0)
}

pub fn monte_carlo_local_with_workers(
    p: u64,
    model: ModelKind,
    n: u64,
    seed: u64,
    digits: u32,
    workers: usize,
) -> Result<LocalMcReport> {
    if !is_prime(p) {
        return domain(format!("{p} is not prime"));
    }
    if n == 0 {
        return domain("sample count must be positive");
    }
    if digits < 8 {
        return domain("at least 8 p-adic digits are required");
    }
    if (p as f64).log2() * digits as f64 >= 127.0 {
        return Err(Error::Capability(format!("p^{digits} does not fit in 127 bits")));
    }
    let tally = with_workers(workers, || {
        (0..n)
            .into_par_iter()
            .map(|i| {
                let q = sample(p, model, digits, seed, i);
                let v = if p == 2 {
                    engine::decide_generic_with_precision(p, &q, DEFAULT_MAX_DEPTH, Some(digits), false)
                } else {
                    odd::decide_odd(p, &q, DEFAULT_MAX_DEPTH, Some(digits), false)
                };
                match v.kind {
                    VerdictKind::Soluble => [1u64, 0, 0],
                    VerdictKind::Insoluble => [0, 1, 0],
                    VerdictKind::Undecided => [0, 0, 1],
                }
            })
            .reduce(|| [0; 3], |a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2]])
    })?;
    Ok(LocalMcReport {
        p,
        model,
        n,
        seed,
        digits,
        soluble: tally[0],
        insoluble: tally[1],
        undecided: tally[2],
    })
}
