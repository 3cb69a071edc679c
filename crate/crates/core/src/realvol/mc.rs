//! Monte Carlo estimates of `rho(inf)` and `rho'(inf)`.
//!
//! Coefficients are odd multiples of `2^-32` in `(-1, 1)`, drawn from a
//! ChaCha8 stream keyed by `(seed, index)`; the classification itself is
//! exact.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::is_negative_definite_int;
use crate::error::{domain, Result};
use crate::model::ModelKind;
use crate::parallel::with_workers;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RealMcReport {
    pub model: ModelKind,
    pub n: u64,
    pub seed: u64,
    /// Samples with a real point (quartic not negative definite).
    pub hits: u64,
}

impl RealMcReport {
    pub fn estimate(&self) -> f64 {
        self.hits as f64 / self.n as f64
    }

    /// Binomial standard error of [`Self::estimate`].
    pub fn sigma(&self) -> f64 {
        let p = self.estimate();
        (p * (1.0 - p) / self.n as f64).sqrt()
    }

    /// `estimate +- 4 sigma`.
    pub fn error_bar(&self) -> (f64, f64) {
        let (p, s) = (self.estimate(), self.sigma());
        (p - 4.0 * s, p + 4.0 * s)
    }
}

/// Numerators over `2^32` of `k` uniform coefficients.
fn draw<const K: usize>(seed: u64, index: u64) -> [i64; K] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    std::array::from_fn(|_| 2 * rng.random::<u32>() as i64 + 1 - (1i64 << 32))
}

fn has_real_point(model: ModelKind, seed: u64, index: u64) -> bool {
    let q: [BigInt; 5] = match model {
        ModelKind::PlainBQ => {
            let f = draw::<5>(seed, index);
            if f[0] > 0 || f[4] > 0 {
                return true;
            }
            f.map(BigInt::from)
        }
        ModelKind::GeneralizedBQ => {
            // D = h^2 + 4f, scaled by 2^64
            let c = draw::<8>(seed, index);
            let (l, m, n) = (c[0] as i128, c[1] as i128, c[2] as i128);
            let f = |i: usize| (c[3 + i] as i128) << 34;
            let d = [l * l + f(0), 2 * l * m + f(1), m * m + 2 * l * n + f(2), 2 * m * n + f(3), n * n + f(4)];
            if d[0] > 0 || d[4] > 0 {
                return true;
            }
            d.map(BigInt::from)
        }
    };
    !is_negative_definite_int(&q)
}

/// The `index`-th sample as exact coefficients over `2^32`: `(a..e)` for
/// plain quartics, `(l, m, n, a..e)` for the generalized model.
pub fn sample_real(model: ModelKind, seed: u64, index: u64) -> Vec<i64> {
    match model {
        ModelKind::PlainBQ => draw::<5>(seed, index).to_vec(),
        ModelKind::GeneralizedBQ => draw::<8>(seed, index).to_vec(),
    }
}

pub fn monte_carlo_real(model: ModelKind, n: u64, seed: u64) -> Result<RealMcReport> {
    monte_carlo_real_with_workers(model, n, seed, 0)
}

pub fn monte_carlo_real_with_workers(model: ModelKind, n: u64, seed: u64, workers: usize) -> Result<RealMcReport> {
    if n == 0 {
        return domain("Monte Carlo needs at least one sample");
    }
    let hits = with_workers(workers, || (0..n).into_par_iter().filter(|&i| has_real_point(model, seed, i)).count())?;
    Ok(RealMcReport { model, n, seed, hits: hits as u64 })
}
