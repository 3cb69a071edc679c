//! Running work on a fixed number of rayon workers.

use crate::error::{Error, Result};

/// Runs `f` on a dedicated pool of `workers` threads (`0` means the global
/// pool). Results never depend on the worker count.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}
