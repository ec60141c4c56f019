use crate::error::{Result, RuinError};

/// Environment variable capping worker threads.
pub const THREADS_ENV: &str = "RUIN_THREADS";

/// Worker count: the explicit override, else `RUIN_THREADS`, else the
/// available hardware parallelism.
pub fn thread_count(explicit: Option<usize>) -> Result<usize> {
    if let Some(n) = explicit {
        if n == 0 {
            return Err(RuinError::InvalidParameter {
                name: "threads",
                value: 0.0,
                reason: "must be a positive integer",
            });
        }
        return Ok(n);
    }
    match std::env::var(THREADS_ENV) {
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(RuinError::InvalidParameter {
                name: "RUIN_THREADS",
                value: raw.trim().parse::<f64>().unwrap_or(f64::NAN),
                reason: "must be a positive integer",
            }),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// Runs `f` inside a rayon pool of the requested size.
pub fn with_pool<R: Send>(explicit: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    let n = thread_count(explicit)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| RuinError::Numeric {
            op: "thread pool",
            detail: e.to_string(),
        })?;
    Ok(pool.install(f))
}
