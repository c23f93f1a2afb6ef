//! Worker pool sized by `ULTRAFLAT_THREADS`.

use rayon::prelude::*;
use rayon::ThreadPool;

/// Pool with at most `ULTRAFLAT_THREADS` workers (all cores when unset or
/// unparsable).
pub fn pool() -> ThreadPool {
    let n = std::env::var("ULTRAFLAT_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()).unwrap_or(0);
    rayon::ThreadPoolBuilder::new().num_threads(n).build().expect("thread pool")
}

/// Order-preserving parallel map.
pub fn par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}
