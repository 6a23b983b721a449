//! Sequential/parallel dispatch for the sweep kernels.
//!
//! With the `parallel` feature (on by default) the sweeps fan out over rayon;
//! without it they run sequentially. Results are collected in input order, so
//! the outputs are identical either way.

use std::sync::atomic::{AtomicBool, Ordering};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

static FORCE_SEQUENTIAL: AtomicBool = AtomicBool::new(false);

/// Route every sweep through the sequential path even when the `parallel`
/// feature is enabled. The benchmark suite uses this to compare both paths
/// in one binary.
pub fn set_force_sequential(yes: bool) {
    FORCE_SEQUENTIAL.store(yes, Ordering::SeqCst);
}

#[allow(dead_code)]
pub(crate) fn sequential_forced() -> bool {
    FORCE_SEQUENTIAL.load(Ordering::Relaxed)
}

pub(crate) fn map_collect<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if !sequential_forced() {
            return items.par_iter().map(&f).collect();
        }
    }
    items.iter().map(f).collect()
}

pub(crate) fn map_range<U, F>(count: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if !sequential_forced() {
            return (0..count).into_par_iter().map(&f).collect();
        }
    }
    (0..count).map(f).collect()
}
