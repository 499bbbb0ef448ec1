//! Sample-level execution strategy.
//!
//! Experiments express their Monte Carlo loop as an indexed map; the executor
//! decides how indices are scheduled. Results always come back in index order,
//! so aggregation is independent of the executor.

use alloc::vec::Vec;

pub trait Executor: Sync {
    /// Evaluate `f(0), ..., f(count - 1)` and return them in index order.
    fn map_indexed<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;

    fn workers(&self) -> usize {
        1
    }
}

/// Runs every index on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map_indexed<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..count).map(f).collect()
    }
}
