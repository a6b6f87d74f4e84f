//! Execution of independent, indexed work units.

use alloc::vec::Vec;

/// Runs `f(0), …, f(count − 1)` and appends the results to `out` in index
/// order, however the work is scheduled.
pub trait Executor: Sync {
    fn extend_indexed<T, F>(&self, out: &mut Vec<T>, count: u64, f: F)
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send;
}

/// Single-threaded executor.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn extend_indexed<T, F>(&self, out: &mut Vec<T>, count: u64, f: F)
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        out.extend((0..count).map(f));
    }
}
