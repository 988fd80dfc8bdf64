//! Injection point for data parallelism.
//!
//! Every Monte Carlo loop in this crate is written as "evaluate `f(i)` for
//! `i in 0..len` and collect in index order". Results are therefore identical
//! for every executor; only wall-clock time changes.

use alloc::vec::Vec;

pub trait Executor: Sync {
    /// Evaluates `f` on `0..len` and returns the results in index order.
    fn map_indexed<T, F>(&self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Single-threaded executor.
#[derive(Debug, Clone, Copy, Default)]
pub struct Serial;

impl Executor for Serial {
    fn map_indexed<T, F>(&self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..len).map(f).collect()
    }
}
