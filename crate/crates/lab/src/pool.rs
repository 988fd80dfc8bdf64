use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};
use subgauss_core::Executor;

use crate::error::{LabError, Result};

/// Fixed-size rayon pool. Results come back in index order, so output does
/// not depend on the thread count.
pub struct Pool {
    inner: ThreadPool,
}

impl Pool {
    pub fn new(threads: usize) -> Result<Self> {
        if threads == 0 {
            return Err(LabError::config("--threads must be at least 1"));
        }
        let inner = ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| LabError::config(format!("cannot start thread pool: {e}")))?;
        Ok(Pool { inner })
    }

    pub fn threads(&self) -> usize {
        self.inner.current_num_threads()
    }
}

impl Executor for Pool {
    fn map_indexed<T, F>(&self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        self.inner.install(|| (0..len).into_par_iter().map(f).collect())
    }
}
