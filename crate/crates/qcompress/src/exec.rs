use qcompress_core::compress::TaskMap;
use rayon::prelude::*;

use crate::error::{Result, RunError};

/// A fixed-size rayon pool. Results come back in input order, so the
/// worker count never changes what is computed.
pub struct Pool {
    pool: rayon::ThreadPool,
}

impl Pool {
    pub fn new(workers: usize) -> Result<Self> {
        if workers == 0 {
            return Err(RunError::InvalidConfig("workers must be at least 1".into()));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| RunError::InvalidConfig(format!("thread pool: {e}")))?;
        Ok(Self { pool })
    }

    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl TaskMap for Pool {
    fn map<T: Sync, R: Send>(&self, items: &[T], f: &(dyn Fn(&T) -> R + Sync)) -> Vec<R> {
        self.pool.install(|| items.par_iter().map(f).collect())
    }
}
