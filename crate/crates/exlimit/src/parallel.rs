use exlimit_core::Executor;
use rayon::prelude::*;

/// Executor backed by rayon, on the global pool or a dedicated one.
///
/// Results are collected in index order, so the thread count never changes
/// what a simulation returns.
#[derive(Debug, Default)]
pub struct Parallel {
    pool: Option<rayon::ThreadPool>,
}

impl Parallel {
    pub fn global() -> Self {
        Parallel { pool: None }
    }

    pub fn with_threads(threads: usize) -> Result<Self, rayon::ThreadPoolBuildError> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
        Ok(Parallel { pool: Some(pool) })
    }

    pub fn threads(&self) -> usize {
        match &self.pool {
            Some(p) => p.current_num_threads(),
            None => rayon::current_num_threads(),
        }
    }
}

impl Executor for Parallel {
    fn extend_indexed<T, F>(&self, out: &mut Vec<T>, count: u64, f: F)
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        let count = usize::try_from(count).expect("replication count exceeds usize");
        let mut job = move || out.par_extend((0..count).into_par_iter().map(|i| f(i as u64)));
        match &self.pool {
            Some(pool) => pool.install(job),
            None => job(),
        }
    }
}
