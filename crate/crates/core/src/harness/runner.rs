use crate::error::Result;
use crate::rng::child_seed;

/// One unit of work: replicate `replicate` at size `n`, with its own seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Job {
    pub n: usize,
    pub replicate: u64,
    pub seed: u64,
}

/// Jobs in `(n, replicate)` order. The seed depends only on the base seed,
/// `n` and the replicate index, so any single replicate can be rerun alone.
pub fn grid_jobs(grid: &[usize], replicates: u64, base_seed: u64) -> Vec<Job> {
    grid.iter()
        .flat_map(|&n| {
            let per_n = child_seed(base_seed, n as u64);
            (0..replicates).map(move |r| Job { n, replicate: r, seed: child_seed(per_n, r) })
        })
        .collect()
}

pub fn map_sequential<T, F>(jobs: &[Job], f: F) -> Vec<T>
where
    F: Fn(&Job) -> T,
{
    jobs.iter().map(f).collect()
}

/// Runs `f` over `jobs` on `workers` threads (0: the global pool). Results
/// come back in job order whatever order they finish in.
#[cfg(feature = "parallel")]
pub fn map_parallel<T, F>(jobs: &[Job], workers: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&Job) -> T + Sync + Send,
{
    use rayon::prelude::*;
    if workers == 0 {
        return Ok(jobs.par_iter().map(f).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| crate::Error::invalid(format!("thread pool: {e}")))?;
    Ok(pool.install(|| jobs.par_iter().map(f).collect()))
}

/// Parallel when the `parallel` feature is on, sequential otherwise.
pub fn map_jobs<T, F>(jobs: &[Job], workers: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&Job) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if workers != 1 {
            return map_parallel(jobs, workers, f);
        }
    }
    let _ = workers;
    Ok(map_sequential(jobs, f))
}
