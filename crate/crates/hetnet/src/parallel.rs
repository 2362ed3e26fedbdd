//! Parallel replication. Output is identical to
//! [`hetnet_core::simulate::replicate`] for any number of threads.

use hetnet_core::simulate::{SimPlan, Sampler};
use hetnet_core::PropagationSample;
use rayon::prelude::*;

/// Environment variable capping the worker count; `0` or unset means one
/// worker per core.
pub const THREADS_ENV: &str = "HETNET_THREADS";

pub fn threads_from_env() -> Result<usize, String> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(0),
        Ok(v) => v.trim().parse().map_err(|_| format!("{THREADS_ENV} must be a non-negative integer, got `{v}`")),
    }
}

pub fn replicate_parallel(sampler: &Sampler, plan: &SimPlan, threads: usize) -> Vec<PropagationSample> {
    let run = || (0..plan.replications).into_par_iter().map(|i| sampler.sample(plan, i)).collect();
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(run),
        Err(_) => run(),
    }
}
