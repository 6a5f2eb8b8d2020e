//! Multi-threaded sample evaluation with results independent of the thread count.

use minami_core::montecarlo::{evaluate_sample, summarize, EstimatorResult, ExperimentConfig, Sampler};
use minami_core::quadrature::QuadratureConfig;
use rayon::prelude::*;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "MINAMI_LAB_THREADS";

/// Builds the pool used by the CLI. Without `MINAMI_LAB_THREADS` rayon picks
/// the number of logical CPUs.
pub fn thread_pool() -> anyhow::Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        let n: usize =
            raw.trim().parse().map_err(|_| anyhow::anyhow!("{THREADS_ENV} must be a positive integer, got {raw:?}"))?;
        if n == 0 {
            anyhow::bail!("{THREADS_ENV} must be a positive integer, got 0");
        }
        builder = builder.num_threads(n);
    }
    Ok(builder.build()?)
}

/// Same result as `minami_core::montecarlo::estimate_expectation`: every
/// sample owns its random stream and outcomes are reduced in index order.
pub fn estimate_parallel(
    pool: &rayon::ThreadPool,
    config: &ExperimentConfig,
    sampler: Sampler,
    samples: usize,
    base_seed: u64,
    quad: &QuadratureConfig,
) -> minami_core::Result<EstimatorResult> {
    if samples < 2 {
        return Err(minami_core::Error::InvalidInput(format!("need at least 2 samples, got {samples}")));
    }
    config.validate()?;
    let outcomes = pool.install(|| {
        (0..samples as u64)
            .into_par_iter()
            .map(|i| evaluate_sample(config, sampler, base_seed, i, quad))
            .collect::<minami_core::Result<Vec<_>>>()
    })?;
    summarize(&outcomes, config.bound(), sampler, base_seed)
}

/// Maps `f` over `0..count` on the pool, keeping index order.
pub fn map_indexed<T, F>(pool: &rayon::ThreadPool, count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    pool.install(|| (0..count).into_par_iter().map(&f).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use minami_core::anderson::{Boundary, HoppingSpec, LatticeBox, PotentialDistribution, SpectralParameter};
    use minami_core::montecarlo::estimate_expectation;
    use minami_core::Complex64;

    #[test]
    fn parallel_matches_serial_bit_for_bit() {
        let config = ExperimentConfig {
            lattice: LatticeBox::new(vec![4, 4], Boundary::Open).unwrap(),
            hopping: HoppingSpec::new(1.0, 0.25),
            potential: PotentialDistribution::Uniform { width: 3.0 },
            z: SpectralParameter::new(Complex64::new(4.0, 0.5)).unwrap(),
            sites: vec![5, 6],
        };
        let quad = QuadratureConfig::default();
        let serial = estimate_expectation(&config, Sampler::Crude, 300, 9, &quad).unwrap();
        for threads in [1, 3] {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            let par = estimate_parallel(&pool, &config, Sampler::Crude, 300, 9, &quad).unwrap();
            assert_eq!(par.mean.to_bits(), serial.mean.to_bits());
            assert_eq!(par.std_error.to_bits(), serial.std_error.to_bits());
        }
    }
}
