//! Parallel drivers over delay points. Every point owns its RNG stream, so
//! results do not depend on the thread count or scheduling.

use homsim_core::focksim::{simulate_point, CountRecord, Experiment, PatternProbabilities};
use rayon::prelude::*;

use crate::error::{AppError, AppResult};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "HOMSIM_THREADS";

/// Worker count from `HOMSIM_THREADS`, or `None` for rayon's default.
pub fn threads_from_env() -> AppResult<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(AppError::Validation(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))),
        },
    }
}

fn pool(threads: Option<usize>) -> AppResult<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        b = b.num_threads(n);
    }
    b.build().map_err(|e| AppError::Computation(format!("thread pool: {e}")))
}

/// Same result as the sequential `simulate_counts`, computed on `threads` workers.
pub fn simulate_parallel(
    exp: &Experiment,
    delays: &[f64],
    pulses: u64,
    seed: u64,
    threads: Option<usize>,
) -> AppResult<CountRecord> {
    let points = pool(threads)?.install(|| {
        delays
            .par_iter()
            .enumerate()
            .map(|(i, t)| simulate_point(exp, *t, i, pulses, seed))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(CountRecord {
        seed,
        delays: delays.to_vec(),
        points,
    })
}

/// Exact pattern probabilities at each delay.
pub fn patterns_parallel(
    exp: &Experiment,
    delays: &[f64],
    heralded: bool,
    threads: Option<usize>,
) -> AppResult<Vec<PatternProbabilities>> {
    Ok(pool(threads)?.install(|| {
        delays
            .par_iter()
            .map(|t| exp.patterns(*t, heralded))
            .collect::<Result<Vec<_>, _>>()
    })?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use homsim_core::focksim::{simulate_counts, PairStatistics, SourceConfig};
    use homsim_core::hom::HomParams;

    #[test]
    fn matches_sequential_for_any_thread_count() {
        let exp = Experiment::new(
            SourceConfig::new(0.05, PairStatistics::Thermal, 0.8, 0.1).unwrap(),
            HomParams::new(2e13, 1.5e13, 0.0).unwrap(),
        );
        let delays: Vec<f64> = (0..9).map(|k| (k as f64 - 4.0) * 5e-14).collect();
        let seq = simulate_counts(&exp, &delays, 10_000, 3).unwrap();
        for threads in [1, 2, 5] {
            assert_eq!(simulate_parallel(&exp, &delays, 10_000, 3, Some(threads)).unwrap(), seq);
        }
    }
}
