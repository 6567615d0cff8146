//! Parallel drivers over the core evaluation primitives.

use fzbeam::analysis::{split_metrics, GammaSample};
use fzbeam::evaluation::{reduce, run_trial, trial_seed, ExperimentSpec, SweepTable, TrialOutcome};
use fzbeam::scenario::{sample_placement, DistanceRange, SystemConfig};
use fzbeam::Result;
use rayon::prelude::*;

/// Same table as [`fzbeam::evaluation::run_sweep`], with trials spread over
/// the current rayon pool.
pub fn par_sweep(spec: &ExperimentSpec, config: &SystemConfig) -> Result<SweepTable> {
    spec.validate()?;
    let outcomes: Vec<TrialOutcome> = spec
        .tasks()
        .into_par_iter()
        .map(|(v, t)| run_trial(spec, config, v, t))
        .collect();
    Ok(reduce(spec, &outcomes))
}

/// Parallel [`fzbeam::analysis::gamma_study`].
pub fn par_gamma_study(
    config: &SystemConfig,
    master_seed: u64,
    count: usize,
    bs_range: DistanceRange,
    ue_range: DistanceRange,
) -> Result<Vec<GammaSample>> {
    (0..count)
        .into_par_iter()
        .map(|id| {
            let seed = trial_seed(master_seed, id);
            let placement = sample_placement(seed, bs_range, ue_range)?;
            Ok(GammaSample {
                id,
                seed,
                placement,
                metrics: split_metrics(&placement, config)?,
            })
        })
        .collect()
}

/// Run `f` on a pool of `threads` workers, or on the global pool.
pub fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R, rayon::ThreadPoolBuildError> {
    match threads {
        Some(n) => Ok(rayon::ThreadPoolBuilder::new().num_threads(n).build()?.install(f)),
        None => Ok(f()),
    }
}
