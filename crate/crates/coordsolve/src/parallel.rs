//! Multi-threaded simulation driver.
//!
//! Trials are cut into fixed-size chunks; each chunk replays its own trial
//! streams, so the merged report equals the sequential one bit for bit.

use std::sync::Arc;

use rayon::prelude::*;

use coordsolve_core::montecarlo::{run_trials, validate_config, SamplerCache, SimConfig, SimReport, SimTally};
use coordsolve_core::protocols::ProtocolSpec;
use coordsolve_core::{Result, Stage, WlcGame};

const CHUNK: u64 = 8192;

pub fn simulate_parallel(game: &WlcGame, p: &ProtocolSpec, cfg: &SimConfig) -> Result<SimReport> {
    validate_config(cfg)?;
    simulate_stage_parallel(&Stage::initial(Arc::new(game.clone())), p, cfg)
}

/// Same as [`simulate_parallel`] but starting from an arbitrary stage.
pub fn simulate_stage_parallel(start: &Stage, p: &ProtocolSpec, cfg: &SimConfig) -> Result<SimReport> {
    validate_config(cfg)?;
    let chunks: Vec<u64> = (0..cfg.trials.div_ceil(CHUNK)).collect();
    let tallies: Vec<SimTally> = chunks
        .par_iter()
        // one sampler cache per worker: protocol evaluation dominates otherwise
        .map_init(SamplerCache::new, |cache, &c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(cfg.trials);
            run_trials(start, p, cfg, lo..hi, cache)
        })
        .collect::<Result<_>>()?;
    let mut total = SimTally::default();
    for t in tallies {
        total.merge(t);
    }
    Ok(total.into_report(cfg))
}
