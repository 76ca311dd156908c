//! Seeded repeated-play simulation.
//!
//! Trial `i` draws from ChaCha8 seeded with the master seed and switched to
//! stream `i`, so any subset of trials can be replayed on its own and the
//! split of trials across threads does not affect the result. Choices are
//! drawn by exact integer sampling from the protocol's rational weights.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::ops::Range;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Float, One, ToPrimitive};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::game::{Profile, Stage, WlcGame};
use crate::protocols::{evaluate_all, Distribution, ProtocolSpec};

pub const GENERATOR: &str = "ChaCha8 (rand_chacha 0.3), stream = trial index";
pub const DEFAULT_MAX_ROUNDS: u64 = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SimConfig {
    pub trials: u64,
    pub seed: u64,
    pub max_rounds: u64,
}

impl SimConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        Self {
            trials,
            seed,
            max_rounds: DEFAULT_MAX_ROUNDS,
        }
    }

    fn check(&self) -> Result<()> {
        if self.trials == 0 || self.max_rounds == 0 {
            return Err(Error::InvalidArgument(
                "trials and max_rounds must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Order-insensitive counts from a batch of trials.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SimTally {
    pub completed: u64,
    pub truncated: u64,
    pub sum: u128,
    pub sum_sq: u128,
    pub max_rounds_seen: u64,
    pub first_round_wins: u64,
    pub histogram: BTreeMap<u64, u64>,
}

impl SimTally {
    fn record(&mut self, rounds: Option<u64>) {
        match rounds {
            None => self.truncated += 1,
            Some(r) => {
                self.completed += 1;
                self.sum += r as u128;
                self.sum_sq += (r as u128) * (r as u128);
                self.max_rounds_seen = self.max_rounds_seen.max(r);
                if r == 1 {
                    self.first_round_wins += 1;
                }
                *self.histogram.entry(r).or_default() += 1;
            }
        }
    }

    pub fn merge(&mut self, other: SimTally) {
        self.completed += other.completed;
        self.truncated += other.truncated;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self.max_rounds_seen = self.max_rounds_seen.max(other.max_rounds_seen);
        self.first_round_wins += other.first_round_wins;
        for (k, v) in other.histogram {
            *self.histogram.entry(k).or_default() += v;
        }
    }

    pub fn into_report(self, cfg: &SimConfig) -> SimReport {
        let n = self.completed as f64;
        let (mean, se) = if self.completed == 0 {
            (f64::NAN, f64::NAN)
        } else {
            let mean = self.sum as f64 / n;
            let var = if self.completed > 1 {
                // sample variance from exact integer moments
                let num = self.sum_sq as f64 - (self.sum as f64) * mean;
                (num / (n - 1.0)).max(0.0)
            } else {
                0.0
            };
            (mean, Float::sqrt(var / n))
        };
        SimReport {
            trials: cfg.trials,
            seed: cfg.seed,
            max_rounds: cfg.max_rounds,
            mean_rounds: mean,
            std_error: se,
            truncated: self.truncated,
            max_observed: self.max_rounds_seen,
            first_round_wins: self.first_round_wins,
            histogram: self.histogram,
            generator: GENERATOR,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimReport {
    pub trials: u64,
    pub seed: u64,
    pub max_rounds: u64,
    /// Mean over completed plays; truncated plays are excluded.
    pub mean_rounds: f64,
    pub std_error: f64,
    pub truncated: u64,
    pub max_observed: u64,
    pub first_round_wins: u64,
    pub histogram: BTreeMap<u64, u64>,
    pub generator: &'static str,
}

/// Integer sampling table for one distribution.
#[derive(Clone, Debug)]
struct Sampler {
    denom: u64,
    /// `(choice, cumulative numerator)` over the support.
    cumulative: Vec<(usize, u64)>,
}

impl Sampler {
    fn new(d: &Distribution) -> Result<Self> {
        let support = d.support();
        let lcm = support
            .iter()
            .fold(BigInt::one(), |a, &l| a.lcm(d.get(l).denom()));
        let denom = lcm
            .to_u64()
            .ok_or_else(|| Error::InvalidArgument(format!("weights of {d} are too fine to sample")))?;
        let mut acc = 0u64;
        let mut cumulative = Vec::with_capacity(support.len());
        for l in support {
            let w = d.get(l);
            acc += (w.numer() * (&lcm / w.denom())).to_u64().expect("bounded by lcm");
            cumulative.push((l, acc));
        }
        Ok(Self { denom, cumulative })
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        // rejection keeps the draw exactly uniform on [0, denom)
        let zone = u64::MAX - (u64::MAX % self.denom);
        let u = loop {
            let x = rng.next_u64();
            if x < zone {
                break x % self.denom;
            }
        };
        self.cumulative
            .iter()
            .find(|&&(_, c)| u < c)
            .map(|&(l, _)| l)
            .expect("cumulative reaches denom")
    }
}

/// Per-stage samplers keyed by the labeled set of profiles played so far,
/// which determines every built-in protocol's behavior.
#[derive(Debug, Default)]
pub struct SamplerCache {
    map: BTreeMap<Vec<Profile>, Vec<Sampler>>,
}

impl SamplerCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    fn samplers(&mut self, p: &ProtocolSpec, stage: &Stage) -> Result<&[Sampler]> {
        let key = stage.profile_set();
        if !self.map.contains_key(&key) {
            let s = evaluate_all(p, stage)?
                .iter()
                .map(Sampler::new)
                .collect::<Result<Vec<_>>>()?;
            self.map.insert(key.clone(), s);
        }
        Ok(&self.map[&key])
    }
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Plays one game to coordination; `None` if `max_rounds` pass first.
pub fn play_once(
    start: &Stage,
    p: &ProtocolSpec,
    rng: &mut ChaCha8Rng,
    max_rounds: u64,
    cache: &mut SamplerCache,
) -> Result<Option<u64>> {
    let mut stage = start.clone();
    for round in 1..=max_rounds {
        let prof = Profile(cache.samplers(p, &stage)?.iter().map(|s| s.sample(rng)).collect());
        if stage.game().is_winning(&prof.0) {
            return Ok(Some(round));
        }
        stage = stage.play_round(&prof)?;
    }
    Ok(None)
}

/// Runs the trials with indices in `range`.
pub fn run_trials(
    start: &Stage,
    p: &ProtocolSpec,
    cfg: &SimConfig,
    range: Range<u64>,
    cache: &mut SamplerCache,
) -> Result<SimTally> {
    if start.is_final() {
        return Err(Error::FinalStage);
    }
    let mut tally = SimTally::default();
    for t in range {
        let mut rng = trial_rng(cfg.seed, t);
        tally.record(play_once(start, p, &mut rng, cfg.max_rounds, cache)?);
    }
    Ok(tally)
}

/// Sequential simulation; see the `coordsolve` crate for a parallel driver
/// producing identical reports.
pub fn simulate(game: &WlcGame, p: &ProtocolSpec, cfg: &SimConfig) -> Result<SimReport> {
    cfg.check()?;
    let start = Stage::initial(alloc::sync::Arc::new(game.clone()));
    let tally = run_trials(&start, p, cfg, 0..cfg.trials, &mut SamplerCache::new())?;
    Ok(tally.into_report(cfg))
}

pub fn validate_config(cfg: &SimConfig) -> Result<()> {
    cfg.check()
}
