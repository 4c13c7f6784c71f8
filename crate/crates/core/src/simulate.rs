//! Monte Carlo harness over the exact codec.
//!
//! Every trial draws its own layout (for the random annex scheme), source
//! packets, schedule and coding vectors from a per-trial stream of the
//! master seed, so results do not depend on how trials are scheduled.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::codec::{random_packets, Decoder, Encoder};
use crate::error::{Error, Result};
use crate::gfield::GaloisField;
use crate::layout::{sample_annex, CodeParams, GenerationLayout, Scheme};

/// Ingest budget per information packet before a trial is declared stuck.
pub const SAFETY_FACTOR: usize = 50;

/// Independent generator for trial `index` under `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrialResult {
    pub packets_to_completion: usize,
    /// packet count at which the 1st, 2nd, ... generation was decoded
    pub decoded_generations_timeline: Vec<usize>,
    pub per_generation_received: Vec<usize>,
    pub max_system_dim: usize,
    pub field_ops: u64,
}

/// Collects coded packets from uniformly chosen generations until everything
/// decodes, then checks the recovered content against the source.
pub fn run_trial(layout: &GenerationLayout, field: &GaloisField, symbols: usize, rng: &mut impl Rng) -> Result<TrialResult> {
    let total = layout.total_packets();
    let source = random_packets(total, symbols, field, rng);
    let encoder = Encoder::new(field, layout, &source)?;
    let mut decoder = Decoder::new(field, layout, symbols);
    let mut timeline = Vec::with_capacity(layout.generations());
    let cap = SAFETY_FACTOR * total;
    let mut sent = 0;
    while !decoder.is_complete() {
        if sent >= cap {
            return Err(Error::Stalled { ingested: sent });
        }
        let report = decoder.ingest(&encoder.encode_random(rng))?;
        sent += 1;
        timeline.extend(std::iter::repeat_n(sent, report.newly_decoded));
    }
    if decoder.recover()? != source {
        return Err(Error::State("decoded content differs from the source".into()));
    }
    let stats = decoder.stats();
    Ok(TrialResult {
        packets_to_completion: sent,
        decoded_generations_timeline: timeline,
        per_generation_received: decoder.received().to_vec(),
        max_system_dim: stats.max_system_dim,
        field_ops: stats.field_ops,
    })
}

/// What to simulate: a scheme over fixed parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Experiment {
    pub params: CodeParams,
    pub scheme: Scheme,
}

impl Experiment {
    pub fn new(params: CodeParams, scheme: Scheme) -> Self {
        Self { params, scheme }
    }

    /// Runs `trials` independent trials in parallel.
    pub fn run(&self, trials: usize, seed: u64) -> Result<Vec<TrialResult>> {
        self.params.validate()?;
        let field = GaloisField::with_order(self.params.field_size)?;
        let fixed = match self.scheme {
            Scheme::RandomAnnex => None,
            Scheme::HeadToToe => Some(GenerationLayout::head_to_toe(self.params)?),
            Scheme::Disjoint => Some(GenerationLayout::disjoint(self.params)?),
        };
        (0..trials as u64)
            .into_par_iter()
            .map(|t| {
                let mut rng = trial_rng(seed, t);
                match &fixed {
                    Some(layout) => run_trial(layout, &field, self.params.symbols, &mut rng),
                    None => {
                        let layout = GenerationLayout::random_annex(self.params, &mut rng)?;
                        run_trial(&layout, &field, self.params.symbols, &mut rng)
                    }
                }
            })
            .collect()
    }

    pub fn summarize(&self, trials: usize, seed: u64) -> Result<Summary> {
        Ok(Summary::from_trials(&self.run(trials, seed)?, seed))
    }

    pub fn failure_curve(&self, grid: &[usize], trials: usize, seed: u64) -> Result<FailureCurve> {
        let results = self.run(trials, seed)?;
        FailureCurve::from_trials(&results, grid, seed)
    }
}

/// Mean packets to completion with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub trials: usize,
    pub mean: f64,
    pub stderr: f64,
    pub seed: u64,
}

impl Summary {
    pub fn from_trials(results: &[TrialResult], seed: u64) -> Self {
        let counts: Vec<f64> = results.iter().map(|r| r.packets_to_completion as f64).collect();
        let (mean, stderr) = mean_and_stderr(&counts);
        Self { trials: counts.len(), mean, stderr, seed }
    }
}

pub fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Fraction of trials still undecoded after each number of received packets.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FailureCurve {
    pub grid: Vec<usize>,
    pub p_fail: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
}

impl FailureCurve {
    pub fn from_trials(results: &[TrialResult], grid: &[usize], seed: u64) -> Result<Self> {
        if grid.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Param("failure-curve grid must be sorted ascending".into()));
        }
        let mut done: Vec<usize> = results.iter().map(|r| r.packets_to_completion).collect();
        done.sort_unstable();
        let trials = done.len();
        let p_fail = grid
            .iter()
            .map(|&m| {
                let finished = done.partition_point(|&k| k <= m);
                (trials - finished) as f64 / trials.max(1) as f64
            })
            .collect();
        Ok(Self { grid: grid.to_vec(), p_fail, trials, seed })
    }
}

/// Monte Carlo estimate of `E|(∪_{i∈I} G_i) ∩ G_j|` over fresh random annex
/// layouts, with `I` a random set of `s` generations and `j ∉ I`. Returns the
/// mean and its standard error.
pub fn empirical_overlap(params: &CodeParams, s: usize, samples: usize, seed: u64) -> Result<(f64, f64)> {
    params.validate()?;
    let n = params.generations();
    if s >= n {
        return Err(Error::Param(format!("s = {s} must be below n = {n}")));
    }
    let chunks = 64u64;
    let per_chunk = samples.div_ceil(chunks as usize);
    let values: Vec<f64> = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = trial_rng(seed, c);
            let mut mark = vec![false; params.total];
            let take = per_chunk.min(samples.saturating_sub(c as usize * per_chunk));
            (0..take)
                .map(|_| {
                    // only the s + 1 generations involved need annexes
                    let picked = index::sample(&mut rng, n, s + 1).into_vec();
                    let (target, union) = picked.split_last().expect("s + 1 >= 1");
                    let target: Vec<usize> = generation(params, *target, &mut rng).collect();
                    for &i in union {
                        for p in generation(params, i, &mut rng) {
                            mark[p] = true;
                        }
                    }
                    let hits = target.iter().filter(|&&p| mark[p]).count();
                    mark.iter_mut().for_each(|m| *m = false);
                    hits as f64
                })
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(mean_and_stderr(&values))
}

fn generation<'a>(params: &'a CodeParams, i: usize, rng: &'a mut impl Rng) -> impl Iterator<Item = usize> + 'a {
    let base = params.base_range(i);
    base.clone().chain(sample_annex(params.total, base, params.annex, rng))
}
