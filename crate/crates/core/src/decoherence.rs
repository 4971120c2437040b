//! Monte Carlo ensemble of measurement-interrupted walks.
//!
//! Each trajectory evolves the full wave function. After every unitary step
//! the walker's position is measured with probability `q`; a measurement
//! pins the walker to the sampled site and resets its chirality to
//! `(|+⟩ + |−⟩)/√2`. At the horizon the position is read out once more.
//!
//! Trial `i` draws from ChaCha8 stream `i` keyed by the master seed, and
//! trials are grouped into fixed blocks whose histograms are merged in block
//! order. The result is therefore identical for any thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coin::{advance, CoinSpec};
use crate::error::{Result, WalkError};
use crate::lattice::{same_parity, Pmf, WalkState};
use crate::measurement::sample_site;

/// Trials per work block. Part of the reproducibility contract for
/// [`Readout::Exact`], whose float accumulation order depends on it.
pub const BLOCK_TRIALS: u64 = 1024;

/// Largest horizon for which the coherent prefix is cached.
const COHERENT_CACHE_LIMIT: usize = 1024;

/// How the position at the horizon enters the ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Readout {
    /// Sample one site per trajectory.
    #[default]
    Sampled,
    /// Add the trajectory's exact final PMF.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoherenceConfig {
    pub p: f64,
    pub q: f64,
    pub t_max: usize,
    pub trials: u64,
    pub master_seed: u64,
    pub readout: Readout,
}

impl DecoherenceConfig {
    pub fn new(p: f64, q: f64, t_max: usize, trials: u64, master_seed: u64) -> Result<Self> {
        let config = Self {
            p,
            q,
            t_max,
            trials,
            master_seed,
            readout: Readout::Sampled,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_readout(mut self, readout: Readout) -> Self {
        self.readout = readout;
        self
    }

    pub fn validate(&self) -> Result<()> {
        CoinSpec::new(self.p)?;
        if !(0.0..=1.0).contains(&self.q) {
            return Err(WalkError::InvalidMeasurementProbability(self.q));
        }
        if self.trials == 0 {
            return Err(WalkError::NoTrials);
        }
        let overflow = WalkError::WorkOverflow {
            trials: self.trials,
            steps: self.t_max,
        };
        let work = self
            .trials
            .checked_mul(self.t_max.max(1) as u64)
            .ok_or(overflow.clone())?;
        // Histogram moments are accumulated as i128 sums of n² · count.
        if work > i64::MAX as u64 || self.t_max > u32::MAX as usize {
            return Err(overflow);
        }
        Ok(())
    }
}

/// Random stream of trial `trial`: ChaCha8 seeded from `master_seed`, with
/// the trial index as stream id.
pub fn trial_stream(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

/// Live wave function of one trajectory, with a spare buffer pair.
struct Scratch {
    time: usize,
    lowest: i64,
    plus: Vec<f64>,
    minus: Vec<f64>,
    next_plus: Vec<f64>,
    next_minus: Vec<f64>,
}

impl Scratch {
    fn new() -> Self {
        Self {
            time: 0,
            lowest: 0,
            plus: Vec::new(),
            minus: Vec::new(),
            next_plus: Vec::new(),
            next_minus: Vec::new(),
        }
    }

    fn reset(&mut self, site: i64, time: usize) {
        let amp = std::f64::consts::FRAC_1_SQRT_2;
        self.time = time;
        self.lowest = site;
        self.plus.clear();
        self.plus.push(amp);
        self.minus.clear();
        self.minus.push(amp);
    }

    fn advance(&mut self, spec: &CoinSpec) {
        let len = self.plus.len() + 2;
        self.next_plus.resize(len, 0.0);
        self.next_minus.resize(len, 0.0);
        advance(
            spec,
            self.time,
            self.lowest,
            &self.plus,
            &self.minus,
            &mut self.next_plus,
            &mut self.next_minus,
        )
        .expect("trajectories stay on the light cone");
        std::mem::swap(&mut self.plus, &mut self.next_plus);
        std::mem::swap(&mut self.minus, &mut self.next_minus);
        self.time += 1;
        self.lowest -= 1;
    }

    fn sample(&self, u: f64) -> i64 {
        sample_site(self.time, self.lowest, &self.plus, &self.minus, u)
    }
}

/// Histogram over `[-t_max, t_max]`.
#[derive(Debug, Clone, PartialEq)]
enum Histogram {
    Counts(Vec<u64>),
    Weights(Vec<f64>),
}

impl Histogram {
    fn new(readout: Readout, t_max: usize) -> Self {
        let len = 2 * t_max + 1;
        match readout {
            Readout::Sampled => Histogram::Counts(vec![0; len]),
            Readout::Exact => Histogram::Weights(vec![0.0; len]),
        }
    }

    fn merge(&mut self, other: &Histogram) {
        match (self, other) {
            (Histogram::Counts(a), Histogram::Counts(b)) => {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y)
            }
            (Histogram::Weights(a), Histogram::Weights(b)) => {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y)
            }
            _ => unreachable!("blocks share one readout mode"),
        }
    }
}

/// Precomputed data shared by all trajectories of one configuration.
pub struct EnsembleEngine {
    config: DecoherenceConfig,
    spec: CoinSpec,
    /// Coherent amplitudes `(ψ₊, ψ₋)` at each `t ≤ t_max`, stored from site `-t`.
    coherent: Option<Vec<(Vec<f64>, Vec<f64>)>>,
}

impl EnsembleEngine {
    pub fn new(config: DecoherenceConfig) -> Result<Self> {
        config.validate()?;
        let spec = CoinSpec::new(config.p)?;
        let coherent = (config.t_max <= COHERENT_CACHE_LIMIT).then(|| {
            let mut states = Vec::with_capacity(config.t_max + 1);
            let mut scratch = Scratch::new();
            scratch.reset(0, 0);
            states.push((scratch.plus.clone(), scratch.minus.clone()));
            for _ in 0..config.t_max {
                scratch.advance(&spec);
                states.push((scratch.plus.clone(), scratch.minus.clone()));
            }
            states
        });
        Ok(Self {
            config,
            spec,
            coherent,
        })
    }

    pub fn config(&self) -> &DecoherenceConfig {
        &self.config
    }

    /// Runs the measured dynamics up to the horizon. Returns the scratch
    /// (when it holds the live state) for the final readout.
    fn evolve_trajectory<'s, R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        scratch: &'s mut Scratch,
    ) -> Option<&'s Scratch> {
        let q = self.config.q;
        // `live` is false while the walker still follows the cached coherent path.
        let mut live = self.coherent.is_none();
        if live {
            scratch.reset(0, 0);
        }
        for t in 0..self.config.t_max {
            if live {
                scratch.advance(&self.spec);
            }
            if rng.random::<f64>() < q {
                let u: f64 = rng.random();
                let now = t + 1;
                let site = if live {
                    scratch.sample(u)
                } else {
                    self.sample_coherent(now, u)
                };
                scratch.reset(site, now);
                live = true;
            }
        }
        live.then_some(&*scratch)
    }

    fn sample_coherent(&self, time: usize, u: f64) -> i64 {
        let (plus, minus) = &self.coherent.as_ref().expect("coherent cache")[time];
        sample_site(time, -(time as i64), plus, minus, u)
    }

    /// Final site of one trajectory drawn from `rng`.
    pub fn run_trajectory<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        let mut scratch = Scratch::new();
        self.trajectory_site(rng, &mut scratch)
    }

    fn trajectory_site<R: Rng + ?Sized>(&self, rng: &mut R, scratch: &mut Scratch) -> i64 {
        let live = self.evolve_trajectory(rng, scratch).is_some();
        let u: f64 = rng.random();
        if live {
            scratch.sample(u)
        } else {
            self.sample_coherent(self.config.t_max, u)
        }
    }

    fn accumulate_exact<R: Rng + ?Sized>(&self, rng: &mut R, scratch: &mut Scratch, weights: &mut [f64]) {
        let t_max = self.config.t_max as i64;
        let (lowest, plus, minus) = match self.evolve_trajectory(rng, scratch) {
            Some(s) => (s.lowest, s.plus.as_slice(), s.minus.as_slice()),
            None => {
                let (plus, minus) = &self.coherent.as_ref().expect("coherent cache")[self.config.t_max];
                (-t_max, plus.as_slice(), minus.as_slice())
            }
        };
        for (i, (a, b)) in plus.iter().zip(minus).enumerate() {
            let mass = a * a + b * b;
            if mass > 0.0 {
                weights[(lowest + i as i64 + t_max) as usize] += mass;
            }
        }
    }

    fn run_block(&self, block: u64) -> Histogram {
        let first = block * BLOCK_TRIALS;
        let last = (first + BLOCK_TRIALS).min(self.config.trials);
        let t_max = self.config.t_max;
        let mut hist = Histogram::new(self.config.readout, t_max);
        let mut scratch = Scratch::new();
        for trial in first..last {
            let mut rng = trial_stream(self.config.master_seed, trial);
            match &mut hist {
                Histogram::Counts(counts) => {
                    let site = self.trajectory_site(&mut rng, &mut scratch);
                    counts[(site + t_max as i64) as usize] += 1;
                }
                Histogram::Weights(weights) => {
                    self.accumulate_exact(&mut rng, &mut scratch, weights);
                }
            }
        }
        hist
    }

    /// Runs every trial and aggregates the final positions.
    pub fn run(&self) -> EnsembleResult {
        let blocks = self.config.trials.div_ceil(BLOCK_TRIALS);
        #[cfg(feature = "parallel")]
        let partials: Vec<Histogram> = {
            use rayon::prelude::*;
            (0..blocks).into_par_iter().map(|b| self.run_block(b)).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let partials: Vec<Histogram> = (0..blocks).map(|b| self.run_block(b)).collect();

        let mut total = Histogram::new(self.config.readout, self.config.t_max);
        for partial in &partials {
            total.merge(partial);
        }
        EnsembleResult::from_histogram(total, self.config.t_max, self.config.trials)
    }
}

/// Aggregate statistics of an ensemble run.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleResult {
    pub empirical_pmf: Pmf,
    pub mean: f64,
    pub variance: f64,
    /// Fourth central moment, used for the standard error of `variance`.
    pub fourth_central_moment: f64,
    pub trials: u64,
    /// Raw counts over `[-t_max, t_max]` for sampled readout.
    pub counts: Option<Vec<u64>>,
}

impl EnsembleResult {
    fn from_histogram(hist: Histogram, t_max: usize, trials: u64) -> Self {
        let lowest = -(t_max as i64);
        match hist {
            Histogram::Counts(counts) => {
                let (mut s1, mut s2) = (0i128, 0i128);
                for (i, &c) in counts.iter().enumerate() {
                    let n = (lowest + i as i64) as i128;
                    s1 += n * c as i128;
                    s2 += n * n * c as i128;
                }
                let mean = s1 as f64 / trials as f64;
                // N·Σn²c − (Σnc)² is exact in integers.
                let spread = trials as i128 * s2 - s1 * s1;
                let variance = spread as f64 / (trials as f64 * trials as f64);
                let empirical_pmf =
                    Pmf::from_counts(t_max, lowest, &counts).expect("at least one trial");
                let fourth = central_moment(&empirical_pmf, mean, 4);
                Self {
                    empirical_pmf,
                    mean,
                    variance,
                    fourth_central_moment: fourth,
                    trials,
                    counts: Some(counts),
                }
            }
            Histogram::Weights(weights) => {
                let mass = weights.iter().map(|w| w / trials as f64).collect();
                let empirical_pmf = Pmf::from_masses(t_max, lowest, mass)
                    .expect("average of normalized distributions");
                let mean = empirical_pmf.mean();
                Self {
                    variance: empirical_pmf.variance(),
                    fourth_central_moment: central_moment(&empirical_pmf, mean, 4),
                    mean,
                    empirical_pmf,
                    trials,
                    counts: None,
                }
            }
        }
    }

    /// Standard error of the mean estimate.
    pub fn mean_std_error(&self) -> f64 {
        (self.variance / self.trials as f64).sqrt()
    }

    /// Large-sample standard error of the variance estimate,
    /// `√((μ₄ − σ⁴)/N)`.
    pub fn variance_std_error(&self) -> f64 {
        ((self.fourth_central_moment - self.variance * self.variance).max(0.0)
            / self.trials as f64)
            .sqrt()
    }
}

fn central_moment(pmf: &Pmf, mean: f64, k: i32) -> f64 {
    pmf.iter().map(|(n, m)| (n as f64 - mean).powi(k) * m).sum()
}

/// Runs one trajectory of `config` on `stream` and returns its final site.
pub fn run_trajectory<R: Rng + ?Sized>(config: &DecoherenceConfig, stream: &mut R) -> Result<i64> {
    Ok(EnsembleEngine::new(*config)?.run_trajectory(stream))
}

/// Runs the full ensemble described by `config`.
pub fn run_ensemble(config: &DecoherenceConfig) -> Result<EnsembleResult> {
    Ok(EnsembleEngine::new(*config)?.run())
}

/// Minimum prominence of a mode relative to the tallest smoothed value.
pub const MODE_PROMINENCE: f64 = 0.02;

/// Number of modes of `pmf`.
///
/// Sites of the wrong parity are dropped, the remaining sequence is smoothed
/// with a centered three-point average (two points at the ends), and local
/// maxima whose topographic prominence exceeds [`MODE_PROMINENCE`] of the
/// peak are counted. Flat tops count once.
pub fn count_modes(pmf: &Pmf) -> Result<usize> {
    if pmf.is_empty() {
        return Err(WalkError::EmptyPmf);
    }
    let values: Vec<f64> = pmf.occupied().map(|(_, m)| m).collect();
    if values.is_empty() {
        return Err(WalkError::EmptyPmf);
    }
    let smoothed: Vec<f64> = (0..values.len())
        .map(|i| {
            let lo = i.saturating_sub(1);
            let hi = (i + 1).min(values.len() - 1);
            values[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect();
    let peak = smoothed.iter().copied().fold(0.0, f64::max);
    if peak <= 0.0 {
        return Ok(0);
    }
    let threshold = MODE_PROMINENCE * peak;

    let mut modes = 0;
    let mut i = 0;
    while i < smoothed.len() {
        // Plateau [i, j).
        let h = smoothed[i];
        let mut j = i + 1;
        while j < smoothed.len() && smoothed[j] == h {
            j += 1;
        }
        let left_lower = i == 0 || smoothed[i - 1] < h;
        let right_lower = j == smoothed.len() || smoothed[j] < h;
        if left_lower && right_lower && h > 0.0 {
            // A missing side (sequence edge) does not constrain the base.
            let left_base = (i > 0).then(|| {
                smoothed[..i]
                    .iter()
                    .rev()
                    .take_while(|&&v| v <= h)
                    .copied()
                    .fold(h, f64::min)
            });
            let right_base = (j < smoothed.len()).then(|| {
                smoothed[j..]
                    .iter()
                    .take_while(|&&v| v <= h)
                    .copied()
                    .fold(h, f64::min)
            });
            let base = match (left_base, right_base) {
                (Some(l), Some(r)) => l.max(r),
                (Some(b), None) | (None, Some(b)) => b,
                (None, None) => 0.0,
            };
            if h - base > threshold {
                modes += 1;
            }
        }
        i = j;
    }
    Ok(modes)
}

/// `true` when `pmf` has at least two prominent modes.
pub fn detect_bimodality(pmf: &Pmf) -> Result<bool> {
    Ok(count_modes(pmf)? >= 2)
}

/// Exact coherent PMF at `t_max`, for comparisons with the `q = 0` ensemble.
pub fn coherent_pmf(p: f64, t_max: usize) -> Result<Pmf> {
    let spec = CoinSpec::new(p)?;
    Ok(crate::coin::evolve(&WalkState::initial(), &spec, t_max)?.pmf())
}

/// Counts restricted to on-parity sites, as `(site, count)`.
pub fn occupied_counts(counts: &[u64], t_max: usize) -> impl Iterator<Item = (i64, u64)> + '_ {
    let lowest = -(t_max as i64);
    counts
        .iter()
        .enumerate()
        .map(move |(i, &c)| (lowest + i as i64, c))
        .filter(move |&(n, _)| same_parity(n, t_max))
}
