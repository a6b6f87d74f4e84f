//! Monte Carlo simulation of `max_k S_k / √n` and first-passage events.
//!
//! Replication `r` uses the stream `(master_seed, r)`: one component draw,
//! then `n` conditional draws. Only the rescaled maximum of each replication
//! is kept, so memory is one `f64` per replication. Results are placed by
//! replication index before sorting, so the output does not depend on how
//! the executor schedules the work.

use alloc::format;
use alloc::vec::Vec;

use crate::error::Error;
use crate::executor::Executor;
use crate::measures::{DirectingMeasure, Sampler};
use crate::stream::{RandomStream, StreamKey};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimulationConfig {
    pub n: u64,
    pub replications: u64,
    pub master_seed: u64,
    pub x_grid: Vec<f64>,
}

impl SimulationConfig {
    pub fn new(n: u64, replications: u64, master_seed: u64, x_grid: Vec<f64>) -> Result<Self, Error> {
        let c = SimulationConfig {
            n,
            replications,
            master_seed,
            x_grid,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.n == 0 {
            return Err(Error::InvalidConfig("n must be >= 1".into()));
        }
        if self.replications == 0 {
            return Err(Error::InvalidConfig("replications must be >= 1".into()));
        }
        if let Some(x) = self.x_grid.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidConfig(format!("x_grid contains non-finite value {x}")));
        }
        if let Some(w) = self.x_grid.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(format!(
                "x_grid must be strictly increasing ({} is followed by {})",
                w[0], w[1]
            )));
        }
        Ok(())
    }

    pub fn with_n(&self, n: u64) -> Self {
        SimulationConfig { n, ..self.clone() }
    }
}

/// Empirical distribution of a batch of rescaled maxima.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EmpiricalCdf {
    sorted_samples: Vec<f64>,
    n_used: u64,
    replications_used: u64,
}

impl EmpiricalCdf {
    pub fn from_samples(mut samples: Vec<f64>, n_used: u64) -> Result<Self, Error> {
        if samples.is_empty() {
            return Err(Error::EmptyCdf);
        }
        if let Some(v) = samples.iter().find(|v| v.is_nan()) {
            return Err(Error::InvalidConfig(format!("sample {v} is not a number")));
        }
        samples.sort_unstable_by(f64::total_cmp);
        Ok(EmpiricalCdf {
            replications_used: samples.len() as u64,
            sorted_samples: samples,
            n_used,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.sorted_samples
    }

    pub fn n_used(&self) -> u64 {
        self.n_used
    }

    pub fn replications_used(&self) -> u64 {
        self.replications_used
    }

    pub fn len(&self) -> usize {
        self.sorted_samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted_samples.is_empty()
    }

    /// Number of samples strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        self.sorted_samples.partition_point(|&v| v < x)
    }

    /// Fraction of samples strictly below `x`.
    pub fn evaluate(&self, x: f64) -> Result<f64, Error> {
        if self.is_empty() {
            return Err(Error::EmptyCdf);
        }
        Ok(self.count_below(x) as f64 / self.len() as f64)
    }

    /// Fraction of samples at or above `x`.
    pub fn fraction_at_least(&self, x: f64) -> Result<f64, Error> {
        if self.is_empty() {
            return Err(Error::EmptyCdf);
        }
        Ok((self.len() - self.count_below(x)) as f64 / self.len() as f64)
    }

    /// Smallest sample `s` whose fraction of samples `<= s` reaches `p`.
    pub fn quantile(&self, p: f64) -> Result<f64, Error> {
        if self.is_empty() {
            return Err(Error::EmptyCdf);
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Precondition(format!("quantile level {p} is not in [0, 1]")));
        }
        let len = self.len();
        let rank = libm::ceil(p * len as f64) as usize;
        Ok(self.sorted_samples[rank.clamp(1, len) - 1])
    }
}

/// Free-function form of [`EmpiricalCdf::evaluate`].
pub fn evaluate_cdf(ecdf: &EmpiricalCdf, x: f64) -> Result<f64, Error> {
    ecdf.evaluate(x)
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    #[inline]
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub(crate) fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// `max(S_1, …, S_n)` along one conditional path.
#[inline]
pub fn path_max(sampler: &Sampler, n: u64, stream: &mut RandomStream) -> f64 {
    let mut s = CompensatedSum::default();
    let mut best = f64::NEG_INFINITY;
    for _ in 0..n {
        s.add(sampler.draw(stream));
        best = best.max(s.value());
    }
    best
}

/// First `k` in `1..=n` with `S_k > threshold`, scanning no further.
#[inline]
pub fn first_passage_time(
    sampler: &Sampler,
    n: u64,
    threshold: f64,
    stream: &mut RandomStream,
) -> Option<u64> {
    let mut s = CompensatedSum::default();
    for k in 1..=n {
        s.add(sampler.draw(stream));
        if s.value() > threshold {
            return Some(k);
        }
    }
    None
}

fn samplers(measure: &DirectingMeasure) -> Vec<Sampler> {
    measure.components().iter().map(|c| c.law.sampler()).collect()
}

/// Unscaled maximum `M_n` of replication `replication`.
pub fn replication_max(measure: &DirectingMeasure, n: u64, key: &StreamKey, replication: u64) -> f64 {
    let mut stream = key.stream(replication);
    let j = measure.sample_component(&mut stream);
    path_max(&measure.law(j).sampler(), n, &mut stream)
}

/// `T_n` of replication `replication` for the raw level `threshold`.
pub fn replication_first_passage(
    measure: &DirectingMeasure,
    n: u64,
    threshold: f64,
    key: &StreamKey,
    replication: u64,
) -> Option<u64> {
    let mut stream = key.stream(replication);
    let j = measure.sample_component(&mut stream);
    first_passage_time(&measure.law(j).sampler(), n, threshold, &mut stream)
}

pub(crate) fn reserve<T>(n: u64, replications: u64) -> Result<Vec<T>, Error> {
    let exhausted = || Error::ResourceExhausted {
        n,
        replications,
        work: n as u128 * replications as u128,
    };
    let count = usize::try_from(replications).map_err(|_| exhausted())?;
    let mut out = Vec::new();
    out.try_reserve_exact(count).map_err(|_| exhausted())?;
    Ok(out)
}

/// The level `x√n` that a raw partial sum must exceed.
#[inline]
pub fn passage_level(x: f64, n: u64) -> f64 {
    x * libm::sqrt(n as f64)
}

/// Empirical law of `M_n/√n` over `config.replications` replications.
pub fn simulate_max_batch<E: Executor>(
    measure: &DirectingMeasure,
    config: &SimulationConfig,
    executor: &E,
) -> Result<EmpiricalCdf, Error> {
    measure.validate()?;
    config.validate()?;
    let key = StreamKey::new(config.master_seed);
    let samplers = samplers(measure);
    let n = config.n;
    let sqrt_n = libm::sqrt(n as f64);
    let mut out = reserve(n, config.replications)?;
    executor.extend_indexed(&mut out, config.replications, |r| {
        let mut stream = key.stream(r);
        let j = measure.sample_component(&mut stream);
        path_max(&samplers[j], n, &mut stream) / sqrt_n
    });
    EmpiricalCdf::from_samples(out, n)
}

/// Monte Carlo estimate of `P(T_n(x) <= n)`, `T_n(x) = inf{k : S_k > x√n}`.
pub fn first_passage_probability<E: Executor>(
    measure: &DirectingMeasure,
    config: &SimulationConfig,
    x: f64,
    executor: &E,
) -> Result<f64, Error> {
    crate::error::ensure_finite("x", x)?;
    measure.validate()?;
    config.validate()?;
    let key = StreamKey::new(config.master_seed);
    let samplers = samplers(measure);
    let n = config.n;
    let level = passage_level(x, n);
    let mut hits: Vec<bool> = reserve(n, config.replications)?;
    executor.extend_indexed(&mut hits, config.replications, |r| {
        let mut stream = key.stream(r);
        let j = measure.sample_component(&mut stream);
        first_passage_time(&samplers[j], n, level, &mut stream).is_some()
    });
    let count = hits.iter().filter(|&&h| h).count();
    Ok(count as f64 / hits.len() as f64)
}

/// Replications among the first `paths` where `T_n(x) <= n` and
/// `M_n > x√n` disagree. Both sides are recomputed from the same stream.
pub fn passage_identity_violations<E: Executor>(
    measure: &DirectingMeasure,
    n: u64,
    x: f64,
    master_seed: u64,
    paths: u64,
    executor: &E,
) -> Result<u64, Error> {
    crate::error::ensure_finite("x", x)?;
    measure.validate()?;
    let key = StreamKey::new(master_seed);
    let level = passage_level(x, n);
    let mut agree: Vec<bool> = reserve(n, paths)?;
    executor.extend_indexed(&mut agree, paths, |r| {
        let hit = replication_first_passage(measure, n, level, &key, r).is_some();
        let over = replication_max(measure, n, &key, r) > level;
        hit == over
    });
    Ok(agree.iter().filter(|&&a| !a).count() as u64)
}
