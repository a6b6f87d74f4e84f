//! Comparison of simulated statistics with the closed-form limits, plus the
//! moment, LLN and CLT checks on the conditional i.i.d. structure.

use alloc::format;
use alloc::vec::Vec;

use crate::engine::{reserve, simulate_max_batch, CompensatedSum, EmpiricalCdf, SimulationConfig};
use crate::error::Error;
use crate::executor::Executor;
use crate::limit_laws::{general_unchecked, ModelSummary};
use crate::measures::DirectingMeasure;
use crate::normal::phi;
use crate::stream::{RandomStream, StreamKey};

/// Half-width of the window around each atom of the limit that is left out
/// of the sup distance.
pub const DEFAULT_ATOM_WINDOW: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComparisonReport {
    pub x_grid: Vec<f64>,
    pub empirical: Vec<f64>,
    pub theoretical: Vec<f64>,
    pub sup_distance: f64,
    pub n: u64,
    pub replications: u64,
    pub excluded_points: Vec<f64>,
}

impl ComparisonReport {
    pub fn abs_diff(&self) -> impl Iterator<Item = f64> + '_ {
        self.empirical
            .iter()
            .zip(&self.theoretical)
            .map(|(e, t)| (e - t).abs())
    }

    /// Empirical value at a grid point.
    pub fn empirical_at(&self, x: f64) -> Option<f64> {
        self.x_grid
            .iter()
            .position(|&g| (g - x).abs() < 1e-12)
            .map(|i| self.empirical[i])
    }

    pub fn theoretical_at(&self, x: f64) -> Option<f64> {
        self.x_grid
            .iter()
            .position(|&g| (g - x).abs() < 1e-12)
            .map(|i| self.theoretical[i])
    }
}

/// Compares an already simulated batch with `general_limit` on `x_grid`.
pub fn compare_ecdf(
    ecdf: &EmpiricalCdf,
    summary: &ModelSummary,
    x_grid: &[f64],
    atom_window: f64,
) -> Result<ComparisonReport, Error> {
    summary.validate()?;
    if x_grid.is_empty() {
        return Err(Error::InvalidConfig("x_grid must not be empty".into()));
    }
    if !(atom_window.is_finite() && atom_window >= 0.0) {
        return Err(Error::InvalidConfig(format!("atom window {atom_window} must be >= 0")));
    }
    let atoms = summary.atoms();
    let mut empirical = Vec::with_capacity(x_grid.len());
    let mut theoretical = Vec::with_capacity(x_grid.len());
    let mut excluded_points = Vec::new();
    let mut sup_distance: f64 = 0.0;
    for &x in x_grid {
        let e = ecdf.evaluate(x)?;
        let t = general_unchecked(x, summary);
        if atoms.iter().any(|a| (x - a).abs() < atom_window) {
            excluded_points.push(x);
        } else {
            sup_distance = sup_distance.max((e - t).abs());
        }
        empirical.push(e);
        theoretical.push(t);
    }
    Ok(ComparisonReport {
        x_grid: x_grid.to_vec(),
        empirical,
        theoretical,
        sup_distance,
        n: ecdf.n_used(),
        replications: ecdf.replications_used(),
        excluded_points,
    })
}

/// Simulates `M_n/√n` and compares it with the drift-decomposed limit of the
/// measure's summary.
pub fn compare_to_limit<E: Executor>(
    measure: &DirectingMeasure,
    config: &SimulationConfig,
    atom_window: f64,
    executor: &E,
) -> Result<ComparisonReport, Error> {
    if config.x_grid.is_empty() {
        return Err(Error::InvalidConfig("x_grid must not be empty".into()));
    }
    let ecdf = simulate_max_batch(measure, config, executor)?;
    compare_ecdf(&ecdf, &measure.summarize(), &config.x_grid, atom_window)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepPoint {
    pub n: u64,
    pub sup_distance: f64,
}

/// Sup distance to the limit for each sequence length in `n_list`.
pub fn convergence_sweep<E: Executor>(
    measure: &DirectingMeasure,
    n_list: &[u64],
    replications: u64,
    master_seed: u64,
    x_grid: &[f64],
    atom_window: f64,
    executor: &E,
) -> Result<Vec<SweepPoint>, Error> {
    if n_list.is_empty() {
        return Err(Error::InvalidConfig("sweep needs at least one n".into()));
    }
    if let Some(w) = n_list.windows(2).find(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig(format!(
            "sweep lengths must be increasing ({} is followed by {})",
            w[0], w[1]
        )));
    }
    let mut out = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let config = SimulationConfig::new(n, replications, master_seed, x_grid.to_vec())?;
        let report = compare_to_limit(measure, &config, atom_window, executor)?;
        out.push(SweepPoint {
            n,
            sup_distance: report.sup_distance,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MomentEstimates {
    pub e_x1x2: f64,
    pub e_x1sq_x2sq: f64,
    pub se_x1x2: f64,
    pub se_x1sq_x2sq: f64,
    pub pairs: u64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Welford {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn std_error(&self) -> f64 {
        if self.count < 2 {
            return f64::INFINITY;
        }
        let var = self.m2 / (self.count - 1) as f64;
        libm::sqrt(var / self.count as f64)
    }
}

pub const MIN_MOMENT_PAIRS: u64 = 1_000;

/// Pair-sampled estimates of `E X_1 X_2` and `E X_1² X_2²`.
///
/// Each pair draws one component and then two conditional draws from it.
pub fn moment_conditions(
    measure: &DirectingMeasure,
    pairs: u64,
    stream: &mut RandomStream,
) -> Result<MomentEstimates, Error> {
    measure.validate()?;
    if pairs < MIN_MOMENT_PAIRS {
        return Err(Error::Precondition(format!(
            "moment estimates need at least {MIN_MOMENT_PAIRS} pairs, got {pairs}"
        )));
    }
    let samplers: Vec<_> = measure.components().iter().map(|c| c.law.sampler()).collect();
    let (mut cross, mut square) = (Welford::default(), Welford::default());
    for _ in 0..pairs {
        let j = measure.sample_component(stream);
        let a = samplers[j].draw(stream);
        let b = samplers[j].draw(stream);
        cross.push(a * b);
        square.push(a * a * b * b);
    }
    Ok(MomentEstimates {
        e_x1x2: cross.mean,
        e_x1sq_x2sq: square.mean,
        se_x1x2: cross.std_error(),
        se_x1sq_x2sq: square.std_error(),
        pairs,
    })
}

pub const MIN_LLN_LENGTH: u64 = 1_000;

/// Largest `|S_n/n − E_F X_1|` over replications, with `F` the drawn component.
pub fn lln_drift_check<E: Executor>(
    measure: &DirectingMeasure,
    n: u64,
    replications: u64,
    master_seed: u64,
    executor: &E,
) -> Result<f64, Error> {
    measure.validate()?;
    if n < MIN_LLN_LENGTH {
        return Err(Error::Precondition(format!(
            "LLN check needs n >= {MIN_LLN_LENGTH}, got {n}"
        )));
    }
    if replications == 0 {
        return Err(Error::InvalidConfig("replications must be >= 1".into()));
    }
    let key = StreamKey::new(master_seed);
    let mut deviations: Vec<f64> = reserve(n, replications)?;
    executor.extend_indexed(&mut deviations, replications, |r| {
        let mut stream = key.stream(r);
        let j = measure.sample_component(&mut stream);
        let law = measure.law(j);
        let sampler = law.sampler();
        let mut s = CompensatedSum::default();
        for _ in 0..n {
            s.add(sampler.draw(&mut stream));
        }
        (s.value() / n as f64 - law.mean()).abs()
    });
    Ok(deviations.into_iter().fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CltReport {
    pub sup_distance: f64,
    pub standardized: u64,
    /// Replications that drew a zero-variance component and were left out.
    pub skipped_degenerate: u64,
}

pub const CLT_GRID_POINTS: usize = 201;
pub const CLT_GRID_HALF_WIDTH: f64 = 4.0;

pub fn clt_grid() -> Vec<f64> {
    let steps = (CLT_GRID_POINTS - 1) as f64;
    (0..CLT_GRID_POINTS)
        .map(|i| -CLT_GRID_HALF_WIDTH + 2.0 * CLT_GRID_HALF_WIDTH * i as f64 / steps)
        .collect()
}

/// Sup distance on [-4, 4] between the law of `(S_n − n·mean_j)/(√n·σ_j)`
/// and Φ, standardizing by the exact moments of the drawn component.
pub fn clt_check<E: Executor>(
    measure: &DirectingMeasure,
    n: u64,
    replications: u64,
    master_seed: u64,
    executor: &E,
) -> Result<CltReport, Error> {
    measure.validate()?;
    if n == 0 || replications == 0 {
        return Err(Error::InvalidConfig("n and replications must be >= 1".into()));
    }
    if measure
        .components()
        .iter()
        .all(|c| c.weight == 0.0 || c.law.is_degenerate())
    {
        return Err(Error::AllDegenerate);
    }
    let key = StreamKey::new(master_seed);
    let sqrt_n = libm::sqrt(n as f64);
    let mut values: Vec<Option<f64>> = reserve(n, replications)?;
    executor.extend_indexed(&mut values, replications, |r| {
        let mut stream = key.stream(r);
        let j = measure.sample_component(&mut stream);
        let law = measure.law(j);
        if law.is_degenerate() {
            return None;
        }
        let sampler = law.sampler();
        let mut s = CompensatedSum::default();
        for _ in 0..n {
            s.add(sampler.draw(&mut stream));
        }
        Some((s.value() - n as f64 * law.mean()) / (sqrt_n * law.std_dev()))
    });
    let skipped_degenerate = values.iter().filter(|v| v.is_none()).count() as u64;
    let standardized: Vec<f64> = values.into_iter().flatten().collect();
    let count = standardized.len() as u64;
    let ecdf = EmpiricalCdf::from_samples(standardized, n)?;
    let sup_distance = clt_grid()
        .into_iter()
        .map(|x| (ecdf.count_below(x) as f64 / count as f64 - phi(x)).abs())
        .fold(0.0, f64::max);
    Ok(CltReport {
        sup_distance,
        standardized: count,
        skipped_degenerate,
    })
}
