//! Seeded Monte Carlo engine: null critical values, parametric-bootstrap
//! p-values and power studies.
//!
//! Replicate `r` of any study draws from sub-stream `r` (null replicates) or
//! `(i + 1) << 40 | r` (alternative `i`) of the master seed, so every table is
//! a pure function of its spec. Work is spread over a rayon pool whose size
//! comes from the spec or from `GOF_THREADS` (0 or unset means one thread per
//! core); the thread count never changes the output.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{edf_statistics, pit_transform, EdfStatistics};
use crate::distributions::{sample_with, stream_rng, AlternativeSpec, GENERATOR};
use crate::error::{Error, Result};
use crate::estimation::{fit_cauchy_ml, standardize, FitMode};
use crate::statistic::{compute_statistic, delta_scaled, TestConfig};
use crate::ENGINE_VERSION;

/// Environment variable holding the worker count.
pub const THREADS_ENV: &str = "GOF_THREADS";

const ALTERNATIVE_STREAM_SHIFT: u32 = 40;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata {
    pub generator: String,
    pub engine_version: String,
}

impl Metadata {
    pub fn current() -> Self {
        Metadata { generator: GENERATOR.to_string(), engine_version: ENGINE_VERSION.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSpec {
    pub n: usize,
    pub cfg: TestConfig,
    pub reps: usize,
    /// Significance levels, ascending.
    pub levels: Vec<f64>,
    pub seed: u64,
    /// Worker count; `None` defers to `GOF_THREADS`.
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl CalibrationSpec {
    pub fn validate(&self) -> Result<()> {
        self.cfg.validate()?;
        if self.n < 3 {
            return Err(Error::SampleTooSmall { needed: 3, got: self.n });
        }
        if self.reps < 100 {
            return Err(Error::domain(format!("at least 100 replications required, got {}", self.reps)));
        }
        validate_levels(&self.levels)
    }
}

fn validate_levels(levels: &[f64]) -> Result<()> {
    if levels.is_empty() {
        return Err(Error::domain("at least one significance level required"));
    }
    if let Some(l) = levels.iter().find(|l| !(**l > 0.0 && **l < 1.0)) {
        return Err(Error::domain(format!("significance level {l} outside (0, 1)")));
    }
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("significance levels must be strictly ascending"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalValueRow {
    pub level: f64,
    pub critical_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalValueTable {
    pub n: usize,
    pub config: TestConfig,
    pub reps: usize,
    pub seed: u64,
    pub rows: Vec<CriticalValueRow>,
    pub metadata: Metadata,
}

impl CriticalValueTable {
    pub fn critical_value(&self, level: f64) -> Option<f64> {
        self.rows.iter().find(|r| r.level == level).map(|r| r.critical_value)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerStudySpec {
    pub n: usize,
    pub alternatives: Vec<AlternativeSpec>,
    pub cfg: TestConfig,
    pub reps: usize,
    pub level: f64,
    pub seed: u64,
    /// Also run KS, CvM, AD and Watson on the same draws.
    pub baseline_tests: bool,
    /// Null replications used to calibrate the critical values.
    pub calibration_reps: usize,
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl PowerStudySpec {
    pub fn validate(&self) -> Result<()> {
        self.cfg.validate()?;
        if self.n < 3 {
            return Err(Error::SampleTooSmall { needed: 3, got: self.n });
        }
        if self.reps < 100 || self.calibration_reps < 100 {
            return Err(Error::domain("at least 100 replications required"));
        }
        if self.baseline_tests && self.cfg.fit_mode != FitMode::Joint {
            return Err(Error::domain("baseline tests need the joint fit mode"));
        }
        for alt in &self.alternatives {
            alt.validate()?;
        }
        validate_levels(&[self.level])
    }
}

/// Rejection proportions of the four EDF tests.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselinePower {
    pub ks: f64,
    pub cvm: f64,
    pub ad: f64,
    pub watson: f64,
}

impl BaselinePower {
    pub fn as_array(&self) -> [f64; 4] {
        [self.ks, self.cvm, self.ad, self.watson]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerRow {
    pub alternative: AlternativeSpec,
    pub label: String,
    /// Proportion of replicates rejected by the characteristic-function test.
    pub rejection_rate: f64,
    pub baselines: Option<BaselinePower>,
}

impl PowerRow {
    pub fn percent(&self) -> f64 {
        100.0 * self.rejection_rate
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerTable {
    pub n: usize,
    pub config: TestConfig,
    pub reps: usize,
    pub calibration_reps: usize,
    pub level: f64,
    pub seed: u64,
    pub critical_value: f64,
    pub baseline_critical_values: Option<EdfStatistics>,
    pub rows: Vec<PowerRow>,
    pub metadata: Metadata,
}

/// Worker count from `GOF_THREADS`; 0 when unset or unparsable.
pub fn threads_from_env() -> usize {
    std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(0)
}

fn run_in_pool<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    let threads = threads.unwrap_or_else(threads_from_env);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::domain(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(job))
}

/// One replicate's statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Draw {
    pub delta: f64,
    pub edf: Option<EdfStatistics>,
}

fn run_replicate(spec: &AlternativeSpec, n: usize, cfg: &TestConfig, seed: u64, stream: u64, edf: bool) -> Result<Draw> {
    let mut rng = stream_rng(seed, stream);
    let x = sample_with(spec, n, &mut rng)?;
    let fit = fit_cauchy_ml(&x, cfg.fit_mode)?;
    let y = standardize(&x, &fit, cfg.exponent)?;
    let delta = delta_scaled(y.values(), cfg)?.delta;
    let edf = if edf { Some(edf_statistics(&pit_transform(&x, &fit)?)) } else { None };
    Ok(Draw { delta, edf })
}

/// Statistics of `reps` replicates drawn from `spec`, streams
/// `first_stream .. first_stream + reps`, in stream order.
pub fn simulate(
    spec: &AlternativeSpec,
    n: usize,
    cfg: &TestConfig,
    reps: usize,
    seed: u64,
    first_stream: u64,
    edf: bool,
) -> Result<Vec<Draw>> {
    (0..reps as u64)
        .into_par_iter()
        .map(|r| run_replicate(spec, n, cfg, seed, first_stream + r, edf))
        .collect()
}

/// Upper `level` quantile: order statistic `ceil((1 - level) M)` (1-based).
pub fn upper_quantile(sorted: &[f64], level: f64) -> f64 {
    let m = sorted.len();
    let rank = ((1.0 - level) * m as f64 - 1e-9).ceil().clamp(1.0, m as f64) as usize;
    sorted[rank - 1]
}

fn sorted_copy(v: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut s: Vec<f64> = v.collect();
    s.sort_by(f64::total_cmp);
    s
}

/// Simulated critical values under `C(0, 1)`.
///
/// The statistic's null law does not depend on the Cauchy location and
/// scale, so standard samples suffice; the fit is still run on every
/// replicate so estimator noise is part of the null law.
pub fn calibrate(spec: &CalibrationSpec) -> Result<CriticalValueTable> {
    spec.validate()?;
    let draws = run_in_pool(spec.threads, || {
        simulate(&AlternativeSpec::STANDARD_CAUCHY, spec.n, &spec.cfg, spec.reps, spec.seed, 0, false)
    })??;
    let sorted = sorted_copy(draws.iter().map(|d| d.delta));
    let rows = spec
        .levels
        .iter()
        .map(|&level| CriticalValueRow { level, critical_value: upper_quantile(&sorted, level) })
        .collect();
    Ok(CriticalValueTable {
        n: spec.n,
        config: spec.cfg,
        reps: spec.reps,
        seed: spec.seed,
        rows,
        metadata: Metadata::current(),
    })
}

/// Null replicates under `C(0, 1)` on streams `0..reps`, in stream order.
pub fn null_draws(n: usize, cfg: &TestConfig, reps: usize, seed: u64, threads: Option<usize>, edf: bool) -> Result<Vec<Draw>> {
    run_in_pool(threads, || simulate(&AlternativeSpec::STANDARD_CAUCHY, n, cfg, reps, seed, 0, edf))?
}

/// `(1 + #{null >= observed}) / (M + 1)`.
pub fn pvalue_from_null(observed: f64, null: &[f64]) -> f64 {
    let exceed = null.iter().filter(|&&d| d >= observed).count();
    (1 + exceed) as f64 / (null.len() + 1) as f64
}

/// Parametric-bootstrap p-value of an already computed statistic for a
/// sample of size `n`.
pub fn mc_pvalue_for(observed: f64, n: usize, cfg: &TestConfig, reps: usize, seed: u64, threads: Option<usize>) -> Result<f64> {
    if reps < 99 {
        return Err(Error::domain(format!("at least 99 replications required, got {reps}")));
    }
    let draws = null_draws(n, cfg, reps, seed, threads, false)?;
    let null: Vec<f64> = draws.iter().map(|d| d.delta).collect();
    Ok(pvalue_from_null(observed, &null))
}

/// Parametric-bootstrap p-value of the statistic for `x`.
pub fn mc_pvalue(x: &crate::distributions::Sample, cfg: &TestConfig, reps: usize, seed: u64) -> Result<f64> {
    let observed = compute_statistic(x, cfg)?.delta;
    mc_pvalue_for(observed, x.len(), cfg, reps, seed, None)
}

/// Rejection rates of the test (and optionally the EDF baselines) against
/// each alternative, with critical values calibrated on a disjoint stream
/// range of the same seed.
pub fn power_study(spec: &PowerStudySpec) -> Result<PowerTable> {
    spec.validate()?;
    run_in_pool(spec.threads, || power_study_inner(spec))?
}

fn power_study_inner(spec: &PowerStudySpec) -> Result<PowerTable> {
    let edf = spec.baseline_tests;
    let null = simulate(
        &AlternativeSpec::STANDARD_CAUCHY,
        spec.n,
        &spec.cfg,
        spec.calibration_reps,
        spec.seed,
        0,
        edf,
    )?;
    let critical_value = upper_quantile(&sorted_copy(null.iter().map(|d| d.delta)), spec.level);
    let baseline_critical_values = edf.then(|| {
        let cv = |f: fn(&EdfStatistics) -> f64| {
            upper_quantile(&sorted_copy(null.iter().map(|d| f(d.edf.as_ref().expect("edf")))), spec.level)
        };
        EdfStatistics { ks: cv(|e| e.ks), cvm: cv(|e| e.cvm), ad: cv(|e| e.ad), watson: cv(|e| e.watson) }
    });

    let mut rows = Vec::with_capacity(spec.alternatives.len());
    for (i, alt) in spec.alternatives.iter().enumerate() {
        let first_stream = (i as u64 + 1) << ALTERNATIVE_STREAM_SHIFT;
        let draws = simulate(alt, spec.n, &spec.cfg, spec.reps, spec.seed, first_stream, edf)?;
        let m = draws.len() as f64;
        let rate = |pred: &dyn Fn(&Draw) -> bool| draws.iter().filter(|d| pred(d)).count() as f64 / m;
        let rejection_rate = rate(&|d| d.delta > critical_value);
        let baselines = baseline_critical_values.map(|cv| BaselinePower {
            ks: rate(&|d| d.edf.expect("edf").ks > cv.ks),
            cvm: rate(&|d| d.edf.expect("edf").cvm > cv.cvm),
            ad: rate(&|d| d.edf.expect("edf").ad > cv.ad),
            watson: rate(&|d| d.edf.expect("edf").watson > cv.watson),
        });
        rows.push(PowerRow { alternative: *alt, label: alt.label(), rejection_rate, baselines });
    }

    Ok(PowerTable {
        n: spec.n,
        config: spec.cfg,
        reps: spec.reps,
        calibration_reps: spec.calibration_reps,
        level: spec.level,
        seed: spec.seed,
        critical_value,
        baseline_critical_values,
        rows,
        metadata: Metadata::current(),
    })
}
