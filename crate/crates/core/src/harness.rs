//! Seeded experiment runner with a write-once, per-trial JSON cache.
//!
//! A config names one agent count, several item counts, a mixture and a set of
//! algorithms. For every `(m, trial)` one instance is generated and shared by
//! all algorithms; sampling runs are compared against that trial's argmax
//! allocation. Each result lands in
//! `<output_dir>/<mixture>/<algorithm>/n<n>_m<m>_s<s|na>_t<trial>.json` and is
//! loaded instead of recomputed on later runs. Aggregates are always
//! recomputed from the per-trial records.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::allocators::{
    allocate_argmax, allocate_ef_small, allocate_ef_small_chores, allocate_prop_linear,
    allocate_prop_two_stage, allocate_sampling, AllocOutcome, InfeasibleStage,
};
use crate::distributions::{FamilyMixture, MixtureName};
use crate::error::{AllocError, InstanceError, MetricsError};
use crate::instance::{Instance, Mode};
use crate::metrics::{self, float_or_inf, MetricsReport};
use crate::rng::{derive_seed, tag};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid config field `{field}`: {reason}")]
    InvalidConfig { field: &'static str, reason: String },
    #[error("cannot use output directory {path}: {source}")]
    OutputDir {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed cache file {path}: {source}")]
    CacheFormat {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("cache file {path} was produced by a different configuration ({reason})")]
    CacheConflict { path: PathBuf, reason: String },
    #[error("no results to aggregate")]
    NoResults,
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Alloc(#[from] AllocError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Argmax,
    Sampling,
    EfSmall,
    PropTwoStage,
    PropLinear,
    ChoresEfSmall,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Argmax,
        Algorithm::Sampling,
        Algorithm::EfSmall,
        Algorithm::PropTwoStage,
        Algorithm::PropLinear,
        Algorithm::ChoresEfSmall,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Argmax => "argmax",
            Algorithm::Sampling => "sampling",
            Algorithm::EfSmall => "ef_small",
            Algorithm::PropTwoStage => "prop_two_stage",
            Algorithm::PropLinear => "prop_linear",
            Algorithm::ChoresEfSmall => "chores_ef_small",
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

fn default_mode() -> Mode {
    Mode::Goods
}

fn default_trials() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub m_values: Vec<usize>,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    pub mixture: FamilyMixture,
    pub algorithms: Vec<Algorithm>,
    #[serde(default)]
    pub s_values: Vec<usize>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub base_seed: u64,
    /// Mean bound for `prop_linear`.
    #[serde(default)]
    pub c: Option<f64>,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn from_json_file(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| HarnessError::InvalidConfig {
            field: "config",
            reason: e.to_string(),
        })
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |field: &'static str, reason: String| {
            Err(HarnessError::InvalidConfig { field, reason })
        };
        if self.n == 0 {
            return bad("n", "must be at least 1".into());
        }
        if self.m_values.is_empty() || self.m_values.contains(&0) {
            return bad(
                "m_values",
                "must be a non-empty list of positive counts".into(),
            );
        }
        if self.trials == 0 {
            return bad("trials", "must be at least 1".into());
        }
        if self.algorithms.is_empty() {
            return bad("algorithms", "must name at least one algorithm".into());
        }
        if let Err(e) = self.mixture.validate() {
            return bad("mixture", e.to_string());
        }
        for alg in &self.algorithms {
            let needs = match alg {
                Algorithm::Argmax => None,
                Algorithm::ChoresEfSmall => Some(Mode::Chores),
                _ => Some(Mode::Goods),
            };
            if let Some(mode) = needs {
                if mode != self.mode {
                    return bad(
                        "algorithms",
                        format!("`{alg}` requires mode {mode}, config mode is {}", self.mode),
                    );
                }
            }
        }
        if self.algorithms.contains(&Algorithm::Sampling) {
            if self.s_values.is_empty() {
                return bad("s_values", "sampling needs at least one sample size".into());
            }
            if let Some(s) = self.s_values.iter().find(|&&s| s == 0 || s > self.n) {
                return bad(
                    "s_values",
                    format!("sample size {s} outside 1..={}", self.n),
                );
            }
        }
        if self.algorithms.contains(&Algorithm::PropLinear) {
            match self.c {
                Some(c) if (0.0..1.0).contains(&c) => {}
                Some(c) => return bad("c", format!("must lie in [0, 1), got {c}")),
                None => return bad("c", "prop_linear needs the mean bound c".into()),
            }
        }
        Ok(())
    }

    /// Seed of the instance shared by all algorithms in trial `trial` at `m`.
    pub fn trial_seed(&self, m: usize, trial: usize) -> u64 {
        derive_seed(self.base_seed, &[tag::TRIAL, trial as u64, m as u64])
    }

    fn jobs(&self) -> Vec<(Algorithm, Option<usize>)> {
        let mut algs = self.algorithms.clone();
        algs.sort();
        algs.dedup();
        let mut s_values = self.s_values.clone();
        s_values.sort_unstable();
        s_values.dedup();
        algs.into_iter()
            .flat_map(|a| match a {
                Algorithm::Sampling => s_values.iter().map(|&s| (a, Some(s))).collect::<Vec<_>>(),
                _ => vec![(a, None)],
            })
            .collect()
    }
}

/// Identity of one cached trial.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TrialKey {
    pub algorithm: Algorithm,
    pub s: Option<usize>,
    pub m: usize,
    pub trial: usize,
    pub n: usize,
    pub mixture: MixtureName,
}

impl TrialKey {
    pub fn relative_path(&self) -> PathBuf {
        let s = self.s.map_or_else(|| "na".to_string(), |s| s.to_string());
        PathBuf::from(self.mixture.as_str())
            .join(self.algorithm.as_str())
            .join(format!(
                "n{}_m{}_s{}_t{}.json",
                self.n, self.m, s, self.trial
            ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TrialOutcome {
    Success,
    Infeasible {
        stage: InfeasibleStage,
        found: usize,
        required: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub key: TrialKey,
    pub mode: Mode,
    pub base_seed: u64,
    pub mixture: FamilyMixture,
    pub c: Option<f64>,
    pub outcome: TrialOutcome,
    pub metrics: Option<MetricsReport>,
    /// Sampling only: welfare over the same trial's argmax welfare.
    pub welfare_ratio: Option<f64>,
    pub wall_time_ms: f64,
}

impl TrialResult {
    fn check_matches(&self, config: &ExperimentConfig, path: &Path) -> Result<(), HarnessError> {
        let conflict = |reason: String| {
            Err(HarnessError::CacheConflict {
                path: path.to_path_buf(),
                reason,
            })
        };
        if self.mode != config.mode {
            return conflict(format!("mode {} vs {}", self.mode, config.mode));
        }
        if self.base_seed != config.base_seed {
            return conflict(format!(
                "base_seed {} vs {}",
                self.base_seed, config.base_seed
            ));
        }
        if self.mixture != config.mixture {
            return conflict("mixture parameters differ".into());
        }
        if self.key.algorithm == Algorithm::PropLinear && self.c != config.c {
            return conflict(format!("c {:?} vs {:?}", self.c, config.c));
        }
        Ok(())
    }
}

/// Results of a run plus how many were computed versus loaded.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub results: Vec<TrialResult>,
    /// Number of allocator invocations performed in this run.
    pub allocator_calls: usize,
    pub cache_hits: usize,
}

fn load(path: &Path) -> Result<Option<TrialResult>, HarnessError> {
    match fs::read_to_string(path) {
        Ok(text) => {
            serde_json::from_str(&text)
                .map(Some)
                .map_err(|source| HarnessError::CacheFormat {
                    path: path.to_path_buf(),
                    source,
                })
        }
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(source) => Err(HarnessError::Io {
            path: path.to_path_buf(),
            source,
        }),
    }
}

/// Write-once: the file is staged next to its target and linked in only if
/// the target does not exist yet. A concurrent writer of the same key wins
/// harmlessly.
fn store(path: &Path, result: &TrialResult) -> Result<(), HarnessError> {
    let dir = path.parent().expect("cache paths have a parent");
    let io = |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    };
    fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    let json = serde_json::to_string_pretty(result).expect("trial results serialize");
    tmp.write_all(json.as_bytes()).map_err(io)?;
    match tmp.persist_noclobber(path) {
        Ok(_) => Ok(()),
        Err(e) if e.error.kind() == std::io::ErrorKind::AlreadyExists => Ok(()),
        Err(e) => Err(io(e.error)),
    }
}

struct Ctx<'a> {
    config: &'a ExperimentConfig,
    calls: &'a AtomicUsize,
}

impl Ctx<'_> {
    fn run_one(
        &self,
        instance: &Instance,
        argmax: &mut Option<crate::instance::Allocation>,
        algorithm: Algorithm,
        s: Option<usize>,
        seed: u64,
    ) -> Result<(TrialOutcome, Option<MetricsReport>, Option<f64>), HarnessError> {
        let config = self.config;
        let outcome = match algorithm {
            Algorithm::Argmax => {
                self.calls.fetch_add(1, Ordering::Relaxed);
                AllocOutcome::Success(allocate_argmax(instance))
            }
            Algorithm::Sampling => {
                let s = s.expect("sampling jobs carry s");
                self.calls.fetch_add(1, Ordering::Relaxed);
                let (alloc, _) =
                    allocate_sampling(instance, s, derive_seed(seed, &[tag::SAMPLING, s as u64]))?;
                if argmax.is_none() {
                    self.calls.fetch_add(1, Ordering::Relaxed);
                    *argmax = Some(allocate_argmax(instance));
                }
                let ratio = metrics::welfare_ratio(&alloc, argmax.as_ref().unwrap(), instance)?;
                let report = metrics::report(instance, &alloc)?;
                return Ok((TrialOutcome::Success, Some(report), Some(ratio)));
            }
            Algorithm::EfSmall => {
                self.calls.fetch_add(1, Ordering::Relaxed);
                allocate_ef_small(instance)?
            }
            Algorithm::PropTwoStage => {
                self.calls.fetch_add(1, Ordering::Relaxed);
                allocate_prop_two_stage(instance)?
            }
            Algorithm::PropLinear => {
                self.calls.fetch_add(1, Ordering::Relaxed);
                allocate_prop_linear(instance, config.c.expect("validated"))?
            }
            Algorithm::ChoresEfSmall => {
                self.calls.fetch_add(1, Ordering::Relaxed);
                allocate_ef_small_chores(instance)?
            }
        };
        Ok(match outcome {
            AllocOutcome::Success(alloc) => {
                if algorithm == Algorithm::Argmax {
                    *argmax = Some(alloc.clone());
                }
                (
                    TrialOutcome::Success,
                    Some(metrics::report(instance, &alloc)?),
                    None,
                )
            }
            AllocOutcome::Infeasible {
                stage,
                found,
                required,
            } => (
                TrialOutcome::Infeasible {
                    stage,
                    found,
                    required,
                },
                None,
                None,
            ),
        })
    }

    /// All jobs of one `(m, trial)` unit. The instance is generated only if
    /// some job is missing from the cache.
    fn run_unit(&self, m: usize, trial: usize) -> Result<(Vec<TrialResult>, usize), HarnessError> {
        let config = self.config;
        let mut out = Vec::new();
        let mut hits = 0;
        let mut instance: Option<Instance> = None;
        let mut argmax = None;
        let seed = config.trial_seed(m, trial);
        for (algorithm, s) in config.jobs() {
            let key = TrialKey {
                algorithm,
                s,
                m,
                trial,
                n: config.n,
                mixture: config.mixture.name,
            };
            let path = config.output_dir.join(key.relative_path());
            if let Some(cached) = load(&path)? {
                cached.check_matches(config, &path)?;
                if cached.key != key {
                    return Err(HarnessError::CacheConflict {
                        path,
                        reason: "key mismatch".into(),
                    });
                }
                hits += 1;
                out.push(cached);
                continue;
            }
            if instance.is_none() {
                instance = Some(Instance::generate(
                    config.n,
                    m,
                    config.mode,
                    &config.mixture,
                    seed,
                )?);
            }
            let inst = instance.as_ref().unwrap();
            let started = Instant::now();
            let (outcome, metrics, welfare_ratio) =
                self.run_one(inst, &mut argmax, algorithm, s, seed)?;
            let result = TrialResult {
                key,
                mode: config.mode,
                base_seed: config.base_seed,
                mixture: config.mixture.clone(),
                c: config.c,
                outcome,
                metrics,
                welfare_ratio,
                wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
            };
            store(&path, &result)?;
            out.push(result);
        }
        Ok((out, hits))
    }
}

/// Runs (or loads) every trial of `config` on up to `jobs` threads.
pub fn run(config: &ExperimentConfig, jobs: usize) -> Result<RunReport, HarnessError> {
    config.validate()?;
    fs::create_dir_all(&config.output_dir).map_err(|source| HarnessError::OutputDir {
        path: config.output_dir.clone(),
        source,
    })?;
    let probe = config.output_dir.join(".write-probe");
    fs::write(&probe, b"")
        .and_then(|_| fs::remove_file(&probe))
        .map_err(|source| HarnessError::OutputDir {
            path: config.output_dir.clone(),
            source,
        })?;

    let calls = AtomicUsize::new(0);
    let ctx = Ctx {
        config,
        calls: &calls,
    };
    let units: Vec<(usize, usize)> = config
        .m_values
        .iter()
        .flat_map(|&m| (0..config.trials).map(move |t| (m, t)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool");
    let per_unit: Vec<Result<(Vec<TrialResult>, usize), HarnessError>> =
        pool.install(|| units.par_iter().map(|&(m, t)| ctx.run_unit(m, t)).collect());

    let mut results = Vec::new();
    let mut cache_hits = 0;
    for unit in per_unit {
        let (r, h) = unit?;
        results.extend(r);
        cache_hits += h;
    }
    results.sort_by(|a, b| a.key.cmp(&b.key));
    Ok(RunReport {
        results,
        allocator_calls: calls.into_inner(),
        cache_hits,
    })
}

/// Quantities `emit_plot_data` can aggregate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlotMetric {
    WorstEnvyRatio,
    FractionEnvious,
    WelfareRatio,
    SuccessRate,
    SocialWelfare,
}

impl std::str::FromStr for PlotMetric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "worst_envy_ratio" => PlotMetric::WorstEnvyRatio,
            "fraction_envious" => PlotMetric::FractionEnvious,
            "welfare_ratio" => PlotMetric::WelfareRatio,
            "success_rate" => PlotMetric::SuccessRate,
            "social_welfare" => PlotMetric::SocialWelfare,
            other => return Err(format!("unknown metric `{other}`")),
        })
    }
}

impl PlotMetric {
    /// The metric's value for one trial, or `None` when the trial does not
    /// contribute (infeasible outcome, or metric undefined for it).
    pub fn value(&self, r: &TrialResult) -> Option<f64> {
        if *self == PlotMetric::SuccessRate {
            return Some(f64::from(u8::from(r.outcome == TrialOutcome::Success)));
        }
        let m = r.metrics.as_ref()?;
        match self {
            PlotMetric::WorstEnvyRatio => m.worst_envy_ratio,
            PlotMetric::FractionEnvious => Some(m.fraction_envious),
            PlotMetric::WelfareRatio => r.welfare_ratio,
            PlotMetric::SocialWelfare => Some(m.social_welfare),
            PlotMetric::SuccessRate => unreachable!(),
        }
    }
}

/// One CSV row: mean and sample standard deviation over contributing trials.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub m: usize,
    pub algorithm: Algorithm,
    pub s: Option<usize>,
    pub mean: f64,
    pub stddev: f64,
    pub trials: usize,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    if mean.is_infinite() {
        return (mean, f64::INFINITY);
    }
    if values.len() == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, var.sqrt())
}

/// Groups by `(algorithm, s, m)` in that sort order.
pub fn aggregate(results: &[TrialResult], metric: PlotMetric) -> Vec<AggregateRow> {
    let mut sorted: Vec<&TrialResult> = results.iter().collect();
    sorted.sort_by(|a, b| a.key.cmp(&b.key));
    let mut rows = Vec::new();
    let mut start = 0;
    while start < sorted.len() {
        let k = &sorted[start].key;
        let end = start
            + sorted[start..]
                .iter()
                .take_while(|r| r.key.algorithm == k.algorithm && r.key.s == k.s && r.key.m == k.m)
                .count();
        let values: Vec<f64> = sorted[start..end]
            .iter()
            .filter_map(|r| metric.value(r))
            .collect();
        let (mean, stddev) = mean_std(&values);
        rows.push(AggregateRow {
            m: k.m,
            algorithm: k.algorithm,
            s: k.s,
            mean,
            stddev,
            trials: values.len(),
        });
        start = end;
    }
    rows
}

fn fmt_float(v: f64) -> String {
    float_or_inf::to_text(v).map_or_else(|| format!("{v}"), str::to_string)
}

/// CSV text with header `m,algorithm,s,mean,stddev,trials`.
pub fn plot_csv(results: &[TrialResult], metric: PlotMetric) -> Result<String, HarnessError> {
    if results.is_empty() {
        return Err(HarnessError::NoResults);
    }
    let mut out = String::from("m,algorithm,s,mean,stddev,trials\n");
    for row in aggregate(results, metric) {
        let s = row.s.map_or_else(|| "na".to_string(), |s| s.to_string());
        writeln!(
            out,
            "{},{},{},{},{},{}",
            row.m,
            row.algorithm,
            s,
            fmt_float(row.mean),
            fmt_float(row.stddev),
            row.trials
        )
        .unwrap();
    }
    Ok(out)
}

/// Writes [`plot_csv`] to `path`.
pub fn emit_plot_data(
    results: &[TrialResult],
    metric: PlotMetric,
    path: &Path,
) -> Result<(), HarnessError> {
    let csv = plot_csv(results, metric)?;
    fs::write(path, csv).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}
