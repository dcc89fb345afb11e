//! Desk-scale acceptance checks.
//!
//! Asymptotic statements cannot be checked as limits, so each one becomes a
//! finite success-rate property with a fixed size, seed set and time budget.
//! Every check returns a [`CriterionResult`]; a check passes only if its
//! property holds and it finished inside its budget.

use std::fmt;
use std::time::{Duration, Instant};

use rand::Rng;

use crate::allocators::{
    allocate_argmax, allocate_ef_small, allocate_ef_small_chores, allocate_prop_linear,
    allocate_prop_two_stage, allocate_sampling, AllocOutcome,
};
use crate::distributions::{FamilyMixture, MixtureName};
use crate::harness::{self, Algorithm, ExperimentConfig, PlotMetric};
use crate::instance::{Allocation, Instance, Mode};
use crate::matching::{max_matching, random_bipartite};
use crate::metrics::{self, MetricsReport, SLACK};
use crate::oracle::{brute_max_matching, exhaustive_scan, matching_rate, EdgeProbs};
use crate::rng::{derive_seed, stream, tag};

/// Seed root shared by every check.
pub const ACCEPTANCE_SEED: u64 = 0x00fa_1d17;

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:>2} {}: {} ({:.2}s of {}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs()
        )
    }
}

/// Runs `body`, which returns `(property holds, detail)`, under a time budget.
fn timed(
    id: u8,
    name: &'static str,
    budget_secs: u64,
    body: impl FnOnce() -> (bool, String),
) -> CriterionResult {
    let started = Instant::now();
    let (ok, mut detail) = body();
    let elapsed = started.elapsed();
    let budget = Duration::from_secs(budget_secs);
    if elapsed >= budget {
        detail.push_str("; over time budget");
    }
    CriterionResult {
        id,
        name,
        passed: ok && elapsed < budget,
        detail,
        elapsed,
        budget,
    }
}

fn seed_for(criterion: u64, trial: u64) -> u64 {
    derive_seed(ACCEPTANCE_SEED, &[criterion, trial])
}

fn success_report(outcome: AllocOutcome, instance: &Instance) -> Option<MetricsReport> {
    match outcome {
        AllocOutcome::Success(a) => Some(metrics::report(instance, &a).expect("allocation fits")),
        AllocOutcome::Infeasible { .. } => None,
    }
}

/// Max matching agrees with exhaustive search on small random graphs.
pub fn criterion_01() -> CriterionResult {
    timed(1, "matching oracle equivalence", 5, || {
        let mut agree = 0;
        for t in 0..200u64 {
            let seed = seed_for(1, t);
            let mut rng = stream(seed, &[tag::SIZE]);
            let nl = rng.random_range(1..=8);
            let nr = rng.random_range(1..=8);
            let p = rng.random_range(0.05..0.9);
            let g = random_bipartite(nl, nr, &vec![p; nr], seed).expect("valid probabilities");
            if max_matching(&g).cardinality() == brute_max_matching(&g).expect("within cap") {
                agree += 1;
            }
        }
        (agree == 200, format!("{agree}/200 graphs agree"))
    })
}

/// Perfect matchings appear once edge probabilities exceed the threshold.
pub fn criterion_02() -> CriterionResult {
    timed(2, "random-graph matching threshold", 10, || {
        let n = 200usize;
        let base = (n as f64).ln() / n as f64;
        let rate = matching_rate(
            n,
            n,
            EdgeProbs::PerRightUniform {
                lo: 2.0 * base,
                hi: 4.0 * base,
            },
            100,
            seed_for(2, 0),
        );
        (
            rate >= 0.95,
            format!("perfect-matching rate {rate:.2} (need >= 0.95)"),
        )
    })
}

/// Argmax is envy-free on most large goods instances.
pub fn criterion_03() -> CriterionResult {
    timed(3, "argmax envy-freeness rate", 30, || {
        let mixture = FamilyMixture::new(MixtureName::BetaUniform);
        let mut ef = 0;
        let mut ratio_sum = 0.0;
        for t in 0..20 {
            let inst = Instance::generate(50, 10_000, Mode::Goods, &mixture, seed_for(3, t))
                .expect("valid sizes");
            let r = metrics::report(&inst, &allocate_argmax(&inst)).expect("allocation fits");
            ef += usize::from(r.is_ef);
            ratio_sum += r.worst_envy_ratio.expect("goods");
        }
        let mean = ratio_sum / 20.0;
        (
            ef >= 18 && mean <= 1.05,
            format!("EF in {ef}/20 (need >= 18), mean worst envy ratio {mean:.4} (need <= 1.05)"),
        )
    })
}

/// The sampling-welfare experiment: n = 100, m = 10^4, s in {4, 23, 46}.
pub fn sampling_welfare_config(output_dir: &std::path::Path) -> ExperimentConfig {
    ExperimentConfig {
        n: 100,
        m_values: vec![10_000],
        mode: Mode::Goods,
        mixture: FamilyMixture::new(MixtureName::BetaUniform),
        algorithms: vec![Algorithm::Argmax, Algorithm::Sampling],
        s_values: vec![4, 23, 46],
        trials: 10,
        base_seed: seed_for(4, 0),
        c: None,
        output_dir: output_dir.to_path_buf(),
    }
}

fn sampling_welfare_csv() -> Result<String, harness::HarnessError> {
    let dir = tempfile::tempdir().map_err(|source| harness::HarnessError::OutputDir {
        path: std::env::temp_dir(),
        source,
    })?;
    let config = sampling_welfare_config(dir.path());
    let report = harness::run(&config, rayon::current_num_threads())?;
    harness::plot_csv(&report.results, PlotMetric::WelfareRatio)
}

/// Sampling keeps most of the full welfare.
pub fn criterion_04() -> CriterionResult {
    timed(4, "sampling welfare ratio", 60, || {
        let csv = match sampling_welfare_csv() {
            Ok(c) => c,
            Err(e) => return (false, format!("harness error: {e}")),
        };
        let mut ok = true;
        let mut parts = Vec::new();
        for line in csv.lines().skip(1) {
            let cols: Vec<&str> = line.split(',').collect();
            if cols[1] != "sampling" {
                continue;
            }
            let s: usize = cols[2].parse().expect("sampling rows carry s");
            let mean: f64 = cols[3].parse().expect("finite mean");
            let need = if s == 4 { 0.85 } else { 0.95 };
            ok &= mean >= need;
            parts.push(format!("s={s}: {mean:.4} (need >= {need})"));
        }
        (ok && parts.len() == 3, parts.join(", "))
    })
}

/// Sampling every agent reproduces argmax.
pub fn criterion_05() -> CriterionResult {
    timed(5, "full sample equals argmax", 10, || {
        let names = [
            MixtureName::BetaUniform,
            MixtureName::NormalUniform,
            MixtureName::UniformOnly,
            MixtureName::DiscreteAtom1,
        ];
        let mut same = 0;
        for t in 0..20u64 {
            let mixture = FamilyMixture::new(names[t as usize % names.len()]);
            let seed = seed_for(5, t);
            let inst =
                Instance::generate(30, 300, Mode::Goods, &mixture, seed).expect("valid sizes");
            let (sampled, _) = allocate_sampling(&inst, 30, seed).expect("s = n is valid");
            same += usize::from(sampled.owners() == allocate_argmax(&inst).owners());
        }
        (same == 20, format!("identical in {same}/20"))
    })
}

/// With an atom of mass at least 0.2 at value 1, `ceil(2 ln m / 0.2)`
/// samples find a value-1 agent for every item.
pub fn criterion_06() -> CriterionResult {
    timed(6, "discrete exact welfare by sampling", 20, || {
        let mixture = FamilyMixture::discrete_with_floor(0.2);
        let (n, m) = (100, 2000);
        let s = (2.0 * (m as f64).ln() / 0.2).ceil() as usize;
        let mut exact = 0;
        for t in 0..20 {
            let seed = seed_for(6, t);
            let inst = Instance::generate(n, m, Mode::Goods, &mixture, seed).expect("valid sizes");
            let (_, log) = allocate_sampling(&inst, s, seed).expect("s <= n");
            exact += usize::from(log.items.iter().all(|r| r.value == 1.0));
        }
        (
            s == 77 && exact >= 19,
            format!("s = {s}, exact in {exact}/20 (need >= 19)"),
        )
    })
}

/// Two-stage proportional algorithm for n <= m <= 2n.
pub fn criterion_07() -> CriterionResult {
    timed(7, "two-stage proportional", 30, || {
        let n = 150;
        let mixture = FamilyMixture::standard_uniform();
        let mut good = 0;
        for t in 0..50 {
            let seed = seed_for(7, t);
            let m = stream(seed, &[tag::SIZE]).random_range(n..=2 * n);
            let inst = Instance::generate(n, m, Mode::Goods, &mixture, seed).expect("valid sizes");
            let out = allocate_prop_two_stage(&inst).expect("preconditions hold");
            good += usize::from(success_report(out, &inst).is_some_and(|r| r.is_prop));
        }
        (
            good >= 45,
            format!("proportional in {good}/50 (need >= 45)"),
        )
    })
}

/// Threshold graph plus perfect x-matching for goods.
pub fn criterion_08() -> CriterionResult {
    timed(8, "EF-small goods", 30, || {
        let mixture = FamilyMixture::standard_uniform();
        let mut good = 0;
        for t in 0..50 {
            let inst = Instance::generate(100, 500, Mode::Goods, &mixture, seed_for(8, t))
                .expect("valid sizes");
            let out = allocate_ef_small(&inst).expect("preconditions hold");
            good += usize::from(success_report(out, &inst).is_some_and(|r| r.is_ef));
        }
        (
            good >= 45,
            format!("success and EF in {good}/50 (need >= 45)"),
        )
    })
}

/// Two-phase matching for chores.
pub fn criterion_09() -> CriterionResult {
    timed(9, "EF-small chores", 30, || {
        let mixture = FamilyMixture::standard_uniform();
        let mut good = 0;
        for t in 0..50 {
            let inst = Instance::generate(100, 500, Mode::Chores, &mixture, seed_for(9, t))
                .expect("valid sizes");
            let out = allocate_ef_small_chores(&inst).expect("preconditions hold");
            good += usize::from(success_report(out, &inst).is_some_and(|r| r.is_ef));
        }
        (
            good >= 45,
            format!("success and EF in {good}/50 (need >= 45)"),
        )
    })
}

/// Left-saturated x-matching with x >= r for bounded means.
pub fn criterion_10() -> CriterionResult {
    timed(10, "prop-linear", 30, || {
        let mixture = FamilyMixture::standard_uniform();
        let mut good = 0;
        for t in 0..50 {
            let inst = Instance::generate(50, 700, Mode::Goods, &mixture, seed_for(10, t))
                .expect("valid sizes");
            let out = allocate_prop_linear(&inst, 0.5).expect("preconditions hold");
            good += usize::from(success_report(out, &inst).is_some_and(|r| r.is_prop));
        }
        (
            good >= 45,
            format!("success and proportional in {good}/50 (need >= 45)"),
        )
    })
}

/// Bundle values summed over ascending item indices, straight from the
/// definition.
fn definitional(instance: &Instance, alloc: &Allocation) -> (Vec<Vec<f64>>, f64) {
    let n = instance.n();
    let mut worth = vec![vec![0.0; n]; n];
    for (i, row) in worth.iter_mut().enumerate() {
        for (k, cell) in row.iter_mut().enumerate() {
            for &j in alloc.bundle(k) {
                *cell += instance.value(i, j);
            }
        }
    }
    let welfare = (0..n).map(|i| worth[i][i]).sum();
    (worth, welfare)
}

fn metrics_match_definition(instance: &Instance, alloc: &Allocation) -> bool {
    let r = metrics::report(instance, alloc).expect("allocation fits");
    let (worth, welfare) = definitional(instance, alloc);
    let n = instance.n();
    let goods = instance.mode() == Mode::Goods;
    let envy_of = |i: usize| -> f64 {
        (0..n)
            .filter(|&k| k != i)
            .map(|k| {
                if goods {
                    worth[i][k] - worth[i][i]
                } else {
                    worth[i][i] - worth[i][k]
                }
            })
            .fold(0.0, f64::max)
    };
    let envious = (0..n).filter(|&i| envy_of(i) > SLACK).count();
    let is_ef = envious == 0;
    let is_prop = (0..n).all(|i| {
        let share = instance.row(i).iter().sum::<f64>() / n as f64;
        if goods {
            worth[i][i] >= share - SLACK
        } else {
            worth[i][i] <= share + SLACK
        }
    });
    let ratio = goods.then(|| {
        (0..n)
            .map(|i| {
                let e = envy_of(i);
                if e <= SLACK {
                    1.0
                } else if worth[i][i] == 0.0 {
                    f64::INFINITY
                } else {
                    1.0 + e / worth[i][i]
                }
            })
            .fold(1.0, f64::max)
    });
    r.social_welfare == welfare
        && r.fraction_envious == envious as f64 / n as f64
        && r.is_ef == is_ef
        && r.is_prop == is_prop
        && r.worst_envy_ratio == ratio
}

/// Small instances checked against exhaustive enumeration.
pub fn criterion_11() -> CriterionResult {
    timed(11, "exhaustive-oracle consistency", 60, || {
        let names = [
            MixtureName::BetaUniform,
            MixtureName::NormalUniform,
            MixtureName::UniformOnly,
            MixtureName::DiscreteAtom1,
        ];
        let mut failures = Vec::new();
        for t in 0..500u64 {
            let seed = seed_for(11, t);
            let mut rng = stream(seed, &[tag::SIZE]);
            let n = rng.random_range(2..=3);
            let m = rng.random_range(2..=6);
            let mode = if t % 3 == 2 {
                Mode::Chores
            } else {
                Mode::Goods
            };
            let mixture = FamilyMixture::new(names[t as usize % names.len()]);
            let inst = Instance::generate(n, m, mode, &mixture, seed).expect("valid sizes");
            let oracle = exhaustive_scan(&inst).expect("within cap");

            let argmax = allocate_argmax(&inst);
            let welfare = metrics::social_welfare(&inst, &argmax).expect("fits");
            let oracle_welfare =
                metrics::social_welfare(&inst, &oracle.msw_allocation).expect("fits");
            if welfare != oracle_welfare || (welfare - oracle.msw_value).abs() > SLACK {
                failures.push(format!(
                    "instance {t}: argmax welfare {welfare} vs oracle {oracle_welfare}"
                ));
            }

            let mut allocations = vec![argmax];
            if mode == Mode::Goods {
                for s in 1..=n {
                    allocations.push(allocate_sampling(&inst, s, seed).expect("s <= n").0);
                }
                if m % n == 0 {
                    allocations.extend(
                        allocate_ef_small(&inst)
                            .ok()
                            .and_then(|o| o.allocation().cloned()),
                    );
                }
                if (n..=2 * n).contains(&m) {
                    allocations.extend(
                        allocate_prop_two_stage(&inst)
                            .ok()
                            .and_then(|o| o.allocation().cloned()),
                    );
                }
            } else {
                allocations.extend(
                    allocate_ef_small_chores(&inst)
                        .ok()
                        .and_then(|o| o.allocation().cloned()),
                );
            }
            allocations.push(oracle.msw_allocation.clone());

            for alloc in &allocations {
                let r = metrics::report(&inst, alloc).expect("fits");
                if r.is_ef && !oracle.ef_exists {
                    failures.push(format!(
                        "instance {t}: {:?} reported EF, oracle disagrees",
                        alloc.provenance()
                    ));
                }
                if r.is_prop && !oracle.prop_exists {
                    failures.push(format!(
                        "instance {t}: {:?} reported PROP, oracle disagrees",
                        alloc.provenance()
                    ));
                }
                if !metrics_match_definition(&inst, alloc) {
                    failures.push(format!("instance {t}: metrics differ from definition"));
                }
            }
        }
        let detail = match failures.first() {
            None => "500/500 instances consistent".to_string(),
            Some(first) => format!("{} discrepancies, first: {first}", failures.len()),
        };
        (failures.is_empty(), detail)
    })
}

/// The sampling-welfare CSV is byte-identical across fresh runs.
pub fn criterion_12() -> CriterionResult {
    timed(12, "deterministic plot data", 60, || {
        match (sampling_welfare_csv(), sampling_welfare_csv()) {
            (Ok(a), Ok(b)) if a == b => (true, format!("{} bytes identical", a.len())),
            (Ok(_), Ok(_)) => (false, "CSV differs between runs".into()),
            (Err(e), _) | (_, Err(e)) => (false, format!("harness error: {e}")),
        }
    })
}

pub type Check = fn() -> CriterionResult;

pub const ALL: [Check; 12] = [
    criterion_01,
    criterion_02,
    criterion_03,
    criterion_04,
    criterion_05,
    criterion_06,
    criterion_07,
    criterion_08,
    criterion_09,
    criterion_10,
    criterion_11,
    criterion_12,
];

/// Runs every check in order.
pub fn run_all() -> Vec<CriterionResult> {
    ALL.iter().map(|check| check()).collect()
}
