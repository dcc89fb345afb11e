//! Experiment harness through its file interfaces.

use std::fs;
use std::path::Path;

use fairdiv::harness::{self, Algorithm, ExperimentConfig, HarnessError, PlotMetric, TrialResult};

fn write_config(dir: &Path, body: serde_json::Value) -> std::path::PathBuf {
    let path = dir.join("config.json");
    fs::write(&path, body.to_string()).unwrap();
    path
}

fn base(out: &Path) -> serde_json::Value {
    serde_json::json!({
        "n": 8,
        "m_values": [40, 80],
        "mixture": "beta_uniform",
        "algorithms": ["argmax", "sampling"],
        "s_values": [2, 4],
        "trials": 4,
        "base_seed": 99,
        "output_dir": out,
    })
}

fn cached_results(root: &Path) -> Vec<TrialResult> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(dir).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if p.extension().is_some_and(|e| e == "json") {
                out.push(serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap());
            }
        }
    }
    out
}

#[test]
fn config_file_round_trip_and_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let mut body = base(&dir.path().join("out"));
    body.as_object_mut().unwrap().remove("trials");
    let cfg = ExperimentConfig::from_json_file(&write_config(dir.path(), body)).unwrap();
    assert_eq!(cfg.trials, 10);
    assert_eq!(cfg.algorithms, vec![Algorithm::Argmax, Algorithm::Sampling]);
}

#[test]
fn unknown_algorithm_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut body = base(dir.path());
    body["algorithms"] = serde_json::json!(["round_robin"]);
    let err = ExperimentConfig::from_json_file(&write_config(dir.path(), body)).unwrap_err();
    assert!(matches!(err, HarnessError::InvalidConfig { .. }));
    assert!(err.to_string().contains("round_robin"));
}

#[test]
fn csv_means_match_cached_trials() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = ExperimentConfig::from_json_file(&write_config(dir.path(), base(&out))).unwrap();
    let report = harness::run(&cfg, 4).unwrap();
    let csv_path = dir.path().join("welfare.csv");
    harness::emit_plot_data(&report.results, PlotMetric::WelfareRatio, &csv_path).unwrap();

    let cached = cached_results(&out);
    assert_eq!(cached.len(), report.results.len());
    for line in fs::read_to_string(&csv_path).unwrap().lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        if cols[1] != "sampling" {
            continue;
        }
        let (m, s): (usize, usize) = (cols[0].parse().unwrap(), cols[2].parse().unwrap());
        let values: Vec<f64> = cached
            .iter()
            .filter(|r| r.key.m == m && r.key.s == Some(s))
            .map(|r| r.welfare_ratio.unwrap())
            .collect();
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let csv_mean: f64 = cols[3].parse().unwrap();
        assert!(
            (mean - csv_mean).abs() <= 1e-12,
            "m {m} s {s}: {mean} vs {csv_mean}"
        );
        assert_eq!(cols[5].parse::<usize>().unwrap(), values.len());
    }
}

#[test]
fn envy_free_everywhere_gives_zero_fraction() {
    // With many items per agent argmax is envy-free on these seeds.
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        n: 2,
        m_values: vec![400],
        mode: fairdiv::Mode::Goods,
        mixture: fairdiv::FamilyMixture::standard_uniform(),
        algorithms: vec![Algorithm::Argmax],
        s_values: vec![],
        trials: 3,
        base_seed: 1,
        c: None,
        output_dir: dir.path().to_path_buf(),
    };
    let report = harness::run(&cfg, 1).unwrap();
    assert!(report
        .results
        .iter()
        .all(|r| r.metrics.as_ref().unwrap().is_ef));
    let csv = harness::plot_csv(&report.results, PlotMetric::FractionEnvious).unwrap();
    assert_eq!(
        csv,
        "m,algorithm,s,mean,stddev,trials\n400,argmax,na,0,0,3\n"
    );
}

#[test]
fn infeasible_trials_only_count_towards_success_rate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        n: 100,
        m_values: vec![500],
        mode: fairdiv::Mode::Goods,
        mixture: fairdiv::FamilyMixture::standard_uniform(),
        algorithms: vec![Algorithm::EfSmall],
        s_values: vec![],
        trials: 6,
        base_seed: 5,
        c: None,
        output_dir: dir.path().to_path_buf(),
    };
    let report = harness::run(&cfg, 2).unwrap();
    let ok = report
        .results
        .iter()
        .filter(|r| r.outcome == harness::TrialOutcome::Success)
        .count();
    let rate = harness::aggregate(&report.results, PlotMetric::SuccessRate);
    assert_eq!(rate[0].trials, 6);
    assert!((rate[0].mean - ok as f64 / 6.0).abs() < 1e-15);
    let fr = harness::aggregate(&report.results, PlotMetric::FractionEnvious);
    assert_eq!(fr[0].trials, ok);
}

#[test]
fn unwritable_output_dir_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, b"x").unwrap();
    let mut body = base(&blocker.join("sub"));
    body["trials"] = serde_json::json!(1);
    let cfg = ExperimentConfig::from_json_file(&write_config(dir.path(), body)).unwrap();
    assert!(matches!(
        harness::run(&cfg, 1),
        Err(HarnessError::OutputDir { .. })
    ));
}
