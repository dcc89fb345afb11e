//! Sampler checks against statrs CDFs and numerical quadrature.

use fairdiv::distributions::{self, DistributionSpec};
use fairdiv::rng::stream;
use statrs::distribution::{Beta, Continuous, ContinuousCDF, Normal};

fn draws(spec: &DistributionSpec, count: usize, seed: u64) -> Vec<f64> {
    let mut rng = stream(seed, &[]);
    (0..count)
        .map(|_| distributions::sample(spec, &mut rng))
        .collect()
}

fn continuous_specs() -> Vec<DistributionSpec> {
    vec![
        DistributionSpec::uniform(0.0, 1.0).unwrap(),
        DistributionSpec::uniform(0.2, 0.9).unwrap(),
        DistributionSpec::beta(0.7, 3.0).unwrap(),
        DistributionSpec::beta(2.0, 5.0).unwrap(),
        DistributionSpec::beta(0.5, 0.5).unwrap(),
        DistributionSpec::truncated_normal(0.3, 0.2).unwrap(),
        DistributionSpec::truncated_normal(-0.5, 0.3).unwrap(),
        DistributionSpec::truncated_normal(1.2, 0.5).unwrap(),
    ]
}

/// Reference CDF built straight from statrs.
fn reference_cdf(spec: &DistributionSpec) -> Box<dyn Fn(f64) -> f64> {
    match *spec {
        DistributionSpec::Uniform { a, b } => {
            Box::new(move |x| ((x - a) / (b - a)).clamp(0.0, 1.0))
        }
        DistributionSpec::Beta { shape1, shape2 } => {
            let d = Beta::new(shape1, shape2).unwrap();
            Box::new(move |x| d.cdf(x.clamp(0.0, 1.0)))
        }
        DistributionSpec::TruncatedNormal { location, scale } => {
            let d = Normal::new(location, scale).unwrap();
            let (lo, hi) = (d.cdf(0.0), d.cdf(1.0));
            Box::new(move |x| ((d.cdf(x.clamp(0.0, 1.0)) - lo) / (hi - lo)).clamp(0.0, 1.0))
        }
        DistributionSpec::DiscreteFinite { .. } => unreachable!("continuous specs only"),
    }
}

fn reference_pdf(spec: &DistributionSpec) -> Box<dyn Fn(f64) -> f64> {
    match *spec {
        DistributionSpec::Uniform { a, b } => Box::new(move |x| {
            if (a..=b).contains(&x) {
                1.0 / (b - a)
            } else {
                0.0
            }
        }),
        DistributionSpec::Beta { shape1, shape2 } => {
            let d = Beta::new(shape1, shape2).unwrap();
            Box::new(move |x| d.pdf(x))
        }
        DistributionSpec::TruncatedNormal { location, scale } => {
            let d = Normal::new(location, scale).unwrap();
            let z = d.cdf(1.0) - d.cdf(0.0);
            Box::new(move |x| d.pdf(x) / z)
        }
        DistributionSpec::DiscreteFinite { .. } => unreachable!("continuous specs only"),
    }
}

/// Composite Simpson on `[lo, hi]`.
fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, panels: usize) -> f64 {
    let h = (hi - lo) / panels as f64;
    let mut acc = f(lo) + f(hi);
    for k in 1..panels {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(lo + k as f64 * h);
    }
    acc * h / 3.0
}

#[test]
fn ks_distance_against_reference_cdf() {
    for (k, spec) in continuous_specs().iter().enumerate() {
        let mut xs = draws(spec, 100_000, 100 + k as u64);
        xs.sort_by(f64::total_cmp);
        let cdf = reference_cdf(spec);
        let len = xs.len() as f64;
        let d = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                (f - i as f64 / len)
                    .abs()
                    .max((f - (i + 1) as f64 / len).abs())
            })
            .fold(0.0, f64::max);
        assert!(d <= 0.01, "{spec:?}: KS distance {d}");
    }
}

#[test]
fn sample_mean_within_three_standard_errors() {
    for (k, spec) in continuous_specs().iter().enumerate() {
        let xs = draws(spec, 1_000_000, 200 + k as u64);
        let len = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / len;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (len - 1.0);
        let se = (var / len).sqrt();
        let expected = distributions::mean(spec);
        assert!(
            (mean - expected).abs() <= 3.0 * se,
            "{spec:?}: sample mean {mean}, law mean {expected}, se {se}"
        );
    }
}

#[test]
fn means_match_quadrature() {
    for spec in continuous_specs() {
        let pdf = reference_pdf(&spec);
        let expected = match spec {
            // Endpoint singularities make Simpson useless; the Beta mean is
            // p / (p + q) by definition.
            DistributionSpec::Beta { shape1, shape2 } => shape1 / (shape1 + shape2),
            DistributionSpec::Uniform { a, b } => simpson(|x| x * pdf(x), a, b, 2_000),
            _ => simpson(|x| x * pdf(x), 0.0, 1.0, 20_000),
        };
        let got = distributions::mean(&spec);
        assert!(
            (got - expected).abs() < 1e-9,
            "{spec:?}: {got} vs {expected}"
        );
    }
}

#[test]
fn truncated_normal_mass_integrates_to_one() {
    for spec in continuous_specs() {
        if let DistributionSpec::TruncatedNormal { .. } = spec {
            let pdf = reference_pdf(&spec);
            let z = simpson(&pdf, 0.0, 1.0, 20_000);
            assert!((z - 1.0).abs() < 1e-10, "{spec:?}: {z}");
        }
    }
}

#[test]
fn histogram_respects_pdf_bounds() {
    const BINS: usize = 20;
    const DRAWS: usize = 1_000_000;
    for (k, spec) in continuous_specs().iter().enumerate() {
        let bounds = spec.pdf_bounds();
        let (lo, hi) = match *spec {
            DistributionSpec::Uniform { a, b } => (a, b),
            _ => (0.0, 1.0),
        };
        let width = (hi - lo) / BINS as f64;
        let mut counts = [0usize; BINS];
        for x in draws(spec, DRAWS, 300 + k as u64) {
            let b = (((x - lo) / width) as usize).min(BINS - 1);
            counts[b] += 1;
        }
        for (b, &c) in counts.iter().enumerate() {
            let p = c as f64 / DRAWS as f64;
            let density = p / width;
            // Five binomial standard errors of the density estimate.
            let tol = 5.0 * (p.max(1e-6) / DRAWS as f64).sqrt() / width;
            assert!(
                density >= bounds.alpha - tol,
                "{spec:?} bin {b}: {density} < alpha {}",
                bounds.alpha
            );
            if bounds.beta.is_finite() {
                assert!(
                    density <= bounds.beta + tol,
                    "{spec:?} bin {b}: {density} > beta {}",
                    bounds.beta
                );
            }
        }
    }
}

#[test]
fn discrete_frequencies_match_probabilities() {
    let spec = DistributionSpec::discrete(vec![0.1, 0.4, 1.0], vec![0.5, 0.3, 0.2]).unwrap();
    let xs = draws(&spec, 100_000, 400);
    for (v, p) in [(0.1, 0.5), (0.4, 0.3), (1.0, 0.2)] {
        let freq = xs.iter().filter(|&&x| x == v).count() as f64 / xs.len() as f64;
        assert!((freq - p).abs() <= 0.01, "value {v}: {freq} vs {p}");
    }
    assert!(xs.iter().all(|x| [0.1, 0.4, 1.0].contains(x)));
}

#[test]
fn draws_stay_in_unit_interval() {
    for (k, spec) in continuous_specs().iter().enumerate() {
        assert!(draws(spec, 50_000, 500 + k as u64)
            .iter()
            .all(|x| (0.0..=1.0).contains(x)));
    }
}
