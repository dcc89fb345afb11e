//! Per-item utility laws on `[0, 1]`.
//!
//! A [`DistributionSpec`] is the serializable description; [`Distribution`] is
//! the validated, ready-to-sample form with its normalizing constants cached.

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};
use statrs::function::beta::{beta_reg, ln_beta};

use crate::error::SpecError;
use crate::rng::SeededRng;

const PROB_SUM_TOL: f64 = 1e-12;

/// Serializable per-item distribution. JSON form is `{"family": .., "params": {..}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", try_from = "RawSpec")]
pub enum DistributionSpec {
    Uniform {
        a: f64,
        b: f64,
    },
    Beta {
        shape1: f64,
        shape2: f64,
    },
    /// Normal(location, scale²) conditioned on `[0, 1]`.
    TruncatedNormal {
        location: f64,
        scale: f64,
    },
    /// Finite law with strictly increasing `support` and matching `probs`.
    DiscreteFinite {
        support: Vec<f64>,
        probs: Vec<f64>,
    },
}

// Unvalidated mirror of `DistributionSpec`, used to route deserialization
// through `validate`.
#[derive(Deserialize)]
#[serde(tag = "family", content = "params")]
enum RawSpec {
    Uniform { a: f64, b: f64 },
    Beta { shape1: f64, shape2: f64 },
    TruncatedNormal { location: f64, scale: f64 },
    DiscreteFinite { support: Vec<f64>, probs: Vec<f64> },
}

impl TryFrom<RawSpec> for DistributionSpec {
    type Error = SpecError;

    fn try_from(raw: RawSpec) -> Result<Self, SpecError> {
        let spec = match raw {
            RawSpec::Uniform { a, b } => DistributionSpec::Uniform { a, b },
            RawSpec::Beta { shape1, shape2 } => DistributionSpec::Beta { shape1, shape2 },
            RawSpec::TruncatedNormal { location, scale } => {
                DistributionSpec::TruncatedNormal { location, scale }
            }
            RawSpec::DiscreteFinite { support, probs } => {
                DistributionSpec::DiscreteFinite { support, probs }
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl DistributionSpec {
    pub fn uniform(a: f64, b: f64) -> Result<Self, SpecError> {
        let s = DistributionSpec::Uniform { a, b };
        s.validate().map(|_| s)
    }

    pub fn beta(shape1: f64, shape2: f64) -> Result<Self, SpecError> {
        let s = DistributionSpec::Beta { shape1, shape2 };
        s.validate().map(|_| s)
    }

    pub fn truncated_normal(location: f64, scale: f64) -> Result<Self, SpecError> {
        let s = DistributionSpec::TruncatedNormal { location, scale };
        s.validate().map(|_| s)
    }

    pub fn discrete(support: Vec<f64>, probs: Vec<f64>) -> Result<Self, SpecError> {
        let s = DistributionSpec::DiscreteFinite { support, probs };
        s.validate().map(|_| s)
    }

    /// Checks the family-specific parameter constraints.
    pub fn validate(&self) -> Result<(), SpecError> {
        let bad = |msg: String| Err(SpecError::InvalidParams(msg));
        match *self {
            DistributionSpec::Uniform { a, b } => {
                if !(a.is_finite() && b.is_finite() && 0.0 <= a && a < b && b <= 1.0) {
                    return bad(format!(
                        "uniform requires 0 <= a < b <= 1, got a={a}, b={b}"
                    ));
                }
            }
            DistributionSpec::Beta { shape1, shape2 } => {
                if !(shape1.is_finite() && shape2.is_finite() && shape1 > 0.0 && shape2 > 0.0) {
                    return bad(format!(
                        "beta shapes must be positive, got ({shape1}, {shape2})"
                    ));
                }
            }
            DistributionSpec::TruncatedNormal { location, scale } => {
                if !(location.is_finite() && scale.is_finite() && scale > 0.0) {
                    return bad(format!(
                        "truncated normal needs finite location and scale > 0, got ({location}, {scale})"
                    ));
                }
                // The conditioning interval must carry representable mass.
                let tn = TruncNormal::new(location, scale);
                if !tn.mass.is_finite() || tn.mass <= 0.0 {
                    return bad(format!(
                        "truncated normal ({location}, {scale}) has no mass on [0, 1]"
                    ));
                }
            }
            DistributionSpec::DiscreteFinite {
                ref support,
                ref probs,
            } => {
                if support.is_empty() || support.len() != probs.len() {
                    return bad(format!(
                        "discrete law needs matching non-empty support/probs, got {} and {}",
                        support.len(),
                        probs.len()
                    ));
                }
                if support.iter().any(|v| !(0.0..=1.0).contains(v)) {
                    return bad("discrete support must lie in [0, 1]".into());
                }
                if support.windows(2).any(|w| w[0] >= w[1]) {
                    return bad("discrete support must be strictly increasing".into());
                }
                if probs.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
                    return bad("discrete probabilities must be positive".into());
                }
                let total: f64 = probs.iter().sum();
                if (total - 1.0).abs() > PROB_SUM_TOL {
                    return bad(format!("discrete probabilities sum to {total}, not 1"));
                }
            }
        }
        Ok(())
    }

    /// True for a discrete law whose support contains the value 1.
    pub fn has_atom_at_one(&self) -> bool {
        matches!(self, DistributionSpec::DiscreteFinite { support, .. } if support.last() == Some(&1.0))
    }

    /// Probability mass at the value 1 (0 for continuous families).
    pub fn mass_at_one(&self) -> f64 {
        match self {
            DistributionSpec::DiscreteFinite { support, probs } if support.last() == Some(&1.0) => {
                *probs.last().unwrap()
            }
            _ => 0.0,
        }
    }

    pub fn mean(&self) -> f64 {
        mean(self)
    }

    pub fn pdf_bounds(&self) -> PdfBounds {
        pdf_bounds(self)
    }
}

/// Density (or, for discrete laws, point-mass) bounds over the support.
///
/// `alpha == 0` means the law is not bounded away from zero; `beta` may be
/// `+inf` for densities with an integrable singularity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdfBounds {
    pub alpha: f64,
    pub beta: f64,
}

/// Normal(location, scale²) conditioned on `[0, 1]`.
///
/// When the whole interval sits in the upper tail the computation is done on
/// the mirrored law `1 - X`, which keeps the CDF differences away from 1.
#[derive(Debug, Clone, Copy)]
struct TruncNormal {
    location: f64,
    scale: f64,
    mirrored: bool,
    lo_cdf: f64,
    mass: f64,
}

impl TruncNormal {
    fn new(location: f64, scale: f64) -> Self {
        let mirrored = location < 0.0;
        let loc = if mirrored { 1.0 - location } else { location };
        let lo_cdf = std_normal().cdf((0.0 - loc) / scale);
        let hi_cdf = std_normal().cdf((1.0 - loc) / scale);
        TruncNormal {
            location: loc,
            scale,
            mirrored,
            lo_cdf,
            mass: hi_cdf - lo_cdf,
        }
    }

    fn sample(&self, rng: &mut SeededRng) -> f64 {
        let u: f64 = rng.random();
        let p = (self.lo_cdf + u * self.mass).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0);
        let z = std_normal().inverse_cdf(p);
        let x = (self.location + self.scale * z).clamp(0.0, 1.0);
        if self.mirrored {
            1.0 - x
        } else {
            x
        }
    }

    fn density(&self, x: f64) -> f64 {
        let y = if self.mirrored { 1.0 - x } else { x };
        std_normal().pdf((y - self.location) / self.scale) / (self.scale * self.mass)
    }

    fn cdf(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        if self.mirrored {
            let y = 1.0 - x;
            let below = std_normal().cdf((y - self.location) / self.scale) - self.lo_cdf;
            1.0 - below / self.mass
        } else {
            (std_normal().cdf((x - self.location) / self.scale) - self.lo_cdf) / self.mass
        }
    }

    fn mean(&self) -> f64 {
        let phi = |t: f64| std_normal().pdf(t);
        let a = (0.0 - self.location) / self.scale;
        let b = (1.0 - self.location) / self.scale;
        let m = self.location + self.scale * (phi(a) - phi(b)) / self.mass;
        if self.mirrored {
            1.0 - m
        } else {
            m
        }
    }
}

fn std_normal() -> Normal {
    Normal::standard()
}

#[derive(Debug, Clone)]
enum Sampler {
    Uniform {
        a: f64,
        width: f64,
    },
    Beta(rand_distr::Beta<f64>),
    TruncNormal(TruncNormal),
    Discrete {
        support: Vec<f64>,
        cumulative: Vec<f64>,
    },
}

/// A validated distribution with sampling state precomputed.
#[derive(Debug, Clone)]
pub struct Distribution {
    spec: DistributionSpec,
    sampler: Sampler,
}

impl Distribution {
    pub fn new(spec: DistributionSpec) -> Result<Self, SpecError> {
        spec.validate()?;
        let sampler = match &spec {
            DistributionSpec::Uniform { a, b } => Sampler::Uniform {
                a: *a,
                width: b - a,
            },
            DistributionSpec::Beta { shape1, shape2 } => Sampler::Beta(
                rand_distr::Beta::new(*shape1, *shape2)
                    .map_err(|e| SpecError::InvalidParams(e.to_string()))?,
            ),
            DistributionSpec::TruncatedNormal { location, scale } => {
                Sampler::TruncNormal(TruncNormal::new(*location, *scale))
            }
            DistributionSpec::DiscreteFinite { support, probs } => {
                let mut acc = 0.0;
                let mut cumulative: Vec<f64> = probs
                    .iter()
                    .map(|p| {
                        acc += p;
                        acc
                    })
                    .collect();
                *cumulative.last_mut().unwrap() = 1.0;
                Sampler::Discrete {
                    support: support.clone(),
                    cumulative,
                }
            }
        };
        Ok(Distribution { spec, sampler })
    }

    pub fn spec(&self) -> &DistributionSpec {
        &self.spec
    }

    /// One draw in `[0, 1]`.
    pub fn sample(&self, rng: &mut SeededRng) -> f64 {
        match &self.sampler {
            Sampler::Uniform { a, width } => {
                let u: f64 = rng.random();
                (a + width * u).min(a + width)
            }
            Sampler::Beta(beta) => rand_distr::Distribution::sample(beta, rng).clamp(0.0, 1.0),
            Sampler::TruncNormal(tn) => tn.sample(rng),
            Sampler::Discrete {
                support,
                cumulative,
            } => {
                let u: f64 = rng.random();
                let k = cumulative
                    .partition_point(|&c| c <= u)
                    .min(support.len() - 1);
                support[k]
            }
        }
    }

    /// Cumulative distribution function `P[X <= x]`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        match (&self.spec, &self.sampler) {
            (DistributionSpec::Uniform { a, b }, _) => ((x - a) / (b - a)).clamp(0.0, 1.0),
            (DistributionSpec::Beta { shape1, shape2 }, _) => beta_reg(*shape1, *shape2, x),
            (_, Sampler::TruncNormal(tn)) => tn.cdf(x),
            (DistributionSpec::DiscreteFinite { support, probs }, _) => support
                .iter()
                .zip(probs)
                .take_while(|(v, _)| **v <= x)
                .map(|(_, p)| p)
                .sum(),
            _ => unreachable!("sampler always matches its spec"),
        }
    }

    /// Density at `x` for continuous families; point mass at `x` for discrete.
    pub fn density(&self, x: f64) -> f64 {
        match (&self.spec, &self.sampler) {
            (DistributionSpec::Uniform { a, b }, _) => {
                if (*a..=*b).contains(&x) {
                    1.0 / (b - a)
                } else {
                    0.0
                }
            }
            (DistributionSpec::Beta { shape1, shape2 }, _) => beta_density(*shape1, *shape2, x),
            (_, Sampler::TruncNormal(tn)) => {
                if (0.0..=1.0).contains(&x) {
                    tn.density(x)
                } else {
                    0.0
                }
            }
            (DistributionSpec::DiscreteFinite { support, probs }, _) => support
                .iter()
                .position(|v| *v == x)
                .map_or(0.0, |k| probs[k]),
            _ => unreachable!("sampler always matches its spec"),
        }
    }
}

fn beta_density(p: f64, q: f64, x: f64) -> f64 {
    if !(0.0..=1.0).contains(&x) {
        return 0.0;
    }
    let log_norm = ln_beta(p, q);
    // Endpoints: limit of x^(p-1) (1-x)^(q-1) / B(p, q).
    let edge = |shape: f64, other: f64| {
        if shape < 1.0 {
            f64::INFINITY
        } else if shape == 1.0 {
            // Density at the endpoint is 1 / B(1, other) = other.
            other
        } else {
            0.0
        }
    };
    if x == 0.0 {
        return edge(p, q);
    }
    if x == 1.0 {
        return edge(q, p);
    }
    ((p - 1.0) * x.ln() + (q - 1.0) * (1.0 - x).ln() - log_norm).exp()
}

/// One draw from `spec`. Builds a [`Distribution`] each call; hot loops should
/// construct the [`Distribution`] once.
pub fn sample(spec: &DistributionSpec, rng: &mut SeededRng) -> f64 {
    Distribution::new(spec.clone())
        .expect("spec validated at construction")
        .sample(rng)
}

/// Expected value. Closed form for every family.
pub fn mean(spec: &DistributionSpec) -> f64 {
    match spec {
        DistributionSpec::Uniform { a, b } => 0.5 * (a + b),
        DistributionSpec::Beta { shape1, shape2 } => shape1 / (shape1 + shape2),
        DistributionSpec::TruncatedNormal { location, scale } => {
            TruncNormal::new(*location, *scale).mean()
        }
        DistributionSpec::DiscreteFinite { support, probs } => {
            support.iter().zip(probs).map(|(v, p)| v * p).sum()
        }
    }
}

/// Infimum/supremum of the density over the support (mass for discrete laws).
pub fn pdf_bounds(spec: &DistributionSpec) -> PdfBounds {
    match spec {
        DistributionSpec::Uniform { a, b } => {
            let d = 1.0 / (b - a);
            PdfBounds { alpha: d, beta: d }
        }
        DistributionSpec::Beta {
            shape1: p,
            shape2: q,
        } => {
            let (p, q) = (*p, *q);
            let f = |x| beta_density(p, q, x);
            let at_0 = f(0.0);
            let at_1 = f(1.0);
            // The log-density is concave for p, q >= 1 and convex for p, q <= 1,
            // so the only interior critical point is the mode/antimode.
            let interior = if p + q != 2.0 {
                let x = (p - 1.0) / (p + q - 2.0);
                (x > 0.0 && x < 1.0).then(|| f(x))
            } else {
                None
            };
            let candidates = [Some(at_0), Some(at_1), interior];
            let vals = candidates.iter().flatten();
            let alpha = vals.clone().copied().fold(f64::INFINITY, f64::min);
            let beta = vals.copied().fold(0.0, f64::max);
            PdfBounds { alpha, beta }
        }
        DistributionSpec::TruncatedNormal { location, scale } => {
            let tn = TruncNormal::new(*location, *scale);
            let peak = location.clamp(0.0, 1.0);
            let far = if *location >= 0.5 { 0.0 } else { 1.0 };
            PdfBounds {
                alpha: tn.density(far),
                beta: tn.density(peak),
            }
        }
        DistributionSpec::DiscreteFinite { probs, .. } => PdfBounds {
            alpha: probs.iter().copied().fold(f64::INFINITY, f64::min),
            beta: probs.iter().copied().fold(0.0, f64::max),
        },
    }
}

/// Inclusive real interval used for hyper-parameter ranges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl Range {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Range { lo, hi }
    }

    pub const fn point(v: f64) -> Self {
        Range { lo: v, hi: v }
    }

    fn draw(&self, rng: &mut SeededRng) -> f64 {
        if self.lo == self.hi {
            self.lo
        } else {
            self.lo + (self.hi - self.lo) * rng.random::<f64>()
        }
    }

    fn is_valid(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite() && self.lo <= self.hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MixtureName {
    BetaUniform,
    NormalUniform,
    UniformOnly,
    DiscreteAtom1,
}

impl MixtureName {
    pub fn as_str(&self) -> &'static str {
        match self {
            MixtureName::BetaUniform => "beta_uniform",
            MixtureName::NormalUniform => "normal_uniform",
            MixtureName::UniformOnly => "uniform_only",
            MixtureName::DiscreteAtom1 => "discrete_atom1",
        }
    }
}

impl std::fmt::Display for MixtureName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for MixtureName {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, SpecError> {
        Ok(match s {
            "beta_uniform" => MixtureName::BetaUniform,
            "normal_uniform" => MixtureName::NormalUniform,
            "uniform_only" => MixtureName::UniformOnly,
            "discrete_atom1" => MixtureName::DiscreteAtom1,
            other => return Err(SpecError::UnknownMixture(other.to_string())),
        })
    }
}

/// A family of per-item laws; every item draws fresh parameters.
///
/// Deserializes from either a bare name (`"beta_uniform"`, default ranges)
/// or an object with `name` plus any ranges to override.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "MixtureRepr")]
pub struct FamilyMixture {
    pub name: MixtureName,
    pub beta_shape: Range,
    pub uniform_a: Range,
    pub uniform_b: Range,
    pub normal_location: Range,
    pub normal_scale: Range,
    /// Number of support points below 1 for `discrete_atom1`.
    pub discrete_points: (usize, usize),
    /// Mass placed on the value 1 for `discrete_atom1`; `lo` is the floor.
    pub atom_mass: Range,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MixtureRepr {
    Name(MixtureName),
    Full(FullMixture),
}

#[derive(Deserialize)]
struct FullMixture {
    name: MixtureName,
    #[serde(default)]
    beta_shape: Option<Range>,
    #[serde(default)]
    uniform_a: Option<Range>,
    #[serde(default)]
    uniform_b: Option<Range>,
    #[serde(default)]
    normal_location: Option<Range>,
    #[serde(default)]
    normal_scale: Option<Range>,
    #[serde(default)]
    discrete_points: Option<(usize, usize)>,
    #[serde(default)]
    atom_mass: Option<Range>,
}

impl From<MixtureRepr> for FamilyMixture {
    fn from(r: MixtureRepr) -> Self {
        match r {
            MixtureRepr::Name(name) => FamilyMixture::new(name),
            MixtureRepr::Full(f) => {
                let d = FamilyMixture::new(f.name);
                FamilyMixture {
                    name: f.name,
                    beta_shape: f.beta_shape.unwrap_or(d.beta_shape),
                    uniform_a: f.uniform_a.unwrap_or(d.uniform_a),
                    uniform_b: f.uniform_b.unwrap_or(d.uniform_b),
                    normal_location: f.normal_location.unwrap_or(d.normal_location),
                    normal_scale: f.normal_scale.unwrap_or(d.normal_scale),
                    discrete_points: f.discrete_points.unwrap_or(d.discrete_points),
                    atom_mass: f.atom_mass.unwrap_or(d.atom_mass),
                }
            }
        }
    }
}

impl FamilyMixture {
    /// Mixture with the default hyper-parameter ranges.
    pub fn new(name: MixtureName) -> Self {
        FamilyMixture {
            name,
            beta_shape: Range::new(0.5, 5.0),
            uniform_a: Range::new(0.0, 0.3),
            uniform_b: Range::new(0.7, 1.0),
            normal_location: Range::new(0.2, 0.8),
            normal_scale: Range::new(0.1, 0.3),
            discrete_points: (1, 4),
            atom_mass: Range::new(0.2, 0.5),
        }
    }

    /// `uniform_only` with every item exactly Uniform[0, 1].
    pub fn standard_uniform() -> Self {
        FamilyMixture {
            uniform_a: Range::point(0.0),
            uniform_b: Range::point(1.0),
            ..FamilyMixture::new(MixtureName::UniformOnly)
        }
    }

    /// `discrete_atom1` with the mass at 1 pinned to `floor`.
    pub fn discrete_with_floor(floor: f64) -> Self {
        FamilyMixture {
            atom_mass: Range::new(floor, floor),
            ..FamilyMixture::new(MixtureName::DiscreteAtom1)
        }
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        let ranges = [
            ("beta_shape", self.beta_shape),
            ("uniform_a", self.uniform_a),
            ("uniform_b", self.uniform_b),
            ("normal_location", self.normal_location),
            ("normal_scale", self.normal_scale),
            ("atom_mass", self.atom_mass),
        ];
        for (field, r) in ranges {
            if !r.is_valid() {
                return Err(SpecError::InvalidMixture(format!(
                    "{field}: bad range {r:?}"
                )));
            }
        }
        let err = |m: &str| Err(SpecError::InvalidMixture(m.to_string()));
        if self.beta_shape.lo <= 0.0 {
            return err("beta_shape must be positive");
        }
        if self.uniform_a.lo < 0.0
            || self.uniform_b.hi > 1.0
            || self.uniform_a.hi >= self.uniform_b.lo
        {
            return err("uniform ranges must satisfy 0 <= a < b <= 1 for every draw");
        }
        if self.normal_scale.lo <= 0.0 {
            return err("normal_scale must be positive");
        }
        if self.atom_mass.lo <= 0.0 || self.atom_mass.hi > 1.0 {
            return err("atom_mass must lie in (0, 1]");
        }
        if self.discrete_points.0 > self.discrete_points.1 {
            return err("discrete_points must be (min, max) with min <= max");
        }
        Ok(())
    }

    fn draw_uniform(&self, rng: &mut SeededRng) -> DistributionSpec {
        DistributionSpec::Uniform {
            a: self.uniform_a.draw(rng),
            b: self.uniform_b.draw(rng),
        }
    }
}

/// Draws one item's law from `mixture`.
pub fn draw_item_spec(mixture: &FamilyMixture, rng: &mut SeededRng) -> DistributionSpec {
    match mixture.name {
        MixtureName::UniformOnly => mixture.draw_uniform(rng),
        MixtureName::BetaUniform => {
            if rng.random_bool(0.5) {
                DistributionSpec::Beta {
                    shape1: mixture.beta_shape.draw(rng),
                    shape2: mixture.beta_shape.draw(rng),
                }
            } else {
                mixture.draw_uniform(rng)
            }
        }
        MixtureName::NormalUniform => {
            if rng.random_bool(0.5) {
                DistributionSpec::TruncatedNormal {
                    location: mixture.normal_location.draw(rng),
                    scale: mixture.normal_scale.draw(rng),
                }
            } else {
                mixture.draw_uniform(rng)
            }
        }
        MixtureName::DiscreteAtom1 => draw_discrete_atom1(mixture, rng),
    }
}

fn draw_discrete_atom1(mixture: &FamilyMixture, rng: &mut SeededRng) -> DistributionSpec {
    let (lo, hi) = mixture.discrete_points;
    let k = if lo == hi {
        lo
    } else {
        rng.random_range(lo..=hi)
    };
    let mut points: Vec<f64> = (0..k).map(|_| rng.random::<f64>() * 0.95).collect();
    points.sort_by(f64::total_cmp);
    points.dedup();
    let atom = mixture.atom_mass.draw(rng);
    if points.is_empty() || atom >= 1.0 {
        return DistributionSpec::DiscreteFinite {
            support: vec![1.0],
            probs: vec![1.0],
        };
    }
    let weights: Vec<f64> = points.iter().map(|_| 0.05 + rng.random::<f64>()).collect();
    let total: f64 = weights.iter().sum();
    let rest = 1.0 - atom;
    let mut probs: Vec<f64> = weights.iter().map(|w| rest * w / total).collect();
    probs.push(atom);
    // Put the rounding residue on the largest non-atom mass so the atom floor
    // is kept exactly.
    let residue = 1.0 - probs.iter().sum::<f64>();
    let (big, _) = probs[..points.len()]
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    probs[big] += residue;
    points.push(1.0);
    DistributionSpec::DiscreteFinite {
        support: points,
        probs,
    }
}
