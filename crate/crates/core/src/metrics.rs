//! Fairness and efficiency measurements of an allocation.

use serde::{Deserialize, Serialize};

use crate::allocators::allocate_argmax;
use crate::error::MetricsError;
use crate::instance::{Allocation, Instance, Mode};

/// Comparison slack for every fairness predicate.
pub const SLACK: f64 = 1e-12;

/// Flat metrics record. Serializes to exactly
/// `{worst_envy_ratio, fraction_envious, social_welfare, is_ef, is_prop}`;
/// an infinite ratio is written as the string `"inf"` and the chores ratio
/// (undefined) as `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    #[serde(with = "float_or_inf::option")]
    pub worst_envy_ratio: Option<f64>,
    pub fraction_envious: f64,
    pub social_welfare: f64,
    pub is_ef: bool,
    pub is_prop: bool,
    #[serde(skip)]
    pub envy: Vec<Vec<f64>>,
    #[serde(skip)]
    pub prop_shortfalls: Vec<f64>,
}

/// `cross[i][k]` = value (or disutility) of agent i for bundle k.
fn cross_values(instance: &Instance, alloc: &Allocation) -> Result<Vec<Vec<f64>>, MetricsError> {
    alloc
        .check_fits(instance)
        .map_err(|e| MetricsError::Mismatch(e.to_string()))?;
    let n = instance.n();
    let owners = alloc.owners();
    Ok((0..n)
        .map(|i| {
            let mut acc = vec![0.0; n];
            for (&v, &k) in instance.row(i).iter().zip(&owners) {
                acc[k] += v;
            }
            acc
        })
        .collect())
}

fn envy_from_cross(mode: Mode, cross: &[Vec<f64>]) -> Vec<Vec<f64>> {
    cross
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(k, &other)| {
                    if i == k {
                        0.0
                    } else {
                        match mode {
                            Mode::Goods => (other - row[i]).max(0.0),
                            Mode::Chores => (row[i] - other).max(0.0),
                        }
                    }
                })
                .collect()
        })
        .collect()
}

fn max_envy(envy: &[Vec<f64>]) -> Vec<f64> {
    envy.iter()
        .map(|row| row.iter().copied().fold(0.0, f64::max))
        .collect()
}

/// Pairwise envy: goods `max(0, u_i(A_k) - u_i(A_i))`, chores
/// `max(0, d_i(A_i) - d_i(A_k))`. Zero diagonal.
pub fn envy_matrix(instance: &Instance, alloc: &Allocation) -> Result<Vec<Vec<f64>>, MetricsError> {
    let cross = cross_values(instance, alloc)?;
    Ok(envy_from_cross(instance.mode(), &cross))
}

fn worst_ratio_from(cross: &[Vec<f64>], max_envy: &[f64]) -> f64 {
    max_envy
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            if e <= SLACK {
                1.0
            } else if cross[i][i] == 0.0 {
                f64::INFINITY
            } else {
                1.0 + e / cross[i][i]
            }
        })
        .fold(1.0, f64::max)
}

/// `max_i (1 + E_i / u_i(A_i))`, `+inf` when an envious agent has nothing.
pub fn worst_envy_ratio(instance: &Instance, alloc: &Allocation) -> Result<f64, MetricsError> {
    if instance.mode() != Mode::Goods {
        return Err(MetricsError::GoodsOnly);
    }
    let cross = cross_values(instance, alloc)?;
    let e = max_envy(&envy_from_cross(Mode::Goods, &cross));
    Ok(worst_ratio_from(&cross, &e))
}

/// Share of agents with positive envy towards someone.
pub fn fraction_envious(instance: &Instance, alloc: &Allocation) -> Result<f64, MetricsError> {
    let e = max_envy(&envy_matrix(instance, alloc)?);
    Ok(e.iter().filter(|&&x| x > SLACK).count() as f64 / e.len() as f64)
}

/// Sum of each agent's value for their own bundle (disutility sum for chores).
pub fn social_welfare(instance: &Instance, alloc: &Allocation) -> Result<f64, MetricsError> {
    let cross = cross_values(instance, alloc)?;
    Ok(cross.iter().enumerate().map(|(i, row)| row[i]).sum())
}

/// Full report for one allocation.
pub fn report(instance: &Instance, alloc: &Allocation) -> Result<MetricsReport, MetricsError> {
    let cross = cross_values(instance, alloc)?;
    let n = instance.n();
    let mode = instance.mode();
    let envy = envy_from_cross(mode, &cross);
    let e = max_envy(&envy);
    let is_ef = e.iter().all(|&x| x <= SLACK);
    let prop_shortfalls: Vec<f64> = (0..n)
        .map(|i| {
            let share = instance.total_value(i) / n as f64;
            match mode {
                Mode::Goods => (share - cross[i][i]).max(0.0),
                Mode::Chores => (cross[i][i] - share).max(0.0),
            }
        })
        .collect();
    let is_prop = prop_shortfalls.iter().all(|&s| s <= SLACK);
    Ok(MetricsReport {
        worst_envy_ratio: (mode == Mode::Goods).then(|| worst_ratio_from(&cross, &e)),
        fraction_envious: e.iter().filter(|&&x| x > SLACK).count() as f64 / n as f64,
        social_welfare: (0..n).map(|i| cross[i][i]).sum(),
        is_ef,
        is_prop,
        envy,
        prop_shortfalls,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ApproxChecks {
    /// `u_i(A_i) >= c u_i(A_k)` for every pair.
    pub c_ef: bool,
    /// Welfare at least `c` times the maximum.
    pub c_msw: bool,
}

/// c-approximate envy-freeness and welfare, goods only.
pub fn approx_checks(
    instance: &Instance,
    alloc: &Allocation,
    c: f64,
) -> Result<ApproxChecks, MetricsError> {
    if instance.mode() != Mode::Goods {
        return Err(MetricsError::GoodsOnly);
    }
    let cross = cross_values(instance, alloc)?;
    let c_ef = cross
        .iter()
        .enumerate()
        .all(|(i, row)| row.iter().all(|&other| row[i] + SLACK >= c * other));
    let welfare: f64 = (0..instance.n()).map(|i| cross[i][i]).sum();
    let best = social_welfare(instance, &allocate_argmax(instance))?;
    Ok(ApproxChecks {
        c_ef,
        c_msw: welfare + SLACK >= c * best,
    })
}

/// Welfare of `sampled` over welfare of `full` on the same instance.
pub fn welfare_ratio(
    sampled: &Allocation,
    full: &Allocation,
    instance: &Instance,
) -> Result<f64, MetricsError> {
    let top = social_welfare(instance, sampled)?;
    let bottom = social_welfare(instance, full)?;
    if bottom == 0.0 {
        return if top == 0.0 {
            Ok(1.0)
        } else {
            Err(MetricsError::ZeroReference(top))
        };
    }
    Ok(top / bottom)
}

/// Serde helpers writing non-finite floats as `"inf"`, `"-inf"`, `"nan"`.
pub mod float_or_inf {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn to_text(v: f64) -> Option<&'static str> {
        if v.is_nan() {
            Some("nan")
        } else if v == f64::INFINITY {
            Some("inf")
        } else if v == f64::NEG_INFINITY {
            Some("-inf")
        } else {
            None
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    fn from_repr<E: serde::de::Error>(r: Repr) -> Result<f64, E> {
        match r {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(E::custom(format!("bad float `{other}`"))),
            },
        }
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        match to_text(*v) {
            Some(t) => s.serialize_str(t),
            None => s.serialize_f64(*v),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        from_repr(Repr::deserialize(d)?)
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
            match v {
                Some(x) => super::serialize(x, s),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
            Option::<Repr>::deserialize(d)?.map(from_repr).transpose()
        }
    }
}
