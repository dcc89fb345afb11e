//! Brute-force ground truth for tests and the acceptance suite.
//!
//! Everything here is deliberately naive and independent of the fast paths
//! it checks. Size caps are hard errors.

use std::collections::VecDeque;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::OracleError;
use crate::instance::{Allocation, Instance, Mode, Provenance};
use crate::matching::{max_matching, random_bipartite, BipartiteGraph};
use crate::rng::{derive_seed, stream, tag};

/// Largest number of allocations `exhaustive_scan` will enumerate.
pub const SCAN_CAP: u64 = 10_000_000;
/// Largest left side `brute_max_matching` accepts.
pub const BRUTE_LEFT_CAP: usize = 8;

const EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ExhaustiveReport {
    pub ef_exists: bool,
    pub prop_exists: bool,
    /// Maximum welfare (goods) or minimum total disutility (chores).
    pub msw_value: f64,
    /// First optimal allocation in enumeration order, up to `1e-12` ties.
    pub msw_allocation: Allocation,
    pub allocations_scanned: u64,
}

/// Enumerates all `n^m` assignments of items to agents.
pub fn exhaustive_scan(instance: &Instance) -> Result<ExhaustiveReport, OracleError> {
    let (n, m) = (instance.n(), instance.m());
    let total = (n as u64)
        .checked_pow(m as u32)
        .filter(|&t| t <= SCAN_CAP)
        .ok_or(OracleError::TooManyAllocations {
            n,
            m,
            cap: SCAN_CAP,
        })?;

    let goods = instance.mode() == Mode::Goods;
    let shares: Vec<f64> = (0..n)
        .map(|i| (0..m).map(|j| instance.value(i, j)).sum::<f64>() / n as f64)
        .collect();

    let mut owner = vec![0usize; m];
    let mut ef_exists = false;
    let mut prop_exists = false;
    let mut best_value = if goods {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    };
    let mut best_owner = owner.clone();
    let mut scanned = 0u64;
    let mut worth = vec![vec![0.0; n]; n];

    loop {
        for row in worth.iter_mut() {
            row.iter_mut().for_each(|x| *x = 0.0);
        }
        for (j, &k) in owner.iter().enumerate() {
            for (i, row) in worth.iter_mut().enumerate() {
                row[k] += instance.value(i, j);
            }
        }
        let welfare: f64 = (0..n).map(|i| worth[i][i]).sum();
        // Only a clear improvement replaces the incumbent, so among tied optima
        // the first in enumeration order (lowest owner per item) is kept.
        if (goods && welfare > best_value + EPS) || (!goods && welfare < best_value - EPS) {
            best_value = welfare;
            best_owner.clone_from(&owner);
        }
        if !ef_exists {
            ef_exists = (0..n).all(|i| {
                (0..n).all(|k| {
                    if goods {
                        worth[i][i] >= worth[i][k] - EPS
                    } else {
                        worth[i][i] <= worth[i][k] + EPS
                    }
                })
            });
        }
        if !prop_exists {
            prop_exists = (0..n).all(|i| {
                if goods {
                    worth[i][i] >= shares[i] - EPS
                } else {
                    worth[i][i] <= shares[i] + EPS
                }
            });
        }
        scanned += 1;

        // Odometer increment, item 0 fastest.
        let mut j = 0;
        while j < m {
            owner[j] += 1;
            if owner[j] < n {
                break;
            }
            owner[j] = 0;
            j += 1;
        }
        if j == m {
            break;
        }
    }
    debug_assert_eq!(scanned, total);
    let msw_allocation = Allocation::from_owners(n, &best_owner, Provenance::External)
        .expect("owners are agent indices");
    Ok(ExhaustiveReport {
        ef_exists,
        prop_exists,
        msw_value: best_value,
        msw_allocation,
        allocations_scanned: scanned,
    })
}

/// Maximum matching size by exhaustive search over left vertices.
pub fn brute_max_matching(g: &BipartiteGraph) -> Result<usize, OracleError> {
    if g.n_left() > BRUTE_LEFT_CAP {
        return Err(OracleError::TooManyVertices {
            got: g.n_left(),
            limit: BRUTE_LEFT_CAP,
        });
    }
    fn go(g: &BipartiteGraph, l: usize, used: &mut Vec<bool>) -> usize {
        if l == g.n_left() {
            return 0;
        }
        let mut best = go(g, l + 1, used);
        for &r in g.neighbors(l) {
            if !used[r] {
                used[r] = true;
                best = best.max(1 + go(g, l + 1, used));
                used[r] = false;
            }
        }
        best
    }
    Ok(go(g, 0, &mut vec![false; g.n_right()]))
}

/// Max flow source -> left (cap `r`) -> right (cap 1) -> sink (cap 1), by
/// Edmonds-Karp on an explicit residual matrix. Equals the largest r-matching.
pub fn max_flow_r_matching(g: &BipartiteGraph, r: usize) -> usize {
    let (nl, nr) = (g.n_left(), g.n_right());
    let size = nl + nr + 2;
    let (src, sink) = (nl + nr, nl + nr + 1);
    let mut cap = vec![vec![0i64; size]; size];
    cap[src][..nl].fill(r as i64);
    for (l, row) in cap.iter_mut().enumerate().take(nl) {
        for &rv in g.neighbors(l) {
            row[nl + rv] = 1;
        }
    }
    for rv in 0..nr {
        cap[nl + rv][sink] = 1;
    }
    let mut flow = 0;
    loop {
        let mut parent = vec![usize::MAX; size];
        parent[src] = src;
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            for v in 0..size {
                if parent[v] == usize::MAX && cap[u][v] > 0 {
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if parent[sink] == usize::MAX {
            return flow;
        }
        let mut v = sink;
        while v != src {
            let u = parent[v];
            cap[u][v] -= 1;
            cap[v][u] += 1;
            v = u;
        }
        flow += 1;
    }
}

/// How `matching_rate` assigns per-right-vertex edge probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EdgeProbs {
    /// The same probability for every right vertex.
    Constant(f64),
    /// Each right vertex draws its probability uniformly from `[lo, hi]`,
    /// freshly per trial.
    PerRightUniform { lo: f64, hi: f64 },
}

/// Fraction of seeded random graphs whose maximum matching covers the right
/// side (a perfect matching when the sides are equal).
pub fn matching_rate(
    n_left: usize,
    n_right: usize,
    probs: EdgeProbs,
    trials: usize,
    seed: u64,
) -> f64 {
    assert!(trials >= 1, "matching_rate needs at least one trial");
    let hits: usize = (0..trials)
        .into_par_iter()
        .map(|t| {
            let trial_seed = derive_seed(seed, &[tag::TRIAL, t as u64]);
            let p: Vec<f64> = match probs {
                EdgeProbs::Constant(p) => vec![p; n_right],
                EdgeProbs::PerRightUniform { lo, hi } => {
                    let mut rng = stream(trial_seed, &[tag::SIZE]);
                    (0..n_right).map(|_| rng.random_range(lo..=hi)).collect()
                }
            };
            let g =
                random_bipartite(n_left, n_right, &p, trial_seed).expect("probabilities in [0, 1]");
            usize::from(max_matching(&g).cardinality() == n_right)
        })
        .sum();
    hits as f64 / trials as f64
}
