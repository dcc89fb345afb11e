//! Allocation algorithms.
//!
//! Matching-based allocators return [`AllocOutcome::Infeasible`] when the
//! matching they need does not exist; there is no fallback. Precondition
//! violations (wrong mode, bad sizes) are errors.

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::error::{AllocError, MatchingError};
use crate::instance::{Allocation, Instance, Mode, Provenance, ValueMatrix};
use crate::matching::{
    left_saturated_r_matching, max_matching, perfect_r_matching, right_saturated_matching,
    threshold_graph, BipartiteGraph, Direction,
};
use crate::rng::{stream, tag};

/// Slack used when comparing against the proportional share `u_i(M) / n`.
pub const PROP_SLACK: f64 = 1e-12;

/// Multiplier on `ln n / (alpha_j n)` in the threshold formulas.
const THRESHOLD_FACTOR: f64 = 1.1;

/// Per-item thresholds and the smallest density lower bound among items.
#[derive(Debug, Clone, PartialEq)]
pub struct Thresholds {
    pub tau: Vec<f64>,
    pub alpha_min: f64,
}

/// Which matching an allocator could not find.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InfeasibleStage {
    /// EF-small goods: perfect x-matching on the threshold graph.
    PerfectXMatching,
    /// Two-stage proportional: perfect matching on the first n items.
    Stage1,
    /// Two-stage proportional: matching that saturates the violated agents.
    Stage2,
    /// Linear proportional: every agent matched to exactly x goods.
    LeftSaturatedXMatching,
    /// EF-small chores: perfect x-matching on the first xn chores.
    Phase1,
    /// EF-small chores: right-saturated matching on the leftover chores.
    Phase2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AllocOutcome {
    Success(Allocation),
    Infeasible {
        stage: InfeasibleStage,
        /// Size of the largest matching found.
        found: usize,
        /// Size the stage needed.
        required: usize,
    },
}

impl AllocOutcome {
    pub fn allocation(&self) -> Option<&Allocation> {
        match self {
            AllocOutcome::Success(a) => Some(a),
            AllocOutcome::Infeasible { .. } => None,
        }
    }

    pub fn is_success(&self) -> bool {
        matches!(self, AllocOutcome::Success(_))
    }

    pub fn infeasible_stage(&self) -> Option<InfeasibleStage> {
        match self {
            AllocOutcome::Success(_) => None,
            AllocOutcome::Infeasible { stage, .. } => Some(*stage),
        }
    }
}

/// Turns a matching result into either the matching or an `Infeasible`
/// outcome for `stage`; other matching errors propagate.
fn stage_result<T>(
    r: Result<T, MatchingError>,
    stage: InfeasibleStage,
) -> Result<Result<T, AllocOutcome>, AllocError> {
    match r {
        Ok(v) => Ok(Ok(v)),
        Err(MatchingError::Infeasible { found, required }) => Ok(Err(AllocOutcome::Infeasible {
            stage,
            found,
            required,
        })),
        Err(e) => Err(e.into()),
    }
}

fn require_mode(instance: &Instance, mode: Mode) -> Result<(), AllocError> {
    if instance.mode() != mode {
        return Err(AllocError::WrongMode {
            expected: match mode {
                Mode::Goods => "goods",
                Mode::Chores => "chores",
            },
        });
    }
    Ok(())
}

/// Gives every item to the agent with the highest utility (goods) or lowest
/// disutility (chores). Ties go to the lowest agent index.
pub fn allocate_argmax(instance: &Instance) -> Allocation {
    let (n, m) = (instance.n(), instance.m());
    let mut best_agent = vec![0usize; m];
    let mut best_value = instance.row(0).to_vec();
    for i in 1..n {
        for (j, &v) in instance.row(i).iter().enumerate() {
            let better = match instance.mode() {
                Mode::Goods => v > best_value[j],
                Mode::Chores => v < best_value[j],
            };
            if better {
                best_value[j] = v;
                best_agent[j] = i;
            }
        }
    }
    Allocation::from_owners(n, &best_agent, Provenance::ArgMax).expect("owners are agent indices")
}

/// Which sampling guarantee to size `s` for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SampleRegime {
    /// `2 ln m / alpha_min`: discrete laws with an atom at 1.
    Discrete,
    /// `20 ln m / alpha_min`: continuous laws, constant-factor welfare.
    ContinuousConstant,
    /// `2 (ln m)^2 / alpha_min`: continuous laws with means bounded below 1.
    ContinuousBoundedMean,
}

/// Number of agents to sample per item, `ceil(formula)` with natural logs.
/// The caller clamps the result to `n`.
pub fn sample_size(regime: SampleRegime, m: usize, alpha_min: f64) -> Result<usize, AllocError> {
    if m < 2 {
        return Err(AllocError::TooFewItems(m));
    }
    sample_size_from_ln(regime, (m as f64).ln(), alpha_min)
}

/// [`sample_size`] with `ln m` supplied directly.
pub fn sample_size_from_ln(
    regime: SampleRegime,
    ln_m: f64,
    alpha_min: f64,
) -> Result<usize, AllocError> {
    if alpha_min.is_nan() || alpha_min <= 0.0 {
        return Err(AllocError::NonPositiveAlpha(alpha_min));
    }
    let raw = match regime {
        SampleRegime::Discrete => 2.0 * ln_m / alpha_min,
        SampleRegime::ContinuousConstant => 20.0 * ln_m / alpha_min,
        SampleRegime::ContinuousBoundedMean => 2.0 * ln_m * ln_m / alpha_min,
    };
    Ok((raw.ceil() as usize).max(1))
}

/// Smallest density lower bound over the instance's item laws.
pub fn alpha_min(instance: &Instance) -> f64 {
    instance
        .item_specs()
        .iter()
        .map(|s| s.pdf_bounds().alpha)
        .fold(f64::INFINITY, f64::min)
}

/// One item's sampling record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    /// Sampled agents in draw order.
    pub sampled: Vec<usize>,
    pub winner: usize,
    pub value: f64,
}

/// Per-item sampling records, in item order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SampleLog {
    pub items: Vec<SampleRecord>,
}

/// Online sampling allocator on a goods instance.
pub fn allocate_sampling(
    instance: &Instance,
    s: usize,
    seed: u64,
) -> Result<(Allocation, SampleLog), AllocError> {
    require_mode(instance, Mode::Goods)?;
    allocate_sampling_on(instance, s, seed)
}

/// Online sampling allocator over any value matrix (utilities).
///
/// Items are processed in index order. For item `j`, `s` distinct agents are
/// drawn uniformly from the item's own stream and the item goes to the sampled
/// agent with the largest value (lowest index on ties). Only the sampled
/// entries of the matrix are read.
pub fn allocate_sampling_on<M: ValueMatrix + ?Sized>(
    matrix: &M,
    s: usize,
    seed: u64,
) -> Result<(Allocation, SampleLog), AllocError> {
    let (n, m) = (matrix.n(), matrix.m());
    if s == 0 || s > n {
        return Err(AllocError::SampleSizeOutOfRange { s, n });
    }
    let mut owners = Vec::with_capacity(m);
    let mut log = SampleLog {
        items: Vec::with_capacity(m),
    };
    for j in 0..m {
        let mut rng = stream(seed, &[tag::SAMPLING, j as u64]);
        let sampled = index::sample(&mut rng, n, s).into_vec();
        let mut winner = sampled[0];
        let mut best = matrix.value(winner, j);
        for &i in &sampled[1..] {
            let v = matrix.value(i, j);
            if v > best || (v == best && i < winner) {
                best = v;
                winner = i;
            }
        }
        owners.push(winner);
        log.items.push(SampleRecord {
            sampled,
            winner,
            value: best,
        });
    }
    let alloc = Allocation::from_owners(n, &owners, Provenance::Sampling)?;
    Ok((alloc, log))
}

fn per_item_alpha(instance: &Instance) -> Result<Vec<f64>, AllocError> {
    instance
        .item_specs()
        .iter()
        .enumerate()
        .map(|(j, spec)| {
            let a = spec.pdf_bounds().alpha;
            if a > 0.0 {
                Ok(a)
            } else {
                Err(AllocError::ZeroAlpha { item: j })
            }
        })
        .collect()
}

/// `tau_j = 1 - 1.1 ln n / (alpha_j n)`, unclamped.
pub fn goods_thresholds(instance: &Instance) -> Result<Thresholds, AllocError> {
    let alphas = per_item_alpha(instance)?;
    let n = instance.n() as f64;
    let tau = alphas
        .iter()
        .map(|a| 1.0 - THRESHOLD_FACTOR * n.ln() / (a * n))
        .collect();
    Ok(Thresholds {
        tau,
        alpha_min: alphas.iter().copied().fold(f64::INFINITY, f64::min),
    })
}

/// `tau_j = 1.1 ln n / (alpha_j n)` for chores.
pub fn chores_thresholds(instance: &Instance) -> Result<Thresholds, AllocError> {
    let alphas = per_item_alpha(instance)?;
    let n = instance.n() as f64;
    let tau = alphas
        .iter()
        .map(|a| THRESHOLD_FACTOR * n.ln() / (a * n))
        .collect();
    Ok(Thresholds {
        tau,
        alpha_min: alphas.iter().copied().fold(f64::INFINITY, f64::min),
    })
}

/// Envy-free allocator for `m = x n` goods: perfect x-matching on the graph
/// `u_i(j) >= tau_j`.
pub fn allocate_ef_small(instance: &Instance) -> Result<AllocOutcome, AllocError> {
    require_mode(instance, Mode::Goods)?;
    let (n, m) = (instance.n(), instance.m());
    if m % n != 0 {
        return Err(AllocError::Precondition(format!(
            "m = {m} is not divisible by n = {n}"
        )));
    }
    let thresholds = goods_thresholds(instance)?;
    let items: Vec<usize> = (0..m).collect();
    let g = threshold_graph(instance, &items, &thresholds.tau, Direction::AtLeast)?;
    let matching = match stage_result(
        perfect_r_matching(&g, m / n),
        InfeasibleStage::PerfectXMatching,
    )? {
        Ok(mt) => mt,
        Err(outcome) => return Ok(outcome),
    };
    let alloc = Allocation::new(m, matching.left_partners(), Provenance::EfSmall)?;
    Ok(AllocOutcome::Success(alloc))
}

/// Two-stage proportional allocator for `n <= m <= 2n` goods.
///
/// Stage 1 perfectly matches agents to the first n items over the threshold
/// graph. Agents whose stage-1 item is worth less than their proportional
/// share are then matched, one item each, to remaining items that close the
/// gap. Remaining items left over go to agent 0.
pub fn allocate_prop_two_stage(instance: &Instance) -> Result<AllocOutcome, AllocError> {
    require_mode(instance, Mode::Goods)?;
    let (n, m) = (instance.n(), instance.m());
    if m < n || m > 2 * n {
        return Err(AllocError::Precondition(format!(
            "two-stage proportional allocator needs n <= m <= 2n (n = {n}, m = {m})"
        )));
    }
    let thresholds = goods_thresholds(instance)?;

    let first: Vec<usize> = (0..n).collect();
    let g0 = threshold_graph(instance, &first, &thresholds.tau[..n], Direction::AtLeast)?;
    let stage1 = match stage_result(perfect_r_matching(&g0, 1), InfeasibleStage::Stage1)? {
        Ok(mt) => mt,
        Err(outcome) => return Ok(outcome),
    };
    let mut bundles: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (agent, item) in stage1.pairs() {
        bundles[agent].push(item);
    }

    let share: Vec<f64> = (0..n).map(|i| instance.total_value(i) / n as f64).collect();
    let stage1_value: Vec<f64> = (0..n).map(|i| instance.value(i, bundles[i][0])).collect();
    let violated: Vec<usize> = (0..n)
        .filter(|&i| stage1_value[i] + PROP_SLACK < share[i])
        .collect();

    let rest: Vec<usize> = (n..m).collect();
    let mut taken = vec![false; rest.len()];
    if !violated.is_empty() {
        let edges = violated.iter().enumerate().flat_map(|(k, &i)| {
            let gap = share[i] - stage1_value[i];
            rest.iter()
                .enumerate()
                .filter(move |(_, &j)| instance.value(i, j) + PROP_SLACK >= gap)
                .map(move |(t, _)| (k, t))
        });
        let fix = BipartiteGraph::new(violated.len(), rest.len(), edges)?;
        let stage2 = max_matching(&fix);
        if stage2.cardinality() < violated.len() {
            return Ok(AllocOutcome::Infeasible {
                stage: InfeasibleStage::Stage2,
                found: stage2.cardinality(),
                required: violated.len(),
            });
        }
        for (k, t) in stage2.pairs() {
            bundles[violated[k]].push(rest[t]);
            taken[t] = true;
        }
    }
    for (t, &j) in rest.iter().enumerate() {
        if !taken[t] {
            bundles[0].push(j);
        }
    }
    let alloc = Allocation::new(m, bundles, Provenance::PropTwoStage)?;
    Ok(AllocOutcome::Success(alloc))
}

/// Minimum goods-per-agent ratio for the linear proportional allocator,
/// `ceil(2 (3 + c) / (1 - c))`.
pub fn prop_linear_degree(c: f64) -> Result<usize, AllocError> {
    if !(0.0..1.0).contains(&c) {
        return Err(AllocError::Precondition(format!(
            "mean bound c must lie in [0, 1), got {c}"
        )));
    }
    let raw = 2.0 * (3.0 + c) / (1.0 - c);
    // Guard against 14.000000000000002-style rounding bumping the ceiling.
    Ok((raw - 1e-9).ceil() as usize)
}

/// Proportional allocator for `m >= r n` goods with item means at most `c`.
///
/// Every agent is matched to exactly `x = floor(m / n)` goods over the
/// threshold graph; the unmatched goods are dealt round-robin.
pub fn allocate_prop_linear(instance: &Instance, c: f64) -> Result<AllocOutcome, AllocError> {
    require_mode(instance, Mode::Goods)?;
    let r = prop_linear_degree(c)?;
    let (n, m) = (instance.n(), instance.m());
    if m < r * n {
        return Err(AllocError::Precondition(format!(
            "need m >= r n = {r} * {n}, got m = {m}"
        )));
    }
    if let Some((j, mu)) = instance
        .item_specs()
        .iter()
        .map(|s| s.mean())
        .enumerate()
        .find(|(_, mu)| *mu > c + 1e-12)
    {
        return Err(AllocError::Precondition(format!(
            "item {j} has mean {mu} > c = {c}"
        )));
    }
    let thresholds = goods_thresholds(instance)?;
    let items: Vec<usize> = (0..m).collect();
    let g = threshold_graph(instance, &items, &thresholds.tau, Direction::AtLeast)?;
    let matching = match stage_result(
        left_saturated_r_matching(&g, m / n),
        InfeasibleStage::LeftSaturatedXMatching,
    )? {
        Ok(mt) => mt,
        Err(outcome) => return Ok(outcome),
    };
    let mut bundles = matching.left_partners();
    let leftovers = matching
        .right_to_left()
        .iter()
        .enumerate()
        .filter(|(_, l)| l.is_none())
        .map(|(j, _)| j);
    for (k, j) in leftovers.enumerate() {
        bundles[k % n].push(j);
    }
    let alloc = Allocation::new(m, bundles, Provenance::PropLinear)?;
    Ok(AllocOutcome::Success(alloc))
}

/// Envy-free allocator for chores.
///
/// Phase 1 perfectly x-matches agents to the first `x n` chores over
/// `d_i(j) <= tau_j`; phase 2 hands each of the `y = m - x n` remaining chores
/// to a distinct agent with `d_i(j) <= 1.1 ln n / (alpha_min n)`.
pub fn allocate_ef_small_chores(instance: &Instance) -> Result<AllocOutcome, AllocError> {
    require_mode(instance, Mode::Chores)?;
    let (n, m) = (instance.n(), instance.m());
    let thresholds = chores_thresholds(instance)?;
    let x = m / n;
    let mut bundles: Vec<Vec<usize>> = vec![Vec::new(); n];

    if x > 0 {
        let head: Vec<usize> = (0..x * n).collect();
        let g1 = threshold_graph(instance, &head, &thresholds.tau[..x * n], Direction::AtMost)?;
        let phase1 = match stage_result(perfect_r_matching(&g1, x), InfeasibleStage::Phase1)? {
            Ok(mt) => mt,
            Err(outcome) => return Ok(outcome),
        };
        for (agent, k) in phase1.pairs() {
            bundles[agent].push(head[k]);
        }
    }

    let tail: Vec<usize> = (x * n..m).collect();
    if !tail.is_empty() {
        let tau_max = THRESHOLD_FACTOR * (n as f64).ln() / (thresholds.alpha_min * n as f64);
        let g2 = threshold_graph(
            instance,
            &tail,
            &vec![tau_max; tail.len()],
            Direction::AtMost,
        )?;
        let phase2 = match stage_result(right_saturated_matching(&g2), InfeasibleStage::Phase2)? {
            Ok(mt) => mt,
            Err(outcome) => return Ok(outcome),
        };
        for (agent, k) in phase2.pairs() {
            bundles[agent].push(tail[k]);
        }
    }
    let alloc = Allocation::new(m, bundles, Provenance::ChoresEfSmall)?;
    Ok(AllocOutcome::Success(alloc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::DistributionSpec;

    fn goods(rows: &[&[f64]]) -> Instance {
        Instance::from_rows(Mode::Goods, rows).unwrap()
    }

    #[test]
    fn argmax_examples() {
        // Columns (0.9, 0.1) and (0.2, 0.8).
        let inst = goods(&[&[0.9, 0.2], &[0.1, 0.8]]);
        let a = allocate_argmax(&inst);
        assert_eq!(a.owners(), vec![0, 1]);

        let tie = goods(&[&[0.5], &[0.5]]);
        assert_eq!(allocate_argmax(&tie).owners(), vec![0]);

        let chores = Instance::from_rows(Mode::Chores, &[&[0.9], &[0.1]]).unwrap();
        assert_eq!(allocate_argmax(&chores).owners(), vec![1]);
    }

    #[test]
    fn sample_size_examples() {
        assert_eq!(sample_size(SampleRegime::Discrete, 1000, 0.5).unwrap(), 28);
        assert_eq!(
            sample_size(SampleRegime::ContinuousConstant, 1000, 1.0).unwrap(),
            139
        );
        assert_eq!(
            sample_size_from_ln(SampleRegime::ContinuousBoundedMean, 1.0, 2.0).unwrap(),
            1
        );
        assert_eq!(sample_size(SampleRegime::Discrete, 2000, 0.2).unwrap(), 77);
        assert!(matches!(
            sample_size(SampleRegime::Discrete, 1000, 0.0),
            Err(AllocError::NonPositiveAlpha(_))
        ));
        assert!(sample_size(SampleRegime::Discrete, 1, 1.0).is_err());
    }

    #[test]
    fn sampling_with_one_agent_per_item_ignores_values() {
        let inst = goods(&[&[0.0, 0.0, 0.0], &[1.0, 1.0, 1.0], &[0.5, 0.5, 0.5]]);
        let (alloc, log) = allocate_sampling(&inst, 1, 42).unwrap();
        for (j, rec) in log.items.iter().enumerate() {
            assert_eq!(rec.sampled.len(), 1);
            assert_eq!(rec.winner, rec.sampled[0]);
            assert_eq!(alloc.owners()[j], rec.winner);
        }
    }

    #[test]
    fn sampling_rejects_bad_s_and_chores() {
        let inst = goods(&[&[0.3], &[0.4]]);
        assert!(allocate_sampling(&inst, 0, 1).is_err());
        assert!(allocate_sampling(&inst, 3, 1).is_err());
        let chores = Instance::from_rows(Mode::Chores, &[&[0.3], &[0.4]]).unwrap();
        assert!(matches!(
            allocate_sampling(&chores, 1, 1),
            Err(AllocError::WrongMode { .. })
        ));
    }

    #[test]
    fn goods_threshold_values() {
        let specs = vec![DistributionSpec::uniform(0.0, 1.0).unwrap(); 1];
        let inst =
            Instance::from_values(Mode::Goods, 100, 1, vec![0.5; 100], specs.clone()).unwrap();
        let t = goods_thresholds(&inst).unwrap();
        assert!((t.tau[0] - 0.949_343).abs() < 1e-6);

        let inst = Instance::from_values(Mode::Goods, 2, 1, vec![0.5; 2], specs).unwrap();
        let t = goods_thresholds(&inst).unwrap();
        assert!((t.tau[0] - 0.618_769).abs() < 1e-6);

        // alpha doubles (Uniform on a half-width interval) => gap halves.
        let half = vec![DistributionSpec::uniform(0.5, 1.0).unwrap()];
        let inst2 = Instance::from_values(Mode::Goods, 2, 1, vec![0.7; 2], half).unwrap();
        let t2 = goods_thresholds(&inst2).unwrap();
        assert!(((1.0 - t2.tau[0]) - 0.5 * (1.0 - t.tau[0])).abs() < 1e-15);
    }

    #[test]
    fn zero_alpha_is_reported_with_item() {
        let specs = vec![
            DistributionSpec::uniform(0.0, 1.0).unwrap(),
            DistributionSpec::beta(2.0, 2.0).unwrap(),
        ];
        let inst = Instance::from_values(Mode::Goods, 1, 2, vec![0.5, 0.5], specs).unwrap();
        assert_eq!(
            goods_thresholds(&inst),
            Err(AllocError::ZeroAlpha { item: 1 })
        );
    }

    #[test]
    fn ef_small_on_complete_threshold_graph() {
        let n = 50;
        let m = 5 * n;
        let v = 1.0 - 1e-9;
        let specs = vec![DistributionSpec::uniform(0.0, 1.0).unwrap(); m];
        let inst = Instance::from_values(Mode::Goods, n, m, vec![v; n * m], specs).unwrap();
        let out = allocate_ef_small(&inst).unwrap();
        let alloc = out.allocation().expect("complete graph must match");
        assert!(alloc.bundles().iter().all(|b| b.len() == 5));
    }

    #[test]
    fn ef_small_infeasible_for_hopeless_agent() {
        let n = 4;
        let m = 8;
        let mut values = vec![1.0; n * m];
        for v in &mut values[m..2 * m] {
            *v = 0.0;
        }
        let specs = vec![DistributionSpec::uniform(0.0, 1.0).unwrap(); m];
        let inst = Instance::from_values(Mode::Goods, n, m, values, specs).unwrap();
        assert_eq!(
            allocate_ef_small(&inst).unwrap().infeasible_stage(),
            Some(InfeasibleStage::PerfectXMatching)
        );
    }

    #[test]
    fn ef_small_needs_divisibility() {
        let inst = goods(&[&[1.0, 1.0, 1.0], &[1.0, 1.0, 1.0]]);
        assert!(matches!(
            allocate_ef_small(&inst),
            Err(AllocError::Precondition(_))
        ));
    }

    #[test]
    fn two_stage_hand_trace() {
        let inst = goods(&[&[0.9, 0.2, 0.3], &[0.3, 0.9, 0.8]]);
        let out = allocate_prop_two_stage(&inst).unwrap();
        let alloc = out.allocation().unwrap();
        assert_eq!(alloc.bundle(0), &[0]);
        assert_eq!(alloc.bundle(1), &[1, 2]);
    }

    #[test]
    fn two_stage_vacuous_second_stage() {
        // m = n, each agent's stage-1 item exceeds the proportional share.
        let inst = goods(&[&[0.99, 0.5], &[0.5, 0.99]]);
        let alloc = allocate_prop_two_stage(&inst).unwrap();
        assert_eq!(alloc.allocation().unwrap().owners(), vec![0, 1]);
    }

    #[test]
    fn two_stage_failures() {
        // Agent 1 values nothing in the first n items above tau.
        let inst = goods(&[&[0.99, 0.99, 0.1], &[0.1, 0.1, 0.1]]);
        assert_eq!(
            allocate_prop_two_stage(&inst).unwrap().infeasible_stage(),
            Some(InfeasibleStage::Stage1)
        );
        // Both agents violated but only one remaining item.
        let inst = goods(&[&[0.7, 0.0, 1.0], &[0.0, 0.7, 1.0]]);
        assert_eq!(
            allocate_prop_two_stage(&inst).unwrap().infeasible_stage(),
            Some(InfeasibleStage::Stage2)
        );
        let small = goods(&[&[1.0], &[1.0]]);
        assert!(allocate_prop_two_stage(&small).is_err());
    }

    #[test]
    fn prop_linear_degree_examples() {
        assert_eq!(prop_linear_degree(0.5).unwrap(), 14);
        assert_eq!(prop_linear_degree(0.0).unwrap(), 6);
        assert!(prop_linear_degree(1.0).is_err());
        assert!(prop_linear_degree(-0.1).is_err());
    }

    #[test]
    fn prop_linear_preconditions() {
        // 2 agents need m >= 12 for c = 0.
        let specs = vec![DistributionSpec::uniform(0.0, 1.0).unwrap(); 10];
        let inst = Instance::from_values(Mode::Goods, 2, 10, vec![0.5; 20], specs).unwrap();
        assert!(matches!(
            allocate_prop_linear(&inst, 0.0),
            Err(AllocError::Precondition(_))
        ));
        // Means 0.5 exceed c = 0.4.
        let specs = vec![DistributionSpec::uniform(0.0, 1.0).unwrap(); 30];
        let inst = Instance::from_values(Mode::Goods, 2, 30, vec![0.5; 60], specs).unwrap();
        assert!(matches!(
            allocate_prop_linear(&inst, 0.4),
            Err(AllocError::Precondition(_))
        ));
    }

    #[test]
    fn prop_linear_round_robin_leftovers() {
        let n = 2;
        let m = 31; // x = 15, y = 1
        let specs = vec![DistributionSpec::uniform(0.0, 1.0).unwrap(); m];
        let inst = Instance::from_values(Mode::Goods, n, m, vec![1.0; n * m], specs).unwrap();
        let out = allocate_prop_linear(&inst, 0.5).unwrap();
        let alloc = out.allocation().unwrap();
        let sizes: Vec<usize> = alloc.bundles().iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![16, 15]);
    }

    #[test]
    fn chores_examples() {
        // y = 0: only phase 1 runs.
        let n = 3;
        let m = 6;
        let specs = vec![DistributionSpec::uniform(0.0, 1.0).unwrap(); m];
        let inst =
            Instance::from_values(Mode::Chores, n, m, vec![0.0; n * m], specs.clone()).unwrap();
        let out = allocate_ef_small_chores(&inst).unwrap();
        assert!(out
            .allocation()
            .unwrap()
            .bundles()
            .iter()
            .all(|b| b.len() == 2));

        // All disutilities 1 => no edges at all.
        let inst = Instance::from_values(Mode::Chores, n, m, vec![1.0; n * m], specs).unwrap();
        assert_eq!(
            allocate_ef_small_chores(&inst).unwrap().infeasible_stage(),
            Some(InfeasibleStage::Phase1)
        );

        // Phase 2 with a leftover chore nobody tolerates.
        let m = 7;
        let mut values = vec![0.0; n * m];
        for i in 0..n {
            values[i * m + 6] = 1.0;
        }
        let specs = vec![DistributionSpec::uniform(0.0, 1.0).unwrap(); m];
        let inst = Instance::from_values(Mode::Chores, n, m, values, specs).unwrap();
        assert_eq!(
            allocate_ef_small_chores(&inst).unwrap().infeasible_stage(),
            Some(InfeasibleStage::Phase2)
        );
        let goods_inst = goods(&[&[0.1]]);
        assert!(allocate_ef_small_chores(&goods_inst).is_err());
    }
}
