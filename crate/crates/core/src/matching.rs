//! Bipartite graphs and the matching primitives every allocator reduces to.
//!
//! Left vertices are agents, right vertices are items. All routines visit left
//! vertices and adjacency lists in ascending index order, so the matching
//! returned for a given graph is always the same.

use std::collections::VecDeque;

use rand::Rng;

use crate::error::MatchingError;
use crate::instance::Instance;
use crate::rng::{stream, tag};

const NONE: usize = usize::MAX;

/// Largest subset size `hall_violation` will enumerate.
pub const HALL_CAP_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    n_left: usize,
    n_right: usize,
    adjacency: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    /// Builds a graph from an edge list. Duplicate edges are merged.
    pub fn new(
        n_left: usize,
        n_right: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, MatchingError> {
        let mut adjacency = vec![Vec::new(); n_left];
        for (l, r) in edges {
            if l >= n_left || r >= n_right {
                return Err(MatchingError::EdgeOutOfRange {
                    left: l,
                    right: r,
                    n_left,
                    n_right,
                });
            }
            adjacency[l].push(r);
        }
        Ok(Self::from_unsorted(n_right, adjacency))
    }

    fn from_unsorted(n_right: usize, mut adjacency: Vec<Vec<usize>>) -> Self {
        for adj in &mut adjacency {
            adj.sort_unstable();
            adj.dedup();
        }
        BipartiteGraph {
            n_left: adjacency.len(),
            n_right,
            adjacency,
        }
    }

    pub fn complete(n_left: usize, n_right: usize) -> Self {
        BipartiteGraph {
            n_left,
            n_right,
            adjacency: vec![(0..n_right).collect(); n_left],
        }
    }

    pub fn empty(n_left: usize, n_right: usize) -> Self {
        BipartiteGraph {
            n_left,
            n_right,
            adjacency: vec![Vec::new(); n_left],
        }
    }

    pub fn n_left(&self) -> usize {
        self.n_left
    }

    pub fn n_right(&self) -> usize {
        self.n_right
    }

    /// Sorted right neighbours of left vertex `l`.
    pub fn neighbors(&self, l: usize) -> &[usize] {
        &self.adjacency[l]
    }

    pub fn has_edge(&self, l: usize, r: usize) -> bool {
        self.adjacency[l].binary_search(&r).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(l, adj)| adj.iter().map(move |&r| (l, r)))
    }

    /// The same graph with sides swapped.
    pub fn transpose(&self) -> BipartiteGraph {
        let mut adjacency = vec![Vec::new(); self.n_right];
        for (l, r) in self.edges() {
            adjacency[r].push(l);
        }
        BipartiteGraph {
            n_left: self.n_right,
            n_right: self.n_left,
            adjacency,
        }
    }

    /// Replaces every left vertex by `r` copies (copy `k` of vertex `i` is
    /// left vertex `i * r + k`) sharing its neighbourhood.
    pub fn clone_left(&self, r: usize) -> BipartiteGraph {
        let adjacency = self
            .adjacency
            .iter()
            .flat_map(|adj| std::iter::repeat_n(adj, r).cloned())
            .collect::<Vec<_>>();
        BipartiteGraph {
            n_left: adjacency.len(),
            n_right: self.n_right,
            adjacency,
        }
    }
}

/// A matching in which every right vertex has at most one partner; left
/// vertices may have several (r-matchings).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    right_to_left: Vec<Option<usize>>,
    left_degree: Vec<usize>,
}

impl Matching {
    fn from_right_to_left(n_left: usize, right_to_left: Vec<Option<usize>>) -> Self {
        let mut left_degree = vec![0; n_left];
        for l in right_to_left.iter().flatten() {
            left_degree[*l] += 1;
        }
        Matching {
            right_to_left,
            left_degree,
        }
    }

    pub fn cardinality(&self) -> usize {
        self.right_to_left.iter().flatten().count()
    }

    pub fn partner_of_right(&self, r: usize) -> Option<usize> {
        self.right_to_left[r]
    }

    pub fn right_to_left(&self) -> &[Option<usize>] {
        &self.right_to_left
    }

    pub fn left_degree(&self) -> &[usize] {
        &self.left_degree
    }

    /// Matched `(left, right)` pairs in right-index order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.right_to_left
            .iter()
            .enumerate()
            .filter_map(|(r, l)| l.map(|l| (l, r)))
    }

    /// Right vertices matched to each left vertex.
    pub fn left_partners(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.left_degree.len()];
        for (l, r) in self.pairs() {
            out[l].push(r);
        }
        out
    }

    /// True when every pair is an edge of `g` and no right vertex repeats.
    pub fn is_valid_in(&self, g: &BipartiteGraph) -> bool {
        self.right_to_left.len() == g.n_right()
            && self.left_degree.len() == g.n_left()
            && self.pairs().all(|(l, r)| g.has_edge(l, r))
    }
}

/// Hopcroft-Karp on `g`. Returns `match_right[r]` (left partner or `NONE`).
fn hopcroft_karp(g: &BipartiteGraph) -> Vec<usize> {
    let n_left = g.n_left;
    let mut match_left = vec![NONE; n_left];
    let mut match_right = vec![NONE; g.n_right];
    let mut dist = vec![usize::MAX; n_left];
    let mut cursor = vec![0usize; n_left];
    let mut queue = VecDeque::with_capacity(n_left);
    let mut stack: Vec<usize> = Vec::new();

    // Greedy warm start in index order.
    for (l, adj) in g.adjacency.iter().enumerate() {
        if let Some(&r) = adj.iter().find(|&&r| match_right[r] == NONE) {
            match_left[l] = r;
            match_right[r] = l;
        }
    }

    loop {
        queue.clear();
        for l in 0..n_left {
            if match_left[l] == NONE {
                dist[l] = 0;
                queue.push_back(l);
            } else {
                dist[l] = usize::MAX;
            }
        }
        let mut reachable_free = false;
        while let Some(l) = queue.pop_front() {
            for &r in &g.adjacency[l] {
                let w = match_right[r];
                if w == NONE {
                    reachable_free = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[l] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !reachable_free {
            break;
        }

        cursor.fill(0);
        let mut augmented = false;
        for root in 0..n_left {
            if match_left[root] != NONE {
                continue;
            }
            // Iterative DFS along the layered graph; `stack` holds the left
            // vertices of the current alternating path.
            stack.clear();
            stack.push(root);
            while let Some(&l) = stack.last() {
                let adj = &g.adjacency[l];
                if cursor[l] == adj.len() {
                    dist[l] = usize::MAX;
                    stack.pop();
                    if let Some(&parent) = stack.last() {
                        cursor[parent] += 1;
                    }
                    continue;
                }
                let r = adj[cursor[l]];
                let w = match_right[r];
                if w == NONE {
                    for &x in &stack {
                        let y = g.adjacency[x][cursor[x]];
                        match_left[x] = y;
                        match_right[y] = x;
                    }
                    augmented = true;
                    break;
                } else if dist[w] != usize::MAX && dist[w] == dist[l] + 1 {
                    stack.push(w);
                } else {
                    cursor[l] += 1;
                }
            }
        }
        if !augmented {
            break;
        }
    }
    match_right
}

fn to_option(v: usize) -> Option<usize> {
    (v != NONE).then_some(v)
}

/// Maximum-cardinality matching.
pub fn max_matching(g: &BipartiteGraph) -> Matching {
    let match_right = hopcroft_karp(g);
    Matching::from_right_to_left(g.n_left, match_right.into_iter().map(to_option).collect())
}

/// Runs the cloning reduction: `r` copies of each left vertex, then a
/// maximum matching, folded back onto the original left vertices.
fn cloned_matching(g: &BipartiteGraph, r: usize) -> Matching {
    let cloned = g.clone_left(r);
    let match_right = hopcroft_karp(&cloned);
    Matching::from_right_to_left(
        g.n_left,
        match_right
            .into_iter()
            .map(|c| to_option(c).map(|c| c / r))
            .collect(),
    )
}

/// Perfect r-matching: every left vertex gets exactly `r` right vertices and
/// every right vertex is matched. Requires `n_right == r * n_left`.
pub fn perfect_r_matching(g: &BipartiteGraph, r: usize) -> Result<Matching, MatchingError> {
    if r == 0 {
        return Err(MatchingError::ZeroDegree);
    }
    if g.n_right != r * g.n_left {
        return Err(MatchingError::Shape(format!(
            "perfect r-matching needs n_right = r * n_left ({} != {} * {})",
            g.n_right, r, g.n_left
        )));
    }
    let m = cloned_matching(g, r);
    let found = m.cardinality();
    if found < g.n_right {
        return Err(MatchingError::Infeasible {
            found,
            required: g.n_right,
        });
    }
    Ok(m)
}

/// Left-saturated r-matching: every left vertex gets exactly `r` right
/// vertices; surplus right vertices stay unmatched. Requires
/// `n_right >= r * n_left`.
pub fn left_saturated_r_matching(g: &BipartiteGraph, r: usize) -> Result<Matching, MatchingError> {
    if r == 0 {
        return Err(MatchingError::ZeroDegree);
    }
    let required = r * g.n_left;
    if g.n_right < required {
        return Err(MatchingError::Shape(format!(
            "left-saturated r-matching needs n_right >= r * n_left ({} < {} * {})",
            g.n_right, r, g.n_left
        )));
    }
    let m = cloned_matching(g, r);
    let found = m.cardinality();
    if found < required {
        return Err(MatchingError::Infeasible { found, required });
    }
    Ok(m)
}

/// Matching that covers every right vertex, each left vertex used at most once.
pub fn right_saturated_matching(g: &BipartiteGraph) -> Result<Matching, MatchingError> {
    let m = max_matching(g);
    let found = m.cardinality();
    if found < g.n_right {
        return Err(MatchingError::Infeasible {
            found,
            required: g.n_right,
        });
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Edge when `value >= threshold` (goods).
    AtLeast,
    /// Edge when `value <= threshold` (chores).
    AtMost,
}

/// Agents on the left, `items` (in the given order) on the right; right vertex
/// `k` stands for item `items[k]` with threshold `thresholds[k]`.
pub fn threshold_graph(
    instance: &Instance,
    items: &[usize],
    thresholds: &[f64],
    direction: Direction,
) -> Result<BipartiteGraph, MatchingError> {
    if items.len() != thresholds.len() {
        return Err(MatchingError::Shape(format!(
            "{} items but {} thresholds",
            items.len(),
            thresholds.len()
        )));
    }
    if let Some(&j) = items.iter().find(|&&j| j >= instance.m()) {
        return Err(MatchingError::EdgeOutOfRange {
            left: 0,
            right: j,
            n_left: instance.n(),
            n_right: instance.m(),
        });
    }
    let adjacency = (0..instance.n())
        .map(|i| {
            let row = instance.row(i);
            items
                .iter()
                .zip(thresholds)
                .enumerate()
                .filter(|(_, (&j, &t))| match direction {
                    Direction::AtLeast => row[j] >= t,
                    Direction::AtMost => row[j] <= t,
                })
                .map(|(k, _)| k)
                .collect()
        })
        .collect();
    Ok(BipartiteGraph {
        n_left: instance.n(),
        n_right: items.len(),
        adjacency,
    })
}

/// Exhaustive search for a left subset `S` with `|N(S)| < |S|` and
/// `|S| <= max_subset`. Returns the first witness in (size, lexicographic)
/// order. Exponential; for tests and small-graph checks only.
pub fn hall_violation(
    g: &BipartiteGraph,
    max_subset: usize,
) -> Result<Option<Vec<usize>>, MatchingError> {
    if max_subset > HALL_CAP_LIMIT {
        return Err(MatchingError::CapTooLarge {
            cap: max_subset,
            limit: HALL_CAP_LIMIT,
        });
    }
    let words = g.n_right.div_ceil(64).max(1);
    let masks: Vec<Vec<u64>> = g
        .adjacency
        .iter()
        .map(|adj| {
            let mut m = vec![0u64; words];
            for &r in adj {
                m[r / 64] |= 1 << (r % 64);
            }
            m
        })
        .collect();

    let cap = max_subset.min(g.n_left);
    for size in 1..=cap {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            let mut union = vec![0u64; words];
            for &l in &combo {
                for (u, w) in union.iter_mut().zip(&masks[l]) {
                    *u |= w;
                }
            }
            let reach: u32 = union.iter().map(|w| w.count_ones()).sum();
            if (reach as usize) < size {
                return Ok(Some(combo));
            }
            // Next combination in lexicographic order.
            let mut k = size;
            while k > 0 && combo[k - 1] == g.n_left - size + k - 1 {
                k -= 1;
            }
            if k == 0 {
                break;
            }
            combo[k - 1] += 1;
            for t in k..size {
                combo[t] = combo[t - 1] + 1;
            }
        }
    }
    Ok(None)
}

/// Random bipartite graph: edge `(l, r)` present independently with
/// probability `edge_probs[r]`. Right vertex `r` uses its own RNG stream.
pub fn random_bipartite(
    n_left: usize,
    n_right: usize,
    edge_probs: &[f64],
    seed: u64,
) -> Result<BipartiteGraph, MatchingError> {
    if edge_probs.len() != n_right {
        return Err(MatchingError::Shape(format!(
            "{} edge probabilities for {} right vertices",
            edge_probs.len(),
            n_right
        )));
    }
    if let Some(&p) = edge_probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(MatchingError::BadProbability(p));
    }
    let mut adjacency = vec![Vec::new(); n_left];
    for (r, &p) in edge_probs.iter().enumerate() {
        let mut rng = stream(seed, &[tag::GRAPH, r as u64]);
        for adj in adjacency.iter_mut() {
            if rng.random_bool(p) {
                adj.push(r);
            }
        }
    }
    Ok(BipartiteGraph {
        n_left,
        n_right,
        adjacency,
    })
}
