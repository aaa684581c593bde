//! Network topology: neighborhoods, stable sets, synthetic graph generation and
//! the edge-list text format.
//!
//! Units are 0-based everywhere. Neighbor lists are stored in compressed
//! sparse row form and kept sorted, which makes `has_edge` a binary search and
//! iteration over a unit's neighbors a contiguous slice.

use std::collections::HashSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

/// Undirected simple graph over `n` units.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkGraph {
    n: usize,
    offsets: Vec<usize>,
    adj: Vec<usize>,
}

impl NetworkGraph {
    /// Builds a graph from unordered pairs. Duplicate pairs (in either
    /// orientation) collapse to one edge; self-loops and out-of-range indices
    /// are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut lists: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, j) in edges {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, n });
            }
            if j >= n {
                return Err(Error::IndexOutOfRange { index: j, n });
            }
            if i == j {
                return Err(Error::InvalidInput(format!("self-loop on unit {i}")));
            }
            lists[i].push(j);
            lists[j].push(i);
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut adj = Vec::new();
        offsets.push(0);
        for mut l in lists {
            l.sort_unstable();
            l.dedup();
            adj.extend_from_slice(&l);
            offsets.push(adj.len());
        }
        Ok(Self { n, offsets, adj })
    }

    pub fn edgeless(n: usize) -> Self {
        Self { n, offsets: vec![0; n + 1], adj: Vec::new() }
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
        Self::new(n, edges).expect("complete graph is valid")
    }

    pub fn path(n: usize) -> Self {
        Self::new(n, (1..n).map(|i| (i - 1, i))).expect("path graph is valid")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a simple cycle needs at least 3 units");
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle graph is valid")
    }

    pub fn n_units(&self) -> usize {
        self.n
    }

    pub fn n_edges(&self) -> usize {
        self.adj.len() / 2
    }

    /// Neighbors of `i`, sorted ascending.
    pub fn neighbors(&self, i: usize) -> Result<&[usize]> {
        self.check(i)?;
        Ok(self.nbrs(i))
    }

    /// Unchecked neighbor slice for hot loops; panics when `i >= n`.
    #[inline]
    pub fn nbrs(&self, i: usize) -> &[usize] {
        &self.adj[self.offsets[i]..self.offsets[i + 1]]
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|i| self.degree(i)).collect()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|i| self.degree(i)).max().unwrap_or(0)
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && self.nbrs(i).binary_search(&j).is_ok()
    }

    /// Edges as `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| {
            self.nbrs(i).iter().filter(move |&&j| j > i).map(move |&j| (i, j))
        })
    }

    fn check(&self, i: usize) -> Result<()> {
        if i < self.n {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: i, n: self.n })
        }
    }

    /// Units at graph distance exactly `k` from `i`: the union of the
    /// neighbors of the order-`k-1` shell, minus every lower-order shell and
    /// `i` itself.
    pub fn kth_neighborhood(&self, i: usize, k: usize) -> Result<Vec<usize>> {
        self.check(i)?;
        if k == 0 {
            return Err(Error::InvalidInput("neighborhood order must be at least 1".into()));
        }
        let mut seen = vec![false; self.n];
        seen[i] = true;
        let mut shell = vec![i];
        for _ in 0..k {
            let mut next = Vec::new();
            for &u in &shell {
                for &v in self.nbrs(u) {
                    if !seen[v] {
                        seen[v] = true;
                        next.push(v);
                    }
                }
            }
            shell = next;
            if shell.is_empty() {
                break;
            }
        }
        shell.sort_unstable();
        Ok(shell)
    }

    /// True iff no two members of `s` are adjacent.
    pub fn is_stable(&self, s: &[usize]) -> Result<bool> {
        let mut member = vec![false; self.n];
        for &i in s {
            self.check(i)?;
            member[i] = true;
        }
        Ok(s.iter().all(|&i| self.nbrs(i).iter().all(|&j| !member[j])))
    }

    /// True iff `s` is stable and every unit outside it has a neighbor in it.
    pub fn is_maximal_stable(&self, s: &[usize]) -> Result<bool> {
        if !self.is_stable(s)? {
            return Ok(false);
        }
        let mut member = vec![false; self.n];
        for &i in s {
            member[i] = true;
        }
        Ok((0..self.n).all(|u| member[u] || self.nbrs(u).iter().any(|&j| member[j])))
    }

    /// k-stable check: the closed order-`k` balls of any two members share no
    /// edge (and do not overlap). `k = 0` reduces to ordinary stability.
    pub fn is_k_stable(&self, s: &[usize], k: usize) -> Result<bool> {
        for &i in s {
            self.check(i)?;
        }
        let balls: Vec<HashSet<usize>> = s.iter().map(|&i| self.ball(i, k)).collect();
        for a in 0..s.len() {
            for b in a + 1..s.len() {
                let touching = balls[a].iter().any(|&u| {
                    balls[b].contains(&u) || self.nbrs(u).iter().any(|v| balls[b].contains(v))
                });
                if touching {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    fn ball(&self, i: usize, k: usize) -> HashSet<usize> {
        let mut ball = HashSet::from([i]);
        let mut frontier = vec![i];
        for _ in 0..k {
            let mut next = Vec::new();
            for &u in &frontier {
                for &v in self.nbrs(u) {
                    if ball.insert(v) {
                        next.push(v);
                    }
                }
            }
            frontier = next;
        }
        ball
    }

    /// Applies the relabeling `perm` (old index -> new index).
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "permutation has {} entries for {} units",
                perm.len(),
                self.n
            )));
        }
        Self::new(self.n, self.edges().map(|(i, j)| (perm[i], perm[j])))
    }

    /// Degree histogram, index = degree.
    pub fn degree_histogram(&self) -> Vec<usize> {
        let mut h = vec![0; self.max_degree() + 1];
        for i in 0..self.n {
            h[self.degree(i)] += 1;
        }
        h
    }
}

/// A set of pairwise non-adjacent units.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StableSet {
    members: Vec<usize>,
    graph_n: usize,
    maximal: bool,
}

impl StableSet {
    /// Validates `members` against `g`; maximality is computed, not trusted.
    pub fn new(g: &NetworkGraph, mut members: Vec<usize>) -> Result<Self> {
        members.sort_unstable();
        members.dedup();
        if !g.is_stable(&members)? {
            return Err(Error::InvalidInput("unit set is not stable".into()));
        }
        let maximal = g.is_maximal_stable(&members)?;
        Ok(Self { members, graph_n: g.n_units(), maximal })
    }

    /// Every unit of an edgeless graph.
    pub fn all_units(g: &NetworkGraph) -> Result<Self> {
        Self::new(g, (0..g.n_units()).collect())
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn graph_n(&self) -> usize {
        self.graph_n
    }

    pub fn is_maximal(&self) -> bool {
        self.maximal
    }
}

/// Greedy order used by the stable-set search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StableSetStrategy {
    /// Shuffle the units, then add each one not adjacent to the current set.
    #[default]
    Shuffled,
    /// Repeatedly add a uniformly chosen unit of minimum residual degree.
    MinDegree,
}

pub const DEFAULT_STABLE_SET_RESTARTS: usize = 64;

/// Randomized greedy search for a large maximal stable set using the
/// shuffled-order strategy.
pub fn find_max_stable_set(g: &NetworkGraph, restarts: usize, seed: u64) -> StableSet {
    find_max_stable_set_with(g, restarts, StableSetStrategy::Shuffled, seed)
}

/// Runs `restarts` randomized greedy passes and keeps the largest set found
/// (the first one on ties).
pub fn find_max_stable_set_with(
    g: &NetworkGraph,
    restarts: usize,
    strategy: StableSetStrategy,
    seed: u64,
) -> StableSet {
    let mut rng = seed::rng(seed);
    let mut best: Option<Vec<usize>> = None;
    for _ in 0..restarts.max(1) {
        let found = match strategy {
            StableSetStrategy::Shuffled => greedy_shuffled(g, &mut rng),
            StableSetStrategy::MinDegree => greedy_min_degree(g, &mut rng),
        };
        if best.as_ref().is_none_or(|b| found.len() > b.len()) {
            best = Some(found);
        }
    }
    let mut members = best.unwrap_or_default();
    members.sort_unstable();
    StableSet { members, graph_n: g.n_units(), maximal: true }
}

fn greedy_shuffled(g: &NetworkGraph, rng: &mut seed::Rng) -> Vec<usize> {
    let mut order: Vec<usize> = (0..g.n_units()).collect();
    order.shuffle(rng);
    let mut blocked = vec![false; g.n_units()];
    let mut set = Vec::new();
    for u in order {
        if !blocked[u] {
            set.push(u);
            blocked[u] = true;
            for &v in g.nbrs(u) {
                blocked[v] = true;
            }
        }
    }
    set
}

fn greedy_min_degree(g: &NetworkGraph, rng: &mut seed::Rng) -> Vec<usize> {
    let n = g.n_units();
    let mut alive = vec![true; n];
    let mut residual: Vec<usize> = g.degrees();
    let mut remaining = n;
    let mut set = Vec::new();
    let mut candidates = Vec::new();
    while remaining > 0 {
        let min = (0..n).filter(|&u| alive[u]).map(|u| residual[u]).min().unwrap_or(0);
        candidates.clear();
        candidates.extend((0..n).filter(|&u| alive[u] && residual[u] == min));
        let u = candidates[rng.random_range(0..candidates.len())];
        set.push(u);
        let mut removed = vec![u];
        removed.extend(g.nbrs(u).iter().copied().filter(|&v| alive[v]));
        for &r in &removed {
            alive[r] = false;
            remaining -= 1;
        }
        for &r in &removed {
            for &w in g.nbrs(r) {
                if alive[w] {
                    residual[w] -= 1;
                }
            }
        }
    }
    set
}

pub const DEFAULT_GRAPH_RETRIES: usize = 1000;

/// Random simple graph whose degrees are drawn uniformly from
/// `degree_min..=degree_max`, built by stub pairing followed by double-edge
/// swaps that remove self-loops and repeated pairs while keeping every degree
/// fixed.
pub fn random_graph(n: usize, degree_min: usize, degree_max: usize, seed: u64) -> Result<NetworkGraph> {
    random_graph_with_retries(n, degree_min, degree_max, seed, DEFAULT_GRAPH_RETRIES)
}

pub fn random_graph_with_retries(
    n: usize,
    degree_min: usize,
    degree_max: usize,
    seed: u64,
    retries: usize,
) -> Result<NetworkGraph> {
    if degree_min > degree_max {
        return Err(Error::InvalidInput(format!(
            "degree_min {degree_min} exceeds degree_max {degree_max}"
        )));
    }
    if n == 0 {
        return Ok(NetworkGraph::edgeless(0));
    }
    if degree_max >= n {
        return Err(Error::InfeasibleDegrees(format!(
            "degree_max {degree_max} must be below the number of units {n}"
        )));
    }
    let mut rng = seed::rng(seed);
    for _ in 0..retries.max(1) {
        let mut degrees: Vec<usize> =
            (0..n).map(|_| rng.random_range(degree_min..=degree_max)).collect();
        if degrees.iter().sum::<usize>() % 2 == 1 && !fix_parity(&mut degrees, degree_min, degree_max, &mut rng) {
            return Err(Error::InfeasibleDegrees(format!(
                "{n} units of degree {degree_min} give an odd stub count"
            )));
        }
        if let Some(edges) = pair_stubs(&degrees, retries, &mut rng) {
            return NetworkGraph::new(n, edges);
        }
    }
    Err(Error::InfeasibleDegrees(format!(
        "no simple graph found for n={n}, degrees in [{degree_min}, {degree_max}] after {retries} attempts"
    )))
}

fn fix_parity(degrees: &mut [usize], lo: usize, hi: usize, rng: &mut seed::Rng) -> bool {
    let adjustable: Vec<usize> = (0..degrees.len()).filter(|&i| degrees[i] < hi || degrees[i] > lo).collect();
    if adjustable.is_empty() {
        return false;
    }
    let i = adjustable[rng.random_range(0..adjustable.len())];
    if degrees[i] < hi && (degrees[i] == lo || rng.random_bool(0.5)) {
        degrees[i] += 1;
    } else {
        degrees[i] -= 1;
    }
    true
}

fn norm(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

fn pair_stubs(degrees: &[usize], retries: usize, rng: &mut seed::Rng) -> Option<Vec<(usize, usize)>> {
    let mut stubs: Vec<usize> =
        degrees.iter().enumerate().flat_map(|(i, &d)| std::iter::repeat_n(i, d)).collect();
    stubs.shuffle(rng);
    let mut good: Vec<(usize, usize)> = Vec::with_capacity(stubs.len() / 2);
    let mut present: HashSet<(usize, usize)> = HashSet::with_capacity(stubs.len() / 2);
    let mut bad = Vec::new();
    for pair in stubs.chunks_exact(2) {
        let (u, v) = (pair[0], pair[1]);
        if u != v && present.insert(norm(u, v)) {
            good.push(norm(u, v));
        } else {
            bad.push((u, v));
        }
    }
    for (u, v) in bad {
        let mut fixed = false;
        for _ in 0..retries.max(1) {
            if good.is_empty() {
                return None;
            }
            let k = rng.random_range(0..good.len());
            let (mut x, mut y) = good[k];
            if rng.random_bool(0.5) {
                std::mem::swap(&mut x, &mut y);
            }
            // Replace (u,v) + (x,y) with (u,x) + (v,y).
            if u == x || v == y || norm(u, x) == norm(v, y) {
                continue;
            }
            if present.contains(&norm(u, x)) || present.contains(&norm(v, y)) {
                continue;
            }
            present.remove(&good[k]);
            good.swap_remove(k);
            present.insert(norm(u, x));
            present.insert(norm(v, y));
            good.push(norm(u, x));
            good.push(norm(v, y));
            fixed = true;
            break;
        }
        if !fixed {
            return None;
        }
    }
    Some(good)
}

/// Copy of `g` with `floor(fraction * |E|)` uniformly chosen edges removed.
pub fn remove_random_edges(g: &NetworkGraph, fraction: f64, seed: u64) -> Result<NetworkGraph> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::InvalidInput(format!("edge removal fraction {fraction} not in [0, 1)")));
    }
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let k = (fraction * edges.len() as f64).floor() as usize;
    let mut rng = seed::rng(seed);
    let drop: HashSet<usize> = rand::seq::index::sample(&mut rng, edges.len(), k).into_iter().collect();
    NetworkGraph::new(
        g.n_units(),
        edges.into_iter().enumerate().filter(|(idx, _)| !drop.contains(idx)).map(|(_, e)| e),
    )
}

/// Parses the edge-list format: one edge per line as two whitespace-separated
/// 0-based indices; blank lines and `#` lines are skipped. A `# n_units: N`
/// line, when present, fixes the unit count so trailing isolated units
/// survive a round trip; `n_units` overrides both.
pub fn parse_edge_list(text: &str, n_units: Option<usize>) -> Result<NetworkGraph> {
    let mut edges = Vec::new();
    let mut declared = None;
    let mut max_index = None::<usize>;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(v) = comment.trim().strip_prefix("n_units:") {
                declared = v.trim().parse::<usize>().ok();
            }
            continue;
        }
        let mut fields = line.split_whitespace();
        let mut next = || -> Result<usize> {
            fields
                .next()
                .ok_or_else(|| Error::Parse(format!("line {}: expected two unit indices", lineno + 1)))?
                .parse::<usize>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
        };
        let (i, j) = (next()?, next()?);
        if fields.next().is_some() {
            return Err(Error::Parse(format!("line {}: more than two fields", lineno + 1)));
        }
        max_index = Some(max_index.map_or(i.max(j), |m| m.max(i).max(j)));
        edges.push((i, j));
    }
    let n = n_units.or(declared).unwrap_or_else(|| max_index.map_or(0, |m| m + 1));
    NetworkGraph::new(n, edges)
}

pub fn format_edge_list(g: &NetworkGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# n_units: {}", g.n_units());
    for (i, j) in g.edges() {
        let _ = writeln!(out, "{i} {j}");
    }
    out
}
