//! Labeled graph distances.
//!
//! Three layers: the labeled-star distance `delta` on a common vertex set,
//! its permutation-minimized version `delta_s` (exact branch-and-bound for
//! small graphs, greedy matching plus local search otherwise), and the
//! geometric distance `delta_rho` over disjoint multiples. A partition-based
//! upper bound on `delta_rho` closes the loop with the hyperfinite
//! partitioning machinery.

use num_integer::Integer;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, GraphError};
use crate::partition::Partition;
use crate::stats::{self, StatsError};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("graphs live on different vertex sets ({0} vs {1} vertices)")]
    SizeMismatch(usize, usize),
    #[error("graphs have different degree bounds ({0} vs {1})")]
    DegreeBoundMismatch(usize, usize),
    #[error("exact search limited to {limit} vertices, got {n}")]
    ExactLimit { n: usize, limit: usize },
    #[error("sequence must contain at least {0} graphs")]
    SequenceTooShort(usize),
    #[error("partitions disagree on component bound K ({0} vs {1})")]
    PartitionBoundMismatch(usize, usize),
    #[error("partition list must match the sequence length")]
    PartitionCountMismatch,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

/// How two labeled stars are compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StarMode {
    /// Full induced 1-ball with labels (neighbor sets and the edges among
    /// the closed neighborhood must coincide). The default.
    Induced,
    /// Incident edges only (neighbor label sets must coincide).
    IncidentOnly,
}

/// The labeled induced 1-ball around a vertex, in comparable form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarFingerprint {
    pub center: usize,
    pub neighbors: Vec<usize>,
    /// Sorted edges among the closed neighborhood; empty in incident mode.
    pub inner_edges: Vec<(usize, usize)>,
}

impl StarFingerprint {
    pub fn compute(g: &Graph, v: usize, mode: StarMode) -> Self {
        let neighbors = g.neighbors(v).to_vec();
        let mut inner_edges = Vec::new();
        if mode == StarMode::Induced {
            let mut closed = neighbors.clone();
            closed.push(v);
            closed.sort_unstable();
            for (i, &a) in closed.iter().enumerate() {
                for &b in &closed[i + 1..] {
                    if g.has_edge(a, b) {
                        inner_edges.push((a, b));
                    }
                }
            }
        }
        StarFingerprint {
            center: v,
            neighbors,
            inner_edges,
        }
    }
}

fn stars_equal(g: &Graph, h: &Graph, v: usize, mode: StarMode) -> bool {
    if g.neighbors(v) != h.neighbors(v) {
        return false;
    }
    if mode == StarMode::IncidentOnly {
        return true;
    }
    let nbrs = g.neighbors(v);
    for (i, &a) in nbrs.iter().enumerate() {
        for &b in &nbrs[i + 1..] {
            if g.has_edge(a, b) != h.has_edge(a, b) {
                return false;
            }
        }
    }
    true
}

/// Labeled-star distance between graphs on the same vertex set: the
/// fraction of vertices whose stars differ. Distance to the empty graph
/// is 1 by convention.
pub fn delta(g: &Graph, h: &Graph, mode: StarMode) -> Result<f64, MetricsError> {
    if g.is_empty() && h.is_empty() {
        return Ok(0.0);
    }
    if g.is_empty() || h.is_empty() {
        return Ok(1.0);
    }
    if g.vertex_count() != h.vertex_count() {
        return Err(MetricsError::SizeMismatch(
            g.vertex_count(),
            h.vertex_count(),
        ));
    }
    if g.degree_bound() != h.degree_bound() {
        return Err(MetricsError::DegreeBoundMismatch(
            g.degree_bound(),
            h.degree_bound(),
        ));
    }
    let mismatches = (0..g.vertex_count())
        .filter(|&v| !stars_equal(g, h, v, mode))
        .count();
    Ok(mismatches as f64 / g.vertex_count() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EstimateKind {
    Exact,
    UpperBound,
    LowerBound,
}

/// Witness achieving a distance estimate.
#[derive(Debug, Clone, Serialize)]
pub enum Witness {
    /// `map[v]` = vertex of the second graph matched to label `v`.
    Permutation(Vec<usize>),
    /// Multiples and the permutation used on `q * G` vs `p * H`.
    Multiples { q: usize, p: usize, map: Vec<usize> },
}

#[derive(Debug, Clone, Serialize)]
pub struct DistanceEstimate {
    pub value: f64,
    pub kind: EstimateKind,
    pub witness: Option<Witness>,
}

impl DistanceEstimate {
    /// Re-evaluates the stored witness; `true` when it reproduces `value`.
    pub fn check_witness(&self, g: &Graph, h: &Graph, mode: StarMode) -> bool {
        match &self.witness {
            Some(Witness::Permutation(map)) => {
                let n = g.vertex_count();
                if map.len() != n || h.vertex_count() != n {
                    return false;
                }
                let count = delta_under_map(g, h, map, &invert(map), mode);
                (count as f64 / n as f64 - self.value).abs() < 1e-12
            }
            Some(Witness::Multiples { q, p, map }) => {
                let (Ok(gq), Ok(hp)) = (g.disjoint_multiple(*q), h.disjoint_multiple(*p)) else {
                    return false;
                };
                if gq.vertex_count() != hp.vertex_count() || map.len() != gq.vertex_count() {
                    return false;
                }
                let count = delta_under_map(&gq, &hp, map, &invert(map), mode);
                (count as f64 / gq.vertex_count() as f64 - self.value).abs() < 1e-12
            }
            None => false,
        }
    }
}

/// Search configuration for `delta_s` and `delta_rho`.
#[derive(Debug, Clone, Copy)]
pub struct DeltaSConfig {
    /// Largest vertex count accepted by the exact search.
    pub exact_limit: usize,
    pub star_mode: StarMode,
    pub seed: u64,
    /// Cap on accepted local-search moves in the heuristic.
    pub max_local_moves: usize,
}

impl Default for DeltaSConfig {
    fn default() -> Self {
        DeltaSConfig {
            exact_limit: 10,
            star_mode: StarMode::Induced,
            seed: 0,
            max_local_moves: 20_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    Exact,
    Heuristic,
}

fn invert(map: &[usize]) -> Vec<usize> {
    let mut inv = vec![usize::MAX; map.len()];
    for (v, &u) in map.iter().enumerate() {
        inv[u] = v;
    }
    inv
}

/// Number of labels whose stars differ between `g` and `h` relabeled by
/// `map` (`map[v]` = h-vertex placed at label `v`, `inv` its inverse).
fn delta_under_map(g: &Graph, h: &Graph, map: &[usize], inv: &[usize], mode: StarMode) -> usize {
    let n = g.vertex_count();
    let mut mismatches = 0;
    'vertex: for v in 0..n {
        let u = map[v];
        let ng = g.neighbors(v);
        let nh = h.neighbors(u);
        if ng.len() != nh.len() {
            mismatches += 1;
            continue;
        }
        for &w in nh {
            if ng.binary_search(&inv[w]).is_err() {
                mismatches += 1;
                continue 'vertex;
            }
        }
        if mode == StarMode::Induced {
            let mut closed: Vec<usize> = ng.to_vec();
            closed.push(v);
            for (i, &a) in closed.iter().enumerate() {
                for &b in &closed[i + 1..] {
                    if g.has_edge(a, b) != h.has_edge(map[a], map[b]) {
                        mismatches += 1;
                        continue 'vertex;
                    }
                }
            }
        }
    }
    mismatches
}

/// Unlabeled star class of each vertex, interned to small ids. In induced
/// mode this is the rooted-isomorphism class of the 1-ball; in incident
/// mode the degree.
fn star_classes(g: &Graph, mode: StarMode) -> Result<Vec<u32>, MetricsError> {
    let n = g.vertex_count();
    let mut ids = vec![0u32; n];
    match mode {
        StarMode::IncidentOnly => {
            for v in 0..n {
                ids[v] = g.degree(v) as u32;
            }
        }
        StarMode::Induced => {
            let mut intern: std::collections::BTreeMap<Vec<u8>, u32> = Default::default();
            for v in 0..n {
                let ball = g.ball(v, 1)?;
                let (key, _) = stats::canonical_key_with_map(&ball)?;
                let next = intern.len() as u32;
                ids[v] = *intern.entry(key.bytes().to_vec()).or_insert(next);
            }
        }
    }
    Ok(ids)
}

/// Cross-graph interning of star classes so ids are comparable.
fn joint_star_classes(
    g: &Graph,
    h: &Graph,
    mode: StarMode,
) -> Result<(Vec<u32>, Vec<u32>, usize), MetricsError> {
    match mode {
        StarMode::IncidentOnly => {
            let cg = star_classes(g, mode)?;
            let ch = star_classes(h, mode)?;
            let max = cg.iter().chain(ch.iter()).max().copied().unwrap_or(0) as usize + 1;
            Ok((cg, ch, max))
        }
        StarMode::Induced => {
            let mut intern: std::collections::BTreeMap<Vec<u8>, u32> = Default::default();
            let mut classify = |graph: &Graph| -> Result<Vec<u32>, MetricsError> {
                (0..graph.vertex_count())
                    .map(|v| {
                        let ball = graph.ball(v, 1)?;
                        let (key, _) = stats::canonical_key_with_map(&ball)?;
                        let next = intern.len() as u32;
                        Ok(*intern.entry(key.bytes().to_vec()).or_insert(next))
                    })
                    .collect()
            };
            let cg = classify(g)?;
            let ch = classify(h)?;
            let count = intern.len();
            Ok((cg, ch, count))
        }
    }
}

struct ExactSearch<'a> {
    g: &'a Graph,
    h: &'a Graph,
    mode: StarMode,
    n: usize,
    class_g: Vec<u32>,
    class_h: Vec<u32>,
    order: Vec<usize>,
    map: Vec<usize>,
    inv: Vec<usize>,
    marked: Vec<bool>,
    marked_count: usize,
    g_remaining: Vec<i64>,
    h_remaining: Vec<i64>,
    best_count: usize,
    best_map: Vec<usize>,
}

impl<'a> ExactSearch<'a> {
    /// Lower bound on future mismatches from unmatched class counts.
    fn class_deficit(&self) -> usize {
        self.g_remaining
            .iter()
            .zip(&self.h_remaining)
            .map(|(&g, &h)| (g - h).max(0) as usize)
            .sum()
    }

    fn dfs(&mut self, idx: usize) {
        if self.marked_count + self.class_deficit() >= self.best_count {
            return;
        }
        if idx == self.n {
            let count = delta_under_map(self.g, self.h, &self.map, &self.inv, self.mode);
            if count < self.best_count {
                self.best_count = count;
                self.best_map = self.map.clone();
            }
            return;
        }
        let v = self.order[idx];
        // same-class candidates first: they are the only ones that can match
        let mut candidates: Vec<usize> =
            (0..self.n).filter(|&u| self.inv[u] == usize::MAX).collect();
        candidates.sort_by_key(|&u| (self.class_h[u] != self.class_g[v], u));
        for u in candidates {
            let mut newly_marked: Vec<usize> = Vec::new();
            let mark =
                |x: usize, marked: &mut Vec<bool>, count: &mut usize, log: &mut Vec<usize>| {
                    if !marked[x] {
                        marked[x] = true;
                        *count += 1;
                        log.push(x);
                    }
                };
            if self.class_g[v] != self.class_h[u] {
                mark(
                    v,
                    &mut self.marked,
                    &mut self.marked_count,
                    &mut newly_marked,
                );
            }
            for w in 0..self.n {
                let img = self.map[w];
                if img == usize::MAX || w == v {
                    continue;
                }
                if self.g.has_edge(v, w) != self.h.has_edge(u, img) {
                    mark(
                        v,
                        &mut self.marked,
                        &mut self.marked_count,
                        &mut newly_marked,
                    );
                    mark(
                        w,
                        &mut self.marked,
                        &mut self.marked_count,
                        &mut newly_marked,
                    );
                }
            }
            self.map[v] = u;
            self.inv[u] = v;
            self.g_remaining[self.class_g[v] as usize] -= 1;
            self.h_remaining[self.class_h[u] as usize] -= 1;

            self.dfs(idx + 1);

            self.g_remaining[self.class_g[v] as usize] += 1;
            self.h_remaining[self.class_h[u] as usize] += 1;
            self.map[v] = usize::MAX;
            self.inv[u] = usize::MAX;
            for x in newly_marked {
                self.marked[x] = false;
                self.marked_count -= 1;
            }
        }
    }
}

fn exact_minimum(
    g: &Graph,
    h: &Graph,
    cfg: &DeltaSConfig,
) -> Result<(usize, Vec<usize>), MetricsError> {
    let n = g.vertex_count();
    let (class_g, class_h, class_count) = joint_star_classes(g, h, cfg.star_mode)?;
    let mut g_remaining = vec![0i64; class_count];
    let mut h_remaining = vec![0i64; class_count];
    for &c in &class_g {
        g_remaining[c as usize] += 1;
    }
    for &c in &class_h {
        h_remaining[c as usize] += 1;
    }
    // seed the bound with the heuristic result
    let (seed_count, seed_map) = heuristic_minimum(g, h, cfg)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let mut search = ExactSearch {
        g,
        h,
        mode: cfg.star_mode,
        n,
        class_g,
        class_h,
        order,
        map: vec![usize::MAX; n],
        inv: vec![usize::MAX; n],
        marked: vec![false; n],
        marked_count: 0,
        g_remaining,
        h_remaining,
        best_count: seed_count + 1,
        best_map: seed_map.clone(),
    };
    search.dfs(0);
    if search.best_count > seed_count {
        Ok((seed_count, seed_map))
    } else {
        Ok((search.best_count, search.best_map))
    }
}

/// Greedy star-class matching followed by seeded first-improvement local
/// search over transpositions. Also tries the identity as a start.
fn heuristic_minimum(
    g: &Graph,
    h: &Graph,
    cfg: &DeltaSConfig,
) -> Result<(usize, Vec<usize>), MetricsError> {
    let n = g.vertex_count();
    let (class_g, class_h, class_count) = joint_star_classes(g, h, cfg.star_mode)?;

    // greedy: pair vertices class by class, leftovers in label order
    let mut by_class_g = vec![Vec::new(); class_count];
    let mut by_class_h = vec![Vec::new(); class_count];
    for v in 0..n {
        by_class_g[class_g[v] as usize].push(v);
        by_class_h[class_h[v] as usize].push(v);
    }
    let mut greedy = vec![usize::MAX; n];
    let mut leftover_g = Vec::new();
    let mut leftover_h = Vec::new();
    for c in 0..class_count {
        let gs = &by_class_g[c];
        let hs = &by_class_h[c];
        let k = gs.len().min(hs.len());
        for i in 0..k {
            greedy[gs[i]] = hs[i];
        }
        leftover_g.extend_from_slice(&gs[k..]);
        leftover_h.extend_from_slice(&hs[k..]);
    }
    leftover_g.sort_unstable();
    leftover_h.sort_unstable();
    for (v, u) in leftover_g.into_iter().zip(leftover_h) {
        greedy[v] = u;
    }

    let identity: Vec<usize> = (0..n).collect();
    let mut best: Option<(usize, Vec<usize>)> = None;
    for start in [greedy, identity] {
        let (count, map) = local_search(g, h, start, cfg);
        if best.as_ref().is_none_or(|(c, _)| count < *c) {
            best = Some((count, map));
        }
    }
    Ok(best.expect("two starts evaluated"))
}

/// First-improvement transposition search from a start mapping.
fn local_search(
    g: &Graph,
    h: &Graph,
    mut map: Vec<usize>,
    cfg: &DeltaSConfig,
) -> (usize, Vec<usize>) {
    let n = g.vertex_count();
    let mode = cfg.star_mode;
    let mut inv = invert(&map);
    let mut mismatch: Vec<bool> = (0..n)
        .map(|v| star_mismatch_at(g, h, &map, &inv, v, mode))
        .collect();
    let mut count = mismatch.iter().filter(|&&m| m).count();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut moves = 0usize;

    loop {
        if count == 0 || moves >= cfg.max_local_moves {
            break;
        }
        let mut improved = false;
        let mut firsts: Vec<usize> = (0..n).filter(|&v| mismatch[v]).collect();
        firsts.shuffle(&mut rng);
        'outer: for &v in &firsts {
            // swap partners: all vertices for small graphs, a seeded sample
            // plus the mismatched set for large ones
            let partners: Vec<usize> = if n <= 256 {
                (0..n).filter(|&w| w != v).collect()
            } else {
                let mut p: Vec<usize> = (0..n).filter(|&w| mismatch[w] && w != v).collect();
                for _ in 0..64 {
                    let w = rand::Rng::gen_range(&mut rng, 0..n);
                    if w != v {
                        p.push(w);
                    }
                }
                p
            };
            for w in partners {
                let affected = affected_by_swap(g, h, &map, v, w);
                let before: i64 = affected.iter().filter(|&&x| mismatch[x]).count() as i64;
                map.swap(v, w);
                inv[map[v]] = v;
                inv[map[w]] = w;
                let after: i64 = affected
                    .iter()
                    .filter(|&&x| star_mismatch_at(g, h, &map, &inv, x, mode))
                    .count() as i64;
                if after < before {
                    for &x in &affected {
                        mismatch[x] = star_mismatch_at(g, h, &map, &inv, x, mode);
                    }
                    count = (count as i64 + after - before) as usize;
                    moves += 1;
                    improved = true;
                    continue 'outer;
                }
                map.swap(v, w);
                inv[map[v]] = v;
                inv[map[w]] = w;
            }
        }
        if !improved {
            break;
        }
    }
    debug_assert_eq!(count, delta_under_map(g, h, &map, &inv, mode));
    (count, map)
}

fn star_mismatch_at(
    g: &Graph,
    h: &Graph,
    map: &[usize],
    inv: &[usize],
    v: usize,
    mode: StarMode,
) -> bool {
    let u = map[v];
    let ng = g.neighbors(v);
    let nh = h.neighbors(u);
    if ng.len() != nh.len() {
        return true;
    }
    for &w in nh {
        if ng.binary_search(&inv[w]).is_err() {
            return true;
        }
    }
    if mode == StarMode::Induced {
        let mut closed: Vec<usize> = ng.to_vec();
        closed.push(v);
        for (i, &a) in closed.iter().enumerate() {
            for &b in &closed[i + 1..] {
                if g.has_edge(a, b) != h.has_edge(map[a], map[b]) {
                    return true;
                }
            }
        }
    }
    false
}

/// Labels whose stars can change when the images of `v` and `w` swap.
fn affected_by_swap(g: &Graph, h: &Graph, map: &[usize], v: usize, w: usize) -> Vec<usize> {
    let inv = invert(map);
    let mut affected = vec![v, w];
    affected.extend_from_slice(g.neighbors(v));
    affected.extend_from_slice(g.neighbors(w));
    for &img in [map[v], map[w]].iter() {
        for &y in h.neighbors(img) {
            affected.push(inv[y]);
        }
    }
    affected.sort_unstable();
    affected.dedup();
    affected
}

/// Permutation-minimized star distance.
///
/// Exact mode runs a branch-and-bound over all relabelings (limited to
/// `exact_limit` vertices); heuristic mode returns an upper bound with its
/// witness permutation.
pub fn delta_s(
    g: &Graph,
    h: &Graph,
    mode: SearchMode,
    cfg: &DeltaSConfig,
) -> Result<DistanceEstimate, MetricsError> {
    if g.is_empty() && h.is_empty() {
        return Ok(DistanceEstimate {
            value: 0.0,
            kind: EstimateKind::Exact,
            witness: Some(Witness::Permutation(Vec::new())),
        });
    }
    if g.is_empty() || h.is_empty() {
        return Ok(DistanceEstimate {
            value: 1.0,
            kind: EstimateKind::Exact,
            witness: None,
        });
    }
    if g.vertex_count() != h.vertex_count() {
        return Err(MetricsError::SizeMismatch(
            g.vertex_count(),
            h.vertex_count(),
        ));
    }
    if g.degree_bound() != h.degree_bound() {
        return Err(MetricsError::DegreeBoundMismatch(
            g.degree_bound(),
            h.degree_bound(),
        ));
    }
    let n = g.vertex_count();
    match mode {
        SearchMode::Exact => {
            if n > cfg.exact_limit {
                return Err(MetricsError::ExactLimit {
                    n,
                    limit: cfg.exact_limit,
                });
            }
            let (count, map) = exact_minimum(g, h, cfg)?;
            Ok(DistanceEstimate {
                value: count as f64 / n as f64,
                kind: EstimateKind::Exact,
                witness: Some(Witness::Permutation(map)),
            })
        }
        SearchMode::Heuristic => {
            let (count, map) = heuristic_minimum(g, h, cfg)?;
            // a witnessed zero is exact: the distance is nonnegative
            let kind = if count == 0 {
                EstimateKind::Exact
            } else {
                EstimateKind::UpperBound
            };
            Ok(DistanceEstimate {
                value: count as f64 / n as f64,
                kind,
                witness: Some(Witness::Permutation(map)),
            })
        }
    }
}

/// Best available estimate: exact when the size permits, else heuristic.
pub fn delta_s_auto(
    g: &Graph,
    h: &Graph,
    cfg: &DeltaSConfig,
) -> Result<DistanceEstimate, MetricsError> {
    if g.vertex_count() <= cfg.exact_limit && !g.is_empty() && !h.is_empty() {
        delta_s(g, h, SearchMode::Exact, cfg)
    } else {
        delta_s(g, h, SearchMode::Heuristic, cfg)
    }
}

/// Upper bound on the geometric distance: minimizes `delta_s` over disjoint
/// multiples `k * (q0, p0)` of the minimal vertex-equalizing pair, for
/// `k = 1..=multiple_cap`.
pub fn delta_rho(
    g: &Graph,
    h: &Graph,
    multiple_cap: usize,
    cfg: &DeltaSConfig,
) -> Result<DistanceEstimate, MetricsError> {
    if g.is_empty() && h.is_empty() {
        return Ok(DistanceEstimate {
            value: 0.0,
            kind: EstimateKind::Exact,
            witness: None,
        });
    }
    if g.is_empty() || h.is_empty() {
        // distance to the empty graph is 1 by convention
        return Ok(DistanceEstimate {
            value: 1.0,
            kind: EstimateKind::Exact,
            witness: None,
        });
    }
    if g.degree_bound() != h.degree_bound() {
        return Err(MetricsError::DegreeBoundMismatch(
            g.degree_bound(),
            h.degree_bound(),
        ));
    }
    let (ng, nh) = (g.vertex_count(), h.vertex_count());
    let gcd = ng.gcd(&nh);
    let (q0, p0) = (nh / gcd, ng / gcd);
    let cap = multiple_cap.max(1);
    let mut best: Option<DistanceEstimate> = None;
    for k in 1..=cap {
        let (q, p) = (k * q0, k * p0);
        let gq = g.disjoint_multiple(q)?;
        let hp = h.disjoint_multiple(p)?;
        let est = delta_s_auto(&gq, &hp, cfg)?;
        let better = best.as_ref().is_none_or(|b| est.value < b.value);
        if better {
            let map = match est.witness {
                Some(Witness::Permutation(m)) => m,
                _ => Vec::new(),
            };
            best = Some(DistanceEstimate {
                value: est.value,
                kind: if est.value == 0.0 {
                    EstimateKind::Exact
                } else {
                    EstimateKind::UpperBound
                },
                witness: Some(Witness::Multiples { q, p, map }),
            });
        }
        if best.as_ref().is_some_and(|b| b.value == 0.0) {
            break;
        }
    }
    Ok(best.expect("cap >= 1"))
}

/// Upper bound on the geometric distance from two bounded-size partitions:
/// `4 d eps1 + 2 M K beta`, where `beta` is the largest per-vertex
/// normalized component-count difference over the observed classes, `M`
/// the number of observed classes and `K` the component bound.
pub fn delta_rho_upper_from_partitions(
    pa: &Partition,
    pb: &Partition,
    eps1: f64,
) -> Result<f64, MetricsError> {
    if pa.k_bound() != pb.k_bound() {
        return Err(MetricsError::PartitionBoundMismatch(
            pa.k_bound(),
            pb.k_bound(),
        ));
    }
    if pa.degree_bound() != pb.degree_bound() {
        return Err(MetricsError::DegreeBoundMismatch(
            pa.degree_bound(),
            pb.degree_bound(),
        ));
    }
    let d = pa.degree_bound() as f64;
    let k = pa.k_bound() as f64;
    let mut keys: Vec<_> = pa
        .component_class_counts()
        .keys()
        .chain(pb.component_class_counts().keys())
        .collect();
    keys.sort();
    keys.dedup();
    let m = keys.len() as f64;
    let beta = keys
        .iter()
        .map(|key| {
            let ga = pa.gamma(key);
            let gb = pb.gamma(key);
            (ga - gb).abs()
        })
        .fold(0.0, f64::max);
    Ok((4.0 * d * eps1 + 2.0 * m * k * beta).clamp(0.0, 1.0))
}

/// One pair's best geometric-distance upper bound in a strong profile.
#[derive(Debug, Clone, Serialize)]
pub struct StrongPair {
    pub i: usize,
    pub j: usize,
    pub direct: f64,
    pub partition_bound: Option<f64>,
    pub best: f64,
}

/// Strong-convergence diagnostic: per tail index, the sup over sampled
/// pairs of the best available geometric-distance upper bound.
#[derive(Debug, Clone, Serialize)]
pub struct StrongProfile {
    pub pairs: Vec<StrongPair>,
    pub tail_sup: Vec<f64>,
}

pub fn strong_cauchy_profile(
    seq: &[Graph],
    multiple_cap: usize,
    partitions: Option<(&[Partition], f64)>,
    cfg: &DeltaSConfig,
) -> Result<StrongProfile, MetricsError> {
    if seq.len() < 2 {
        return Err(MetricsError::SequenceTooShort(2));
    }
    if let Some((parts, _)) = partitions {
        if parts.len() != seq.len() {
            return Err(MetricsError::PartitionCountMismatch);
        }
    }
    let pairs_idx = stats::sample_pairs(seq.len());
    let mut pairs = Vec::with_capacity(pairs_idx.len());
    for (i, j) in pairs_idx {
        let direct = delta_rho(&seq[i], &seq[j], multiple_cap, cfg)?.value;
        let partition_bound = match partitions {
            Some((parts, eps1)) => {
                Some(delta_rho_upper_from_partitions(&parts[i], &parts[j], eps1)?)
            }
            None => None,
        };
        let best = partition_bound.map_or(direct, |p| p.min(direct));
        pairs.push(StrongPair {
            i,
            j,
            direct,
            partition_bound,
            best,
        });
    }
    let tail_sup = (0..seq.len() - 1)
        .map(|m| {
            pairs
                .iter()
                .filter(|p| p.i >= m && p.j >= m)
                .map(|p| p.best)
                .fold(0.0, f64::max)
        })
        .collect();
    Ok(StrongProfile { pairs, tail_sup })
}
