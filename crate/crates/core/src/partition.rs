//! Edge-removal partitions into bounded-size components.
//!
//! Constructive partitioners for recognized families (paths/cycles, torus
//! grids, forests) plus a generic seeded ball carver, with exact
//! component-class bookkeeping: both the vertex-weighted frequencies
//! `c_alpha = |C_alpha| / |V|` and the per-vertex normalized component
//! counts `gamma_alpha = kappa_alpha / |V|` are stored as exact rationals.

use std::collections::BTreeMap;

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, GraphError, RootedGraph};
use crate::stats::{self, CanonicalBallKey, StatsError};

pub type Frac = Ratio<i64>;

#[derive(Debug, Error)]
pub enum PartitionError {
    #[error("eps must lie in (0, 1], got {0}")]
    EpsOutOfRange(f64),
    #[error("graph is not a disjoint union of paths and cycles")]
    NotPathLike,
    #[error("graph is not a forest")]
    NotForest,
    #[error("graph is not a recognized square torus grid")]
    NotTorus,
    #[error("graph is empty")]
    EmptyGraph,
    #[error("partitions disagree on component bound K ({0} vs {1})")]
    BoundMismatch(usize, usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

/// An edge-removal partition of a graph into components of at most
/// `k_bound` vertices.
#[derive(Debug, Clone, Serialize)]
pub struct Partition {
    vertex_count: usize,
    edge_count: usize,
    degree_bound: usize,
    k_bound: usize,
    /// Removed edges, sorted `(u, v)` with `u < v`.
    cut_edges: Vec<(usize, usize)>,
    /// Components of the remaining graph, each sorted, ordered by smallest
    /// member.
    components: Vec<Vec<usize>>,
    /// Vertex-weighted class frequencies `c_alpha`, keyed by the unrooted
    /// canonical form of the component.
    #[serde(serialize_with = "serialize_class_map")]
    class_freq: BTreeMap<CanonicalBallKey, Frac>,
    /// Component counts `kappa_alpha` per class.
    #[serde(serialize_with = "serialize_count_map")]
    class_counts: BTreeMap<CanonicalBallKey, usize>,
}

fn serialize_class_map<S: serde::Serializer>(
    map: &BTreeMap<CanonicalBallKey, Frac>,
    ser: S,
) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut m = ser.serialize_map(Some(map.len()))?;
    for (k, v) in map {
        m.serialize_entry(
            &k.to_hex(),
            &serde_json::json!({"num": *v.numer(), "den": *v.denom()}),
        )?;
    }
    m.end()
}

fn serialize_count_map<S: serde::Serializer>(
    map: &BTreeMap<CanonicalBallKey, usize>,
    ser: S,
) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut m = ser.serialize_map(Some(map.len()))?;
    for (k, v) in map {
        m.serialize_entry(&k.to_hex(), v)?;
    }
    m.end()
}

/// Unrooted canonical form of a connected graph: the maximum rooted key
/// over root choices. Candidate roots are restricted to the centers
/// (minimum-eccentricity vertices), an isomorphism-invariant set, so one
/// canonicalization per center suffices instead of one per vertex.
pub fn unrooted_class_key(component: &Graph) -> Result<CanonicalBallKey, StatsError> {
    unrooted_class_key_limited(component, stats::DEFAULT_CANON_LIMIT)
}

pub fn unrooted_class_key_limited(
    component: &Graph,
    canon_limit: usize,
) -> Result<CanonicalBallKey, StatsError> {
    let n = component.vertex_count();
    if n == 0 {
        return Err(StatsError::EmptyGraph);
    }
    let mut eccentricity = vec![0usize; n];
    for (v, ecc) in eccentricity.iter_mut().enumerate() {
        *ecc = component
            .bfs_distances(v)?
            .iter()
            .map(|d| d.unwrap_or(usize::MAX))
            .max()
            .unwrap_or(0);
    }
    let min_ecc = *eccentricity.iter().min().expect("nonempty");
    let mut best: Option<CanonicalBallKey> = None;
    for root in (0..n).filter(|&v| eccentricity[v] == min_ecc) {
        let rooted = RootedGraph::from_graph(component.clone(), root)?;
        let (key, _) = stats::canonical_key_with_map_limited(&rooted, canon_limit)?;
        if best.as_ref().is_none_or(|b| key > *b) {
            best = Some(key);
        }
    }
    best.ok_or(StatsError::EmptyGraph)
}

impl Partition {
    /// Builds a partition from a cut set, recomputing components and class
    /// statistics from scratch.
    pub fn from_cut(
        g: &Graph,
        cut_edges: Vec<(usize, usize)>,
        k_bound: usize,
    ) -> Result<Self, PartitionError> {
        let mut cut: Vec<(usize, usize)> = cut_edges
            .into_iter()
            .map(|(u, v)| (u.min(v), u.max(v)))
            .collect();
        cut.sort_unstable();
        cut.dedup();
        let remaining = g.remove_edges(&cut)?;
        let components = remaining.connected_components();
        let mut class_freq = BTreeMap::new();
        let mut class_counts = BTreeMap::new();
        for comp in &components {
            let (sub, _) = remaining.induced_subgraph(comp)?;
            // the canon limit scales with the component bound; 512 caps
            // the cost of adversarial class computations
            let limit = stats::DEFAULT_CANON_LIMIT.max(k_bound).min(512);
            let key = unrooted_class_key_limited(&sub, limit)?;
            *class_freq.entry(key.clone()).or_insert(Ratio::new(0, 1)) +=
                Ratio::new(comp.len() as i64, g.vertex_count() as i64);
            *class_counts.entry(key).or_insert(0) += 1;
        }
        Ok(Partition {
            vertex_count: g.vertex_count(),
            edge_count: g.edge_count(),
            degree_bound: g.degree_bound(),
            k_bound,
            cut_edges: cut,
            components,
            class_freq,
            class_counts,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    pub fn k_bound(&self) -> usize {
        self.k_bound
    }

    pub fn cut_edges(&self) -> &[(usize, usize)] {
        &self.cut_edges
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn max_component_size(&self) -> usize {
        self.components.iter().map(|c| c.len()).max().unwrap_or(0)
    }

    /// Achieved cut fraction `|cut| / |E|` as an exact rational; zero for
    /// edgeless graphs.
    pub fn achieved_eps(&self) -> Frac {
        if self.edge_count == 0 {
            Ratio::new(0, 1)
        } else {
            Ratio::new(self.cut_edges.len() as i64, self.edge_count as i64)
        }
    }

    pub fn class_frequencies(&self) -> &BTreeMap<CanonicalBallKey, Frac> {
        &self.class_freq
    }

    pub fn component_class_counts(&self) -> &BTreeMap<CanonicalBallKey, usize> {
        &self.class_counts
    }

    /// Vertex-weighted frequency `c_alpha` of one class.
    pub fn c_alpha(&self, key: &CanonicalBallKey) -> Frac {
        self.class_freq
            .get(key)
            .copied()
            .unwrap_or_else(|| Ratio::new(0, 1))
    }

    /// Per-vertex normalized component count `gamma_alpha` of one class.
    pub fn gamma(&self, key: &CanonicalBallKey) -> f64 {
        let count = self.class_counts.get(key).copied().unwrap_or(0);
        count as f64 / self.vertex_count as f64
    }

    /// Endpoints of cut edges: the vertices whose stars the cut touched.
    pub fn exceptional_vertices(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.cut_edges.iter().flat_map(|&(u, v)| [u, v]).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Re-validates every stored invariant against the source graph.
    pub fn validate(&self, g: &Graph) -> Result<(), String> {
        if g.vertex_count() != self.vertex_count || g.edge_count() != self.edge_count {
            return Err("source graph does not match partition dimensions".into());
        }
        for comp in &self.components {
            if comp.len() > self.k_bound {
                return Err(format!(
                    "component of size {} exceeds bound {}",
                    comp.len(),
                    self.k_bound
                ));
            }
        }
        let remaining = g.remove_edges(&self.cut_edges).map_err(|e| e.to_string())?;
        if remaining.connected_components() != self.components {
            return Err("components do not match cut re-evaluation".into());
        }
        let total: Frac = self.class_freq.values().sum();
        if self.vertex_count > 0 && total != Ratio::new(1, 1) {
            return Err(format!("class frequencies sum to {total}, not 1"));
        }
        // exceptional vertices are at most 2 |cut| and 2 d eps |V|
        let exceptional = self.exceptional_vertices().len();
        if exceptional > 2 * self.cut_edges.len() {
            return Err("exceptional vertex count exceeds 2 |cut|".into());
        }
        let eps = self.achieved_eps();
        let bound = 2.0
            * self.degree_bound as f64
            * (*eps.numer() as f64 / *eps.denom() as f64)
            * self.vertex_count as f64;
        if self.edge_count > 0 && (exceptional as f64) > bound + 1e-9 {
            return Err("exceptional vertex count exceeds 2 d eps |V|".into());
        }
        Ok(())
    }
}

/// Sum over observed component classes of `|c_alpha(pa) - c_alpha(pb)|`.
pub fn equipartition_compare(pa: &Partition, pb: &Partition) -> Result<f64, PartitionError> {
    if pa.k_bound != pb.k_bound {
        return Err(PartitionError::BoundMismatch(pa.k_bound, pb.k_bound));
    }
    if pa.degree_bound != pb.degree_bound {
        return Err(PartitionError::BoundMismatch(
            pa.degree_bound,
            pb.degree_bound,
        ));
    }
    Ok(equipartition_compare_exact(pa, pb)
        .iter()
        .map(|(_, v)| (*v.numer() as f64 / *v.denom() as f64).abs())
        .sum())
}

/// Per-class absolute frequency differences, exact.
pub fn equipartition_compare_exact(
    pa: &Partition,
    pb: &Partition,
) -> Vec<(CanonicalBallKey, Frac)> {
    let mut keys: Vec<&CanonicalBallKey> =
        pa.class_freq.keys().chain(pb.class_freq.keys()).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter()
        .map(|key| {
            let diff = pa.c_alpha(key) - pb.c_alpha(key);
            let abs = if diff < Ratio::new(0, 1) { -diff } else { diff };
            (key.clone(), abs)
        })
        .collect()
}

fn check_eps(eps: f64) -> Result<(), PartitionError> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(PartitionError::EpsOutOfRange(eps));
    }
    Ok(())
}

/// Walks a path component from an endpoint, or a cycle from its smallest
/// vertex; returns the vertex order and whether it closed into a cycle.
fn trace_path_like(g: &Graph, comp: &[usize]) -> Result<(Vec<usize>, bool), PartitionError> {
    if comp.len() == 1 {
        return Ok((comp.to_vec(), false));
    }
    let endpoints: Vec<usize> = comp.iter().copied().filter(|&v| g.degree(v) == 1).collect();
    let is_cycle = endpoints.is_empty();
    let start = if is_cycle { comp[0] } else { endpoints[0] };
    let mut order = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    loop {
        let next = g
            .neighbors(cur)
            .iter()
            .copied()
            .find(|&w| w != prev)
            .ok_or(PartitionError::NotPathLike)?;
        if next == start {
            break;
        }
        order.push(next);
        prev = cur;
        cur = next;
        if order.len() > comp.len() {
            return Err(PartitionError::NotPathLike);
        }
        if !is_cycle && g.degree(cur) == 1 && order.len() == comp.len() {
            break;
        }
        if is_cycle && order.len() == comp.len() {
            break;
        }
    }
    if order.len() != comp.len() {
        return Err(PartitionError::NotPathLike);
    }
    Ok((order, is_cycle))
}

/// Partitions a disjoint union of paths and cycles by cutting every K-th
/// edge, `K = ceil(2 / eps)`. Achieved cut fraction is at most `eps` and
/// every component has at most `K` vertices.
pub fn partition_path_like(g: &Graph, eps: f64) -> Result<Partition, PartitionError> {
    check_eps(eps)?;
    if g.is_empty() {
        return Err(PartitionError::EmptyGraph);
    }
    if g.max_degree() > 2 {
        return Err(PartitionError::NotPathLike);
    }
    let k = (2.0 / eps).ceil() as usize;
    let mut cut = Vec::new();
    for comp in g.connected_components() {
        let (order, is_cycle) = trace_path_like(g, &comp)?;
        let len = order.len();
        if is_cycle {
            if len > k {
                // cut into ceil(len / k) arcs
                let pieces = len.div_ceil(k);
                // segment boundaries at balanced positions
                let mut boundaries = Vec::with_capacity(pieces);
                for i in 0..pieces {
                    boundaries.push(i * len / pieces);
                }
                for w in 0..pieces {
                    let a = order[boundaries[w]];
                    let b = order[(boundaries[w] + len - 1) % len];
                    cut.push((a.min(b), a.max(b)));
                }
            }
        } else {
            // cut after every K-th vertex along the walk
            let mut pos = k;
            while pos < len {
                let a = order[pos - 1];
                let b = order[pos];
                cut.push((a.min(b), a.max(b)));
                pos += k;
            }
        }
    }
    Partition::from_cut(g, cut, k)
}

/// Seeded ball-carving partitioner.
///
/// Repeatedly grows a BFS ball inside the unassigned region from a seeded
/// start until the boundary-to-interior edge ratio drops to `eps` (or the
/// optional component-size cap binds), then carves the ball. Best-effort:
/// the achieved cut fraction is reported, not guaranteed.
pub fn partition_ball_carving(
    g: &Graph,
    eps: f64,
    seed: u64,
    max_component: Option<usize>,
) -> Result<Partition, PartitionError> {
    check_eps(eps)?;
    if g.is_empty() {
        return Err(PartitionError::EmptyGraph);
    }
    let n = g.vertex_count();
    let cap = max_component.unwrap_or(n).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut visit_order: Vec<usize> = (0..n).collect();
    visit_order.shuffle(&mut rng);

    let mut assigned = vec![false; n];
    let mut cut: Vec<(usize, usize)> = Vec::new();
    for &start in &visit_order {
        if assigned[start] {
            continue;
        }
        // grow the ball level by level within the unassigned region
        let mut ball = vec![start];
        let mut in_ball = vec![false; n];
        in_ball[start] = true;
        let mut frontier = vec![start];
        let (mut interior, mut boundary) = edge_split(g, &ball, &in_ball, &assigned);
        loop {
            if boundary as f64 <= eps * interior as f64 {
                break;
            }
            // next BFS level, respecting the size cap
            let mut next: Vec<usize> = Vec::new();
            for &v in &frontier {
                for &w in g.neighbors(v) {
                    if !assigned[w] && !in_ball[w] && !next.contains(&w) {
                        next.push(w);
                    }
                }
            }
            if next.is_empty() || ball.len() + next.len() > cap {
                break;
            }
            for &w in &next {
                in_ball[w] = true;
            }
            ball.extend_from_slice(&next);
            frontier = next;
            let split = edge_split(g, &ball, &in_ball, &assigned);
            interior = split.0;
            boundary = split.1;
        }
        // carve: all edges leaving the ball (toward anywhere) get cut
        for &v in &ball {
            assigned[v] = true;
        }
        for &v in &ball {
            for &w in g.neighbors(v) {
                if !in_ball[w] {
                    cut.push((v.min(w), v.max(w)));
                }
            }
        }
    }
    cut.sort_unstable();
    cut.dedup();
    let mut partition = Partition::from_cut(g, cut, cap)?;
    // report the achieved bound
    partition.k_bound = partition.max_component_size().max(1);
    Ok(partition)
}

/// Interior and boundary edge counts of a ball within the unassigned region.
fn edge_split(g: &Graph, ball: &[usize], in_ball: &[bool], assigned: &[bool]) -> (usize, usize) {
    let mut interior = 0;
    let mut boundary = 0;
    for &v in ball {
        for &w in g.neighbors(v) {
            if in_ball[w] {
                if v < w {
                    interior += 1;
                }
            } else if !assigned[w] {
                boundary += 1;
            }
        }
    }
    (interior, boundary)
}

/// Recognizes a row-major `s x s` torus grid and returns the side length.
pub fn detect_torus(g: &Graph) -> Option<usize> {
    let n = g.vertex_count();
    let s = (n as f64).sqrt().round() as usize;
    if s < 3 || s * s != n {
        return None;
    }
    let expected = |i: usize, j: usize| -> Vec<usize> {
        let mut nbrs = vec![
            ((i + 1) % s) * s + j,
            ((i + s - 1) % s) * s + j,
            i * s + (j + 1) % s,
            i * s + (j + s - 1) % s,
        ];
        nbrs.sort_unstable();
        nbrs.dedup();
        nbrs
    };
    for i in 0..s {
        for j in 0..s {
            if g.neighbors(i * s + j) != expected(i, j).as_slice() {
                return None;
            }
        }
    }
    Some(s)
}

/// Cuts a recognized `s x s` torus into aligned boxes of side
/// `min(s, ceil(2 / eps))`.
pub fn partition_torus_boxes(g: &Graph, eps: f64) -> Result<Partition, PartitionError> {
    check_eps(eps)?;
    let s = detect_torus(g).ok_or(PartitionError::NotTorus)?;
    let b = ((2.0 / eps).ceil() as usize).clamp(1, s);
    if b == s {
        return Partition::from_cut(g, Vec::new(), s * s);
    }
    let box_of = |coord: usize| coord / b;
    let mut cut = Vec::new();
    for i in 0..s {
        for j in 0..s {
            let v = i * s + j;
            // horizontal and vertical forward edges crossing box boundaries
            let right = i * s + (j + 1) % s;
            if box_of(j) != box_of((j + 1) % s) || j + 1 == s {
                cut.push((v.min(right), v.max(right)));
            }
            let down = ((i + 1) % s) * s + j;
            if box_of(i) != box_of((i + 1) % s) || i + 1 == s {
                cut.push((v.min(down), v.max(down)));
            }
        }
    }
    cut.sort_unstable();
    cut.dedup();
    Partition::from_cut(g, cut, b * b)
}

/// Partitions a forest by accumulating subtrees bottom-up and cutting a
/// child edge whenever absorbing the child would exceed the size bound.
///
/// Starts at `K = ceil(4 / eps)`; if high-degree hubs force more than an
/// `eps` fraction of cuts, the bound doubles until the budget is met
/// (a bound of `n` needs no cuts, so this terminates). The achieved `K`
/// is recorded in the partition.
pub fn partition_tree(g: &Graph, eps: f64) -> Result<Partition, PartitionError> {
    check_eps(eps)?;
    if g.is_empty() {
        return Err(PartitionError::EmptyGraph);
    }
    if g.edge_count() + g.connected_components().len() != g.vertex_count() {
        return Err(PartitionError::NotForest);
    }
    let n = g.vertex_count();
    let mut k = (4.0 / eps).ceil() as usize;
    loop {
        let cut = tree_cut_with_bound(g, k);
        let budget = (eps * g.edge_count() as f64).floor() as usize;
        if cut.len() <= budget || k >= n {
            return Partition::from_cut(g, cut, k.min(n.max(1)));
        }
        k *= 2;
    }
}

fn tree_cut_with_bound(g: &Graph, k: usize) -> Vec<(usize, usize)> {
    let n = g.vertex_count();
    let mut cut = Vec::new();
    let mut carry = vec![0usize; n];
    let mut seen = vec![false; n];
    for root in 0..n {
        if seen[root] {
            continue;
        }
        // iterative post-order
        let mut stack = vec![(root, usize::MAX, false)];
        while let Some((v, parent, processed)) = stack.pop() {
            if processed {
                let mut total = 1usize;
                for &w in g.neighbors(v) {
                    if w == parent {
                        continue;
                    }
                    if total + carry[w] > k {
                        cut.push((v.min(w), v.max(w)));
                    } else {
                        total += carry[w];
                    }
                }
                carry[v] = total;
            } else {
                seen[v] = true;
                stack.push((v, parent, true));
                for &w in g.neighbors(v) {
                    if w != parent {
                        stack.push((w, v, false));
                    }
                }
            }
        }
    }
    cut
}

/// Strategy dispatch: paths/cycles, torus grids and forests get their
/// constructive partitioners, everything else the ball carver.
pub fn partition_auto(
    g: &Graph,
    eps: f64,
    seed: u64,
    max_component: Option<usize>,
) -> Result<Partition, PartitionError> {
    if g.max_degree() <= 2 {
        return partition_path_like(g, eps);
    }
    if detect_torus(g).is_some() {
        return partition_torus_boxes(g, eps);
    }
    if g.edge_count() + g.connected_components().len() == g.vertex_count() {
        return partition_tree(g, eps);
    }
    partition_ball_carving(g, eps, seed, max_component)
}
