//! Rooted-ball classes and local statistics.
//!
//! Every vertex of a bounded-degree graph determines a rooted isomorphism
//! class for each ball radius. The census of these classes is the
//! computable content of local (Benjamini-Schramm style) statistics, and
//! the product-topology distance `d_pi` compares two censuses.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canon;
use crate::graph::{Graph, GraphError, RootedGraph};

/// Default cap on the vertex count of a ball passed to canonicalization.
pub const DEFAULT_CANON_LIMIT: usize = 64;

pub type Frequency = Ratio<i64>;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("ball has {0} vertices, exceeding the canonicalization limit {1}")]
    CanonLimit(usize, usize),
    #[error("graph is empty")]
    EmptyGraph,
    #[error("rooted graph is not connected from its root")]
    Disconnected,
    #[error("stat vectors disagree on r_max ({0} vs {1})")]
    RadiusMismatch(usize, usize),
    #[error("stat vectors disagree on degree bound ({0} vs {1})")]
    DegreeBoundMismatch(usize, usize),
    #[error("sequence must contain at least {0} graphs")]
    SequenceTooShort(usize),
    #[error("invalid hex key: {0}")]
    BadHexKey(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Canonical form of a rooted isomorphism class.
///
/// Two rooted graphs map to equal keys iff they are rooted isomorphic.
/// Keys order by (radius, vertex count, canonical bytes); this is the
/// enumeration order used for the `d_pi` weights.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalBallKey {
    radius: usize,
    ball_size: usize,
    bytes: Vec<u8>,
}

impl CanonicalBallKey {
    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn ball_size(&self) -> usize {
        self.ball_size
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn to_hex(&self) -> String {
        let mut s = String::with_capacity(self.bytes.len() * 2);
        for b in &self.bytes {
            s.push_str(&format!("{b:02x}"));
        }
        s
    }

    pub fn from_hex(hex: &str) -> Result<Self, StatsError> {
        if !hex.len().is_multiple_of(2) {
            return Err(StatsError::BadHexKey(hex.into()));
        }
        let mut bytes = Vec::with_capacity(hex.len() / 2);
        for i in (0..hex.len()).step_by(2) {
            let b = u8::from_str_radix(&hex[i..i + 2], 16)
                .map_err(|_| StatsError::BadHexKey(hex.into()))?;
            bytes.push(b);
        }
        Self::from_bytes(bytes).ok_or_else(|| StatsError::BadHexKey(hex.into()))
    }

    fn from_bytes(bytes: Vec<u8>) -> Option<Self> {
        let (n, edges) = canon::decode(&bytes)?;
        let graph = Graph::new(n, n.max(1), &edges).ok()?;
        let rooted = RootedGraph::from_graph(graph, 0).ok()?;
        let radius = rooted.root_eccentricity();
        Some(CanonicalBallKey {
            radius,
            ball_size: n,
            bytes,
        })
    }

    /// Reconstructs the canonical representative (root at vertex 0) from the
    /// key bytes. The representative's degree bound is its own max degree.
    pub fn representative(&self) -> RootedGraph {
        let (n, edges) = canon::decode(&self.bytes).expect("key bytes are well-formed");
        let graph = Graph::new(n, n.max(1), &edges).expect("canonical bytes encode a graph");
        let max_deg = graph.max_degree().max(1);
        let graph = Graph::new(n, max_deg, &graph.edges()).expect("degrees already validated");
        RootedGraph::from_graph(graph, 0).expect("root 0 exists")
    }
}

impl fmt::Display for CanonicalBallKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_hex())
    }
}

/// Canonical key of a rooted graph (a ball), plus the relabeling that maps
/// its vertices onto the canonical representative's labels.
pub fn canonical_key_with_map(
    ball: &RootedGraph,
) -> Result<(CanonicalBallKey, Vec<usize>), StatsError> {
    canonical_key_with_map_limited(ball, DEFAULT_CANON_LIMIT)
}

pub fn canonical_key_with_map_limited(
    ball: &RootedGraph,
    limit: usize,
) -> Result<(CanonicalBallKey, Vec<usize>), StatsError> {
    let n = ball.graph.vertex_count();
    if n > limit {
        return Err(StatsError::CanonLimit(n, limit));
    }
    let reachable = ball
        .graph
        .bfs_distances(ball.root)?
        .iter()
        .filter(|d| d.is_some())
        .count();
    if reachable != n {
        return Err(StatsError::Disconnected);
    }
    let canonical = canon::canonical_rooted(&ball.graph, ball.root);
    let radius = ball.root_eccentricity();
    Ok((
        CanonicalBallKey {
            radius,
            ball_size: n,
            bytes: canonical.bytes,
        },
        canonical.relabel,
    ))
}

/// Canonical key of a rooted graph.
pub fn canonical_key(ball: &RootedGraph) -> Result<CanonicalBallKey, StatsError> {
    canonical_key_with_map(ball).map(|(k, _)| k)
}

/// Census count for one observed class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassStat {
    /// Number of vertices whose `radius(class)`-ball realizes the class.
    pub count: u64,
    pub radius: usize,
    pub ball_size: usize,
}

/// Truncated local-statistics vector of a graph: for every ball radius up
/// to `r_max`, the frequency of each observed rooted class.
#[derive(Debug, Clone)]
pub struct StatVector {
    r_max: usize,
    vertex_count: usize,
    degree_bound: usize,
    /// Frequency per class, counted at the class's own radius.
    classes: BTreeMap<CanonicalBallKey, ClassStat>,
    /// Per-sweep censuses: at radius `r`, every vertex contributes to
    /// exactly one class (possibly of smaller radius if its ball stopped
    /// growing). Empty for deserialized vectors.
    per_radius: Vec<BTreeMap<CanonicalBallKey, u64>>,
}

impl StatVector {
    pub fn r_max(&self) -> usize {
        self.r_max
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    pub fn classes(&self) -> &BTreeMap<CanonicalBallKey, ClassStat> {
        &self.classes
    }

    /// Frequency `p(G, alpha)` as an exact rational `count / |V|`.
    pub fn frequency(&self, key: &CanonicalBallKey) -> Frequency {
        match self.classes.get(key) {
            Some(stat) => Ratio::new(stat.count as i64, self.vertex_count as i64),
            None => Ratio::new(0, 1),
        }
    }

    /// The sweep census at one radius, when available.
    pub fn sweep(&self, r: usize) -> Option<&BTreeMap<CanonicalBallKey, u64>> {
        self.per_radius.get(r)
    }

    /// Checks that every sweep partitions the vertex set exactly.
    pub fn validate_normalization(&self) -> bool {
        !self.per_radius.is_empty()
            && self
                .per_radius
                .iter()
                .all(|sweep| sweep.values().sum::<u64>() == self.vertex_count as u64)
    }
}

/// Computes the class census of `g` for all ball radii up to `r_max`.
pub fn class_census(g: &Graph, r_max: usize) -> Result<StatVector, StatsError> {
    class_census_limited(g, r_max, DEFAULT_CANON_LIMIT)
}

pub fn class_census_limited(
    g: &Graph,
    r_max: usize,
    canon_limit: usize,
) -> Result<StatVector, StatsError> {
    if g.is_empty() {
        return Err(StatsError::EmptyGraph);
    }
    let per_vertex: Vec<Vec<CanonicalBallKey>> = (0..g.vertex_count())
        .into_par_iter()
        .map(|x| {
            (0..=r_max)
                .map(|s| {
                    let ball = g.ball(x, s)?;
                    canonical_key_with_map_limited(&ball, canon_limit).map(|(k, _)| k)
                })
                .collect::<Result<Vec<_>, StatsError>>()
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut per_radius: Vec<BTreeMap<CanonicalBallKey, u64>> = vec![BTreeMap::new(); r_max + 1];
    for keys in &per_vertex {
        for (s, key) in keys.iter().enumerate() {
            *per_radius[s].entry(key.clone()).or_insert(0) += 1;
        }
    }
    // every class observed at sweep s with radius e < s also shows up at
    // sweep e with a count at least as large, so reading counts off the
    // class's own sweep covers all observed classes
    let mut classes = BTreeMap::new();
    for (s, sweep) in per_radius.iter().enumerate() {
        for (key, &count) in sweep {
            if key.radius == s {
                classes.insert(
                    key.clone(),
                    ClassStat {
                        count,
                        radius: key.radius,
                        ball_size: key.ball_size,
                    },
                );
            }
        }
    }
    let stats = StatVector {
        r_max,
        vertex_count: g.vertex_count(),
        degree_bound: g.degree_bound(),
        classes,
        per_radius,
    };
    debug_assert!(stats.validate_normalization());
    Ok(stats)
}

/// Value of the product-topology distance together with the truncation
/// tail bound it was computed under.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DpiResult {
    pub value: f64,
    /// Weight of all classes beyond the enumerated prefix.
    pub tail_bound: f64,
    pub classes_compared: usize,
}

impl DpiResult {
    /// Diagnostic: the truncated statistics coincide exactly. Graphs with
    /// fully identical statistics are disjoint unions of copies of one
    /// common graph, so a zero here is strong (not conclusive) evidence
    /// of that structure up to the computed radius.
    pub fn statistics_identical(&self) -> bool {
        self.value == 0.0
    }
}

/// Product-topology distance between two stat vectors, over the canonical
/// enumeration of the classes observed in either argument.
pub fn d_pi(a: &StatVector, b: &StatVector) -> Result<DpiResult, StatsError> {
    if a.r_max != b.r_max {
        return Err(StatsError::RadiusMismatch(a.r_max, b.r_max));
    }
    if a.degree_bound != b.degree_bound {
        return Err(StatsError::DegreeBoundMismatch(
            a.degree_bound,
            b.degree_bound,
        ));
    }
    let mut keys: Vec<&CanonicalBallKey> = a.classes.keys().chain(b.classes.keys()).collect();
    keys.sort();
    keys.dedup();
    let mut value = 0.0;
    let mut weight = 1.0;
    for key in &keys {
        weight *= 0.5;
        let pa = ratio_to_f64(a.frequency(key));
        let pb = ratio_to_f64(b.frequency(key));
        let diff = (pa - pb).abs();
        value += weight * diff / (1.0 + diff);
    }
    Ok(DpiResult {
        value,
        tail_bound: weight,
        classes_compared: keys.len(),
    })
}

fn ratio_to_f64(r: Frequency) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// One sampled pair distance in a Cauchy profile.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PairDistance {
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

/// Estimated limit frequency of one class across the sequence tail.
#[derive(Debug, Clone, Serialize)]
pub struct LimitFrequency {
    pub key: String,
    pub radius: usize,
    pub ball_size: usize,
    pub last_value: f64,
    /// Max deviation from the last value over the sampled tail.
    pub tail_variation: f64,
}

/// Weak-convergence diagnostic for a graph sequence.
#[derive(Debug, Clone, Serialize)]
pub struct WeakProfile {
    pub r_max: usize,
    pub pair_distances: Vec<PairDistance>,
    /// `tail_sup[m]` = sup of `d_pi` over sampled pairs with `i, j >= m`.
    pub tail_sup: Vec<f64>,
    pub tail_bound: f64,
    pub limit_frequencies: Vec<LimitFrequency>,
}

/// Pairs to sample from a sequence of length `len`: everything for short
/// sequences, consecutive plus to-last pairs otherwise.
pub(crate) fn sample_pairs(len: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    if len <= 16 {
        for i in 0..len {
            for j in (i + 1)..len {
                pairs.push((i, j));
            }
        }
    } else {
        for i in 0..len - 1 {
            pairs.push((i, i + 1));
            if i + 1 < len - 1 {
                pairs.push((i, len - 1));
            }
        }
    }
    pairs
}

/// Computes censuses for the whole sequence and summarizes pairwise `d_pi`.
pub fn weak_cauchy_profile(seq: &[Graph], r_max: usize) -> Result<WeakProfile, StatsError> {
    if seq.len() < 2 {
        return Err(StatsError::SequenceTooShort(2));
    }
    let stats: Vec<StatVector> = seq
        .par_iter()
        .map(|g| class_census(g, r_max))
        .collect::<Result<_, _>>()?;
    weak_profile_from_stats(&stats)
}

pub fn weak_profile_from_stats(stats: &[StatVector]) -> Result<WeakProfile, StatsError> {
    if stats.len() < 2 {
        return Err(StatsError::SequenceTooShort(2));
    }
    let pairs = sample_pairs(stats.len());
    let mut pair_distances = Vec::with_capacity(pairs.len());
    let mut tail_bound = 0.0f64;
    for (i, j) in pairs {
        let r = d_pi(&stats[i], &stats[j])?;
        tail_bound = tail_bound.max(r.tail_bound);
        pair_distances.push(PairDistance {
            i,
            j,
            value: r.value,
        });
    }
    let tail_sup = (0..stats.len() - 1)
        .map(|m| {
            pair_distances
                .iter()
                .filter(|p| p.i >= m && p.j >= m)
                .map(|p| p.value)
                .fold(0.0, f64::max)
        })
        .collect();

    // classes observed in the last member, tracked over the sampled tail
    let tail_start = stats.len() / 2;
    let last = &stats[stats.len() - 1];
    let mut limit_frequencies = Vec::new();
    for (key, stat) in last.classes() {
        let last_value = ratio_to_f64(last.frequency(key));
        let tail_variation = stats[tail_start..]
            .iter()
            .map(|s| (ratio_to_f64(s.frequency(key)) - last_value).abs())
            .fold(0.0, f64::max);
        limit_frequencies.push(LimitFrequency {
            key: key.to_hex(),
            radius: stat.radius,
            ball_size: stat.ball_size,
            last_value,
            tail_variation,
        });
    }
    Ok(WeakProfile {
        r_max: last.r_max(),
        pair_distances,
        tail_sup,
        tail_bound,
        limit_frequencies,
    })
}

#[derive(Serialize, Deserialize)]
struct ClassEntryJson {
    num: u64,
    den: u64,
    radius: usize,
    ball_size: usize,
}

#[derive(Serialize, Deserialize)]
struct StatVectorJson {
    r_max: usize,
    vertex_count: usize,
    degree_bound: usize,
    classes: BTreeMap<String, ClassEntryJson>,
}

impl Serialize for StatVector {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let classes = self
            .classes
            .iter()
            .map(|(key, stat)| {
                (
                    key.to_hex(),
                    ClassEntryJson {
                        num: stat.count,
                        den: self.vertex_count as u64,
                        radius: stat.radius,
                        ball_size: stat.ball_size,
                    },
                )
            })
            .collect();
        StatVectorJson {
            r_max: self.r_max,
            vertex_count: self.vertex_count,
            degree_bound: self.degree_bound,
            classes,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for StatVector {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let json = StatVectorJson::deserialize(deserializer)?;
        let mut classes = BTreeMap::new();
        for (hex, entry) in json.classes {
            let key = CanonicalBallKey::from_hex(&hex).map_err(serde::de::Error::custom)?;
            classes.insert(
                key,
                ClassStat {
                    count: entry.num,
                    radius: entry.radius,
                    ball_size: entry.ball_size,
                },
            );
        }
        Ok(StatVector {
            r_max: json.r_max,
            vertex_count: json.vertex_count,
            degree_bound: json.degree_bound,
            classes,
            per_radius: Vec::new(),
        })
    }
}
