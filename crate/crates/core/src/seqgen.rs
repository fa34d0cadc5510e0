//! Deterministic generators for the graph families the experiments run on,
//! and JSON manifests describing whole sequences.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError};

#[derive(Debug, Error)]
pub enum SeqGenError {
    #[error("size parameter out of range: {0}")]
    SizeOutOfRange(String),
    #[error("pairing model needs n*d even and n > d, got n={n}, d={d}")]
    Infeasible { n: usize, d: usize },
    #[error("rejection cap exceeded after {0} attempts")]
    RejectionCap(usize),
    #[error("manifest member {index}: {msg}")]
    Member { index: usize, msg: String },
    #[error("manifest members have mixed degree bounds ({0} vs {1})")]
    MixedDegreeBounds(usize, usize),
    #[error(
        "manifest sizes not strictly increasing at member {0}; set allow_nonmonotone to override"
    )]
    NotIncreasing(usize),
    #[error("manifest parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Path on `n >= 1` vertices, labels along the path, degree bound 2.
pub fn gen_path(n: usize) -> Result<Graph, SeqGenError> {
    if n < 1 {
        return Err(SeqGenError::SizeOutOfRange("path needs n >= 1".into()));
    }
    let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
    Ok(Graph::new(n, 2, &edges)?)
}

/// Cycle on `n >= 3` vertices, labels around the cycle, degree bound 2.
pub fn gen_cycle(n: usize) -> Result<Graph, SeqGenError> {
    if n < 3 {
        return Err(SeqGenError::SizeOutOfRange("cycle needs n >= 3".into()));
    }
    let mut edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
    edges.push((0, n - 1));
    Ok(Graph::new(n, 2, &edges)?)
}

/// Discrete torus: dim 1 is the cycle `C_b`; dim 2 the `b x b` grid with
/// wraparound, row-major labels, degree bound 4.
pub fn gen_torus(b: usize, dim: usize) -> Result<Graph, SeqGenError> {
    if b < 3 {
        return Err(SeqGenError::SizeOutOfRange("torus needs b >= 3".into()));
    }
    match dim {
        1 => gen_cycle(b),
        2 => {
            let mut edges = std::collections::BTreeSet::new();
            for i in 0..b {
                for j in 0..b {
                    let v = i * b + j;
                    let right = i * b + (j + 1) % b;
                    let down = ((i + 1) % b) * b + j;
                    edges.insert((v.min(right), v.max(right)));
                    edges.insert((v.min(down), v.max(down)));
                }
            }
            let edges: Vec<_> = edges.into_iter().collect();
            Ok(Graph::new(b * b, 4, &edges)?)
        }
        _ => Err(SeqGenError::SizeOutOfRange("dim must be 1 or 2".into())),
    }
}

/// Box with free boundary: dim 1 is the path `P_b`; dim 2 the `b x b`
/// grid, row-major labels, degree bound 4.
pub fn gen_box(b: usize, dim: usize) -> Result<Graph, SeqGenError> {
    if b < 1 {
        return Err(SeqGenError::SizeOutOfRange("box needs b >= 1".into()));
    }
    match dim {
        1 => gen_path(b),
        2 => {
            let mut edges = Vec::new();
            for i in 0..b {
                for j in 0..b {
                    let v = i * b + j;
                    if j + 1 < b {
                        edges.push((v, i * b + j + 1));
                    }
                    if i + 1 < b {
                        edges.push((v, (i + 1) * b + j));
                    }
                }
            }
            Ok(Graph::new(b * b, 4, &edges)?)
        }
        _ => Err(SeqGenError::SizeOutOfRange("dim must be 1 or 2".into())),
    }
}

/// Complete binary tree truncated at `depth`, heap-order labels, degree
/// bound 3. Vertex count `2^(depth+1) - 1`.
pub fn gen_tree_ball(depth: usize) -> Result<Graph, SeqGenError> {
    if depth > 24 {
        return Err(SeqGenError::SizeOutOfRange("tree depth too large".into()));
    }
    let n = (1usize << (depth + 1)) - 1;
    let mut edges = Vec::with_capacity(n - 1);
    for i in 0..n {
        for child in [2 * i + 1, 2 * i + 2] {
            if child < n {
                edges.push((i, child));
            }
        }
    }
    Ok(Graph::new(n, 3, &edges)?)
}

/// Sampling diagnostics from the pairing-model generator.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RegularGenStats {
    pub attempts: usize,
    pub effective_seed: u64,
}

/// Random simple d-regular graph via the seeded pairing model with
/// rejection of loops and multiple edges. Deterministic per seed; if the
/// rejection cap is hit, a derived seed continues the search and the
/// effective seed is reported.
pub fn gen_random_regular_detailed(
    n: usize,
    d: usize,
    seed: u64,
) -> Result<(Graph, RegularGenStats), SeqGenError> {
    if n <= d || !(n * d).is_multiple_of(2) {
        return Err(SeqGenError::Infeasible { n, d });
    }
    let cap_per_seed = 500usize;
    let max_seed_hops = 64u64;
    let mut attempts = 0usize;
    for hop in 0..max_seed_hops {
        let effective_seed = seed.wrapping_add(hop.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let mut rng = ChaCha8Rng::seed_from_u64(effective_seed);
        for _ in 0..cap_per_seed {
            attempts += 1;
            let mut stubs: Vec<usize> = (0..n * d).map(|s| s / d).collect();
            stubs.shuffle(&mut rng);
            let mut edges: Vec<(usize, usize)> = Vec::with_capacity(n * d / 2);
            let mut ok = true;
            for pair in stubs.chunks_exact(2) {
                let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
                if u == v {
                    ok = false;
                    break;
                }
                edges.push((u, v));
            }
            if !ok {
                continue;
            }
            edges.sort_unstable();
            if edges.windows(2).any(|w| w[0] == w[1]) {
                continue;
            }
            let graph = Graph::new(n, d, &edges)?;
            return Ok((
                graph,
                RegularGenStats {
                    attempts,
                    effective_seed,
                },
            ));
        }
    }
    Err(SeqGenError::RejectionCap(attempts))
}

pub fn gen_random_regular(n: usize, d: usize, seed: u64) -> Result<Graph, SeqGenError> {
    gen_random_regular_detailed(n, d, seed).map(|(g, _)| g)
}

/// One member of a sequence manifest: a generator spec or a file path.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ManifestMember {
    Path { n: usize },
    Cycle { n: usize },
    Torus { b: usize, dim: usize },
    Box { b: usize, dim: usize },
    Tree { depth: usize },
    RandomRegular { n: usize, d: usize, seed: u64 },
    File { path: String },
}

/// A graph sequence description: shared degree bound, members, family tags.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceManifest {
    pub d: usize,
    pub members: Vec<ManifestMember>,
    #[serde(default)]
    pub tags: std::collections::BTreeMap<String, String>,
    /// Allows member sizes that are not strictly increasing.
    #[serde(default)]
    pub allow_nonmonotone: bool,
}

impl SequenceManifest {
    pub fn from_json(text: &str) -> Result<Self, SeqGenError> {
        serde_json::from_str(text).map_err(|e| SeqGenError::Parse(e.to_string()))
    }

    pub fn read(path: impl AsRef<std::path::Path>) -> Result<Self, SeqGenError> {
        let base = path.as_ref().parent().map(|p| p.to_path_buf());
        let text = std::fs::read_to_string(&path)?;
        let mut manifest = Self::from_json(&text)?;
        // resolve relative file members against the manifest location
        if let Some(base) = base {
            for member in &mut manifest.members {
                if let ManifestMember::File { path } = member {
                    let p = std::path::Path::new(path);
                    if p.is_relative() {
                        *path = base.join(p).to_string_lossy().into_owned();
                    }
                }
            }
        }
        Ok(manifest)
    }

    /// Generates or loads every member, validating the shared degree bound
    /// and the size monotonicity contract.
    pub fn load(&self) -> Result<Vec<Graph>, SeqGenError> {
        let mut graphs = Vec::with_capacity(self.members.len());
        for (index, member) in self.members.iter().enumerate() {
            let g = match member {
                ManifestMember::Path { n } => gen_path(*n),
                ManifestMember::Cycle { n } => gen_cycle(*n),
                ManifestMember::Torus { b, dim } => gen_torus(*b, *dim),
                ManifestMember::Box { b, dim } => gen_box(*b, *dim),
                ManifestMember::Tree { depth } => gen_tree_ball(*depth),
                ManifestMember::RandomRegular { n, d, seed } => gen_random_regular(*n, *d, *seed),
                ManifestMember::File { path } => {
                    Graph::read_edge_list(path).map_err(SeqGenError::from)
                }
            }
            .map_err(|e| SeqGenError::Member {
                index,
                msg: e.to_string(),
            })?;
            if g.degree_bound() != self.d {
                return Err(SeqGenError::MixedDegreeBounds(self.d, g.degree_bound()));
            }
            if let Some(prev) = graphs.last() {
                let prev: &Graph = prev;
                if !self.allow_nonmonotone && g.vertex_count() <= prev.vertex_count() {
                    return Err(SeqGenError::NotIncreasing(index));
                }
            }
            graphs.push(g);
        }
        Ok(graphs)
    }
}
