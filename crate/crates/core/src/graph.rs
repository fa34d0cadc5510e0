//! Finite simple graphs with a global degree bound.
//!
//! Vertices are dense integer labels `0..n`, and the labeling is meaningful:
//! star comparisons and the labeled distances treat `0..n` as actual vertex
//! names, so derived graphs (balls, induced subgraphs) record how their
//! labels map back to the source. Graphs are immutable after construction;
//! every operation returning a graph builds a new one.

use std::collections::VecDeque;
use std::fmt;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("vertex {0} out of range (graph has {1} vertices)")]
    VertexOutOfRange(usize, usize),
    #[error("loop edge at vertex {0}")]
    LoopEdge(usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("vertex {vertex} has degree {degree}, exceeding bound {bound}")]
    DegreeBound {
        vertex: usize,
        degree: usize,
        bound: usize,
    },
    #[error("degree bound must be positive")]
    ZeroDegreeBound,
    #[error("disjoint multiple requires q >= 1")]
    ZeroMultiple,
    #[error("empty vertex selection for {0}")]
    EmptySelection(&'static str),
    #[error("labeling is not a bijection of 0..{0}")]
    NotABijection(usize),
    #[error("labeling has length {got}, graph has {want} vertices")]
    LabelingSize { got: usize, want: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Result of a shortest-path query; `Infinite` when no path exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Distance {
    Finite(usize),
    Infinite,
}

impl Distance {
    pub fn finite(self) -> Option<usize> {
        match self {
            Distance::Finite(k) => Some(k),
            Distance::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Distance::Finite(_))
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(k) => write!(f, "{k}"),
            Distance::Infinite => write!(f, "inf"),
        }
    }
}

/// A finite simple graph with max degree at most `degree_bound`.
///
/// Invariants (enforced at construction): no loops, no multiple edges,
/// adjacency symmetric, neighbor lists sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    degree_bound: usize,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from an edge list, validating all invariants.
    pub fn new(
        n: usize,
        degree_bound: usize,
        edges: &[(usize, usize)],
    ) -> Result<Self, GraphError> {
        if degree_bound == 0 {
            return Err(GraphError::ZeroDegreeBound);
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n {
                return Err(GraphError::VertexOutOfRange(u, n));
            }
            if v >= n {
                return Err(GraphError::VertexOutOfRange(v, n));
            }
            if u == v {
                return Err(GraphError::LoopEdge(u));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for (v, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                let dup = list.windows(2).find(|w| w[0] == w[1]).unwrap()[0];
                return Err(GraphError::DuplicateEdge(v.min(dup), v.max(dup)));
            }
            if list.len() > degree_bound {
                return Err(GraphError::DegreeBound {
                    vertex: v,
                    degree: list.len(),
                    bound: degree_bound,
                });
            }
        }
        Ok(Graph {
            n,
            degree_bound,
            adj,
        })
    }

    /// The empty graph on zero vertices.
    pub fn empty(degree_bound: usize) -> Self {
        Graph {
            n: 0,
            degree_bound: degree_bound.max(1),
            adj: Vec::new(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|l| l.len()).sum::<usize>() / 2
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(|l| l.len()).max().unwrap_or(0)
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as sorted `(u, v)` pairs with `u < v`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (u, list) in self.adj.iter().enumerate() {
            for &v in list {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v >= self.n {
            Err(GraphError::VertexOutOfRange(v, self.n))
        } else {
            Ok(())
        }
    }

    /// BFS distance layers from `x`, `None` for unreachable vertices.
    pub fn bfs_distances(&self, x: usize) -> Result<Vec<Option<usize>>, GraphError> {
        self.check_vertex(x)?;
        let mut dist = vec![None; self.n];
        dist[x] = Some(0);
        let mut queue = VecDeque::from([x]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &w in &self.adj[u] {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        Ok(dist)
    }

    /// Shortest-path distance in the path metric; `Infinite` across components.
    pub fn path_distance(&self, x: usize, y: usize) -> Result<Distance, GraphError> {
        self.check_vertex(x)?;
        self.check_vertex(y)?;
        if x == y {
            return Ok(Distance::Finite(0));
        }
        let mut dist = vec![usize::MAX; self.n];
        dist[x] = 0;
        let mut queue = VecDeque::from([x]);
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    if w == y {
                        return Ok(Distance::Finite(dist[w]));
                    }
                    queue.push_back(w);
                }
            }
        }
        Ok(Distance::Infinite)
    }

    /// The rooted `r`-ball around `x`: induced subgraph on all vertices at
    /// distance at most `r`, relabeled `0..k`, with a back-map to `self`.
    pub fn ball(&self, x: usize, r: usize) -> Result<RootedGraph, GraphError> {
        self.check_vertex(x)?;
        let mut dist = vec![usize::MAX; self.n];
        dist[x] = 0;
        let mut members = vec![x];
        let mut queue = VecDeque::from([x]);
        while let Some(u) = queue.pop_front() {
            if dist[u] == r {
                continue;
            }
            for &w in &self.adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    members.push(w);
                    queue.push_back(w);
                }
            }
        }
        members.sort_unstable();
        let (graph, back_map) = self.induced_subgraph(&members)?;
        let root = back_map.binary_search(&x).expect("root is a ball member");
        Ok(RootedGraph {
            graph,
            root,
            back_map,
        })
    }

    /// Induced subgraph on the vertex set `t` (deduplicated, sorted).
    /// Returns the new graph and the back-map `new index -> old vertex`.
    pub fn induced_subgraph(&self, t: &[usize]) -> Result<(Graph, Vec<usize>), GraphError> {
        let mut members: Vec<usize> = t.to_vec();
        members.sort_unstable();
        members.dedup();
        for &v in &members {
            self.check_vertex(v)?;
        }
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in members.iter().enumerate() {
            index[v] = i;
        }
        let mut adj = vec![Vec::new(); members.len()];
        for (i, &v) in members.iter().enumerate() {
            for &w in &self.adj[v] {
                if index[w] != usize::MAX {
                    adj[i].push(index[w]);
                }
            }
            // source adjacency is sorted and index is monotone on members
        }
        Ok((
            Graph {
                n: members.len(),
                degree_bound: self.degree_bound,
                adj,
            },
            members,
        ))
    }

    /// `q` vertex- and edge-disjoint copies; copy `i` occupies labels
    /// `[i*n, (i+1)*n)`.
    pub fn disjoint_multiple(&self, q: usize) -> Result<Graph, GraphError> {
        if q == 0 {
            return Err(GraphError::ZeroMultiple);
        }
        let mut adj = Vec::with_capacity(self.n * q);
        for copy in 0..q {
            let offset = copy * self.n;
            for list in &self.adj {
                adj.push(list.iter().map(|&w| w + offset).collect());
            }
        }
        Ok(Graph {
            n: self.n * q,
            degree_bound: self.degree_bound,
            adj,
        })
    }

    /// Connected components as sorted vertex sets, ordered by smallest member.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut components = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &w in &self.adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            components.push(comp);
        }
        components
    }

    /// Applies a vertex relabeling: vertex `v` becomes `sigma(v)`.
    pub fn relabel(&self, sigma: &VertexLabeling) -> Result<Graph, GraphError> {
        if sigma.len() != self.n {
            return Err(GraphError::LabelingSize {
                got: sigma.len(),
                want: self.n,
            });
        }
        let mut adj = vec![Vec::new(); self.n];
        for (v, list) in self.adj.iter().enumerate() {
            let img = sigma.apply(v);
            adj[img] = list.iter().map(|&w| sigma.apply(w)).collect();
            adj[img].sort_unstable();
        }
        Ok(Graph {
            n: self.n,
            degree_bound: self.degree_bound,
            adj,
        })
    }

    /// Graph with the given edges removed (edges listed in either order).
    pub fn remove_edges(&self, cut: &[(usize, usize)]) -> Result<Graph, GraphError> {
        let mut drop = std::collections::BTreeSet::new();
        for &(u, v) in cut {
            self.check_vertex(u)?;
            self.check_vertex(v)?;
            drop.insert((u.min(v), u.max(v)));
        }
        let edges: Vec<(usize, usize)> = self
            .edges()
            .into_iter()
            .filter(|e| !drop.contains(e))
            .collect();
        Graph::new(self.n, self.degree_bound, &edges)
    }

    /// Parses the edge-list interchange format: first line `n d`, then one
    /// `u v` pair per line with `u < v`; blank lines and `#` comments ignored.
    pub fn from_edge_list_str(text: &str) -> Result<Graph, GraphError> {
        let mut header: Option<(usize, usize)> = None;
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(GraphError::Parse {
                    line: idx + 1,
                    msg: format!("expected two integers, got {line:?}"),
                });
            }
            let a: usize = fields[0].parse().map_err(|_| GraphError::Parse {
                line: idx + 1,
                msg: format!("invalid integer {:?}", fields[0]),
            })?;
            let b: usize = fields[1].parse().map_err(|_| GraphError::Parse {
                line: idx + 1,
                msg: format!("invalid integer {:?}", fields[1]),
            })?;
            if header.is_none() {
                header = Some((a, b));
            } else {
                if a >= b {
                    return Err(GraphError::Parse {
                        line: idx + 1,
                        msg: format!("edge endpoints must satisfy u < v, got {a} {b}"),
                    });
                }
                edges.push((a, b));
            }
        }
        let (n, d) = header.ok_or(GraphError::Parse {
            line: 0,
            msg: "missing `n d` header line".into(),
        })?;
        Graph::new(n, d, &edges)
    }

    /// Serializes to the edge-list interchange format.
    pub fn to_edge_list_string(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.degree_bound);
        for (u, v) in self.edges() {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Graph, GraphError> {
        let text = std::fs::read_to_string(path)?;
        Graph::from_edge_list_str(&text)
    }

    pub fn write_edge_list(&self, path: impl AsRef<Path>) -> Result<(), GraphError> {
        std::fs::write(path, self.to_edge_list_string())?;
        Ok(())
    }
}

/// A graph with a distinguished root and a record of where its labels came
/// from (`back_map[i]` = vertex of the source graph).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedGraph {
    pub graph: Graph,
    pub root: usize,
    pub back_map: Vec<usize>,
}

impl RootedGraph {
    /// Wraps a standalone graph as rooted, with an identity back-map.
    pub fn from_graph(graph: Graph, root: usize) -> Result<Self, GraphError> {
        graph.check_vertex(root)?;
        let back_map = (0..graph.vertex_count()).collect();
        Ok(RootedGraph {
            graph,
            root,
            back_map,
        })
    }

    /// Eccentricity of the root within this graph (its radius as a ball).
    pub fn root_eccentricity(&self) -> usize {
        let dist = self
            .graph
            .bfs_distances(self.root)
            .expect("root is a valid vertex");
        dist.iter().flatten().copied().max().unwrap_or(0)
    }
}

/// A bijection of the vertex labels `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexLabeling {
    perm: Vec<usize>,
}

impl VertexLabeling {
    pub fn new(perm: Vec<usize>) -> Result<Self, GraphError> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &v in &perm {
            if v >= n || seen[v] {
                return Err(GraphError::NotABijection(n));
            }
            seen[v] = true;
        }
        Ok(VertexLabeling { perm })
    }

    pub fn identity(n: usize) -> Self {
        VertexLabeling {
            perm: (0..n).collect(),
        }
    }

    /// Deterministic seeded shuffle, for reproducible relabeling tests.
    pub fn seeded_shuffle(n: usize, seed: u64) -> Self {
        let mut perm: Vec<usize> = (0..n).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        perm.shuffle(&mut rng);
        VertexLabeling { perm }
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn apply(&self, v: usize) -> usize {
        self.perm[v]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.perm
    }

    pub fn inverse(&self) -> VertexLabeling {
        let mut inv = vec![0; self.perm.len()];
        for (v, &img) in self.perm.iter().enumerate() {
            inv[img] = v;
        }
        VertexLabeling { perm: inv }
    }
}
