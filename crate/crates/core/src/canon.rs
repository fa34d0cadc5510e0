//! Canonical forms for rooted graphs.
//!
//! Iterated neighborhood refinement seeded by root distance and degree,
//! with backtracking individualization on ties. Discovered automorphisms
//! prune branches whose target vertex lies in the orbit of an already
//! explored one (only automorphisms fixing the current individualization
//! prefix are used, which keeps the pruning sound).

use crate::graph::Graph;

/// A canonical relabeling together with the byte encoding it produces.
/// `relabel[old] = canonical label`; the root always maps to label 0.
#[derive(Debug, Clone)]
pub(crate) struct Canonical {
    pub relabel: Vec<usize>,
    pub bytes: Vec<u8>,
}

/// Encodes a graph under a relabeling as `n | m | sorted edge pairs`,
/// all little-endian u16. Total order on these byte strings is the order
/// used everywhere canonical keys are compared.
fn encode(g: &Graph, relabel: &[usize]) -> Vec<u8> {
    let n = g.vertex_count();
    let mut edges: Vec<(u16, u16)> = Vec::with_capacity(g.edge_count());
    for (u, v) in g.edges() {
        let (a, b) = (relabel[u] as u16, relabel[v] as u16);
        edges.push((a.min(b), a.max(b)));
    }
    edges.sort_unstable();
    let mut bytes = Vec::with_capacity(4 + edges.len() * 4);
    bytes.extend_from_slice(&(n as u16).to_le_bytes());
    bytes.extend_from_slice(&(edges.len() as u16).to_le_bytes());
    for (a, b) in edges {
        bytes.extend_from_slice(&a.to_le_bytes());
        bytes.extend_from_slice(&b.to_le_bytes());
    }
    bytes
}

/// Decodes the byte encoding back into (n, edge list).
pub(crate) fn decode(bytes: &[u8]) -> Option<(usize, Vec<(usize, usize)>)> {
    if bytes.len() < 4 {
        return None;
    }
    let n = u16::from_le_bytes([bytes[0], bytes[1]]) as usize;
    let m = u16::from_le_bytes([bytes[2], bytes[3]]) as usize;
    if bytes.len() != 4 + 4 * m {
        return None;
    }
    let mut edges = Vec::with_capacity(m);
    for i in 0..m {
        let off = 4 + 4 * i;
        let a = u16::from_le_bytes([bytes[off], bytes[off + 1]]) as usize;
        let b = u16::from_le_bytes([bytes[off + 2], bytes[off + 3]]) as usize;
        edges.push((a, b));
    }
    Some((n, edges))
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, v: usize) -> usize {
        if self.parent[v] != v {
            let root = self.find(self.parent[v]);
            self.parent[v] = root;
        }
        self.parent[v]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

struct Searcher<'a> {
    g: &'a Graph,
    n: usize,
    best: Option<Canonical>,
    /// Individualization sequence that produced the best leaf.
    best_path: Vec<usize>,
    /// Depth to unwind to after an equal-encoding leaf; usize::MAX = none.
    backjump: usize,
    // automorphism generators discovered at leaves with equal encodings
    generators: Vec<Vec<usize>>,
}

type Cells = Vec<Vec<usize>>;

impl<'a> Searcher<'a> {
    /// Splits cells by (own cell, multiset of neighbor cells) until stable.
    fn refine(&self, cells: &mut Cells) {
        loop {
            let mut color = vec![0usize; self.n];
            for (idx, cell) in cells.iter().enumerate() {
                for &v in cell {
                    color[v] = idx;
                }
            }
            let mut next: Cells = Vec::with_capacity(cells.len());
            let mut split = false;
            for cell in cells.iter() {
                if cell.len() == 1 {
                    next.push(cell.clone());
                    continue;
                }
                let mut keyed: Vec<(Vec<usize>, usize)> = cell
                    .iter()
                    .map(|&v| {
                        let mut sig: Vec<usize> =
                            self.g.neighbors(v).iter().map(|&w| color[w]).collect();
                        sig.sort_unstable();
                        (sig, v)
                    })
                    .collect();
                keyed.sort();
                let mut start = 0;
                for i in 1..=keyed.len() {
                    if i == keyed.len() || keyed[i].0 != keyed[start].0 {
                        next.push(keyed[start..i].iter().map(|(_, v)| *v).collect());
                        if i - start != cell.len() {
                            split = true;
                        }
                        start = i;
                    }
                }
            }
            *cells = next;
            if !split {
                return;
            }
        }
    }

    fn search(&mut self, cells: &Cells, prefix: &mut Vec<usize>) {
        let target = cells.iter().position(|c| c.len() > 1);
        let Some(target) = target else {
            // discrete partition: emit a candidate labeling
            let mut relabel = vec![0usize; self.n];
            for (idx, cell) in cells.iter().enumerate() {
                relabel[cell[0]] = idx;
            }
            let bytes = encode(self.g, &relabel);
            match &self.best {
                Some(b) if bytes > b.bytes => {}
                Some(b) if bytes == b.bytes => {
                    // equal leaves compose to an automorphism
                    let mut inv_best = vec![0usize; self.n];
                    for (v, &l) in b.relabel.iter().enumerate() {
                        inv_best[l] = v;
                    }
                    let gen: Vec<usize> = (0..self.n).map(|v| inv_best[relabel[v]]).collect();
                    // when the automorphism verifiably fixes the shared
                    // individualization prefix and maps this branch's
                    // diverging vertex onto the best path's choice, the
                    // rest of this subtree is its image and can be skipped
                    let k = prefix
                        .iter()
                        .zip(&self.best_path)
                        .position(|(a, b)| a != b)
                        .unwrap_or(prefix.len().min(self.best_path.len()));
                    let maps_branch = k < prefix.len()
                        && k < self.best_path.len()
                        && gen[prefix[k]] == self.best_path[k]
                        && prefix[..k].iter().all(|&p| gen[p] == p);
                    if maps_branch {
                        self.backjump = k;
                    }
                    if gen.iter().enumerate().any(|(v, &img)| v != img) {
                        self.generators.push(gen);
                    }
                }
                _ => {
                    self.best = Some(Canonical { relabel, bytes });
                    self.best_path = prefix.clone();
                }
            }
            return;
        };

        let depth = prefix.len();
        let candidates = cells[target].clone();
        let mut tried: Vec<usize> = Vec::new();
        // per-node orbit cache, rebuilt only when new generators appear
        let mut orbit_cache: Option<(UnionFind, usize)> = None;
        for &v in &candidates {
            if !tried.is_empty() && !self.generators.is_empty() {
                let stale = orbit_cache
                    .as_ref()
                    .is_none_or(|(_, at)| *at != self.generators.len());
                if stale {
                    orbit_cache = Some((self.prefix_orbits(prefix), self.generators.len()));
                }
                let (uf, _) = orbit_cache.as_mut().expect("cache just filled");
                let rv = uf.find(v);
                if tried.iter().any(|&u| uf.find(u) == rv) {
                    continue;
                }
            }
            tried.push(v);
            let mut child: Cells = Vec::with_capacity(cells.len() + 1);
            for (idx, cell) in cells.iter().enumerate() {
                if idx == target {
                    child.push(vec![v]);
                    child.push(cell.iter().copied().filter(|&w| w != v).collect());
                } else {
                    child.push(cell.clone());
                }
            }
            self.refine(&mut child);
            prefix.push(v);
            self.search(&child, prefix);
            prefix.pop();
            if self.backjump < depth {
                // an ancestor owns the divergence point: keep unwinding
                return;
            }
            if self.backjump == depth {
                // this node chose the diverging vertex: the rest of v's
                // subtree is an automorphism image, move to the next
                // candidate
                self.backjump = usize::MAX;
            }
        }
    }

    /// Orbits under the known automorphisms that fix every prefix vertex.
    fn prefix_orbits(&self, prefix: &[usize]) -> UnionFind {
        let mut uf = UnionFind::new(self.n);
        for gen in &self.generators {
            if prefix.iter().any(|&p| gen[p] != p) {
                continue;
            }
            for (a, &b) in gen.iter().enumerate() {
                uf.union(a, b);
            }
        }
        uf
    }
}

/// Canonical form of `g` rooted at `root`.
///
/// Two rooted graphs produce equal byte encodings iff they are rooted
/// isomorphic. The canonical labeling assigns 0 to the root.
pub(crate) fn canonical_rooted(g: &Graph, root: usize) -> Canonical {
    let n = g.vertex_count();
    assert!(root < n, "root out of range");
    let dist = g
        .bfs_distances(root)
        .expect("root validated")
        .into_iter()
        .map(|d| d.unwrap_or(usize::MAX))
        .collect::<Vec<_>>();

    // initial cells keyed by (distance from root, degree); the root is the
    // unique distance-0 vertex and therefore starts in a singleton cell
    let mut keyed: Vec<((usize, usize), usize)> =
        (0..n).map(|v| ((dist[v], g.degree(v)), v)).collect();
    keyed.sort();
    let mut cells: Cells = Vec::new();
    let mut start = 0;
    for i in 1..=keyed.len() {
        if i == keyed.len() || keyed[i].0 != keyed[start].0 {
            cells.push(keyed[start..i].iter().map(|(_, v)| *v).collect());
            start = i;
        }
    }

    let mut searcher = Searcher {
        g,
        n,
        best: None,
        best_path: Vec::new(),
        backjump: usize::MAX,
        generators: Vec::new(),
    };
    searcher.refine(&mut cells);
    let mut prefix = Vec::new();
    searcher.search(&cells, &mut prefix);
    let canonical = searcher.best.expect("search visits at least one leaf");
    debug_assert_eq!(canonical.relabel[root], 0, "root must map to label 0");
    canonical
}

/// Decides whether some automorphism of `g` fixes `root` and maps `u` to
/// `v`. Complete backtracking search, pruned by distance profiles.
fn exists_pinned_automorphism(g: &Graph, root: usize, u: usize, v: usize) -> bool {
    let n = g.vertex_count();
    let dist = |s: usize| -> Vec<usize> {
        g.bfs_distances(s)
            .expect("vertex validated")
            .into_iter()
            .map(|d| d.unwrap_or(usize::MAX))
            .collect()
    };
    let (dr, du, dv) = (dist(root), dist(u), dist(v));
    if g.degree(u) != g.degree(v) || dr[u] != dr[v] {
        return false;
    }
    // invariant a candidate image must satisfy: equal distance to the two
    // pinned points (root, and u mapping to v)
    let compatible =
        |x: usize, y: usize| g.degree(x) == g.degree(y) && dr[x] == dr[y] && du[x] == dv[y];
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    map[root] = root;
    used[root] = true;
    if u != root {
        if !compatible(u, v) || used[v] {
            return false;
        }
        map[u] = v;
        used[v] = true;
    } else if v != root {
        return false;
    }
    // assign remaining vertices in BFS-from-root order for early pruning
    let mut order: Vec<usize> = (0..n).filter(|&x| map[x] == usize::MAX).collect();
    order.sort_by_key(|&x| (dr[x], x));

    fn dfs(
        g: &Graph,
        order: &[usize],
        idx: usize,
        map: &mut [usize],
        used: &mut [bool],
        compatible: &dyn Fn(usize, usize) -> bool,
    ) -> bool {
        if idx == order.len() {
            return true;
        }
        let x = order[idx];
        for y in 0..g.vertex_count() {
            if used[y] || !compatible(x, y) {
                continue;
            }
            // adjacency with already-assigned vertices must be preserved
            let ok = map
                .iter()
                .enumerate()
                .all(|(w, &img)| img == usize::MAX || g.has_edge(x, w) == g.has_edge(y, img));
            if !ok {
                continue;
            }
            map[x] = y;
            used[y] = true;
            if dfs(g, order, idx + 1, map, used, compatible) {
                return true;
            }
            map[x] = usize::MAX;
            used[y] = false;
        }
        false
    }
    dfs(g, &order, 0, &mut map, &mut used, &compatible)
}

/// Orbit partition of the vertex set under root-fixing automorphisms.
/// Returns an orbit representative per vertex: `x` and `y` share a
/// representative iff some automorphism fixing the root maps `x` to `y`.
pub(crate) fn root_fixing_orbits(g: &Graph, root: usize) -> Vec<usize> {
    let n = g.vertex_count();
    let mut uf = UnionFind::new(n);
    for x in 0..n {
        for y in (x + 1)..n {
            if uf.find(x) == uf.find(y) {
                continue;
            }
            if exists_pinned_automorphism(g, root, x, y) {
                uf.union(x, y);
            }
        }
    }
    let mut rep = vec![0usize; n];
    let mut seen_rep = vec![usize::MAX; n];
    for x in 0..n {
        let r = uf.find(x);
        if seen_rep[r] == usize::MAX {
            seen_rep[r] = x;
        }
        rep[x] = seen_rep[r];
    }
    rep
}
