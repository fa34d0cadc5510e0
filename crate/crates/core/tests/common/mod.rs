#![allow(dead_code)]

//! Shared oracles for integration tests: brute-force rooted isomorphism
//! (independent of the library's canonical-form machinery) and seeded
//! random bounded-degree graph samples.

use graphlim_core::graph::{Graph, RootedGraph};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Decides rooted isomorphism by backtracking over root-fixing bijections,
/// pruned by degree only. Ground truth for the canonicalization tests.
pub fn brute_rooted_isomorphic(a: &RootedGraph, b: &RootedGraph) -> bool {
    let (ga, gb) = (&a.graph, &b.graph);
    let n = ga.vertex_count();
    if n != gb.vertex_count() || ga.edge_count() != gb.edge_count() {
        return false;
    }
    if ga.degree(a.root) != gb.degree(b.root) {
        return false;
    }
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    map[a.root] = b.root;
    used[b.root] = true;
    let order: Vec<usize> = {
        // BFS order from the root so每 assignments hit constraints early
        let mut order = vec![a.root];
        let mut seen = vec![false; n];
        seen[a.root] = true;
        let mut idx = 0;
        while idx < order.len() {
            let v = order[idx];
            idx += 1;
            for &w in ga.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    order.push(w);
                }
            }
        }
        for v in 0..n {
            if !seen[v] {
                order.push(v);
            }
        }
        order
    };

    fn extend(
        ga: &Graph,
        gb: &Graph,
        order: &[usize],
        idx: usize,
        map: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if idx == order.len() {
            return true;
        }
        let v = order[idx];
        if map[v] != usize::MAX {
            return extend(ga, gb, order, idx + 1, map, used);
        }
        for u in 0..gb.vertex_count() {
            if used[u] || ga.degree(v) != gb.degree(u) {
                continue;
            }
            let consistent = (0..ga.vertex_count())
                .all(|w| map[w] == usize::MAX || ga.has_edge(v, w) == gb.has_edge(u, map[w]));
            if !consistent {
                continue;
            }
            map[v] = u;
            used[u] = true;
            if extend(ga, gb, order, idx + 1, map, used) {
                return true;
            }
            map[v] = usize::MAX;
            used[u] = false;
        }
        false
    }
    extend(ga, gb, &order, 0, &mut map, &mut used)
}

/// Seeded random graph with max degree at most `d` on `n` vertices.
pub fn random_bounded_graph(n: usize, d: usize, rng: &mut ChaCha8Rng, edge_prob: f64) -> Graph {
    loop {
        let mut degrees = vec![0usize; n];
        let mut edges = Vec::new();
        let mut pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
            .collect();
        use rand::seq::SliceRandom;
        pairs.shuffle(rng);
        for (u, v) in pairs {
            if degrees[u] < d && degrees[v] < d && rng.gen_bool(edge_prob) {
                degrees[u] += 1;
                degrees[v] += 1;
                edges.push((u, v));
            }
        }
        if let Ok(g) = Graph::new(n, d, &edges) {
            return g;
        }
    }
}

/// Seeded random CONNECTED graph with max degree at most `d`.
pub fn random_connected_graph(n: usize, d: usize, rng: &mut ChaCha8Rng, edge_prob: f64) -> Graph {
    loop {
        let g = random_bounded_graph(n, d, rng, edge_prob);
        if g.connected_components().len() == 1 {
            return g;
        }
    }
}
