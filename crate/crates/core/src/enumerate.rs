//! Exhaustive generation of small graphs up to isomorphism.
//!
//! Graphs on `n` vertices are produced by attaching a new vertex with every
//! possible neighbourhood to each graph on `n - 1` vertices and keeping one
//! representative per canonical form. Intended for `n ≤ 8`.

use std::collections::BTreeSet;

use crate::graph::Graph;

/// Upper-triangle adjacency bits of `g` under `perm`, as one integer.
fn code(g: &Graph, perm: &[usize]) -> u64 {
    let n = perm.len();
    let mut c = 0u64;
    for j in 1..n {
        for i in 0..j {
            c = c << 1 | g.has_edge(perm[i], perm[j]) as u64;
        }
    }
    c
}

/// Canonical code: the maximum code over relabelings that list vertices by
/// ascending degree. Degree cells are permuted internally only.
pub fn canonical_code(g: &Graph) -> u64 {
    let n = g.n();
    assert!(n <= 11, "canonical codes are limited to 11 vertices");
    let degs = g.degrees();
    let mut verts: Vec<usize> = (0..n).collect();
    verts.sort_by_key(|&v| degs[v]);
    let mut cells: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=n {
        if i == n || degs[verts[i]] != degs[verts[start]] {
            cells.push((start, i));
            start = i;
        }
    }
    let mut best = 0u64;
    permute_cells(g, &mut verts, &cells, 0, &mut best);
    best
}

fn permute_cells(g: &Graph, verts: &mut Vec<usize>, cells: &[(usize, usize)], cell: usize, best: &mut u64) {
    if cell == cells.len() {
        *best = (*best).max(code(g, verts));
        return;
    }
    let (lo, hi) = cells[cell];
    heap_permute(g, verts, cells, cell, lo, hi - lo, best);
}

fn heap_permute(
    g: &Graph,
    verts: &mut Vec<usize>,
    cells: &[(usize, usize)],
    cell: usize,
    lo: usize,
    k: usize,
    best: &mut u64,
) {
    if k <= 1 {
        permute_cells(g, verts, cells, cell + 1, best);
        return;
    }
    for i in 0..k {
        heap_permute(g, verts, cells, cell, lo, k - 1, best);
        if k.is_multiple_of(2) {
            verts.swap(lo + i, lo + k - 1);
        } else {
            verts.swap(lo, lo + k - 1);
        }
    }
}

/// One representative of every isomorphism class of graphs on `n`
/// vertices, in a deterministic order.
pub fn graphs(n: usize) -> Vec<Graph> {
    assert!((1..=8).contains(&n), "enumeration supports 1..=8 vertices");
    let mut layer = vec![Graph::new(1).expect("one vertex")];
    for m in 2..=n {
        let mut seen = BTreeSet::new();
        let mut next = Vec::new();
        for base in &layer {
            for nbrs in 0u32..1 << (m - 1) {
                let mut g = Graph::from_edges(m, base.edges()).expect("valid edges");
                for u in 0..m - 1 {
                    if nbrs >> u & 1 == 1 {
                        g.add_edge(u, m - 1).expect("valid edge");
                    }
                }
                let c = canonical_code(&g);
                if seen.insert(c) {
                    next.push((c, g));
                }
            }
        }
        next.sort_by_key(|(c, _)| *c);
        layer = next.into_iter().map(|(_, g)| g).collect();
    }
    layer
}

pub fn connected_graphs(n: usize) -> Vec<Graph> {
    graphs(n).into_iter().filter(Graph::is_connected).collect()
}

/// All labelled graphs on `n ≤ 6` vertices.
pub fn labeled_graphs(n: usize) -> impl Iterator<Item = Graph> {
    assert!((1..=6).contains(&n));
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
    let total = 1u64 << pairs.len();
    (0..total).map(move |bits| {
        Graph::from_edges(n, pairs.iter().enumerate().filter(|(k, _)| bits >> k & 1 == 1).map(|(_, &e)| e))
            .expect("valid edges")
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_counts() {
        let all = [1, 2, 4, 11, 34, 156];
        let conn = [1, 1, 2, 6, 21, 112];
        for n in 1..=6 {
            let gs = graphs(n);
            assert_eq!(gs.len(), all[n - 1], "n = {n}");
            assert_eq!(gs.iter().filter(|g| g.is_connected()).count(), conn[n - 1], "n = {n}");
        }
    }

    #[test]
    fn canonical_code_is_invariant() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (1, 4)]).unwrap();
        let h = g.relabel(&[4, 2, 0, 3, 1]);
        assert_eq!(canonical_code(&g), canonical_code(&h));
        assert_ne!(canonical_code(&g), canonical_code(&Graph::path(5).unwrap()));
    }

    #[test]
    fn labeled_count() {
        assert_eq!(labeled_graphs(4).count(), 64);
    }
}
