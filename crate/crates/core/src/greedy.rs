//! Greedy (maximum cardinality search) orderings: enumeration, the exact
//! greedegree search and the pair-avoidance decision problem.
//!
//! All searches run over bitmask states and therefore require `n ≤ 64`.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::error::GraphError;
use crate::graph::{Graph, Vertex};
use crate::ordering::Ordering;

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn ensure_small(g: &Graph) -> Result<(), GraphError> {
    if g.n() > 64 {
        Err(GraphError::TooLarge(g.n()))
    } else {
        Ok(())
    }
}

/// Unvisited vertices of maximum local degree with respect to `visited`,
/// ascending.
fn candidates(g: &Graph, visited: u64) -> Vec<Vertex> {
    let n = g.n();
    let mut best = 0u32;
    let mut out = Vec::new();
    for v in 0..n {
        if visited >> v & 1 == 1 {
            continue;
        }
        let score = (g.mask(v) & visited).count_ones();
        if out.is_empty() || score > best {
            best = score;
            out.clear();
            out.push(v);
        } else if score == best {
            out.push(v);
        }
    }
    out
}

/// Lazily enumerates every greedy ordering in lexicographic order of the
/// chosen vertex indices.
pub struct GreedyOrderings<'a> {
    g: &'a Graph,
    stack: Vec<(Vec<Vertex>, usize)>,
    prefix: Vec<Vertex>,
    visited: u64,
    remaining: Option<usize>,
}

pub fn enumerate_greedy_orderings(g: &Graph, limit: Option<usize>) -> Result<GreedyOrderings<'_>, GraphError> {
    ensure_small(g)?;
    Ok(GreedyOrderings {
        g,
        stack: vec![(candidates(g, 0), 0)],
        prefix: Vec::new(),
        visited: 0,
        remaining: limit,
    })
}

impl Iterator for GreedyOrderings<'_> {
    type Item = Ordering;

    fn next(&mut self) -> Option<Ordering> {
        if self.remaining == Some(0) {
            return None;
        }
        let n = self.g.n();
        while let Some((cands, idx)) = self.stack.last_mut() {
            if *idx == cands.len() {
                self.stack.pop();
                if let Some(v) = self.prefix.pop() {
                    self.visited &= !(1 << v);
                }
                continue;
            }
            let v = cands[*idx];
            *idx += 1;
            self.prefix.push(v);
            self.visited |= 1 << v;
            if self.prefix.len() == n {
                let out = Ordering::new(self.prefix.clone()).expect("dfs yields permutations");
                self.prefix.pop();
                self.visited &= !(1 << v);
                if let Some(r) = self.remaining.as_mut() {
                    *r -= 1;
                }
                return Some(out);
            }
            let next = candidates(self.g, self.visited);
            self.stack.push((next, 0));
        }
        None
    }
}

/// Twin classes: vertices with identical neighbourhoods outside the pair
/// itself. Swapping two twins is an automorphism, so searches only need to
/// branch on the smallest unvisited member of each class.
fn twin_representatives(g: &Graph, pinned: &[Vertex]) -> Vec<u64> {
    let n = g.n();
    let mut earlier_twins = vec![0u64; n];
    for u in 0..n {
        for v in u + 1..n {
            if pinned.contains(&u) || pinned.contains(&v) {
                continue;
            }
            let strip = !((1u64 << u) | (1u64 << v));
            if g.mask(u) & strip == g.mask(v) & strip {
                earlier_twins[v] |= 1 << u;
            }
        }
    }
    earlier_twins
}

fn pruned_candidates(g: &Graph, visited: u64, twins: &[u64]) -> Vec<Vertex> {
    candidates(g, visited)
        .into_iter()
        .filter(|&v| twins[v] & !visited == 0)
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct GreedegreeResult {
    pub value: usize,
    pub witness: Ordering,
    /// Number of distinct search states expanded.
    pub explored: u64,
}

struct DegreeSearch<'a> {
    g: &'a Graph,
    full: u64,
    degrees: Vec<usize>,
    twins: Vec<u64>,
    memo: HashMap<u64, usize>,
    explored: u64,
}

impl DegreeSearch<'_> {
    fn solve(&mut self, visited: u64) -> usize {
        let rest = self.full & !visited;
        if rest.count_ones() == 1 {
            return self.degrees[rest.trailing_zeros() as usize];
        }
        if let Some(&v) = self.memo.get(&visited) {
            return v;
        }
        self.explored += 1;
        let bound = (0..self.g.n())
            .filter(|&v| rest >> v & 1 == 1)
            .map(|v| self.degrees[v])
            .max()
            .unwrap_or(0);
        let mut best = 0;
        for c in pruned_candidates(self.g, visited, &self.twins) {
            best = best.max(self.solve(visited | 1 << c));
            if best == bound {
                break;
            }
        }
        self.memo.insert(visited, best);
        best
    }
}

/// Maximum degree of a final vertex over all greedy orderings, with the
/// lexicographically first greedy ordering that attains it.
pub fn greedegree(g: &Graph) -> Result<GreedegreeResult, GraphError> {
    ensure_small(g)?;
    let n = g.n();
    let mut s = DegreeSearch {
        g,
        full: full_mask(n),
        degrees: g.degrees(),
        twins: twin_representatives(g, &[]),
        memo: HashMap::new(),
        explored: 0,
    };
    if n == 1 {
        return Ok(GreedegreeResult {
            value: 0,
            witness: Ordering::identity(1),
            explored: 0,
        });
    }
    let value = s.solve(0);
    // Witness reconstruction branches on every candidate, so the emitted
    // ordering does not depend on twin pruning.
    let mut visited = 0u64;
    let mut perm = Vec::with_capacity(n);
    while perm.len() < n {
        let next = candidates(g, visited)
            .into_iter()
            .find(|&c| {
                let state = visited | 1 << c;
                state == s.full || s.solve(state) == value
            })
            .expect("memoised optimum is reachable");
        perm.push(next);
        visited |= 1 << next;
    }
    let witness = Ordering::new(perm).expect("search yields a permutation");
    Ok(GreedegreeResult {
        value,
        witness,
        explored: s.explored,
    })
}

/// Same as [`greedegree`] but without twin pruning; used to cross-check.
pub fn greedegree_unpruned(g: &Graph) -> Result<usize, GraphError> {
    ensure_small(g)?;
    let n = g.n();
    if n == 1 {
        return Ok(0);
    }
    let mut s = DegreeSearch {
        g,
        full: full_mask(n),
        degrees: g.degrees(),
        twins: vec![0; n],
        memo: HashMap::new(),
        explored: 0,
    };
    Ok(s.solve(0))
}

#[derive(Clone, Debug, Serialize)]
pub struct PairAvoidResult {
    pub avoidable: bool,
    pub witness: Option<Ordering>,
    pub explored: u64,
}

/// Decide whether some greedy ordering ends with a vertex other than `a`
/// and `b`.
pub fn pair_avoid(g: &Graph, a: Vertex, b: Vertex) -> Result<PairAvoidResult, GraphError> {
    ensure_small(g)?;
    let n = g.n();
    for v in [a, b] {
        if v >= n {
            return Err(GraphError::VertexOutOfRange { vertex: v, n });
        }
    }
    if a == b {
        return Err(GraphError::Invalid("pair_avoid needs two distinct vertices".into()));
    }
    let twins = twin_representatives(g, &[a, b]);
    let full = full_mask(n);
    let mut dead: HashSet<u64> = HashSet::new();
    let mut path = Vec::with_capacity(n);
    let mut explored = 0;

    fn dfs(
        g: &Graph,
        full: u64,
        pair: (Vertex, Vertex),
        twins: &[u64],
        visited: u64,
        path: &mut Vec<Vertex>,
        dead: &mut HashSet<u64>,
        explored: &mut u64,
    ) -> bool {
        let rest = full & !visited;
        if rest.count_ones() == 1 {
            let last = rest.trailing_zeros() as usize;
            if last != pair.0 && last != pair.1 {
                path.push(last);
                return true;
            }
            return false;
        }
        if dead.contains(&visited) {
            return false;
        }
        *explored += 1;
        for c in pruned_candidates(g, visited, twins) {
            path.push(c);
            if dfs(g, full, pair, twins, visited | 1 << c, path, dead, explored) {
                return true;
            }
            path.pop();
        }
        dead.insert(visited);
        false
    }

    let found = if n == 1 {
        false
    } else {
        dfs(g, full, (a, b), &twins, 0, &mut path, &mut dead, &mut explored)
    };
    let witness = found.then(|| Ordering::new(path).expect("dfs yields a permutation"));
    Ok(PairAvoidResult {
        avoidable: found,
        witness,
        explored,
    })
}
