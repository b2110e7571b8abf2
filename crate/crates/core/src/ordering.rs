//! Vertex orderings and the quantities derived from them.
//!
//! Positions are 0-based here: position `p` holds vertex `order.vertex(p)`.
//! A "stage" `i` refers to the prefix of positions `0..i`.

use serde::{Deserialize, Serialize};

use crate::error::GraphError;
use crate::graph::{Graph, Vertex};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Ordering {
    perm: Vec<Vertex>,
    pos: Vec<usize>,
}

impl Ordering {
    pub fn new(perm: Vec<Vertex>) -> Result<Self, GraphError> {
        let n = perm.len();
        let mut pos = vec![usize::MAX; n];
        for (p, &v) in perm.iter().enumerate() {
            if v >= n {
                return Err(GraphError::BadOrdering(format!("vertex {} out of range", v + 1)));
            }
            if pos[v] != usize::MAX {
                return Err(GraphError::BadOrdering(format!("vertex {} repeated", v + 1)));
            }
            pos[v] = p;
        }
        Ok(Self { perm, pos })
    }

    /// Parse a 1-based, comma- or space-separated vertex list.
    pub fn parse_one_based(text: &str) -> Result<Self, GraphError> {
        let perm = text
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| match s.parse::<usize>() {
                Ok(v) if v >= 1 => Ok(v - 1),
                _ => Err(GraphError::BadOrdering(format!("bad vertex label {s:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(perm)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            perm: (0..n).collect(),
            pos: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.perm
    }

    pub fn vertex(&self, p: usize) -> Vertex {
        self.perm[p]
    }

    pub fn position(&self, v: Vertex) -> usize {
        self.pos[v]
    }

    pub fn last(&self) -> Vertex {
        *self.perm.last().expect("orderings are non-empty")
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.perm.iter().map(|v| v + 1).collect()
    }

    pub fn check_for(&self, g: &Graph) -> Result<(), GraphError> {
        if self.len() != g.n() {
            return Err(GraphError::BadOrdering(format!(
                "ordering has {} entries, graph has {} vertices",
                self.len(),
                g.n()
            )));
        }
        Ok(())
    }

    /// Positions earlier than `j` whose vertices are non-adjacent to the
    /// vertex at `j`, in position order.
    pub fn wlist(&self, g: &Graph, j: usize) -> Vec<usize> {
        let vj = self.perm[j];
        (0..j).filter(|&h| !g.has_edge(self.perm[h], vj)).collect()
    }

    /// `|wlist(j)|`.
    pub fn kk(&self, g: &Graph, j: usize) -> usize {
        let vj = self.perm[j];
        (0..j).filter(|&h| !g.has_edge(self.perm[h], vj)).count()
    }

    pub fn kk_all(&self, g: &Graph) -> Vec<usize> {
        (0..self.len()).map(|j| self.kk(g, j)).collect()
    }
}

impl TryFrom<Vec<usize>> for Ordering {
    type Error = GraphError;

    fn try_from(one_based: Vec<usize>) -> Result<Self, Self::Error> {
        let perm = one_based
            .into_iter()
            .map(|v| v.checked_sub(1).ok_or_else(|| GraphError::BadOrdering("label 0".into())))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(perm)
    }
}

impl From<Ordering> for Vec<usize> {
    fn from(o: Ordering) -> Self {
        o.one_based()
    }
}

/// Number of neighbours of the vertex at position `j` among positions
/// `0..i`. Requires `i ≤ j < n`.
pub fn local_degree(g: &Graph, ord: &Ordering, i: usize, j: usize) -> Result<usize, GraphError> {
    let n = g.n();
    if ord.len() != n || i > j || j >= n {
        return Err(GraphError::IndexOutOfRange { stage: i, position: j, n });
    }
    let vj = ord.vertex(j);
    Ok((0..i).filter(|&h| g.has_edge(ord.vertex(h), vj)).count())
}

/// Stagewise test: at every stage the chosen vertex has maximum local
/// degree among all not-yet-chosen vertices.
pub fn is_greedy(g: &Graph, ord: &Ordering) -> bool {
    stagewise(g, ord, |chosen, other| chosen >= other)
}

/// Stagewise test in `h`: the chosen vertex has minimum local degree.
pub fn is_anti_greedy(h: &Graph, ord: &Ordering) -> bool {
    stagewise(h, ord, |chosen, other| chosen <= other)
}

fn stagewise(g: &Graph, ord: &Ordering, ok: impl Fn(usize, usize) -> bool) -> bool {
    let n = g.n();
    if ord.len() != n {
        return false;
    }
    // local[j] = local degree of position j at the current stage
    let mut local = vec![0usize; n];
    for i in 0..n {
        if (i + 1..n).any(|j| !ok(local[i], local[j])) {
            return false;
        }
        let vi = ord.vertex(i);
        for (j, l) in local.iter_mut().enumerate().skip(i + 1) {
            if g.has_edge(vi, ord.vertex(j)) {
                *l += 1;
            }
        }
    }
    true
}

/// Whether `prefix` (a sequence of distinct vertices) is the start of some
/// greedy ordering of `g`.
pub fn is_greedy_prefix(g: &Graph, prefix: &[Vertex]) -> bool {
    let n = g.n();
    let mut chosen = vec![false; n];
    for &v in prefix {
        if v >= n || chosen[v] {
            return false;
        }
        let score = |u: Vertex| prefix_score(g, &chosen, u);
        let best = (0..n).filter(|&u| !chosen[u]).map(score).max().unwrap_or(0);
        if score(v) != best {
            return false;
        }
        chosen[v] = true;
    }
    true
}

fn prefix_score(g: &Graph, chosen: &[bool], u: Vertex) -> usize {
    chosen
        .iter()
        .enumerate()
        .filter(|&(w, &c)| c && g.has_edge(u, w))
        .count()
}
