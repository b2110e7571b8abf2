//! Gardens that model uniform LSS, and a bottom-up evaluation of their
//! columns that shares subtrees instead of enumerating indexings.
//!
//! Family ids are ordering positions: the node for the vertex at position
//! `u` carries family `u`.

use super::diagram::{Garden, GardenKind, Tree};
use super::poly::{eval_node_variable, Family, Monomial, Poly};
use crate::error::GardenError;
use crate::graph::Graph;
use crate::ordering::Ordering;

/// Default cap on the number of monomials in any one polynomial.
pub const DEFAULT_MONOMIAL_BUDGET: usize = 1_000_000;

/// Cap on the number of nodes of an explicitly built garden.
pub const MAX_GARDEN_NODES: usize = 1 << 20;

fn family(u: usize) -> Result<Family, GardenError> {
    Family::try_from(u).map_err(|_| GardenError::Precondition(format!("position {u} exceeds the family id range")))
}

/// Nodes in the vector garden of each position.
pub fn lss_node_counts(g: &Graph, ord: &Ordering) -> Vec<u128> {
    let mut counts: Vec<u128> = Vec::with_capacity(g.n());
    for j in 0..g.n() {
        let c = 1 + ord.wlist(g, j).iter().map(|&w| counts[w]).sum::<u128>();
        counts.push(c);
    }
    counts
}

fn lss_tree(g: &Graph, ord: &Ordering, j: usize) -> Result<Tree, GardenError> {
    let children = ord.wlist(g, j).into_iter().map(|w| lss_tree(g, ord, w)).collect::<Result<_, _>>()?;
    Ok(Tree::node(family(j)?, children))
}

fn check(g: &Graph, ord: &Ordering, positions: &[usize]) -> Result<(), GardenError> {
    ord.check_for(g)?;
    if let Some(&p) = positions.iter().find(|&&p| p >= g.n()) {
        return Err(GardenError::Precondition(format!("position {} outside 1..={}", p + 1, g.n())));
    }
    Ok(())
}

/// Vector garden whose value is the symbolic LSS column at position `j`.
pub fn lss_vector_garden(g: &Graph, ord: &Ordering, j: usize) -> Result<Garden, GardenError> {
    check(g, ord, &[j])?;
    if lss_node_counts(g, ord)[j] > MAX_GARDEN_NODES as u128 {
        return Err(GardenError::Budget { what: "garden node", limit: MAX_GARDEN_NODES as u64 });
    }
    Garden::from_trees(GardenKind::Vector, vec![lss_tree(g, ord, j)?])
}

/// Scalar garden for the Gram entry at positions `(i, j)`; the top for `j`
/// sits left of the uppermost conduit.
pub fn lss_scalar_garden(g: &Graph, ord: &Ordering, i: usize, j: usize) -> Result<Garden, GardenError> {
    check(g, ord, &[i, j])?;
    let counts = lss_node_counts(g, ord);
    if counts[i] + counts[j] > MAX_GARDEN_NODES as u128 {
        return Err(GardenError::Budget { what: "garden node", limit: MAX_GARDEN_NODES as u64 });
    }
    Garden::from_trees(GardenKind::Scalar, vec![lss_tree(g, ord, j)?, lss_tree(g, ord, i)?])
}

/// Symbolic columns in position order. Column `j`, entry `s`, is the sum
/// over distinct index tuples `(s_1, …, s_k)` avoiding `s` of the family
/// variable at `(s_1, …, s_k; s)` times the entries `s_m` of the earlier
/// columns listed in `W_j`.
pub fn symbolic_columns(g: &Graph, ord: &Ordering, d: usize, budget: usize) -> Result<Vec<Vec<Poly>>, GardenError> {
    ord.check_for(g)?;
    if d == 0 || d > 64 {
        return Err(GardenError::Precondition(format!("dimension {d} outside 1..=64")));
    }
    let n = g.n();
    let mut cols: Vec<Vec<Poly>> = Vec::with_capacity(n);
    for j in 0..n {
        let w = ord.wlist(g, j);
        let mut col = vec![Poly::zero(); d];
        if w.len() < d {
            let fam = family(j)?;
            for (s, entry) in col.iter_mut().enumerate() {
                let mut labels = Vec::with_capacity(w.len() + 1);
                expand(&cols, &w, fam, s, d, budget, 1 << s, &mut labels, &Poly::constant(1), entry)?;
            }
        }
        cols.push(col);
    }
    Ok(cols)
}

#[allow(clippy::too_many_arguments)]
fn expand(
    cols: &[Vec<Poly>],
    w: &[usize],
    fam: Family,
    s: usize,
    d: usize,
    budget: usize,
    used: u64,
    labels: &mut Vec<usize>,
    partial: &Poly,
    out: &mut Poly,
) -> Result<(), GardenError> {
    let m = labels.len();
    if m == w.len() {
        labels.push(s);
        let (sign, var) = eval_node_variable(fam, labels, d)?.expect("labels are distinct");
        labels.pop();
        out.add_assign(&partial.mul_term(sign as i64, &Monomial::from_vars([var]))?)?;
        if out.len() > budget {
            return Err(GardenError::Budget { what: "monomial", limit: budget as u64 });
        }
        return Ok(());
    }
    for l in 0..d {
        if used >> l & 1 == 1 {
            continue;
        }
        let entry = &cols[w[m]][l];
        if entry.is_zero() {
            continue;
        }
        let next = partial.mul(entry, budget)?;
        labels.push(l);
        expand(cols, w, fam, s, d, budget, used | 1 << l, labels, &next, out)?;
        labels.pop();
    }
    Ok(())
}

/// Inner product of two symbolic columns.
pub fn symbolic_inner(a: &[Poly], b: &[Poly], budget: usize) -> Result<Poly, GardenError> {
    let mut acc = Poly::zero();
    for (x, y) in a.iter().zip(b) {
        acc.add_assign(&x.mul(y, budget)?)?;
        if acc.len() > budget {
            return Err(GardenError::Budget { what: "monomial", limit: budget as u64 });
        }
    }
    Ok(acc)
}
