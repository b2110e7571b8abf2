//! Pattern and genericity checks on symmetric Gram matrices: faithfulness,
//! upper-zero genericity, the Strong Arnold Property, PSD upper nullity
//! witnesses, and the sign rule for dominant terms.

use num_traits::Zero;
use serde::Serialize;

use crate::error::{GraphError, LinalgError};
use crate::graph::Graph;
use crate::linalg::{nullity, nullspace_basis, psd_check, rank_of_rows, PsdVerdict, RationalMatrix, RationalVector};
use crate::ordering::{is_greedy, Ordering};

/// Pairs are stored 0-based and serialized 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PatternVerdict {
    pub is_orthogonal_rep: bool,
    pub is_faithful: bool,
    /// Non-adjacent pairs with a nonzero entry.
    #[serde(serialize_with = "crate::serial::one_based_pairs")]
    pub nonzero_at_non_edges: Vec<(usize, usize)>,
    /// Adjacent pairs with a zero entry.
    #[serde(serialize_with = "crate::serial::one_based_pairs")]
    pub zero_at_edges: Vec<(usize, usize)>,
}

/// Compare the off-diagonal zero pattern of `t` (indexed by vertex) with `g`.
pub fn pattern_check(t: &RationalMatrix, g: &Graph) -> Result<PatternVerdict, LinalgError> {
    let n = g.n();
    if t.rows() != n || t.cols() != n {
        return Err(LinalgError::DimensionMismatch(format!("{}×{} matrix for a graph on {n} vertices", t.rows(), t.cols())));
    }
    t.ensure_symmetric()?;
    let mut nonzero_at_non_edges = Vec::new();
    let mut zero_at_edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let zero = t[(i, j)].is_zero();
            match (g.has_edge(i, j), zero) {
                (false, false) => nonzero_at_non_edges.push((i, j)),
                (true, true) => zero_at_edges.push((i, j)),
                _ => {}
            }
        }
    }
    let is_orthogonal_rep = nonzero_at_non_edges.is_empty();
    Ok(PatternVerdict {
        is_orthogonal_rep,
        is_faithful: is_orthogonal_rep && zero_at_edges.is_empty(),
        nonzero_at_non_edges,
        zero_at_edges,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UpperZeroVerdict {
    pub generic: bool,
    /// First position, in the arranged matrix, with a zero diagonal entry.
    #[serde(serialize_with = "crate::serial::one_based_opt")]
    pub zero_diagonal: Option<usize>,
    /// First column whose above-diagonal zeros pick out dependent rows.
    #[serde(serialize_with = "crate::serial::one_based_opt")]
    pub failing_column: Option<usize>,
}

/// Test whether `a`, rearranged so that row and column `x` hold vertex
/// `ord[x]`, has a nonzero diagonal and, in every column, independent rows
/// at the zero entries above the diagonal.
pub fn is_upper_zero_generic(a: &RationalMatrix, ord: &Ordering) -> Result<UpperZeroVerdict, LinalgError> {
    a.ensure_symmetric()?;
    let n = a.rows();
    if ord.len() != n {
        return Err(LinalgError::DimensionMismatch(format!("ordering of length {} for a {n}×{n} matrix", ord.len())));
    }
    let b = a.permute_symmetric(ord.vertices());
    if let Some(x) = (0..n).find(|&x| b[(x, x)].is_zero()) {
        return Ok(UpperZeroVerdict { generic: false, zero_diagonal: Some(x), failing_column: None });
    }
    for y in 0..n {
        let rows: Vec<RationalVector> = (0..y).filter(|&x| b[(x, y)].is_zero()).map(|x| b.row(x).to_vec()).collect();
        if rank_of_rows(&rows, n) < rows.len() {
            return Ok(UpperZeroVerdict { generic: false, zero_diagonal: None, failing_column: Some(y) });
        }
    }
    Ok(UpperZeroVerdict { generic: true, zero_diagonal: None, failing_column: None })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SapVerdict {
    pub has_sap: bool,
    /// Dimension of the space of admissible `X`.
    pub x_nullity: usize,
    /// A nonzero admissible `X` when the property fails.
    pub witness: Option<RationalMatrix>,
}

/// Off-diagonal zero positions `(i, j)`, `i < j`, in lexicographic order.
fn sap_unknowns(a: &RationalMatrix) -> Vec<(usize, usize)> {
    let n = a.rows();
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| a[(i, j)].is_zero()).collect()
}

fn unknowns_to_matrix(n: usize, unknowns: &[(usize, usize)], x: &[crate::linalg::Rational]) -> RationalMatrix {
    let mut m = RationalMatrix::zeros(n, n);
    for (&(i, j), v) in unknowns.iter().zip(x) {
        m[(i, j)] = v.clone();
        m[(j, i)] = v.clone();
    }
    m
}

/// Decide the Strong Arnold Property: the only symmetric `X` with
/// `A∘X = 0`, `I∘X = 0` and `AX = 0` is zero.
pub fn has_sap(a: &RationalMatrix) -> Result<SapVerdict, LinalgError> {
    a.ensure_symmetric()?;
    let n = a.rows();
    let unknowns = sap_unknowns(a);
    let m = unknowns.len();
    // row (r, c) of the system is entry (r, c) of AX
    let mut system = RationalMatrix::zeros(n * n, m);
    for (p, &(i, j)) in unknowns.iter().enumerate() {
        for r in 0..n {
            system[(r * n + j, p)] = a[(r, i)].clone();
            system[(r * n + i, p)] = a[(r, j)].clone();
        }
    }
    let basis = if m == 0 { Vec::new() } else { nullspace_basis(&system) };
    let witness = basis.first().map(|x| unknowns_to_matrix(n, &unknowns, x));
    Ok(SapVerdict { has_sap: basis.is_empty(), x_nullity: basis.len(), witness })
}

/// Nullity of the admissible `X` space computed by multiplying `A` against
/// each basis matrix of the constrained space; used to cross-check
/// [`has_sap`].
pub fn sap_nullity_by_products(a: &RationalMatrix) -> Result<usize, LinalgError> {
    a.ensure_symmetric()?;
    let n = a.rows();
    let unknowns = sap_unknowns(a);
    if unknowns.is_empty() {
        return Ok(0);
    }
    let mut images = Vec::with_capacity(unknowns.len());
    for &(i, j) in &unknowns {
        let mut e = RationalMatrix::zeros(n, n);
        e[(i, j)] = crate::linalg::rat(1);
        e[(j, i)] = crate::linalg::rat(1);
        let prod = a.mul(&e)?;
        images.push((0..n).flat_map(|r| prod.row(r).to_vec()).collect::<RationalVector>());
    }
    Ok(unknowns.len() - rank_of_rows(&images, n * n))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MpuVerdict {
    pub symmetric: bool,
    pub psd: bool,
    pub upper_zero_generic: bool,
    pub orthogonal_pattern: bool,
    pub faithful_pattern: bool,
    pub passed: bool,
    /// Certified lower bound on the maximum PSD upper nullity when passed.
    pub nullity: usize,
}

/// Check that `a` witnesses the maximum PSD upper nullity of `g` under the
/// supplied arrangement `ord`.
pub fn mpu_witness_check(a: &RationalMatrix, g: &Graph, ord: &Ordering) -> MpuVerdict {
    let n = g.n();
    let shaped = a.rows() == n && a.cols() == n && ord.len() == n;
    let symmetric = shaped && a.asymmetry().is_none();
    let psd = symmetric && psd_check(a).is_ok_and(|c| c.verdict == PsdVerdict::Psd);
    let upper_zero_generic = symmetric && is_upper_zero_generic(a, ord).is_ok_and(|v| v.generic);
    let pattern = if symmetric { pattern_check(a, g).ok() } else { None };
    let orthogonal_pattern = pattern.as_ref().is_some_and(|p| p.is_orthogonal_rep);
    let faithful_pattern = pattern.as_ref().is_some_and(|p| p.is_faithful);
    let passed = psd && upper_zero_generic && faithful_pattern;
    let nullity = if shaped { nullity(a) } else { 0 };
    MpuVerdict { symmetric, psd, upper_zero_generic, orthogonal_pattern, faithful_pattern, passed, nullity }
}

/// Sign of the dominant term of the Gram entry at positions `i < j`:
/// `(−1)^z` with `z` the number of positions strictly between whose
/// vertices are not adjacent to the vertex at `j`.
pub fn predicted_sign(g: &Graph, ord: &Ordering, i: usize, j: usize) -> Result<i8, GraphError> {
    ord.check_for(g)?;
    let n = g.n();
    if i >= j || j >= n {
        return Err(GraphError::Invalid(format!("need 1 ≤ i < j ≤ {n}, got ({}, {})", i + 1, j + 1)));
    }
    if !g.has_edge(ord.vertex(i), ord.vertex(j)) {
        return Err(GraphError::Invalid(format!("positions {} and {} hold non-adjacent vertices", i + 1, j + 1)));
    }
    if !is_greedy(g, ord) {
        return Err(GraphError::Invalid("ordering is not greedy".into()));
    }
    let vj = ord.vertex(j);
    let z = (i + 1..j).filter(|&h| !g.has_edge(ord.vertex(h), vj)).count();
    Ok(if z % 2 == 0 { 1 } else { -1 })
}
