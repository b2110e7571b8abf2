//! Uniform LSS: vectors are chosen one vertex at a time along an ordering,
//! each orthogonal to the earlier non-neighbours, and the run is judged
//! exactly for weak and strong success.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::LssError;
use crate::garden::poly::{eval_node_variable, Family, VariableValues};
use crate::graph::{Graph, GraphSummary};
use crate::greedy::greedegree;
use crate::linalg::{gram, independent, is_zero_vector, nullity, orthogonal_complement, rank, rat, Rational, RationalMatrix, RationalVector};
use crate::ordering::Ordering;
use crate::props::{pattern_check, PatternVerdict};

/// Default bound on the integer coefficients drawn for each vector.
pub const DEFAULT_BOUND: u64 = 1_000_000;

/// Reseeds allowed after the first attempt of the witness pipeline.
pub const MAX_RESEEDS: usize = 8;

const RESEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

/// How each nonzero vector is picked from its allowed subspace.
#[derive(Clone, Copy, Debug)]
pub enum Chooser<'a> {
    /// Integer combination of the exact complement basis, coefficients
    /// uniform in `[−bound, bound]`.
    Grid { seed: u64, bound: u64 },
    /// Alternating node-variable formula with fixed values substituted.
    NodeValues(&'a VariableValues),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroReason {
    DependentPredecessors,
    NoRoom,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LssStep {
    #[serde(serialize_with = "crate::serial::one_based")]
    pub position: usize,
    #[serde(serialize_with = "crate::serial::one_based")]
    pub vertex: usize,
    /// Positions of earlier non-neighbours.
    #[serde(serialize_with = "crate::serial::one_based_vec")]
    pub wlist: Vec<usize>,
    /// Dimension of the allowed subspace; zero when the predecessors are dependent.
    pub complement_dim: usize,
    pub zero: Option<ZeroReason>,
    /// Coefficients on the complement basis (grid chooser only).
    pub coefficients: Vec<i64>,
    pub redraws: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LssRun {
    #[serde(serialize_with = "serialize_graph")]
    pub graph: Graph,
    pub ordering: Ordering,
    pub d: usize,
    pub seed: Option<u64>,
    pub bound: Option<u64>,
    /// `d × n`, column `v` is the vector of vertex `v`.
    pub r: RationalMatrix,
    /// Gram matrix indexed by vertex.
    pub t: RationalMatrix,
    pub steps: Vec<LssStep>,
}

fn serialize_graph<S: serde::Serializer>(g: &Graph, s: S) -> Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&GraphSummary::from(g), s)
}

impl LssRun {
    /// Vector of the vertex at position `p`.
    pub fn column_at(&self, p: usize) -> RationalVector {
        self.r.column(self.ordering.vertex(p))
    }
}

/// Run uniform LSS along `ord` in dimension `d`.
pub fn uniform_lss(g: &Graph, ord: &Ordering, d: usize, chooser: Chooser<'_>) -> Result<LssRun, LssError> {
    if d == 0 {
        return Err(LssError::ZeroDimension);
    }
    ord.check_for(g).map_err(|e| LssError::OrderingMismatch(e.to_string()))?;
    let (seed, bound) = match chooser {
        Chooser::Grid { bound: 0, .. } => return Err(LssError::ZeroBound),
        Chooser::Grid { seed, bound } => (Some(seed), Some(bound)),
        Chooser::NodeValues(_) => (None, None),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(0));
    let n = g.n();
    let mut cols: Vec<RationalVector> = Vec::with_capacity(n);
    let mut steps = Vec::with_capacity(n);
    for j in 0..n {
        let wlist = ord.wlist(g, j);
        let w: Vec<RationalVector> = wlist.iter().map(|&p| cols[p].clone()).collect();
        let mut step = LssStep {
            position: j,
            vertex: ord.vertex(j),
            wlist: wlist.clone(),
            complement_dim: 0,
            zero: None,
            coefficients: Vec::new(),
            redraws: 0,
        };
        let col = if !independent(&w, d) {
            step.zero = Some(ZeroReason::DependentPredecessors);
            vec![rat(0); d]
        } else {
            step.complement_dim = d - w.len();
            if step.complement_dim == 0 {
                step.zero = Some(ZeroReason::NoRoom);
                vec![rat(0); d]
            } else {
                match chooser {
                    Chooser::Grid { bound, .. } => grid_vector(&w, d, bound, &mut rng, &mut step)?,
                    Chooser::NodeValues(values) => node_value_vector(&w, j, d, values)?,
                }
            }
        };
        cols.push(col);
        steps.push(step);
    }
    let mut by_vertex = vec![Vec::new(); n];
    for (p, col) in cols.into_iter().enumerate() {
        by_vertex[ord.vertex(p)] = col;
    }
    let r = RationalMatrix::from_columns(&by_vertex, d)?;
    let t = gram(&r);
    Ok(LssRun { graph: g.clone(), ordering: ord.clone(), d, seed, bound, r, t, steps })
}

fn grid_vector(
    w: &[RationalVector],
    d: usize,
    bound: u64,
    rng: &mut ChaCha8Rng,
    step: &mut LssStep,
) -> Result<RationalVector, LssError> {
    let basis = orthogonal_complement(w, d)?;
    let b = i64::try_from(bound).map_err(|_| LssError::ZeroBound)?;
    loop {
        let coeffs: Vec<i64> = basis.iter().map(|_| rng.random_range(-b..=b)).collect();
        let mut v = vec![rat(0); d];
        for (c, u) in coeffs.iter().zip(&basis) {
            if *c != 0 {
                let c = rat(*c);
                for (x, y) in v.iter_mut().zip(u) {
                    *x += &c * y;
                }
            }
        }
        if !is_zero_vector(&v) {
            step.coefficients = coeffs;
            return Ok(v);
        }
        step.redraws += 1;
    }
}

/// Entry `s` sums, over distinct labels `s_1, …, s_k` avoiding `s`, the
/// signed family value at the sorted labels times `Π W_m[s_m]`.
fn node_value_vector(w: &[RationalVector], j: usize, d: usize, values: &VariableValues) -> Result<RationalVector, LssError> {
    let fam = Family::try_from(j).map_err(|_| LssError::MissingValue(format!("family for position {}", j + 1)))?;
    let mut out = vec![rat(0); d];
    for (s, entry) in out.iter_mut().enumerate() {
        let mut labels = Vec::with_capacity(w.len() + 1);
        node_value_sum(w, fam, s, d, 1 << s, &mut labels, &rat(1), values, entry)?;
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn node_value_sum(
    w: &[RationalVector],
    fam: Family,
    s: usize,
    d: usize,
    used: u64,
    labels: &mut Vec<usize>,
    partial: &Rational,
    values: &VariableValues,
    out: &mut Rational,
) -> Result<(), LssError> {
    let m = labels.len();
    if m == w.len() {
        labels.push(s);
        let evaluated = eval_node_variable(fam, labels, d).map_err(|e| LssError::MissingValue(e.to_string()))?;
        labels.pop();
        let (sign, var) = evaluated.expect("labels are distinct");
        let x = values.get(&var).ok_or_else(|| LssError::MissingValue(var.to_string()))?;
        let term = partial * x;
        if sign > 0 {
            *out += term;
        } else {
            *out -= term;
        }
        return Ok(());
    }
    for l in 0..d {
        if used >> l & 1 == 1 || w[m][l].is_zero() {
            continue;
        }
        let next = partial * &w[m][l];
        labels.push(l);
        node_value_sum(w, fam, s, d, used | 1 << l, labels, &next, values, out)?;
        labels.pop();
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuccessReport {
    pub weak: bool,
    pub strong: bool,
    /// First `(j, i)`, `i < j` adjacent, whose enlarged predecessor set is dependent.
    #[serde(serialize_with = "crate::serial::one_based_opt_pair")]
    pub failing_pair: Option<(usize, usize)>,
    /// Nullity of the Gram matrix.
    pub codimension: usize,
}

/// Judge a run exactly on its own vectors.
pub fn detect_success(run: &LssRun) -> SuccessReport {
    let (g, ord, d) = (&run.graph, &run.ordering, run.d);
    let n = g.n();
    let cols: Vec<RationalVector> = (0..n).map(|p| run.column_at(p)).collect();
    let gather = |ps: &[usize]| ps.iter().map(|&p| cols[p].clone()).collect::<Vec<_>>();
    let weak = (0..n).all(|j| {
        let w = ord.wlist(g, j);
        !is_zero_vector(&cols[j]) && w.len() < d && independent(&gather(&w), d)
    });
    let mut failing_pair = None;
    'outer: for j in 0..n {
        let w = ord.wlist(g, j);
        for i in 0..j {
            if !g.has_edge(ord.vertex(i), ord.vertex(j)) {
                continue;
            }
            let mut wi = w.clone();
            wi.push(i);
            if !independent(&gather(&wi), d) {
                failing_pair = Some((j, i));
                break 'outer;
            }
        }
    }
    SuccessReport { weak, strong: weak && failing_pair.is_none(), failing_pair, codimension: nullity(&run.t) }
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub greedegree: usize,
    pub run: LssRun,
    pub report: SuccessReport,
    pub pattern: PatternVerdict,
    /// Attempts made, including the successful one.
    pub attempts: usize,
    pub rank: usize,
}

/// Seed used for attempt `a` (0-based) of the witness pipeline.
pub fn attempt_seed(seed: u64, a: usize) -> u64 {
    seed.wrapping_add((a as u64).wrapping_mul(RESEED_STRIDE))
}

/// Run uniform LSS along an optimal greedy ordering at
/// `d = n − deg(last vertex)`, reseeding until the run succeeds strongly
/// with a faithful Gram matrix.
pub fn main_theorem_witness(g: &Graph, seed: u64, bound: u64) -> Result<Witness, LssError> {
    let gd = greedegree(g)?;
    let ord = gd.witness;
    let d = g.n() - g.degree(ord.last());
    for a in 0..=MAX_RESEEDS {
        let run = uniform_lss(g, &ord, d, Chooser::Grid { seed: attempt_seed(seed, a), bound })?;
        let report = detect_success(&run);
        let pattern = pattern_check(&run.t, g)?;
        if report.strong && pattern.is_faithful {
            let rank = rank(&run.r);
            return Ok(Witness { greedegree: gd.value, run, report, pattern, attempts: a + 1, rank });
        }
    }
    Err(LssError::Degenerate { attempts: MAX_RESEEDS + 1 })
}
