//! Formula graphs: a CNF formula becomes a dense graph in which two
//! low-degree vertices can both be kept away from the end of a greedy
//! ordering exactly when the formula is satisfiable.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use crate::error::ReductionError;
use crate::graph::{Graph, Vertex};
use crate::greedy::pair_avoid;
use crate::io::to_graph6;
use crate::linalg::{rat, Rational};
use crate::ordering::{is_greedy, is_greedy_prefix, Ordering};

/// A literal: 1-based atom and polarity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Literal {
    pub atom: usize,
    pub positive: bool,
}

impl Literal {
    fn from_dimacs(x: i64) -> Self {
        Self { atom: x.unsigned_abs() as usize, positive: x > 0 }
    }

    fn to_dimacs(self) -> i64 {
        let a = self.atom as i64;
        if self.positive {
            a
        } else {
            -a
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CnfFormula {
    /// Number of atoms; atoms are `1..=t`.
    pub t: usize,
    pub clauses: Vec<Vec<Literal>>,
}

impl CnfFormula {
    pub fn new(t: usize, clauses: Vec<Vec<Literal>>) -> Result<Self, ReductionError> {
        let mut out = Vec::with_capacity(clauses.len());
        for (i, clause) in clauses.into_iter().enumerate() {
            let mut seen = BTreeSet::new();
            let mut c = Vec::with_capacity(clause.len());
            for l in clause {
                if l.atom == 0 || l.atom > t {
                    return Err(ReductionError::Parse { line: 0, msg: format!("atom {} outside 1..={t}", l.atom) });
                }
                if seen.insert(l) {
                    c.push(l);
                }
            }
            if c.iter().any(|l| seen.contains(&Literal { atom: l.atom, positive: !l.positive })) {
                return Err(ReductionError::Tautology(i + 1));
            }
            if c.is_empty() {
                return Err(ReductionError::Parse { line: 0, msg: format!("clause {} is empty", i + 1) });
            }
            out.push(c);
        }
        Ok(Self { t, clauses: out })
    }

    pub fn k(&self) -> usize {
        self.clauses.len()
    }

    pub fn widths(&self) -> Vec<usize> {
        self.clauses.iter().map(Vec::len).collect()
    }

    pub fn prevalence(&self, l: Literal) -> usize {
        self.clauses.iter().filter(|c| c.contains(&l)).count()
    }

    /// Largest clause width or doubled literal prevalence.
    pub fn m(&self) -> usize {
        let widths = self.widths().into_iter();
        let prevalences = (1..=self.t).flat_map(|a| [true, false].map(|p| 2 * self.prevalence(Literal { atom: a, positive: p })));
        widths.chain(prevalences).max().unwrap_or(0)
    }

    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|l| assignment[l.atom - 1] == l.positive))
    }

    /// First satisfying assignment in binary counting order, atom 1 as the
    /// least significant bit.
    pub fn brute_force_sat(&self) -> Result<Option<Vec<bool>>, ReductionError> {
        if self.t > 24 {
            return Err(ReductionError::Guard(format!("{} atoms for exhaustive search", self.t)));
        }
        for bits in 0u64..1 << self.t {
            let a: Vec<bool> = (0..self.t).map(|i| bits >> i & 1 == 1).collect();
            if self.is_satisfied_by(&a) {
                return Ok(Some(a));
            }
        }
        Ok(None)
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.t, self.k());
        for c in &self.clauses {
            for l in c {
                let _ = write!(s, "{} ", l.to_dimacs());
            }
            s.push_str("0\n");
        }
        s
    }
}

/// Parse DIMACS CNF. Repeated literals inside a clause are dropped and
/// tautological clauses are rejected.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula, ReductionError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') || trimmed.starts_with('%') {
            continue;
        }
        last_line = line;
        if trimmed.starts_with('p') {
            let parts: Vec<&str> = trimmed.split_whitespace().collect();
            if header.is_some() || parts.len() != 4 || parts[1] != "cnf" {
                return Err(ReductionError::Parse { line, msg: "expected a single `p cnf <atoms> <clauses>` header".into() });
            }
            let num = |s: &str| s.parse::<usize>().map_err(|_| ReductionError::Parse { line, msg: format!("bad count `{s}`") });
            header = Some((num(parts[2])?, num(parts[3])?));
            continue;
        }
        let Some((t, _)) = header else {
            return Err(ReductionError::Parse { line, msg: "clause before header".into() });
        };
        for tok in trimmed.split_whitespace() {
            let x: i64 = tok.parse().map_err(|_| ReductionError::Parse { line, msg: format!("bad literal `{tok}`") })?;
            if x == 0 {
                if current.is_empty() {
                    return Err(ReductionError::Parse { line, msg: "empty clause".into() });
                }
                clauses.push(std::mem::take(&mut current));
                continue;
            }
            if x.unsigned_abs() as usize > t {
                return Err(ReductionError::Parse { line, msg: format!("atom {} exceeds the declared {t}", x.unsigned_abs()) });
            }
            current.push(Literal::from_dimacs(x));
        }
    }
    let (t, k) = header.ok_or(ReductionError::Parse { line: last_line, msg: "missing header".into() })?;
    if !current.is_empty() {
        clauses.push(current);
    }
    if clauses.len() != k {
        return Err(ReductionError::Parse { line: last_line, msg: format!("header declares {k} clauses, found {}", clauses.len()) });
    }
    if t == 0 || k == 0 {
        return Err(ReductionError::Trivial);
    }
    CnfFormula::new(t, clauses)
}

/// Requested approximation, as a fraction `ε ∈ (0, ½]` or a factor `F ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Approximation {
    Fraction(Rational),
    Factor(Rational),
}

impl Approximation {
    pub fn epsilon(&self) -> Result<Rational, ReductionError> {
        match self {
            Self::Fraction(e) => {
                if !e.is_positive() || *e > Rational::new(1.into(), 2.into()) {
                    return Err(ReductionError::Mode(format!("fraction {e} outside (0, 1/2]")));
                }
                Ok(e.clone())
            }
            Self::Factor(f) => {
                if *f < Rational::one() {
                    return Err(ReductionError::Mode(format!("factor {f} below 1")));
                }
                Ok((f + Rational::one()).recip())
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FormulaGraphBundle {
    #[serde(skip)]
    pub graph: Graph,
    #[serde(skip)]
    pub complement: Graph,
    pub n: usize,
    pub t: usize,
    pub k: usize,
    pub f: usize,
    pub m: usize,
    pub delta: usize,
    #[serde(rename = "Delta")]
    pub upper: usize,
    #[serde(serialize_with = "serialize_rational")]
    pub epsilon: Rational,
    #[serde(serialize_with = "crate::serial::one_based")]
    pub a: Vertex,
    #[serde(serialize_with = "crate::serial::one_based")]
    pub b: Vertex,
    pub vertex_names: Vec<String>,
    pub graph6: String,
}

fn serialize_rational<S: serde::Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Vertex ids: `a`, `b`, then `x_i, ¬x_i` by atom, then `α_i, β_i` by
/// clause, then fillers.
pub fn literal_vertex(l: Literal) -> Vertex {
    2 + 2 * (l.atom - 1) + usize::from(!l.positive)
}

pub fn clause_vertices(t: usize, i: usize) -> (Vertex, Vertex) {
    let base = 2 + 2 * t + 2 * i;
    (base, base + 1)
}

fn ceil_div(num: &Rational, den: &Rational) -> usize {
    let q = num / den;
    let (n, d) = (q.numer(), q.denom());
    n.div_ceil(d).to_usize().expect("threshold fits in usize")
}

/// Least filler count meeting the three lower bounds.
pub fn filler_count(t: usize, k: usize, m: usize, epsilon: &Rational) -> usize {
    let base = 2 + 2 * t + 2 * k;
    let need_low = ceil_div(&rat((2 * t + k) as i64), epsilon);
    let need_high = ceil_div(&rat((m + 3) as i64), epsilon);
    m.max(need_low.saturating_sub(base)).max(need_high.saturating_sub(base))
}

pub fn build_formula_graph(phi: &CnfFormula, mode: &Approximation) -> Result<FormulaGraphBundle, ReductionError> {
    let (t, k) = (phi.t, phi.k());
    if t == 0 || k == 0 {
        return Err(ReductionError::Trivial);
    }
    let epsilon = mode.epsilon()?;
    let m = phi.m();
    let f = filler_count(t, k, m, &epsilon);
    let n = 2 + 2 * t + 2 * k + f;
    let (a, b) = (0, 1);
    let mut h = Graph::new(n)?;
    h.add_edge(a, b)?;
    for atom in 1..=t {
        h.add_edge(literal_vertex(Literal { atom, positive: true }), literal_vertex(Literal { atom, positive: false }))?;
    }
    for (i, clause) in phi.clauses.iter().enumerate() {
        let (alpha, beta) = clause_vertices(t, i);
        h.add_edge(alpha, a)?;
        h.add_edge(beta, b)?;
        for &l in clause {
            h.add_edge(alpha, literal_vertex(l))?;
            h.add_edge(beta, literal_vertex(l))?;
        }
    }
    for y in 2 + 2 * t + 2 * k..n {
        h.add_edge(y, a)?;
        h.add_edge(y, b)?;
    }
    let mut names = vec!["a".to_string(), "b".to_string()];
    for atom in 1..=t {
        names.push(format!("x{atom}"));
        names.push(format!("~x{atom}"));
    }
    for i in 1..=k {
        names.push(format!("alpha{i}"));
        names.push(format!("beta{i}"));
    }
    names.extend((1..=f).map(|i| format!("y{i}")));
    let graph = h.complement().with_names(names.clone())?;
    let complement = h.with_names(names.clone())?;
    Ok(FormulaGraphBundle {
        graph6: to_graph6(&graph),
        graph,
        complement,
        n,
        t,
        k,
        f,
        m,
        delta: 2 * t + k,
        upper: n - m - 3,
        epsilon,
        a,
        b,
        vertex_names: names,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DichotomyReport {
    pub low_threshold_ok: bool,
    pub high_threshold_ok: bool,
    /// Vertices whose degree lies in `(δ, Δ]`.
    #[serde(serialize_with = "crate::serial::one_based_vec")]
    pub violations: Vec<Vertex>,
    pub holds: bool,
}

/// Check `δ ≤ εn`, `Δ ≥ (1 − ε)n`, and that no degree lies in `(δ, Δ]`.
pub fn verify_dichotomy(bundle: &FormulaGraphBundle) -> DichotomyReport {
    let n = rat(bundle.n as i64);
    let low_threshold_ok = rat(bundle.delta as i64) <= &bundle.epsilon * &n;
    let high_threshold_ok = rat(bundle.upper as i64) >= (Rational::one() - &bundle.epsilon) * &n;
    let violations: Vec<Vertex> = (0..bundle.n)
        .filter(|&v| {
            let d = bundle.graph.degree(v);
            d > bundle.delta && d <= bundle.upper
        })
        .collect();
    let holds = low_threshold_ok && high_threshold_ok && violations.is_empty();
    DichotomyReport { low_threshold_ok, high_threshold_ok, violations, holds }
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceVerdict {
    pub satisfiable: bool,
    pub assignment: Option<Vec<bool>>,
    pub pair_avoidable: bool,
    pub pair_avoid_witness: Option<Ordering>,
    /// Greedy ordering of `G` that starts `a`, the true literals, `b`.
    pub constructed_ordering: Option<Ordering>,
    pub constructed_ok: Option<bool>,
    pub agree: bool,
}

/// Vertex cap for exhaustive greedy-ordering search in equivalence checks.
pub const EQUIVALENCE_VERTEX_GUARD: usize = 64;

/// Compare brute-force satisfiability with pair avoidance on `G`, and for
/// satisfiable formulas build the explicit avoiding ordering.
pub fn reduction_equivalence_check(phi: &CnfFormula, bundle: &FormulaGraphBundle) -> Result<EquivalenceVerdict, ReductionError> {
    if bundle.n > EQUIVALENCE_VERTEX_GUARD {
        return Err(ReductionError::Guard(format!("{} vertices exceeds {EQUIVALENCE_VERTEX_GUARD}", bundle.n)));
    }
    let assignment = phi.brute_force_sat()?;
    let pa = pair_avoid(&bundle.graph, bundle.a, bundle.b)?;
    let (constructed_ordering, constructed_ok) = match &assignment {
        None => (None, None),
        Some(asg) => {
            let ord = satisfying_ordering(&bundle.graph, bundle.a, bundle.b, asg);
            let ok = ord.as_ref().is_some_and(|o| {
                is_greedy(&bundle.graph, o) && o.last() != bundle.a && o.last() != bundle.b
            });
            (ord, Some(ok))
        }
    };
    let satisfiable = assignment.is_some();
    let agree = satisfiable == pa.avoidable && constructed_ok != Some(false);
    Ok(EquivalenceVerdict {
        satisfiable,
        assignment,
        pair_avoidable: pa.avoidable,
        pair_avoid_witness: pa.witness,
        constructed_ordering,
        constructed_ok,
        agree,
    })
}

/// `(a, ℓ_1, …, ℓ_t, b)` completed greedily by smallest vertex id, or
/// `None` if that prefix is not greedy.
fn satisfying_ordering(g: &Graph, a: Vertex, b: Vertex, assignment: &[bool]) -> Option<Ordering> {
    let mut prefix = vec![a];
    prefix.extend(assignment.iter().enumerate().map(|(i, &p)| literal_vertex(Literal { atom: i + 1, positive: p })));
    prefix.push(b);
    if !is_greedy_prefix(g, &prefix) {
        return None;
    }
    let n = g.n();
    let mut chosen = vec![false; n];
    for &v in &prefix {
        chosen[v] = true;
    }
    while prefix.len() < n {
        let score = |u: Vertex| prefix.iter().filter(|&&w| g.has_edge(u, w)).count();
        let next = (0..n).filter(|&u| !chosen[u]).max_by_key(|&u| (score(u), std::cmp::Reverse(u)))?;
        chosen[next] = true;
        prefix.push(next);
    }
    Ordering::new(prefix).ok()
}

/// Parse an integer or `p/q` for the approximation flags.
pub fn parse_ratio(s: &str) -> Result<Rational, ReductionError> {
    crate::linalg::parse_rational(s).map_err(|_| ReductionError::Mode(format!("cannot parse `{s}`")))
}
