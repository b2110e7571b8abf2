//! Highest-priority monomial of a zero-input scalar garden without
//! expanding the polynomial.
//!
//! Families are processed in priority order. Once every node of a family
//! has all its conduits labelled, that family's block of the monomial is
//! fixed, so a partial indexing can be compared blockwise against the best
//! complete one and abandoned early. The search collects the best monomial
//! together with the signed count of indexings producing it; if those
//! cancel it searches again strictly below.

use std::cmp::Ordering as Cmp;

use serde::Serialize;

use super::diagram::{Garden, GardenKind, Label};
use super::poly::{eval_node_variable, sort_sign, Family, Indices, Monomial, NodeVar};
use crate::error::GardenError;
use crate::graph::Graph;
use crate::ordering::{is_greedy, Ordering};

/// Default cap on search nodes for one leading-term computation.
pub const DEFAULT_SEARCH_BUDGET: u64 = 50_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeadingTerm {
    pub monomial: Monomial,
    pub coeff: i64,
}

/// Sorted variable tuples of one family, highest priority first.
type Block = Vec<Indices>;

enum Step {
    Assign(usize),
    Close(usize),
}

struct Search<'a> {
    d: usize,
    /// (family, nodes) in priority order.
    groups: Vec<(Family, Vec<usize>)>,
    steps: Vec<Step>,
    conduit: Vec<usize>,
    /// nodes adjacent to each conduit
    ends: Vec<Vec<usize>>,
    children: Vec<&'a [usize]>,
    labels: Vec<usize>,
    used: Vec<u64>,
    blocks: Vec<Block>,
    sign: i64,
    best: Option<Vec<Block>>,
    coeff: i64,
    cap: Option<&'a [Block]>,
    visits: u64,
    budget: u64,
}

fn cmp_blocks(a: &Block, b: &Block) -> Cmp {
    // higher priority means lexicographically smaller tuples
    b.cmp(a)
}

fn cmp_prefix(cur: &[Block], other: &[Block]) -> Cmp {
    for (a, b) in cur.iter().zip(other) {
        match cmp_blocks(a, b) {
            Cmp::Equal => continue,
            c => return c,
        }
    }
    Cmp::Equal
}

impl Search<'_> {
    fn node_tuple(&self, v: usize) -> (i8, Indices) {
        let mut ls: Vec<usize> = self.children[v].iter().map(|&c| self.labels[self.conduit[c]]).collect();
        ls.push(self.labels[self.conduit[v]]);
        let sign = sort_sign(&ls).expect("labels around a node are distinct");
        let mut t: Indices = ls.iter().map(|&l| l as u8).collect();
        t.sort_unstable();
        (sign, t)
    }

    /// Optimistic block: nodes still missing their upper label take the
    /// smallest label not already around them.
    fn bound_block(&self, nodes: &[usize], assigned: &[bool]) -> Block {
        let mut b: Block = nodes
            .iter()
            .map(|&v| {
                if assigned[self.conduit[v]] {
                    self.node_tuple(v).1
                } else {
                    let free = (!self.used[v]).trailing_zeros() as usize;
                    let mut t: Indices = self.children[v].iter().map(|&c| self.labels[self.conduit[c]] as u8).collect();
                    t.push(free as u8);
                    t.sort_unstable();
                    t
                }
            })
            .collect();
        b.sort();
        b
    }

    fn run(&mut self, step: usize, assigned: &mut Vec<bool>) -> Result<(), GardenError> {
        self.visits += 1;
        if self.visits > self.budget {
            return Err(GardenError::Budget { what: "search node", limit: self.budget });
        }
        if step == self.steps.len() {
            return self.leaf();
        }
        match self.steps[step] {
            Step::Close(gi) => {
                let nodes = self.groups[gi].1.clone();
                let mut block = Block::with_capacity(nodes.len());
                let mut sign = 1i64;
                for &v in &nodes {
                    let (s, t) = self.node_tuple(v);
                    sign *= s as i64;
                    block.push(t);
                }
                block.sort();
                self.blocks.push(block);
                let depth = self.blocks.len();
                let pruned = self.cap.is_some_and(|cap| cmp_prefix(&self.blocks, &cap[..depth]) == Cmp::Greater)
                    || self.best.as_ref().is_some_and(|best| cmp_prefix(&self.blocks, &best[..depth]) == Cmp::Less);
                if !pruned {
                    self.sign *= sign;
                    self.run(step + 1, assigned)?;
                    self.sign *= sign;
                }
                self.blocks.pop();
                Ok(())
            }
            Step::Assign(c) => {
                let gi = self.blocks.len();
                if let Some(best) = &self.best {
                    if cmp_prefix(&self.blocks, best) == Cmp::Equal {
                        let bound = self.bound_block(&self.groups[gi].1, assigned);
                        if cmp_blocks(&bound, &best[gi]) == Cmp::Less {
                            return Ok(());
                        }
                    }
                }
                for l in 0..self.d {
                    let bit = 1u64 << l;
                    if self.ends[c].iter().any(|&v| self.used[v] & bit != 0) {
                        continue;
                    }
                    for &v in &self.ends[c] {
                        self.used[v] |= bit;
                    }
                    self.labels[c] = l;
                    assigned[c] = true;
                    self.run(step + 1, assigned)?;
                    assigned[c] = false;
                    for &v in &self.ends[c] {
                        self.used[v] &= !bit;
                    }
                }
                Ok(())
            }
        }
    }

    fn leaf(&mut self) -> Result<(), GardenError> {
        if self.cap.is_some_and(|cap| cmp_prefix(&self.blocks, cap) != Cmp::Less) {
            return Ok(());
        }
        let rel = match &self.best {
            None => Cmp::Greater,
            Some(best) => cmp_prefix(&self.blocks, best),
        };
        match rel {
            Cmp::Greater => {
                self.best = Some(self.blocks.clone());
                self.coeff = self.sign;
            }
            Cmp::Equal => {
                self.coeff = self.coeff.checked_add(self.sign).ok_or(GardenError::Overflow)?;
            }
            Cmp::Less => {}
        }
        Ok(())
    }
}

fn to_monomial(groups: &[(Family, Vec<usize>)], blocks: &[Block]) -> Monomial {
    Monomial::from_vars(
        groups
            .iter()
            .zip(blocks)
            .flat_map(|((f, _), b)| b.iter().map(move |t| NodeVar { family: *f, indices: t.clone() })),
    )
}

/// Leading term of a zero-input scalar garden whose children always carry
/// strictly lower family ids than their parents. `None` means the
/// polynomial is zero.
pub fn leading_term(garden: &Garden, d: usize, budget: u64) -> Result<Option<LeadingTerm>, GardenError> {
    if garden.kind() != GardenKind::Scalar || garden.input_count() != 0 {
        return Err(GardenError::Precondition("leading terms need a zero-input scalar garden".into()));
    }
    if d == 0 || d > 64 {
        return Err(GardenError::Precondition(format!("dimension {d} outside 1..=64")));
    }
    let nodes = garden.nodes();
    let fam: Vec<Family> = nodes
        .iter()
        .map(|n| match n.label {
            Label::Node(f) => f,
            Label::Input(_) => unreachable!("zero-input garden"),
        })
        .collect();
    for (v, node) in nodes.iter().enumerate() {
        if node.children.iter().any(|&c| fam[c] >= fam[v]) {
            return Err(GardenError::Precondition("children must have lower family ids than their parent".into()));
        }
    }
    let conduit: Vec<usize> = (0..nodes.len()).map(|v| garden.conduit_of(v)).collect();
    let p = garden.conduit_count();
    let mut ends = vec![Vec::new(); p];
    for (v, node) in nodes.iter().enumerate() {
        ends[conduit[v]].push(v);
        for &c in &node.children {
            ends[conduit[c]].push(v);
        }
    }
    let mut families: Vec<Family> = fam.clone();
    families.sort_unstable();
    families.dedup();
    let groups: Vec<(Family, Vec<usize>)> =
        families.iter().map(|&f| (f, (0..nodes.len()).filter(|&v| fam[v] == f).collect())).collect();
    let mut steps = Vec::new();
    let mut scheduled = vec![false; p];
    for (gi, (_, members)) in groups.iter().enumerate() {
        for &v in members {
            if !std::mem::replace(&mut scheduled[conduit[v]], true) {
                steps.push(Step::Assign(conduit[v]));
            }
        }
        steps.push(Step::Close(gi));
    }
    let children: Vec<&[usize]> = nodes.iter().map(|n| n.children.as_slice()).collect();

    let mut cap: Option<Vec<Block>> = None;
    let mut visits = 0u64;
    loop {
        let mut s = Search {
            d,
            groups: groups.clone(),
            steps: std::mem::take(&mut steps),
            conduit: conduit.clone(),
            ends: ends.clone(),
            children: children.clone(),
            labels: vec![0; p],
            used: vec![0; nodes.len()],
            blocks: Vec::new(),
            sign: 1,
            best: None,
            coeff: 0,
            cap: cap.as_deref(),
            visits,
            budget,
        };
        s.run(0, &mut vec![false; p])?;
        visits = s.visits;
        steps = std::mem::take(&mut s.steps);
        let (best, coeff) = (s.best, s.coeff);
        match best {
            None => return Ok(None),
            Some(b) if coeff != 0 => return Ok(Some(LeadingTerm { monomial: to_monomial(&groups, &b), coeff })),
            Some(b) => cap = Some(b),
        }
    }
}

/// Positions `i ≤ j` must be equal or hold adjacent vertices.
fn related(g: &Graph, ord: &Ordering, i: usize, j: usize) -> bool {
    i == j || g.has_edge(ord.vertex(i), ord.vertex(j))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PredictedTerm {
    pub monomial: Monomial,
    pub sign: i8,
}

/// The monomial forced by labelling the children of every node `1..k` in
/// order, except at the top for position `j`, whose conduits are labelled
/// in the order of their far ends with position `i` inserted.
pub fn predicted_dominant(g: &Graph, ord: &Ordering, i: usize, j: usize, d: usize) -> Result<PredictedTerm, GardenError> {
    ord.check_for(g)?;
    let n = g.n();
    if i > j || j >= n {
        return Err(GardenError::Precondition(format!("need 1 ≤ i ≤ j ≤ {n}, got ({}, {})", i + 1, j + 1)));
    }
    if !is_greedy(g, ord) {
        return Err(GardenError::Precondition("ordering is not greedy".into()));
    }
    if !related(g, ord, i, j) {
        return Err(GardenError::Precondition("positions hold non-adjacent vertices".into()));
    }
    // the entry only involves positions up to j, whose prefix is itself greedy
    let max_k = (0..=j).map(|p| ord.kk(g, p)).max().unwrap_or(0);
    if d < max_k + 1 {
        return Err(GardenError::Precondition(format!("dimension {d} below {}", max_k + 1)));
    }
    let mut vars = Vec::new();
    let mut sign = 1i8;
    let wj = ord.wlist(g, j);
    let k = wj.len();
    if i == j {
        for _ in 0..2 {
            let child_labels: Vec<usize> = (0..k).collect();
            top(g, ord, j, &child_labels, k, d, &mut vars, &mut sign)?;
        }
    } else {
        let t = wj.iter().filter(|&&w| w < i).count();
        let child_labels: Vec<usize> = (0..k).map(|s| if s < t { s } else { s + 1 }).collect();
        top(g, ord, j, &child_labels, t, d, &mut vars, &mut sign)?;
        let ki = ord.kk(g, i);
        top(g, ord, i, &(0..ki).collect::<Vec<_>>(), t, d, &mut vars, &mut sign)?;
    }
    Ok(PredictedTerm { monomial: Monomial::from_vars(vars), sign })
}

#[allow(clippy::too_many_arguments)]
fn top(
    g: &Graph,
    ord: &Ordering,
    u: usize,
    child_labels: &[usize],
    upper: usize,
    d: usize,
    vars: &mut Vec<NodeVar>,
    sign: &mut i8,
) -> Result<(), GardenError> {
    let w = ord.wlist(g, u);
    let mut ls = child_labels.to_vec();
    ls.push(upper);
    let fam = Family::try_from(u).map_err(|_| GardenError::Precondition("too many positions".into()))?;
    let (s, var) = eval_node_variable(fam, &ls, d)?
        .ok_or_else(|| GardenError::Precondition(format!("forced labels repeat at position {}", u + 1)))?;
    *sign *= s;
    vars.push(var);
    for (s, &c) in w.iter().enumerate() {
        let kc = ord.kk(g, c);
        top(g, ord, c, &(0..kc).collect::<Vec<_>>(), child_labels[s], d, vars, sign)?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UniqueMonomialReport {
    #[serde(serialize_with = "crate::serial::one_based")]
    pub i: usize,
    #[serde(serialize_with = "crate::serial::one_based")]
    pub j: usize,
    pub d: usize,
    /// The pair is equal or adjacent.
    pub related: bool,
    pub greedy: bool,
    pub identically_zero: bool,
    pub leading: Option<LeadingTerm>,
    pub predicted: Option<PredictedTerm>,
    /// Leading coefficient is ±1 and leading term equals the prediction.
    pub verified: bool,
}

/// Find the leading term of the Gram-entry garden at positions `(i, j)` and
/// compare it with the predicted dominant monomial.
pub fn verify_unique_monomial(
    g: &Graph,
    ord: &Ordering,
    i: usize,
    j: usize,
    d: usize,
    budget: u64,
) -> Result<UniqueMonomialReport, GardenError> {
    let (i, j) = (i.min(j), i.max(j));
    let garden = super::lss::lss_scalar_garden(g, ord, i, j)?;
    let leading = leading_term(&garden, d, budget)?;
    let predicted = predicted_dominant(g, ord, i, j, d).ok();
    let verified = match (&leading, &predicted) {
        (Some(l), Some(p)) => l.coeff.abs() == 1 && l.monomial == p.monomial && l.coeff == p.sign as i64,
        _ => false,
    };
    Ok(UniqueMonomialReport {
        i,
        j,
        d,
        related: related(g, ord, i, j),
        greedy: is_greedy(g, ord),
        identically_zero: leading.is_none(),
        leading,
        predicted,
        verified,
    })
}
