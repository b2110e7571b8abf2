//! Garden diagrams: trees of alternating nodes and input boxes joined by
//! conduits, evaluated by summing valuations over all conduit indexings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::poly::{eval_node_variable, Family, Monomial, NodeVar, Poly};
use crate::error::GardenError;

/// Default cap on `d^p` for brute-force evaluation.
pub const DEFAULT_INDEX_BUDGET: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GardenKind {
    /// One external uppermost conduit: a vector-valued function.
    #[serde(rename = "I")]
    Vector,
    /// The uppermost conduit joins two top components: scalar-valued.
    #[serde(rename = "II")]
    Scalar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Label {
    Node(Family),
    Input(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GardenNode {
    pub label: Label,
    /// Lower conduits, left to right.
    pub children: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Garden {
    kind: GardenKind,
    nodes: Vec<GardenNode>,
    /// One top for vector gardens, two (left, right) for scalar gardens.
    tops: Vec<usize>,
    inputs: usize,
}

/// Value of a garden function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GardenValue {
    Vector(Vec<Poly>),
    Scalar(Poly),
}

impl GardenValue {
    pub fn as_vector(&self) -> Option<&[Poly]> {
        match self {
            GardenValue::Vector(v) => Some(v),
            GardenValue::Scalar(_) => None,
        }
    }

    pub fn as_scalar(&self) -> Option<&Poly> {
        match self {
            GardenValue::Scalar(p) => Some(p),
            GardenValue::Vector(_) => None,
        }
    }
}

/// Recursive builder form, also the JSON shape of a component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Tree {
    Input {
        /// 1-based input slot.
        input: usize,
    },
    Node {
        /// 1-based family id.
        family: usize,
        #[serde(default)]
        children: Vec<Tree>,
    },
}

impl Tree {
    pub fn input(slot: usize) -> Self {
        Tree::Input { input: slot + 1 }
    }

    pub fn node(family: Family, children: Vec<Tree>) -> Self {
        Tree::Node { family: family as usize + 1, children }
    }
}

#[derive(Serialize, Deserialize)]
struct GardenRepr {
    #[serde(rename = "type")]
    kind: GardenKind,
    tops: Vec<Tree>,
}

impl Garden {
    pub fn from_trees(kind: GardenKind, tops: Vec<Tree>) -> Result<Self, GardenError> {
        let want = match kind {
            GardenKind::Vector => 1,
            GardenKind::Scalar => 2,
        };
        if tops.len() != want {
            return Err(GardenError::TypeMismatch(format!("{kind:?} garden needs {want} top components, got {}", tops.len())));
        }
        let mut nodes = Vec::new();
        let mut top_ids = Vec::new();
        for t in &tops {
            top_ids.push(push_tree(t, &mut nodes)?);
        }
        Self::new(kind, nodes, top_ids)
    }

    /// Validate and build from explicit nodes.
    pub fn new(kind: GardenKind, nodes: Vec<GardenNode>, tops: Vec<usize>) -> Result<Self, GardenError> {
        let n = nodes.len();
        let want = match kind {
            GardenKind::Vector => 1,
            GardenKind::Scalar => 2,
        };
        if tops.len() != want {
            return Err(GardenError::TypeMismatch(format!("{kind:?} garden needs {want} tops")));
        }
        let mut parents = vec![0usize; n];
        for node in &nodes {
            for &c in &node.children {
                if c >= n {
                    return Err(GardenError::Arity(format!("child {c} out of range")));
                }
                parents[c] += 1;
            }
            if matches!(node.label, Label::Input(_)) && !node.children.is_empty() {
                return Err(GardenError::Slot("input boxes have no lower conduits".into()));
            }
        }
        for &t in &tops {
            if t >= n || parents[t] != 0 {
                return Err(GardenError::Arity("top component must exist and have no parent".into()));
            }
        }
        if tops.len() == 2 && tops[0] == tops[1] {
            return Err(GardenError::Arity("the two tops must be distinct".into()));
        }
        // every node reachable exactly once from the tops
        let mut seen = vec![false; n];
        let mut stack = tops.clone();
        while let Some(v) = stack.pop() {
            if std::mem::replace(&mut seen[v], true) {
                return Err(GardenError::Arity("diagram is not a forest".into()));
            }
            stack.extend(&nodes[v].children);
        }
        if seen.iter().any(|s| !s) || parents.iter().any(|&p| p > 1) {
            return Err(GardenError::Arity("every component needs exactly one upper conduit".into()));
        }
        let mut arity: BTreeMap<Family, usize> = BTreeMap::new();
        let mut slots = Vec::new();
        for node in &nodes {
            match node.label {
                Label::Node(f) => {
                    let k = node.children.len();
                    if *arity.entry(f).or_insert(k) != k {
                        return Err(GardenError::Arity(format!("family {} used with different arities", f as usize + 1)));
                    }
                }
                Label::Input(s) => slots.push(s),
            }
        }
        slots.sort_unstable();
        if slots.iter().enumerate().any(|(i, &s)| i != s) {
            return Err(GardenError::Slot(format!("input slots must be exactly 1..={}", slots.len())));
        }
        Ok(Self { kind, nodes, tops, inputs: slots.len() })
    }

    pub fn kind(&self) -> GardenKind {
        self.kind
    }

    pub fn nodes(&self) -> &[GardenNode] {
        &self.nodes
    }

    pub fn tops(&self) -> &[usize] {
        &self.tops
    }

    pub fn input_count(&self) -> usize {
        self.inputs
    }

    /// Number of internal (non-input) nodes.
    pub fn node_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n.label, Label::Node(_))).count()
    }

    /// Number of conduits, the uppermost included.
    pub fn conduit_count(&self) -> usize {
        match self.kind {
            GardenKind::Vector => self.nodes.len(),
            GardenKind::Scalar => self.nodes.len() - 1,
        }
    }

    /// Nodes per family.
    pub fn family_counts(&self) -> BTreeMap<Family, u32> {
        let mut out = BTreeMap::new();
        for node in &self.nodes {
            if let Label::Node(f) = node.label {
                *out.entry(f).or_insert(0) += 1;
            }
        }
        out
    }

    /// The garden with no nodes and one input: the identity function.
    pub fn identity() -> Self {
        Self::from_trees(GardenKind::Vector, vec![Tree::input(0)]).expect("valid")
    }

    /// Two input boxes joined by the uppermost conduit: the inner product.
    pub fn inner_product() -> Self {
        Self::from_trees(GardenKind::Scalar, vec![Tree::input(0), Tree::input(1)]).expect("valid")
    }

    /// One node of arity `k + 1` over `k` inputs, with an external upper
    /// conduit.
    pub fn phi(family: Family, k: usize) -> Self {
        let children = (0..k).map(Tree::input).collect();
        Self::from_trees(GardenKind::Vector, vec![Tree::node(family, children)]).expect("valid")
    }

    /// One node on the left of the uppermost conduit, inputs `1..=k` below
    /// it and input `k + 1` on the right.
    pub fn g_alpha(family: Family, k: usize) -> Self {
        let children = (0..k).map(Tree::input).collect();
        Self::from_trees(GardenKind::Scalar, vec![Tree::node(family, children), Tree::input(k)]).expect("valid")
    }

    fn tree_of(&self, v: usize) -> Tree {
        match self.nodes[v].label {
            Label::Input(s) => Tree::input(s),
            Label::Node(f) => Tree::node(f, self.nodes[v].children.iter().map(|&c| self.tree_of(c)).collect()),
        }
    }

    pub fn to_trees(&self) -> Vec<Tree> {
        self.tops.iter().map(|&t| self.tree_of(t)).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(GardenRepr { kind: self.kind, tops: self.to_trees() }).expect("garden serialises")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self, GardenError> {
        let repr: GardenRepr =
            serde_json::from_value(value.clone()).map_err(|e| GardenError::Slot(format!("bad garden JSON: {e}")))?;
        Self::from_trees(repr.kind, repr.tops)
    }

    /// Substitute the vector garden `inner` for input box `slot`. Inputs of
    /// the result are numbered as in `f(x_1, …, g(y_1, …), …)`.
    pub fn compose(&self, slot: usize, inner: &Garden) -> Result<Garden, GardenError> {
        if inner.kind != GardenKind::Vector {
            return Err(GardenError::TypeMismatch("only vector gardens can be substituted into an input".into()));
        }
        if slot >= self.inputs {
            return Err(GardenError::Slot(format!("slot {} outside 1..={}", slot + 1, self.inputs)));
        }
        let q = inner.inputs;
        let inner_tree = shift_slots(&inner.tree_of(inner.tops[0]), |s| s + slot);
        let tops = self
            .to_trees()
            .iter()
            .map(|t| {
                replace_slot(t, slot, &inner_tree, &|s| match s.cmp(&slot) {
                    std::cmp::Ordering::Less => s,
                    _ => s + q - 1,
                })
            })
            .collect();
        Garden::from_trees(self.kind, tops)
    }

    /// Conduit above each node, numbered by first occurrence. The two
    /// tops of a scalar garden share the uppermost conduit.
    fn conduit_ids(&self) -> Vec<usize> {
        let n = self.nodes.len();
        let mut raw: Vec<usize> = (0..n).collect();
        if self.kind == GardenKind::Scalar {
            raw[self.tops[1]] = self.tops[0];
        }
        let mut map = vec![usize::MAX; n];
        let mut next = 0;
        raw.iter()
            .map(|&r| {
                if map[r] == usize::MAX {
                    map[r] = next;
                    next += 1;
                }
                map[r]
            })
            .collect()
    }

    /// Valuation of one indexing. `labels[c]` is the index on conduit `c`
    /// (conduit of node `v` is `conduit_of(v)`).
    pub fn valuate(&self, inputs: &[Vec<Poly>], labels: &[usize], d: usize) -> Result<GardenValue, GardenError> {
        self.check_inputs(inputs, d)?;
        let ids = self.conduit_ids();
        if labels.len() != self.conduit_count() {
            return Err(GardenError::Arity(format!("{} labels for {} conduits", labels.len(), self.conduit_count())));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= d) {
            return Err(GardenError::IndexOutOfRange { index: bad + 1, d });
        }
        let value = self.product(inputs, &|v| labels[ids[v]], d, 1_000_000)?;
        Ok(match self.kind {
            GardenKind::Vector => {
                let mut out = vec![Poly::zero(); d];
                out[labels[ids[self.tops[0]]]] = value;
                GardenValue::Vector(out)
            }
            GardenKind::Scalar => GardenValue::Scalar(value),
        })
    }

    /// Conduit index of the conduit above node `v`.
    pub fn conduit_of(&self, v: usize) -> usize {
        self.conduit_ids()[v]
    }

    fn check_inputs(&self, inputs: &[Vec<Poly>], d: usize) -> Result<(), GardenError> {
        if inputs.len() != self.inputs {
            return Err(GardenError::Arity(format!("{} inputs for {} input boxes", inputs.len(), self.inputs)));
        }
        if inputs.iter().any(|x| x.len() != d) {
            return Err(GardenError::Arity(format!("input vectors must have length {d}")));
        }
        Ok(())
    }

    fn product(&self, inputs: &[Vec<Poly>], label: &dyn Fn(usize) -> usize, d: usize, budget: usize) -> Result<Poly, GardenError> {
        let mut sign = 1i64;
        let mut vars: Vec<NodeVar> = Vec::new();
        let mut entries: Vec<&Poly> = Vec::new();
        for (v, node) in self.nodes.iter().enumerate() {
            match node.label {
                Label::Input(s) => entries.push(&inputs[s][label(v)]),
                Label::Node(f) => {
                    let mut ls: Vec<usize> = node.children.iter().map(|&c| label(c)).collect();
                    ls.push(label(v));
                    match eval_node_variable(f, &ls, d)? {
                        None => return Ok(Poly::zero()),
                        Some((s, var)) => {
                            sign *= s as i64;
                            vars.push(var);
                        }
                    }
                }
            }
        }
        let mut acc = Poly::term(sign, Monomial::from_vars(vars));
        for e in entries {
            if acc.is_zero() {
                break;
            }
            acc = acc.mul(e, budget)?;
        }
        Ok(acc)
    }

    fn brute_force(
        &self,
        inputs: &[Vec<Poly>],
        d: usize,
        index_budget: u64,
        monomial_budget: usize,
        collect: bool,
    ) -> Result<(GardenValue, Vec<Indexing>), GardenError> {
        self.check_inputs(inputs, d)?;
        let p = self.conduit_count();
        let total = (d as u64).checked_pow(p as u32).unwrap_or(u64::MAX);
        if total > index_budget {
            return Err(GardenError::Budget { what: "indexing", limit: index_budget });
        }
        if d > 64 {
            return Err(GardenError::Precondition("at most 64 indices supported".into()));
        }
        let ids = self.conduit_ids();
        // conduit -> (lower node(s), upper node) for distinctness checks
        let mut ends: Vec<Vec<usize>> = vec![Vec::new(); p];
        for (v, node) in self.nodes.iter().enumerate() {
            if matches!(node.label, Label::Node(_)) {
                ends[ids[v]].push(v);
                for &c in &node.children {
                    ends[ids[c]].push(v);
                }
            }
        }
        let mut state = BruteState {
            garden: self,
            inputs,
            d,
            ids: &ids,
            ends: &ends,
            labels: vec![0; p],
            used: vec![0u64; self.nodes.len()],
            budget: monomial_budget,
            out: vec![Poly::zero(); if self.kind == GardenKind::Vector { d } else { 1 }],
            collected: collect.then(Vec::new),
        };
        state.run(0)?;
        let value = match self.kind {
            GardenKind::Vector => GardenValue::Vector(state.out),
            GardenKind::Scalar => GardenValue::Scalar(state.out.pop().expect("one entry")),
        };
        Ok((value, state.collected.unwrap_or_default()))
    }

    /// Sum of valuations over all `d^p` indexings. Indexings that give some
    /// node a repeated index are skipped since they value to zero.
    pub fn evaluate(&self, inputs: &[Vec<Poly>], d: usize, index_budget: u64, monomial_budget: usize) -> Result<GardenValue, GardenError> {
        Ok(self.brute_force(inputs, d, index_budget, monomial_budget, false)?.0)
    }

    /// Every indexing with a nonzero valuation, in lexicographic order of
    /// conduit labels.
    pub fn nonzero_indexings(&self, inputs: &[Vec<Poly>], d: usize, index_budget: u64, monomial_budget: usize) -> Result<Vec<Indexing>, GardenError> {
        Ok(self.brute_force(inputs, d, index_budget, monomial_budget, true)?.1)
    }
}

/// One conduit indexing and its valuation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Indexing {
    /// Label per conduit, 1-based in output.
    #[serde(serialize_with = "crate::serial::one_based_vec")]
    pub labels: Vec<usize>,
    pub value: Poly,
}

struct BruteState<'a> {
    garden: &'a Garden,
    inputs: &'a [Vec<Poly>],
    d: usize,
    ids: &'a [usize],
    ends: &'a [Vec<usize>],
    labels: Vec<usize>,
    used: Vec<u64>,
    budget: usize,
    out: Vec<Poly>,
    collected: Option<Vec<Indexing>>,
}

impl BruteState<'_> {
    fn run(&mut self, c: usize) -> Result<(), GardenError> {
        if c == self.labels.len() {
            let labels = &self.labels;
            let ids = self.ids;
            let value = self.garden.product(self.inputs, &|v| labels[ids[v]], self.d, self.budget)?;
            let slot = match self.garden.kind {
                GardenKind::Vector => labels[ids[self.garden.tops[0]]],
                GardenKind::Scalar => 0,
            };
            self.out[slot].add_assign(&value)?;
            if let Some(c) = self.collected.as_mut().filter(|_| !value.is_zero()) {
                c.push(Indexing { labels: labels.clone(), value });
            }
            if self.out[slot].len() > self.budget {
                return Err(GardenError::Budget { what: "monomial", limit: self.budget as u64 });
            }
            return Ok(());
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
            self.run(c + 1)?;
            for &v in &self.ends[c] {
                self.used[v] &= !bit;
            }
        }
        Ok(())
    }
}

fn push_tree(t: &Tree, nodes: &mut Vec<GardenNode>) -> Result<usize, GardenError> {
    let id = nodes.len();
    match t {
        Tree::Input { input } => {
            let slot = input.checked_sub(1).ok_or_else(|| GardenError::Slot("input slots are 1-based".into()))?;
            nodes.push(GardenNode { label: Label::Input(slot), children: Vec::new() });
        }
        Tree::Node { family, children } => {
            let f = family
                .checked_sub(1)
                .and_then(|f| Family::try_from(f).ok())
                .ok_or_else(|| GardenError::Arity(format!("bad family id {family}")))?;
            nodes.push(GardenNode { label: Label::Node(f), children: Vec::new() });
            let mut ids = Vec::with_capacity(children.len());
            for c in children {
                ids.push(push_tree(c, nodes)?);
            }
            nodes[id].children = ids;
        }
    }
    Ok(id)
}

fn shift_slots(t: &Tree, f: impl Fn(usize) -> usize + Copy) -> Tree {
    match t {
        Tree::Input { input } => Tree::Input { input: f(input - 1) + 1 },
        Tree::Node { family, children } => Tree::Node { family: *family, children: children.iter().map(|c| shift_slots(c, f)).collect() },
    }
}

fn replace_slot(t: &Tree, slot: usize, inner: &Tree, renumber: &dyn Fn(usize) -> usize) -> Tree {
    match t {
        Tree::Input { input } if input - 1 == slot => inner.clone(),
        Tree::Input { input } => Tree::Input { input: renumber(input - 1) + 1 },
        Tree::Node { family, children } => Tree::Node {
            family: *family,
            children: children.iter().map(|c| replace_slot(c, slot, inner, renumber)).collect(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::garden::poly::NodeVar;

    fn var(f: Family, idx: &[usize]) -> Poly {
        Poly::var(NodeVar::new(f, idx))
    }

    /// Family 0 = alpha, 1 = beta, 2 = gamma; beta on the left of the cap,
    /// gamma on the right with alpha below it.
    fn simple_example() -> Garden {
        Garden::from_trees(GardenKind::Scalar, vec![Tree::node(1, vec![]), Tree::node(2, vec![Tree::node(0, vec![])])]).unwrap()
    }

    #[test]
    fn simple_example_value() {
        let g = simple_example();
        assert_eq!(g.conduit_count(), 2);
        let value = g.evaluate(&[], 2, DEFAULT_INDEX_BUDGET, 1000).unwrap();
        let (a1, a2, b1, b2) = (var(0, &[0]), var(0, &[1]), var(1, &[0]), var(1, &[1]));
        let c12 = var(2, &[0, 1]);
        let expect = a1
            .mul(&b2, 10)
            .unwrap()
            .add(&a2.mul(&b1, 10).unwrap().scale(-1).unwrap())
            .unwrap()
            .mul(&c12, 10)
            .unwrap();
        assert_eq!(value, GardenValue::Scalar(expect));
    }

    #[test]
    fn single_valuation() {
        let g = simple_example();
        // conduits: cap (shared by beta and gamma), then the one above alpha
        let cap = g.conduit_of(0);
        let below = g.conduit_of(2);
        let mut labels = vec![0; 2];
        labels[cap] = 1;
        labels[below] = 0;
        // gamma sees lower label 1 and upper label 2, already in order
        let v = g.valuate(&[], &labels, 2).unwrap();
        let expect = var(0, &[0]).mul(&var(2, &[0, 1]), 10).unwrap().mul(&var(1, &[1]), 10).unwrap();
        assert_eq!(v, GardenValue::Scalar(expect));
        labels[below] = 1;
        assert!(g.valuate(&[], &labels, 2).unwrap().as_scalar().unwrap().is_zero());
    }

    #[test]
    fn inner_product_and_identity() {
        let x: Vec<Poly> = (0..3).map(|i| Poly::constant(i as i64 + 1)).collect();
        let y: Vec<Poly> = vec![Poly::constant(4), Poly::constant(-1), Poly::constant(2)];
        let ip = Garden::inner_product().evaluate(&[x.clone(), y], 3, 1000, 100).unwrap();
        assert_eq!(ip, GardenValue::Scalar(Poly::constant(4 - 2 + 6)));
        let id = Garden::identity().evaluate(std::slice::from_ref(&x), 3, 1000, 100).unwrap();
        assert_eq!(id, GardenValue::Vector(x));
        let e1 = vec![Poly::constant(1), Poly::zero()];
        let one = Garden::inner_product().valuate(&[e1.clone(), e1], &[0], 2).unwrap();
        assert_eq!(one, GardenValue::Scalar(Poly::constant(1)));
    }

    #[test]
    fn single_node_vector() {
        let v = Garden::phi(0, 0).evaluate(&[], 3, 1000, 100).unwrap();
        assert_eq!(v, GardenValue::Vector((0..3).map(|i| var(0, &[i])).collect()));
    }

    #[test]
    fn composition_numbering() {
        // f(x1, x2, x3) with g(y1, y2) into slot 2 gives f(x1, g(x2, x3), x4)
        let f = Garden::from_trees(GardenKind::Vector, vec![Tree::node(5, vec![Tree::input(0), Tree::input(1), Tree::input(2)])]).unwrap();
        let g = Garden::phi(6, 2);
        let h = f.compose(1, &g).unwrap();
        assert_eq!(h.input_count(), 4);
        let expect = Tree::node(5, vec![Tree::input(0), Tree::node(6, vec![Tree::input(1), Tree::input(2)]), Tree::input(3)]);
        assert_eq!(h.to_trees(), vec![expect]);
        assert_eq!(f.compose(0, &Garden::identity()).unwrap(), f);
        assert!(f.compose(3, &g).is_err());
        assert!(f.compose(0, &Garden::inner_product()).is_err());
        assert_eq!(Garden::inner_product().compose(0, &Garden::phi(0, 2)).unwrap(), Garden::g_alpha(0, 2));
    }

    #[test]
    fn validation() {
        let bad_slots = Garden::from_trees(GardenKind::Scalar, vec![Tree::input(0), Tree::input(2)]);
        assert!(bad_slots.is_err());
        let arity = Garden::from_trees(GardenKind::Scalar, vec![Tree::node(0, vec![]), Tree::node(0, vec![Tree::input(0)])]);
        assert!(arity.is_err());
        assert!(Garden::from_trees(GardenKind::Vector, vec![]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let g = Garden::g_alpha(3, 2);
        let j = g.to_json();
        assert_eq!(j["type"], "II");
        assert_eq!(Garden::from_json(&j).unwrap(), g);
    }

    #[test]
    fn index_budget() {
        let g = Garden::phi(0, 0);
        assert!(matches!(g.evaluate(&[], 3, 2, 10), Err(GardenError::Budget { .. })));
    }
}
