//! Node variables, monomials and integer polynomials over them.
//!
//! A family is identified by a small integer; lower ids have higher
//! priority. Indices are stored 0-based and printed 1-based.

use std::cmp::Ordering as Cmp;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use smallvec::SmallVec;

use crate::error::GardenError;
use crate::linalg::{rat, Rational};

pub type Family = u16;
pub type Indices = SmallVec<[u8; 8]>;

/// An independent node variable: a family and a strictly increasing
/// index tuple. The derived order (family, then tuple) is the canonical
/// storage order and also descending priority.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeVar {
    pub family: Family,
    pub indices: Indices,
}

impl NodeVar {
    pub fn new(family: Family, indices: &[usize]) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        Self { family, indices: indices.iter().map(|&i| i as u8).collect() }
    }
}

impl fmt::Debug for NodeVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for NodeVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}_{{", self.family as usize + 1)?;
        let k = self.indices.len();
        for (p, i) in self.indices.iter().enumerate() {
            let sep = match p {
                0 => "",
                _ if p + 1 == k => ";",
                _ => ",",
            };
            write!(f, "{sep}{}", *i as usize + 1)?;
        }
        write!(f, "}}")
    }
}

/// Parity of the permutation sorting `labels`: `+1` or `-1`, or `None`
/// when a label repeats.
pub fn sort_sign(labels: &[usize]) -> Option<i8> {
    let mut sign = 1i8;
    for a in 0..labels.len() {
        for b in a + 1..labels.len() {
            match labels[a].cmp(&labels[b]) {
                Cmp::Equal => return None,
                Cmp::Greater => sign = -sign,
                Cmp::Less => {}
            }
        }
    }
    Some(sign)
}

/// Evaluate the alternating family at `labels` (lower labels then the
/// upper one): zero on a repeated index, otherwise the sorted variable with
/// the sign of the sorting permutation.
pub fn eval_node_variable(family: Family, labels: &[usize], d: usize) -> Result<Option<(i8, NodeVar)>, GardenError> {
    if let Some(&bad) = labels.iter().find(|&&s| s >= d) {
        return Err(GardenError::IndexOutOfRange { index: bad + 1, d });
    }
    let Some(sign) = sort_sign(labels) else {
        return Ok(None);
    };
    let mut sorted: Indices = labels.iter().map(|&s| s as u8).collect();
    sorted.sort_unstable();
    Ok(Some((sign, NodeVar { family, indices: sorted })))
}

/// A product of node variables with positive exponents, stored sorted by
/// variable.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    vars: Vec<(NodeVar, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn from_vars(vars: impl IntoIterator<Item = NodeVar>) -> Self {
        let mut sorted: Vec<NodeVar> = vars.into_iter().collect();
        sorted.sort();
        let mut out: Vec<(NodeVar, u32)> = Vec::new();
        for v in sorted {
            match out.last_mut() {
                Some((last, e)) if *last == v => *e += 1,
                _ => out.push((v, 1)),
            }
        }
        Self { vars: out }
    }

    pub fn vars(&self) -> &[(NodeVar, u32)] {
        &self.vars
    }

    pub fn degree(&self) -> u32 {
        self.vars.iter().map(|(_, e)| e).sum()
    }

    pub fn family_degrees(&self) -> BTreeMap<Family, u32> {
        let mut out = BTreeMap::new();
        for (v, e) in &self.vars {
            *out.entry(v.family).or_insert(0) += e;
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = (&self.vars, &other.vars);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Cmp::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Cmp::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Cmp::Equal => {
                    out.push((a[i].0.clone(), a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Self { vars: out }
    }

    pub fn evaluate(&self, values: &VariableValues) -> Result<Rational, GardenError> {
        let mut acc = Rational::one();
        for (v, e) in &self.vars {
            let x = values.get(v).ok_or_else(|| GardenError::Precondition(format!("no value for {v}")))?;
            for _ in 0..*e {
                acc *= x;
            }
        }
        Ok(acc)
    }
}

/// Lexicographic order on exponent vectors, variables taken in priority
/// order: the first variable where the exponents differ decides, and the
/// larger exponent wins.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Cmp {
        for (a, b) in self.vars.iter().zip(&other.vars) {
            if a.0 != b.0 {
                return if a.0 < b.0 { Cmp::Greater } else { Cmp::Less };
            }
            if a.1 != b.1 {
                return a.1.cmp(&b.1);
            }
        }
        self.vars.len().cmp(&other.vars.len())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Cmp> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.vars.is_empty() {
            return write!(f, "1");
        }
        for (p, (v, e)) in self.vars.iter().enumerate() {
            if p > 0 {
                write!(f, " ")?;
            }
            write!(f, "{v}")?;
            if *e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Serialize)]
struct VarRecord {
    family: usize,
    indices: Vec<usize>,
    power: u32,
}

impl Serialize for Monomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.vars.iter().map(|(v, e)| VarRecord {
            family: v.family as usize + 1,
            indices: v.indices.iter().map(|&i| i as usize + 1).collect(),
            power: *e,
        }))
    }
}

/// Sparse integer polynomial; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, i64>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: i64) -> Self {
        let mut p = Self::zero();
        if c != 0 {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    pub fn term(coeff: i64, m: Monomial) -> Self {
        let mut p = Self::zero();
        if coeff != 0 {
            p.terms.insert(m, coeff);
        }
        p
    }

    pub fn var(v: NodeVar) -> Self {
        Self::term(1, Monomial::from_vars([v]))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, i64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coeff(&self, m: &Monomial) -> i64 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    /// Highest-priority monomial and its coefficient.
    pub fn leading(&self) -> Option<(&Monomial, i64)> {
        self.terms.last_key_value().map(|(m, &c)| (m, c))
    }

    pub fn add_term(&mut self, m: Monomial, c: i64) -> Result<(), GardenError> {
        if c == 0 {
            return Ok(());
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().checked_add(c).ok_or(GardenError::Overflow)?;
                if s == 0 {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
        Ok(())
    }

    pub fn add_assign(&mut self, other: &Poly) -> Result<(), GardenError> {
        for (m, &c) in &other.terms {
            self.add_term(m.clone(), c)?;
        }
        Ok(())
    }

    pub fn add(&self, other: &Poly) -> Result<Poly, GardenError> {
        let mut out = self.clone();
        out.add_assign(other)?;
        Ok(out)
    }

    pub fn scale(&self, c: i64) -> Result<Poly, GardenError> {
        if c == 0 {
            return Ok(Poly::zero());
        }
        let mut out = Poly::zero();
        for (m, &x) in &self.terms {
            out.terms.insert(m.clone(), x.checked_mul(c).ok_or(GardenError::Overflow)?);
        }
        Ok(out)
    }

    /// Multiply by a signed monomial.
    pub fn mul_term(&self, c: i64, m: &Monomial) -> Result<Poly, GardenError> {
        let mut out = Poly::zero();
        for (x, &k) in &self.terms {
            out.terms.insert(x.mul(m), k.checked_mul(c).ok_or(GardenError::Overflow)?);
        }
        Ok(out)
    }

    /// Product, failing once the result would hold more than `budget`
    /// monomials.
    pub fn mul(&self, other: &Poly, budget: usize) -> Result<Poly, GardenError> {
        let mut acc: HashMap<Monomial, i64> = HashMap::new();
        for (a, &x) in &self.terms {
            for (b, &y) in &other.terms {
                let c = x.checked_mul(y).ok_or(GardenError::Overflow)?;
                let e = acc.entry(a.mul(b)).or_insert(0);
                *e = e.checked_add(c).ok_or(GardenError::Overflow)?;
            }
            if acc.len() > budget {
                return Err(GardenError::Budget { what: "monomial", limit: budget as u64 });
            }
        }
        Ok(Poly { terms: acc.into_iter().filter(|(_, c)| *c != 0).collect() })
    }

    pub fn evaluate(&self, values: &VariableValues) -> Result<Rational, GardenError> {
        let mut acc = Rational::zero();
        for (m, &c) in &self.terms {
            acc += m.evaluate(values)? * rat(c);
        }
        Ok(acc)
    }

    /// Every variable appearing in the polynomial.
    pub fn variables(&self) -> Vec<NodeVar> {
        let mut vs: Vec<NodeVar> = self.terms.keys().flat_map(|m| m.vars.iter().map(|(v, _)| v.clone())).collect();
        vs.sort();
        vs.dedup();
        vs
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (p, (m, &c)) in self.terms.iter().rev().enumerate() {
            let (sign, mag) = if c < 0 { ("-", -(c as i128)) } else { ("+", c as i128) };
            match (p, sign) {
                (0, "-") => write!(f, "-")?,
                (0, _) => {}
                _ => write!(f, " {sign} ")?,
            }
            if m.vars.is_empty() {
                write!(f, "{mag}")?;
            } else if mag == 1 {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag} {m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Serialize)]
struct TermRecord<'a> {
    monomial: &'a Monomial,
    coeff: i64,
}

/// Terms in descending priority.
impl Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.terms.iter().rev().map(|(m, &coeff)| TermRecord { monomial: m, coeff }))
    }
}

/// Rational values for independent node variables.
#[derive(Clone, Debug, Default)]
pub struct VariableValues {
    values: HashMap<NodeVar, Rational>,
}

impl VariableValues {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, v: NodeVar, x: Rational) {
        self.values.insert(v, x);
    }

    pub fn get(&self, v: &NodeVar) -> Option<&Rational> {
        self.values.get(v)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Random nonzero rationals `p/q` with `|p| ≤ 50`, `1 ≤ q ≤ 9` for
    /// every independent variable of each `(family, k)`: all increasing
    /// `(k+1)`-subsets of `0..d`.
    pub fn random(families: &[(Family, usize)], d: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Self::new();
        for &(family, k) in families {
            for subset in increasing_tuples(d, k + 1) {
                let p = loop {
                    let p: i64 = rng.random_range(-50..=50);
                    if p != 0 {
                        break p;
                    }
                };
                let q: i64 = rng.random_range(1..=9);
                out.insert(NodeVar::new(family, &subset), Rational::new(p.into(), q.into()));
            }
        }
        out
    }
}

/// All strictly increasing tuples of length `len` over `0..d`, in
/// lexicographic order.
pub fn increasing_tuples(d: usize, len: usize) -> Vec<Vec<usize>> {
    fn rec(d: usize, len: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for x in start..d {
            cur.push(x);
            rec(d, len, x + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, len, 0, &mut Vec::new(), &mut out);
    out
}
