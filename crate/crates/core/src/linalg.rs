//! Dense exact linear algebra over the rationals.
//!
//! Rank and echelon forms use fraction-free (Bareiss) elimination on
//! integer-scaled rows; nullspace vectors are recovered by rational
//! back-substitution and returned as primitive integer vectors.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::LinalgError;
use crate::graph::Graph;

pub type Rational = BigRational;
pub type RationalVector = Vec<Rational>;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn parse_rational(s: &str) -> Result<Rational, LinalgError> {
    let bad = || LinalgError::Parse(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(LinalgError::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinalgError::DimensionMismatch("ragged rows".into()));
        }
        Ok(Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect())
            .expect("rectangular literal")
    }

    /// Matrix whose columns are the given vectors, all of length `d`.
    pub fn from_columns(cols: &[RationalVector], d: usize) -> Result<Self, LinalgError> {
        let mut m = Self::zeros(d, cols.len());
        for (j, col) in cols.iter().enumerate() {
            if col.len() != d {
                return Err(LinalgError::DimensionMismatch(format!("column {j} has length {}, expected {d}", col.len())));
            }
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> RationalVector {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn row_vecs(&self) -> Vec<RationalVector> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    if !other[(k, j)].is_zero() {
                        out[(i, j)] += a * &other[(k, j)];
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<RationalVector, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch(format!("vector of length {} for {} columns", v.len(), self.cols)));
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// First asymmetric entry `(i, j)` with `i < j`, if any.
    pub fn asymmetry(&self) -> Option<(usize, usize)> {
        if !self.is_square() {
            return Some((0, 0));
        }
        (0..self.rows)
            .flat_map(|j| (0..j).map(move |i| (i, j)))
            .find(|&(i, j)| self[(i, j)] != self[(j, i)])
    }

    pub fn ensure_symmetric(&self) -> Result<(), LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::DimensionMismatch(format!("{}x{} is not square", self.rows, self.cols)));
        }
        match self.asymmetry() {
            Some((row, col)) => Err(LinalgError::NotSymmetric { row, col }),
            None => Ok(()),
        }
    }

    /// `out[x][y] = self[perm[x]][perm[y]]`.
    pub fn permute_symmetric(&self, perm: &[usize]) -> Self {
        let n = perm.len();
        let mut out = Self::zeros(n, n);
        for x in 0..n {
            for y in 0..n {
                out[(x, y)] = self[(perm[x], perm[y])].clone();
            }
        }
        out
    }

    /// Principal submatrix on the given index set.
    pub fn principal(&self, idx: &[usize]) -> Self {
        self.permute_symmetric(idx)
    }

    pub fn scale_column(&mut self, j: usize, c: &Rational) {
        for i in 0..self.rows {
            self[(i, j)] *= c;
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    /// Rows of whitespace-separated rationals; blank lines and `#` comments
    /// are skipped.
    pub fn from_text(text: &str) -> Result<Self, LinalgError> {
        let rows = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(|l| l.split_whitespace().map(parse_rational).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_rows(rows)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("matrix serialises")
    }
}

impl std::ops::Index<(usize, usize)> for RationalMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RationalMatrix {}x{}", self.rows, self.cols)?;
        f.write_str(&self.to_text())
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<String>>,
}

impl Serialize for RationalMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatrixRepr {
            rows: self.rows,
            cols: self.cols,
            entries: (0..self.rows).map(|i| self.row(i).iter().map(ToString::to_string).collect()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = MatrixRepr::deserialize(d)?;
        if repr.entries.len() != repr.rows || repr.entries.iter().any(|r| r.len() != repr.cols) {
            return Err(D::Error::custom("entries do not match the declared shape"));
        }
        let mut m = RationalMatrix::zeros(repr.rows, repr.cols);
        for (i, row) in repr.entries.iter().enumerate() {
            for (j, s) in row.iter().enumerate() {
                m[(i, j)] = parse_rational(s).map_err(D::Error::custom)?;
            }
        }
        Ok(m)
    }
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).filter(|(x, y)| !x.is_zero() && !y.is_zero()).map(|(x, y)| x * y).sum()
}

pub fn is_zero_vector(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Scale a row of rationals to integers by the lcm of its denominators.
fn integer_row(row: &[Rational]) -> Vec<BigInt> {
    let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
}

/// Fraction-free row echelon form. Returns the reduced integer rows and
/// the pivot column of each nonzero row.
fn bareiss(rows: &[Vec<Rational>], cols: usize) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let mut m: Vec<Vec<BigInt>> = rows.iter().map(|r| integer_row(r)).collect();
    let nrows = m.len();
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..nrows {
            for k in c + 1..cols {
                let v = (&m[r][c] * &m[i][k] - &m[i][c] * &m[r][k]) / &prev;
                m[i][k] = v;
            }
            m[i][c] = BigInt::zero();
        }
        // the remaining entries left of `c` in rows below are already zero
        prev = m[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(m: &RationalMatrix) -> usize {
    rank_of_rows(&m.row_vecs(), m.cols())
}

pub fn rank_of_rows(rows: &[RationalVector], cols: usize) -> usize {
    bareiss(rows, cols).1.len()
}

pub fn nullity(m: &RationalMatrix) -> usize {
    m.cols() - rank(m)
}

/// Whether the given vectors are linearly independent.
pub fn independent(vectors: &[RationalVector], d: usize) -> bool {
    rank_of_rows(vectors, d) == vectors.len()
}

/// Divide out the content and make the leading nonzero entry positive.
pub fn primitive(v: &[Rational]) -> RationalVector {
    let ints = integer_row(v);
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return v.to_vec();
    }
    let lead_negative = ints.iter().find(|x| !x.is_zero()).is_some_and(Signed::is_negative);
    let g = if lead_negative { -g } else { g };
    ints.into_iter().map(|x| Rational::from_integer(x / &g)).collect()
}

/// Basis of the right nullspace, one primitive integer vector per free
/// column, ordered by free column index.
pub fn nullspace_basis(m: &RationalMatrix) -> Vec<RationalVector> {
    nullspace_of_rows(&m.row_vecs(), m.cols())
}

fn nullspace_of_rows(rows: &[RationalVector], cols: usize) -> Vec<RationalVector> {
    let (ech, pivots) = bareiss(rows, cols);
    let mut is_pivot = vec![false; cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut x = vec![Rational::zero(); cols];
        x[free] = Rational::one();
        for (r, &p) in pivots.iter().enumerate().rev() {
            let s: Rational = (p + 1..cols)
                .filter(|&c| !ech[r][c].is_zero() && !x[c].is_zero())
                .map(|c| Rational::from_integer(ech[r][c].clone()) * &x[c])
                .sum();
            x[p] = -s / Rational::from_integer(ech[r][p].clone());
        }
        basis.push(primitive(&x));
    }
    basis
}

/// Basis of `{x ∈ Q^d : xᵀv = 0 for all v}`.
pub fn orthogonal_complement(vectors: &[RationalVector], d: usize) -> Result<Vec<RationalVector>, LinalgError> {
    if let Some(v) = vectors.iter().find(|v| v.len() != d) {
        return Err(LinalgError::DimensionMismatch(format!("vector of length {} in ambient dimension {d}", v.len())));
    }
    Ok(nullspace_of_rows(vectors, d))
}

/// `RᵀR`.
pub fn gram(r: &RationalMatrix) -> RationalMatrix {
    let n = r.cols();
    let cols: Vec<RationalVector> = (0..n).map(|j| r.column(j)).collect();
    let mut t = RationalMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = dot(&cols[i], &cols[j]);
            t[(j, i)] = v.clone();
            t[(i, j)] = v;
        }
    }
    t
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PsdVerdict {
    Psd,
    NotPsd,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PsdCertificate {
    pub verdict: PsdVerdict,
    /// Indices in the order they were eliminated.
    pub pivot_order: Vec<usize>,
    #[serde(serialize_with = "ser_rationals")]
    pub pivots: Vec<Rational>,
    /// A principal submatrix with negative determinant, sorted.
    pub failing_minor: Option<Vec<usize>>,
}

impl PsdCertificate {
    pub fn is_psd(&self) -> bool {
        self.verdict == PsdVerdict::Psd
    }
}

fn ser_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(ToString::to_string))
}

/// Exact LDLᵀ with symmetric pivoting. Eliminates positive pivots one at a
/// time; a negative Schur diagonal, or a zero diagonal whose row is not
/// zero, proves indefiniteness and yields a principal minor with negative
/// determinant.
pub fn psd_check(a: &RationalMatrix) -> Result<PsdCertificate, LinalgError> {
    a.ensure_symmetric()?;
    let n = a.rows();
    let mut s = a.clone();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut order = Vec::new();
    let mut pivots = Vec::new();
    let not_psd = |order: &[usize], pivots: Vec<Rational>, extra: &[usize]| {
        let mut minor: Vec<usize> = order.iter().chain(extra).copied().collect();
        minor.sort_unstable();
        PsdCertificate { verdict: PsdVerdict::NotPsd, pivot_order: order.to_vec(), pivots, failing_minor: Some(minor) }
    };
    while !remaining.is_empty() {
        if let Some(&i) = remaining.iter().find(|&&i| s[(i, i)].is_negative()) {
            let mut p = pivots.clone();
            p.push(s[(i, i)].clone());
            let mut o = order.clone();
            o.push(i);
            return Ok(not_psd(&o[..o.len() - 1], p, &[i]));
        }
        let Some(&p) = remaining.iter().find(|&&i| s[(i, i)].is_positive()) else {
            let bad = remaining
                .iter()
                .flat_map(|&i| remaining.iter().map(move |&j| (i, j)))
                .find(|&(i, j)| i < j && !s[(i, j)].is_zero());
            if let Some((i, j)) = bad {
                return Ok(not_psd(&order, pivots, &[i, j]));
            }
            for &i in &remaining {
                order.push(i);
                pivots.push(Rational::zero());
            }
            break;
        };
        remaining.retain(|&i| i != p);
        let piv = s[(p, p)].clone();
        for &i in &remaining {
            if s[(i, p)].is_zero() {
                continue;
            }
            let f = &s[(i, p)] / &piv;
            for &j in &remaining {
                if !s[(p, j)].is_zero() {
                    let v = &f * &s[(p, j)];
                    s[(i, j)] -= v;
                }
            }
        }
        order.push(p);
        pivots.push(piv);
    }
    Ok(PsdCertificate { verdict: PsdVerdict::Psd, pivot_order: order, pivots, failing_minor: None })
}

/// Edge–vertex incidence matrix: one row per edge `u < v`, with `-1` in
/// column `u` and `+1` in column `v`.
pub fn laplacian_representation(g: &Graph) -> RationalMatrix {
    let mut m = RationalMatrix::zeros(g.edge_count(), g.n());
    for (r, (u, v)) in g.edges().enumerate() {
        m[(r, u)] = rat(-1);
        m[(r, v)] = rat(1);
    }
    m
}

/// Exact determinant by fraction-free elimination.
pub fn determinant(m: &RationalMatrix) -> Result<Rational, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::DimensionMismatch("determinant of a non-square matrix".into()));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(Rational::one());
    }
    let denom = (0..n).fold(BigInt::one(), |acc, i| acc * m.row(i).iter().fold(BigInt::one(), |l, x| l.lcm(x.denom())));
    let mut a: Vec<Vec<BigInt>> = m.row_vecs().iter().map(|r| integer_row(r)).collect();
    let mut sign = 1;
    let mut prev = BigInt::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Ok(Rational::zero());
        };
        if p != c {
            a.swap(p, c);
            sign = -sign;
        }
        for i in c + 1..n {
            for k in c + 1..n {
                a[i][k] = (&a[c][c] * &a[i][k] - &a[i][c] * &a[c][k]) / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[c][c].clone();
    }
    Ok(Rational::new(prev * sign, denom))
}
