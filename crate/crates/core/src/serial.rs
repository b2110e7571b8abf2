//! Serde helpers that shift 0-based indices to the 1-based form used in output.

use serde::Serializer;

pub fn one_based<S: Serializer>(x: &usize, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u64(*x as u64 + 1)
}

pub fn one_based_vec<S: Serializer>(xs: &[usize], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|x| x + 1))
}

pub fn one_based_opt_pair<S: Serializer>(p: &Option<(usize, usize)>, s: S) -> Result<S::Ok, S::Error> {
    match p {
        Some((a, b)) => s.collect_seq([a + 1, b + 1]),
        None => s.serialize_none(),
    }
}

pub fn one_based_opt<S: Serializer>(x: &Option<usize>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(x) => s.serialize_u64(*x as u64 + 1),
        None => s.serialize_none(),
    }
}

pub fn one_based_pairs<S: Serializer>(ps: &[(usize, usize)], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(ps.iter().map(|(a, b)| [a + 1, b + 1]))
}
