//! Text formats: graph6, a 1-based edge list ("n m" header, then one
//! "i j" pair per line) and exact rational matrices.

use crate::error::GraphError;
use crate::graph::Graph;

const HEADER: &str = ">>graph6<<";

fn encode_size(n: usize, out: &mut String) {
    if n <= 62 {
        out.push((n as u8 + 63) as char);
    } else if n <= 258_047 {
        out.push('~');
        for shift in [12, 6, 0] {
            out.push(((n >> shift & 63) as u8 + 63) as char);
        }
    } else {
        out.push_str("~~");
        for shift in [30, 24, 18, 12, 6, 0] {
            out.push(((n >> shift & 63) as u8 + 63) as char);
        }
    }
}

pub fn to_graph6(g: &Graph) -> String {
    let n = g.n();
    let mut out = String::new();
    encode_size(n, &mut out);
    let mut acc = 0u8;
    let mut bits = 0;
    for j in 1..n {
        for i in 0..j {
            acc = acc << 1 | g.has_edge(i, j) as u8;
            bits += 1;
            if bits == 6 {
                out.push((acc + 63) as char);
                acc = 0;
                bits = 0;
            }
        }
    }
    if bits > 0 {
        out.push(((acc << (6 - bits)) + 63) as char);
    }
    out
}

pub fn from_graph6(text: &str) -> Result<Graph, GraphError> {
    let bad = |msg: &str| GraphError::Parse { line: 1, msg: msg.to_string() };
    let s = text.trim();
    let s = s.strip_prefix(HEADER).unwrap_or(s);
    let bytes: Vec<u8> = s.bytes().collect();
    if bytes.iter().any(|&b| !(63..=126).contains(&b)) {
        return Err(bad("graph6 characters must lie in '?'..='~'"));
    }
    let six = |b: u8| (b - 63) as usize;
    let (n, body) = match bytes.as_slice() {
        [126, 126, rest @ ..] if rest.len() >= 6 => (rest[..6].iter().fold(0, |a, &b| a << 6 | six(b)), &rest[6..]),
        [126, rest @ ..] if rest.len() >= 3 => (rest[..3].iter().fold(0, |a, &b| a << 6 | six(b)), &rest[3..]),
        [first, rest @ ..] if *first != 126 => (six(*first), rest),
        _ => return Err(bad("truncated graph6 size field")),
    };
    let need = (n * n.saturating_sub(1) / 2).div_ceil(6);
    if body.len() != need {
        return Err(bad(&format!("expected {need} data bytes for n = {n}, found {}", body.len())));
    }
    let mut g = Graph::new(n)?;
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            let byte = six(body[k / 6]);
            if byte >> (5 - k % 6) & 1 == 1 {
                g.add_edge(i, j)?;
            }
            k += 1;
        }
    }
    Ok(g)
}

pub fn to_edge_list(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.edge_count());
    for (u, v) in g.edges() {
        out.push_str(&format!("{} {}\n", u + 1, v + 1));
    }
    out
}

pub fn from_edge_list(text: &str) -> Result<Graph, GraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let parse_pair = |line: usize, l: &str| -> Result<(usize, usize), GraphError> {
        let nums: Vec<&str> = l.split_whitespace().collect();
        match nums.as_slice() {
            [a, b] => match (a.parse(), b.parse()) {
                (Ok(a), Ok(b)) => Ok((a, b)),
                _ => Err(GraphError::Parse { line, msg: format!("expected two integers, got {l:?}") }),
            },
            _ => Err(GraphError::Parse { line, msg: format!("expected two integers, got {l:?}") }),
        }
    };
    let (line, header) = lines.next().ok_or(GraphError::Parse { line: 1, msg: "empty input".into() })?;
    let (n, m) = parse_pair(line, header)?;
    let mut g = Graph::new(n)?;
    let mut count = 0;
    for (line, l) in lines {
        let (u, v) = parse_pair(line, l)?;
        if u == 0 || v == 0 || u > n || v > n {
            return Err(GraphError::Parse { line, msg: format!("vertex out of 1..={n}") });
        }
        if u == v {
            return Err(GraphError::Parse { line, msg: "self-loop".into() });
        }
        if g.has_edge(u - 1, v - 1) {
            return Err(GraphError::Parse { line, msg: format!("duplicate edge {u} {v}") });
        }
        g.add_edge(u - 1, v - 1)?;
        count += 1;
    }
    if count != m {
        return Err(GraphError::Parse { line: 1, msg: format!("header announces {m} edges, found {count}") });
    }
    Ok(g)
}

/// Accepts either format: an edge list starts with a line of two integers.
pub fn parse_graph(text: &str) -> Result<Graph, GraphError> {
    let first = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty())
        .ok_or(GraphError::Parse { line: 1, msg: "empty input".into() })?;
    let looks_numeric = first.split_whitespace().count() == 2 && first.split_whitespace().all(|t| t.parse::<usize>().is_ok());
    if looks_numeric {
        from_edge_list(text)
    } else {
        from_graph6(first)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph6_known_strings() {
        // standard examples from the format description
        let g = Graph::from_edges(5, [(0, 2), (0, 4), (1, 3), (3, 4)]).unwrap();
        assert_eq!(to_graph6(&g), "DQc");
        assert_eq!(from_graph6("DQc").unwrap(), g);
        assert_eq!(to_graph6(&Graph::new(1).unwrap()), "@");
        assert_eq!(to_graph6(&Graph::complete(2).unwrap()), "A_");
        assert_eq!(from_graph6(">>graph6<<A_").unwrap(), Graph::complete(2).unwrap());
    }

    #[test]
    fn graph6_large_size_field() {
        let mut g = Graph::new(100).unwrap();
        g.add_edge(3, 97).unwrap();
        let s = to_graph6(&g);
        assert!(s.starts_with('~'));
        assert_eq!(from_graph6(&s).unwrap(), g);
    }

    #[test]
    fn graph6_rejects_garbage() {
        assert!(from_graph6("D Q").is_err());
        assert!(from_graph6("DQ").is_err());
        assert!(from_graph6("").is_err());
    }

    #[test]
    fn edge_list_round_trip_and_errors() {
        let g = Graph::petersen();
        assert_eq!(from_edge_list(&to_edge_list(&g)).unwrap(), g);
        assert!(from_edge_list("3 1\n1 1\n").is_err());
        assert!(from_edge_list("3 2\n1 2\n").is_err());
        assert!(from_edge_list("3 1\n1 4\n").is_err());
        assert!(from_edge_list("3 2\n1 2\n2 1\n").is_err());
        let with_comments = "# path\n3 2\n1 2 # first\n\n2 3\n";
        assert_eq!(from_edge_list(with_comments).unwrap(), Graph::path(3).unwrap());
    }

    #[test]
    fn detects_format() {
        assert_eq!(parse_graph("4 3\n1 2\n2 3\n3 4\n").unwrap(), Graph::path(4).unwrap());
        assert_eq!(parse_graph("DQc\n").unwrap().edge_count(), 4);
    }
}
