//! Plain-text graph format: `n k`, then the colour indices, then one `u v`
//! line per edge in lexicographic order.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::ColouredGraph;

pub fn write_graph(x: &ColouredGraph) -> String {
    let mut out = String::with_capacity(16 + 2 * x.n() + 12 * x.edges().len());
    let _ = writeln!(out, "{} {}", x.n(), x.k());
    for (i, c) in x.colours().iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{c}");
    }
    out.push('\n');
    for (u, v) in x.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

fn parse_usize(tok: &str, what: &str) -> Result<usize> {
    tok.parse().map_err(|_| Error::parse(format!("bad {what} {tok:?}")))
}

pub fn read_graph(text: &str) -> Result<ColouredGraph> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::parse("empty graph file"))?;
    let head: Vec<&str> = header.split_whitespace().collect();
    if head.len() != 2 {
        return Err(Error::parse("header must be `n k`"));
    }
    let n = parse_usize(head[0], "vertex count")?;
    let k = parse_usize(head[1], "colour count")?;
    let colours = lines
        .next()
        .ok_or_else(|| Error::parse("missing colour line"))?
        .split_whitespace()
        .map(|t| parse_usize(t, "colour"))
        .collect::<Result<Vec<_>>>()?;
    if colours.len() != n {
        return Err(Error::parse(format!("expected {n} colours, found {}", colours.len())));
    }
    let mut edges = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let mut toks = line.split_whitespace();
        let (Some(u), Some(v), None) = (toks.next(), toks.next(), toks.next()) else {
            return Err(Error::parse(format!("bad edge line {line:?}")));
        };
        edges.push((parse_usize(u, "vertex")?, parse_usize(v, "vertex")?));
    }
    ColouredGraph::new(k, colours, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let g = ColouredGraph::new(3, vec![0, 2, 1, 1], vec![(2, 3), (0, 1), (0, 3)]).unwrap();
        let s = write_graph(&g);
        assert_eq!(s, "4 3\n0 2 1 1\n0 1\n0 3\n2 3\n");
        assert_eq!(read_graph(&s).unwrap(), g);
        assert_eq!(write_graph(&read_graph(&s).unwrap()), s);
    }

    #[test]
    fn rejects_malformed() {
        assert!(read_graph("").is_err());
        assert!(read_graph("2 2\n0\n").is_err());
        assert!(read_graph("2 2\n0 1\n1 0\n").is_err());
        assert!(read_graph("2 2\n0 5\n").is_err());
        assert!(read_graph("2 2\n0 1\n0 1 1\n").is_err());
    }
}
