//! Plain-text graph files.
//!
//! ```text
//! # comment
//! graph 3
//! v 0 1.0 0.0
//! v 1 1.0 0.0
//! v 2 2.0 0.5
//! e 0 1 1.0
//! e 1 2 0.25
//! ```
//!
//! `v <id> <m> <c>` declares every vertex `0..n` exactly once; `e <x> <y> <b>`
//! declares an undirected edge with `b > 0` at most once per pair.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use super::{GraphData, WeightedGraph};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, message: message.into() }
}

fn number(line: usize, tok: &str, what: &str) -> Result<f64, ParseError> {
    let v: f64 = tok.parse().map_err(|_| err(line, format!("{what} `{tok}` is not a number")))?;
    if !v.is_finite() {
        return Err(err(line, format!("{what} `{tok}` is not finite")));
    }
    Ok(v)
}

fn vertex(line: usize, tok: &str, n: usize) -> Result<usize, ParseError> {
    let id: usize = tok.parse().map_err(|_| err(line, format!("vertex id `{tok}` is not a non-negative integer")))?;
    if id >= n {
        return Err(err(line, format!("vertex {id} out of range for graph of {n} vertices")));
    }
    Ok(id)
}

pub fn parse_graph(text: &str) -> Result<WeightedGraph, ParseError> {
    let mut n: Option<usize> = None;
    let mut declared: Vec<Option<usize>> = Vec::new();
    let mut data = GraphData::default();
    let mut edges = BTreeSet::new();
    let mut pending_edges = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = trimmed.split_whitespace().collect();
        match (toks[0], n) {
            ("graph", None) => {
                if toks.len() != 2 {
                    return Err(err(line, "expected `graph <n>`"));
                }
                let count: usize =
                    toks[1].parse().map_err(|_| err(line, format!("vertex count `{}` is not an integer", toks[1])))?;
                n = Some(count);
                declared = vec![None; count];
                data.m = vec![0.0; count];
                data.c = vec![0.0; count];
            }
            ("graph", Some(_)) => return Err(err(line, "duplicate `graph` header")),
            (_, None) => return Err(err(line, "expected `graph <n>` header before any other line")),
            ("v", Some(n)) => {
                if toks.len() != 4 {
                    return Err(err(line, "expected `v <id> <m> <c>`"));
                }
                let id = vertex(line, toks[1], n)?;
                if let Some(first) = declared[id] {
                    return Err(err(line, format!("vertex {id} already declared on line {first}")));
                }
                let m = number(line, toks[2], "measure")?;
                let c = number(line, toks[3], "killing term")?;
                if m <= 0.0 {
                    return Err(err(line, format!("measure {m} must be positive")));
                }
                if c < 0.0 {
                    return Err(err(line, format!("killing term {c} must be non-negative")));
                }
                declared[id] = Some(line);
                data.m[id] = m;
                data.c[id] = c;
            }
            ("e", Some(n)) => {
                if toks.len() != 4 {
                    return Err(err(line, "expected `e <id1> <id2> <b>`"));
                }
                let x = vertex(line, toks[1], n)?;
                let y = vertex(line, toks[2], n)?;
                if x == y {
                    return Err(err(line, format!("self-loop at vertex {x}")));
                }
                let b = number(line, toks[3], "weight")?;
                if b <= 0.0 {
                    return Err(err(line, format!("weight {b} must be positive")));
                }
                if !edges.insert((x.min(y), x.max(y))) {
                    return Err(err(line, format!("duplicate edge {{{x},{y}}}")));
                }
                pending_edges.push((line, x, y));
                data.b.push((x, y, b));
                data.b.push((y, x, b));
            }
            (other, Some(_)) => return Err(err(line, format!("unknown record type `{other}`"))),
        }
    }

    if n.is_none() {
        return Err(err(last_line.max(1), "missing `graph <n>` header"));
    }
    for (line, x, y) in pending_edges {
        for v in [x, y] {
            if declared[v].is_none() {
                return Err(err(line, format!("edge references undeclared vertex {v}")));
            }
        }
    }
    if let Some(missing) = declared.iter().position(Option::is_none) {
        return Err(err(last_line.max(1), format!("vertex {missing} has no `v` line")));
    }
    WeightedGraph::from_data(&data).map_err(|e| err(last_line, e.to_string()))
}

/// Serializes a graph in the format accepted by [`parse_graph`]. Numbers use
/// shortest round-trip formatting, so parsing the output reproduces the graph.
pub fn write_graph(g: &WeightedGraph) -> String {
    let mut out = format!("graph {}\n", g.len());
    for x in 0..g.len() {
        let _ = writeln!(out, "v {x} {:e} {:e}", g.m[x], g.c[x]);
    }
    for (x, list) in g.adj.iter().enumerate() {
        for &(y, b) in list {
            if x < y.index() {
                let _ = writeln!(out, "e {x} {} {b:e}", y.index());
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::VertexId;

    const P3: &str = "# path on three vertices\ngraph 3\nv 0 1 0\nv 1 1 0\nv 2 1 0\n\ne 0 1 1\ne 1 2 1\n";

    #[test]
    fn parses_path() {
        let g = parse_graph(P3).unwrap();
        assert_eq!(g.len(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.weight(VertexId(1), VertexId(0)).unwrap(), 1.0);
        assert!(g.validate().is_empty());
    }

    #[test]
    fn round_trips() {
        let g = WeightedGraph::builder(3)
            .edge(0, 2, 0.1)
            .measure(1, 1.0 / 3.0)
            .killing(2, 0.7)
            .build()
            .unwrap();
        assert_eq!(parse_graph(&write_graph(&g)).unwrap(), g);
    }

    fn line_of(text: &str) -> usize {
        parse_graph(text).unwrap_err().line
    }

    #[test]
    fn diagnostics_carry_line_numbers() {
        assert_eq!(line_of("graph 2\nv 0 1 0\nv 1 1 0\ne 0 1\n"), 4);
        assert_eq!(line_of("graph 2\nv 0 1 0\nv 0 1 0\n"), 3);
        assert_eq!(line_of("graph 2\nv 0 1 0\nv 1 1 0\ne 0 1 1\ne 1 0 2\n"), 5);
        assert_eq!(line_of("graph 2\nv 0 1 0\nv 1 1 0\ne 0 5 1\n"), 4);
        assert_eq!(line_of("graph 2\nv 0 1 0\nv 1 1 0\ne 0 1 NaN\n"), 4);
        assert_eq!(line_of("graph 2\nv 0 inf 0\n"), 2);
        assert_eq!(line_of("graph 2\nv 0 0 0\n"), 2);
        assert_eq!(line_of("graph 2\nv 0 1 0\ne 0 1 1\n"), 3);
        assert_eq!(line_of("v 0 1 0\n"), 1);
        assert_eq!(line_of("graph 2\nv 0 1 0\nv 1 1 0\ne 1 1 1\n"), 4);
    }

    #[test]
    fn missing_vertex_line_is_rejected() {
        let e = parse_graph("graph 3\nv 0 1 0\nv 1 1 0\n").unwrap_err();
        assert!(e.message.contains("vertex 2"));
    }
}
