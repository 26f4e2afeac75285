//! Edge-list format: the vertex count on the first non-blank line, then one
//! `i j` pair per line. Blank lines are ignored, LF or CRLF endings are
//! accepted, duplicate edges (in either orientation) collapse.

use std::fmt::Write as _;

use energame_core::graph::{Graph, MAX_VERTICES};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct EdgeListError {
    pub line: usize,
    pub kind: EdgeListErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EdgeListErrorKind {
    #[error("missing vertex count")]
    MissingVertexCount,
    #[error("malformed integer {0:?}")]
    BadInteger(String),
    #[error("expected {expected} field(s), found {found}")]
    FieldCount { expected: usize, found: usize },
    #[error("vertex count {0} exceeds the supported maximum of {MAX_VERTICES}")]
    TooManyVertices(usize),
    #[error("vertex {vertex} out of range 0..{n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
}

fn int(tok: &str, line: usize) -> Result<usize, EdgeListError> {
    tok.parse().map_err(|_| EdgeListError { line, kind: EdgeListErrorKind::BadInteger(tok.to_string()) })
}

pub fn parse_edge_list(text: &str) -> Result<Graph, EdgeListError> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l.trim())).filter(|(_, l)| !l.is_empty());

    let (first_line, header) = lines
        .next()
        .ok_or(EdgeListError { line: 1, kind: EdgeListErrorKind::MissingVertexCount })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 1 {
        return Err(EdgeListError {
            line: first_line,
            kind: EdgeListErrorKind::FieldCount { expected: 1, found: fields.len() },
        });
    }
    let n = int(fields[0], first_line)?;
    if n > MAX_VERTICES {
        return Err(EdgeListError { line: first_line, kind: EdgeListErrorKind::TooManyVertices(n) });
    }

    let mut edges = Vec::new();
    for (line, body) in lines {
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(EdgeListError { line, kind: EdgeListErrorKind::FieldCount { expected: 2, found: fields.len() } });
        }
        let (i, j) = (int(fields[0], line)?, int(fields[1], line)?);
        for v in [i, j] {
            if v >= n {
                return Err(EdgeListError { line, kind: EdgeListErrorKind::VertexOutOfRange { vertex: v, n } });
            }
        }
        if i == j {
            return Err(EdgeListError { line, kind: EdgeListErrorKind::SelfLoop(i) });
        }
        edges.push((i, j));
    }
    Ok(Graph::from_edges(n, edges).expect("edges validated above"))
}

/// Writes `g` in edge-list form, edges in lexicographic order.
pub fn write_edge_list(g: &Graph) -> String {
    let mut out = format!("{}\n", g.n());
    for (i, j) in g.edges() {
        writeln!(out, "{i} {j}").expect("writing to a String");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use energame_core::graph::path;

    #[test]
    fn parses_p3() {
        assert_eq!(parse_edge_list("3\n0 1\n1 2").unwrap(), path(3).unwrap());
        assert_eq!(parse_edge_list("  3 \r\n0   1\r\n\r\n 1 2 \r\n").unwrap(), path(3).unwrap());
    }

    #[test]
    fn edgeless_and_dedup() {
        let g = parse_edge_list("2\n").unwrap();
        assert_eq!((g.n(), g.m()), (2, 0));
        let g = parse_edge_list("3\n0 1\n1 0").unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), [(0, 1)]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_edge_list("3\n0 1\n2 2\n").unwrap_err();
        assert_eq!(e, EdgeListError { line: 3, kind: EdgeListErrorKind::SelfLoop(2) });
        let e = parse_edge_list("3\n0 1\n\n1 3\n").unwrap_err();
        assert_eq!(e, EdgeListError { line: 4, kind: EdgeListErrorKind::VertexOutOfRange { vertex: 3, n: 3 } });
        let e = parse_edge_list("3\n0 x\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(matches!(e.kind, EdgeListErrorKind::BadInteger(_)));
        assert_eq!(parse_edge_list("").unwrap_err().kind, EdgeListErrorKind::MissingVertexCount);
        assert_eq!(parse_edge_list("3\n0 1 2\n").unwrap_err().line, 2);
        assert_eq!(parse_edge_list("-1\n").unwrap_err().line, 1);
        assert!(matches!(parse_edge_list("63\n").unwrap_err().kind, EdgeListErrorKind::TooManyVertices(63)));
        assert_eq!(e.to_string(), "line 2: malformed integer \"x\"");
    }

    #[test]
    fn write_then_parse() {
        let g = Graph::from_edges(5, [(0, 4), (2, 3), (1, 2)]).unwrap();
        assert_eq!(parse_edge_list(&write_edge_list(&g)).unwrap(), g);
    }
}
