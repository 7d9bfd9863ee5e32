//! Plain-text graph files.
//!
//! ```text
//! # comment
//! rgraph 4 6
//! e 0 1
//! e 0 2
//! ...
//! ```
//!
//! Vertices are 0-based and repeated edge lines are parallel edges. Edge ids
//! follow line order.

use std::path::Path;

use thiserror::Error;

use crate::graph::MultiGraph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("expected {expected} edge lines, found {found}")]
    EdgeCount { expected: usize, found: usize },
    #[error("missing header line")]
    MissingHeader,
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

fn number(token: Option<&str>, line: usize, what: &str) -> Result<usize, ParseError> {
    let token = token.ok_or_else(|| syntax(line, format!("missing {what}")))?;
    token
        .parse()
        .map_err(|_| syntax(line, format!("{what} '{token}' is not a non-negative integer")))
}

pub fn parse_graph(text: &str) -> Result<MultiGraph, ParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let tag = tokens.next().unwrap_or_default();
        match (tag, header) {
            ("rgraph", None) => {
                let n = number(tokens.next(), line, "vertex count")?;
                let m = number(tokens.next(), line, "edge count")?;
                header = Some((n, m));
            }
            ("rgraph", Some(_)) => return Err(syntax(line, "duplicate header")),
            ("e", Some((n, m))) => {
                let u = number(tokens.next(), line, "endpoint")?;
                let v = number(tokens.next(), line, "endpoint")?;
                if u == v {
                    return Err(syntax(line, format!("loop at vertex {u}")));
                }
                if u >= n || v >= n {
                    return Err(syntax(line, format!("vertex out of range 0..{n}")));
                }
                if pairs.len() == m {
                    return Err(syntax(line, format!("more than {m} edge lines")));
                }
                pairs.push((u, v));
            }
            ("e", None) => return Err(syntax(line, "edge before header")),
            _ => return Err(syntax(line, format!("unknown line type '{tag}'"))),
        }
        if tokens.next().is_some() {
            return Err(syntax(line, "trailing tokens"));
        }
    }
    let (n, m) = header.ok_or(ParseError::MissingHeader)?;
    if pairs.len() != m {
        return Err(ParseError::EdgeCount {
            expected: m,
            found: pairs.len(),
        });
    }
    Ok(MultiGraph::new(n, &pairs).expect("endpoints validated"))
}

pub fn write_graph(g: &MultiGraph) -> String {
    let mut out = format!("rgraph {} {}\n", g.vertex_count(), g.edge_count());
    for e in g.edges() {
        out.push_str(&format!("e {} {}\n", e.u, e.v));
    }
    out
}

pub fn read_graph_file(path: &Path) -> Result<MultiGraph, ParseError> {
    let text = std::fs::read_to_string(path).map_err(|e| ParseError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_graph(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::named;

    #[test]
    fn round_trip() {
        for g in [named::petersen(), named::k4_doubled(), named::parallel_pair(3)] {
            assert_eq!(parse_graph(&write_graph(&g)).unwrap(), g);
        }
    }

    #[test]
    fn comments_and_blank_lines() {
        let g = parse_graph("# c4\n\nrgraph 4 4\ne 0 1\n  # inner\ne 1 2\ne 2 3\ne 3 0\n").unwrap();
        assert_eq!(g, named::cycle(4));
    }

    #[test]
    fn errors_carry_lines() {
        let err = |s: &str| parse_graph(s).unwrap_err();
        assert_eq!(err("rgraph 2 1\ne 1 1\n"), syntax(2, "loop at vertex 1"));
        assert!(matches!(err("rgraph 2 1\n\ne 0 5\n"), ParseError::Syntax { line: 3, .. }));
        assert!(matches!(err("e 0 1\n"), ParseError::Syntax { line: 1, .. }));
        assert!(matches!(err("rgraph 2 x\n"), ParseError::Syntax { line: 1, .. }));
        assert_eq!(err("rgraph 2 2\ne 0 1\n"), ParseError::EdgeCount { expected: 2, found: 1 });
        assert!(matches!(err("rgraph 2 1\ne 0 1\ne 0 1\n"), ParseError::Syntax { line: 3, .. }));
        assert_eq!(err("# nothing\n"), ParseError::MissingHeader);
    }
}
