//! Text formats.
//!
//! Instances: a header line `n m`, then `m` lines `u v` with 0-based node
//! indices. Certificates: a header line `size k`, then `k` lines `u v`.
//! Blank lines and everything after `#` are ignored in both.

use std::fmt::Write as _;

use thiserror::Error;

use crate::digraph::{ArcId, Digraph, GraphError, NodeId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("expected {expected} arcs, found {found}")]
    Count { expected: usize, found: usize },
    #[error("line {line}: {source}")]
    Graph { line: usize, source: GraphError },
    #[error("line {line}: node {node} out of range (n = {n})")]
    Range { line: usize, node: u64, n: usize },
    #[error("line {line}: duplicate arc {u} -> {v}")]
    Duplicate { line: usize, u: u32, v: u32 },
    #[error("line {line}: arc {u} -> {v} is not in the instance")]
    UnknownArc { line: usize, u: u32, v: u32 },
}

/// Numbered non-empty lines with comments stripped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn two_fields(line: usize, l: &str) -> Result<(u64, u64), ParseError> {
    let mut it = l.split_whitespace();
    let mut next = || -> Result<u64, ParseError> {
        let tok = it.next().ok_or_else(|| ParseError::Syntax {
            line,
            msg: "expected two integers".into(),
        })?;
        tok.parse().map_err(|_| ParseError::Syntax {
            line,
            msg: format!("`{tok}` is not a non-negative integer"),
        })
    };
    let a = next()?;
    let b = next()?;
    if it.next().is_some() {
        return Err(ParseError::Syntax {
            line,
            msg: "trailing tokens".into(),
        });
    }
    Ok((a, b))
}

fn node_in(line: usize, x: u64, n: usize) -> Result<NodeId, ParseError> {
    if (x as usize) < n && x <= u32::MAX as u64 {
        Ok(NodeId(x as u32))
    } else {
        Err(ParseError::Range { line, node: x, n })
    }
}

pub fn parse_instance(text: &str) -> Result<Digraph, ParseError> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or(ParseError::Syntax {
        line: 1,
        msg: "missing `n m` header".into(),
    })?;
    let (n, m) = two_fields(hl, header)?;
    let n = n as usize;
    let mut g = Digraph::with_nodes(n);
    let mut found = 0;
    for (line, l) in lines {
        let (u, v) = two_fields(line, l)?;
        let (u, v) = (node_in(line, u, n)?, node_in(line, v, n)?);
        if g.arc_between(u, v).is_some() {
            return Err(ParseError::Duplicate { line, u: u.0, v: v.0 });
        }
        g.add_arc(u, v).map_err(|source| ParseError::Graph { line, source })?;
        found += 1;
    }
    if found != m as usize {
        return Err(ParseError::Count {
            expected: m as usize,
            found,
        });
    }
    Ok(g)
}

pub fn write_instance(g: &Digraph) -> String {
    let mut s = format!("{} {}\n", g.node_count(), g.arc_count());
    for a in g.arcs() {
        let (u, v) = g.endpoints(a);
        writeln!(s, "{} {}", u.0, v.0).unwrap();
    }
    s
}

/// A parsed certificate: claimed size and arcs as original node pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub size: usize,
    pub arcs: Vec<(u32, u32)>,
}

impl Certificate {
    pub fn from_arcs(g: &Digraph, arcs: &[ArcId]) -> Self {
        let arcs = arcs
            .iter()
            .map(|&a| {
                let (u, v) = g.original_endpoints(a);
                (u.0, v.0)
            })
            .collect::<Vec<_>>();
        Certificate { size: arcs.len(), arcs }
    }

    /// The arc ids of `g` named by the certificate.
    pub fn resolve(&self, g: &Digraph) -> Result<Vec<ArcId>, ParseError> {
        self.arcs
            .iter()
            .enumerate()
            .map(|(i, &(u, v))| {
                g.arc_between(NodeId(u), NodeId(v))
                    .ok_or(ParseError::UnknownArc { line: i + 2, u, v })
            })
            .collect()
    }
}

pub fn parse_certificate(text: &str) -> Result<Certificate, ParseError> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or(ParseError::Syntax {
        line: 1,
        msg: "missing `size k` header".into(),
    })?;
    let size = header
        .strip_prefix("size")
        .map(str::trim)
        .and_then(|k| k.parse::<usize>().ok())
        .ok_or_else(|| ParseError::Syntax {
            line: hl,
            msg: "expected `size k`".into(),
        })?;
    let mut arcs = Vec::new();
    for (line, l) in lines {
        let (u, v) = two_fields(line, l)?;
        if u > u32::MAX as u64 || v > u32::MAX as u64 {
            return Err(ParseError::Range {
                line,
                node: u.max(v),
                n: u32::MAX as usize,
            });
        }
        arcs.push((u as u32, v as u32));
    }
    Ok(Certificate { size, arcs })
}

pub fn write_certificate(c: &Certificate) -> String {
    let mut s = format!("size {}\n", c.size);
    for &(u, v) in &c.arcs {
        writeln!(s, "{u} {v}").unwrap();
    }
    s
}
