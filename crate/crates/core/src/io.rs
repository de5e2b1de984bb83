//! hMetis hypergraph files and one-block-per-line partition files.
//!
//! Files are 1-indexed; everything in memory is 0-indexed.

use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::hypergraph::{BlockId, Hypergraph, HypergraphError, Partition, PartitionError};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: malformed header: {reason}")]
    Header { line: usize, reason: String },
    #[error("line {line}: invalid number {token:?}")]
    Number { line: usize, token: String },
    #[error("line {line}: pin {pin} out of range 1..={num_vertices}")]
    PinOutOfRange { line: usize, pin: i64, num_vertices: usize },
    #[error("line {line}: empty hyperedge")]
    EmptyHyperedge { line: usize },
    #[error("line {line}: weight {weight} is not positive")]
    NonPositiveWeight { line: usize, weight: i64 },
    #[error("line {line}: expected a single vertex weight")]
    VertexWeightLine { line: usize },
    #[error("unexpected end of file: expected {expected}")]
    Truncated { expected: String },
    #[error("line {line}: unexpected trailing content")]
    TrailingContent { line: usize },
    #[error("line {line}: block {block} out of range for k = {k}")]
    BlockOutOfRange { line: usize, block: i64, k: usize },
    #[error("partition file has {got} lines, expected {expected}")]
    LineCount { expected: usize, got: usize },
    #[error(transparent)]
    Hypergraph(#[from] HypergraphError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Yields `(1-based line number, content)` for non-comment lines.
struct Lines<R> {
    inner: io::Lines<R>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    fn new(reader: R) -> Self {
        Self {
            inner: reader.lines(),
            line: 0,
        }
    }

    fn next_line(&mut self) -> Result<Option<(usize, String)>, ParseError> {
        for text in self.inner.by_ref() {
            self.line += 1;
            let text = text?;
            if text.trim_start().starts_with('%') {
                continue;
            }
            return Ok(Some((self.line, text)));
        }
        Ok(None)
    }

    fn require(&mut self, expected: impl FnOnce() -> String) -> Result<(usize, String), ParseError> {
        self.next_line()?
            .ok_or_else(|| ParseError::Truncated { expected: expected() })
    }
}

fn numbers(line: usize, text: &str) -> Result<Vec<i64>, ParseError> {
    text.split_whitespace()
        .map(|token| {
            token.parse::<i64>().map_err(|_| ParseError::Number {
                line,
                token: token.to_string(),
            })
        })
        .collect()
}

/// Reads an hMetis hypergraph: header `|E| |V| [fmt]` with fmt in {1, 10, 11}.
pub fn parse_hmetis<R: BufRead>(reader: R) -> Result<Hypergraph, ParseError> {
    let mut lines = Lines::new(reader);
    let (header_line, header) = loop {
        let (line, text) = lines.require(|| "header".into())?;
        if !text.trim().is_empty() {
            break (line, text);
        }
    };
    let header_fields = numbers(header_line, &header).map_err(|_| ParseError::Header {
        line: header_line,
        reason: "expected integers".into(),
    })?;
    let header_err = |reason: &str| ParseError::Header {
        line: header_line,
        reason: reason.into(),
    };
    if header_fields.len() < 2 || header_fields.len() > 3 {
        return Err(header_err("expected `|E| |V| [fmt]`"));
    }
    if header_fields[0] < 0 || header_fields[1] < 0 {
        return Err(header_err("negative count"));
    }
    let num_edges = header_fields[0] as usize;
    let num_vertices = header_fields[1] as usize;
    let fmt = header_fields.get(2).copied().unwrap_or(0);
    let (edge_weighted, vertex_weighted) = match fmt {
        0 => (false, false),
        1 => (true, false),
        10 => (false, true),
        11 => (true, true),
        _ => return Err(header_err("fmt must be one of 1, 10, 11")),
    };

    let mut edges = Vec::with_capacity(num_edges);
    let mut edge_weights = Vec::with_capacity(num_edges);
    for e in 0..num_edges {
        let (line, text) = lines.require(|| format!("hyperedge {}", e + 1))?;
        let mut fields = numbers(line, &text)?.into_iter();
        if edge_weighted {
            let weight = fields.next().ok_or(ParseError::EmptyHyperedge { line })?;
            if weight < 1 {
                return Err(ParseError::NonPositiveWeight { line, weight });
            }
            edge_weights.push(weight);
        }
        let pins = fields
            .map(|pin| {
                if pin < 1 || pin as usize > num_vertices {
                    Err(ParseError::PinOutOfRange {
                        line,
                        pin,
                        num_vertices,
                    })
                } else {
                    Ok(pin as usize - 1)
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        if pins.is_empty() {
            return Err(ParseError::EmptyHyperedge { line });
        }
        edges.push(pins);
    }

    let mut vertex_weights = Vec::new();
    if vertex_weighted {
        vertex_weights.reserve(num_vertices);
        for v in 0..num_vertices {
            let (line, text) = lines.require(|| format!("weight of vertex {}", v + 1))?;
            let fields = numbers(line, &text)?;
            let [weight] = fields[..] else {
                return Err(ParseError::VertexWeightLine { line });
            };
            if weight < 1 {
                return Err(ParseError::NonPositiveWeight { line, weight });
            }
            vertex_weights.push(weight);
        }
    }

    while let Some((line, text)) = lines.next_line()? {
        if !text.trim().is_empty() {
            return Err(ParseError::TrailingContent { line });
        }
    }

    Ok(Hypergraph::new(
        num_vertices,
        edges,
        edge_weighted.then_some(edge_weights),
        vertex_weighted.then_some(vertex_weights),
    )?)
}

/// Writes `hg` in hMetis format, emitting weights only when some weight differs from 1.
pub fn write_hmetis<W: Write>(hg: &Hypergraph, mut out: W) -> io::Result<()> {
    let fmt = match (hg.has_edge_weights(), hg.has_vertex_weights()) {
        (false, false) => "",
        (true, false) => " 1",
        (false, true) => " 10",
        (true, true) => " 11",
    };
    writeln!(out, "{} {}{}", hg.num_edges(), hg.num_vertices(), fmt)?;
    for e in hg.edges() {
        let mut first = true;
        if hg.has_edge_weights() {
            write!(out, "{}", hg.edge_weight(e))?;
            first = false;
        }
        for &v in hg.pins(e) {
            if !first {
                out.write_all(b" ")?;
            }
            write!(out, "{}", v + 1)?;
            first = false;
        }
        writeln!(out)?;
    }
    if hg.has_vertex_weights() {
        for &w in hg.vertex_weights() {
            writeln!(out, "{w}")?;
        }
    }
    Ok(())
}

/// Reads one block id per line, in vertex order.
pub fn parse_partition<R: BufRead>(reader: R, hg: &Hypergraph, k: usize) -> Result<Partition, ParseError> {
    let mut lines = Lines::new(reader);
    let mut assignment: Vec<BlockId> = Vec::with_capacity(hg.num_vertices());
    let mut count = 0;
    while let Some((line, text)) = lines.next_line()? {
        let text = text.trim();
        if text.is_empty() {
            continue;
        }
        count += 1;
        let block: i64 = text.parse().map_err(|_| ParseError::Number {
            line,
            token: text.to_string(),
        })?;
        if block < 0 || block as usize >= k {
            return Err(ParseError::BlockOutOfRange { line, block, k });
        }
        assignment.push(block as usize);
    }
    if count != hg.num_vertices() {
        return Err(ParseError::LineCount {
            expected: hg.num_vertices(),
            got: count,
        });
    }
    Ok(Partition::new(hg, k, assignment)?)
}

pub fn write_partition<W: Write>(partition: &Partition, mut out: W) -> io::Result<()> {
    for &b in partition.assignment() {
        writeln!(out, "{b}")?;
    }
    Ok(())
}

/// Convenience for tests and tools: parses an in-memory hMetis string.
pub fn hypergraph_from_str(text: &str) -> Result<Hypergraph, ParseError> {
    parse_hmetis(text.as_bytes())
}
