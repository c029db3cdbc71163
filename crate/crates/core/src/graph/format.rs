//! Graph file formats: `m=<int>` followed by `i j` lines, or `{"m":..,"edges":[[i,j],..]}`.

use std::collections::BTreeSet;

use super::InteractionGraph;
use crate::error::{MmotError, Result};

/// Parses either format, choosing JSON when the first non-blank character is `{`.
pub fn parse_graph(text: &str) -> Result<InteractionGraph> {
    if text.trim_start().starts_with('{') {
        parse_graph_json(text)
    } else {
        parse_graph_text(text)
    }
}

pub fn parse_graph_json(text: &str) -> Result<InteractionGraph> {
    serde_json::from_str(text).map_err(|e| {
        if e.is_data() {
            MmotError::parse(e.line(), e.column(), e.to_string())
        } else {
            MmotError::parse(e.line(), e.column(), format!("malformed graph json: {e}"))
        }
    })
}

fn column_of(line: &str, token: &str) -> usize {
    let base = line.as_ptr() as usize;
    token.as_ptr() as usize - base + 1
}

pub fn parse_graph_text(text: &str) -> Result<InteractionGraph> {
    let mut m: Option<usize> = None;
    let mut edges = BTreeSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let Some(count) = m else {
            let body = line.trim();
            let value = body
                .strip_prefix("m=")
                .ok_or_else(|| MmotError::parse(line_no, column_of(raw, body), "expected `m=<int>`"))?;
            let parsed: usize = value.trim().parse().map_err(|_| {
                MmotError::parse(line_no, column_of(raw, body) + 2, "vertex count is not an integer")
            })?;
            if parsed == 0 {
                return Err(MmotError::parse(line_no, column_of(raw, body) + 2, "vertex count must be positive"));
            }
            m = Some(parsed);
            continue;
        };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(MmotError::parse(
                line_no,
                column_of(raw, tokens[0]),
                format!("expected two vertex indices, found {}", tokens.len()),
            ));
        }
        let mut ends = [0usize; 2];
        for (slot, tok) in ends.iter_mut().zip(&tokens) {
            let v: usize = tok.parse().map_err(|_| {
                MmotError::parse(line_no, column_of(raw, tok), format!("`{tok}` is not a vertex index"))
            })?;
            if v == 0 || v > count {
                return Err(MmotError::parse(
                    line_no,
                    column_of(raw, tok),
                    format!("vertex {v} outside 1..{count}"),
                ));
            }
            *slot = v;
        }
        let [a, b] = ends;
        if a == b {
            return Err(MmotError::parse(line_no, column_of(raw, tokens[1]), format!("self-loop at vertex {a}")));
        }
        if !edges.insert((a.min(b), a.max(b))) {
            return Err(MmotError::parse(
                line_no,
                column_of(raw, tokens[0]),
                format!("duplicate edge {{{a},{b}}}"),
            ));
        }
    }
    let m = m.ok_or_else(|| MmotError::parse(1, 1, "missing `m=<int>` header"))?;
    InteractionGraph::new(m, edges)
}

impl InteractionGraph {
    /// Text format with one edge per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("m={}\n", self.m());
        for (i, j) in self.edges() {
            s.push_str(&format!("{i} {j}\n"));
        }
        s
    }
}
