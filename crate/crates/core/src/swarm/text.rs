//! Swarm text and DOT formats.
//!
//! ```text
//! vertices 3
//! H G v0 v1
//! H R_1 v0 v2
//! ```
//! Vertices written `v<n>` keep the number `n`; other names get the next
//! free numbers in order of appearance.

use std::collections::HashMap;
use std::fmt::Write;

use super::{Edge, Swarm, Vertex};
use crate::error::{Error, Result};
use crate::greenred::Color;
use crate::spider::IdealSpider;

pub fn swarm_to_text(w: &Swarm) -> String {
    let mut out = format!("vertices {}\n", w.vertex_count());
    for e in w.edges() {
        let _ = writeln!(out, "H {} v{} v{}", e.label, e.tail, e.antenna);
    }
    out
}

pub fn parse_swarm(src: &str) -> Result<Swarm> {
    let mut declared = 0usize;
    let mut rows: Vec<(usize, IdealSpider, String, String)> = Vec::new();
    for (n, raw) in src.lines().enumerate() {
        let perr = |message: String| Error::Parse {
            line: n + 1,
            column: 1,
            message,
        };
        let line = raw.split(['#', '%']).next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        match parts[..] {
            ["vertices", k] => declared = k.parse().map_err(|_| perr(format!("bad vertex count `{k}`")))?,
            ["H", label, tail, antenna] => {
                let label: IdealSpider = label.parse().map_err(|e: Error| perr(e.to_string()))?;
                rows.push((n + 1, label, tail.to_string(), antenna.to_string()));
            }
            _ => return Err(perr(format!("expected `H <label> <tail> <antenna>`, found `{line}`"))),
        }
    }
    let numbered = |name: &str| name.strip_prefix('v').and_then(|d| d.parse::<Vertex>().ok());
    let mut next = rows
        .iter()
        .flat_map(|(_, _, t, a)| [numbered(t), numbered(a)])
        .flatten()
        .map(|v| v + 1)
        .max()
        .unwrap_or(0);
    let mut names: HashMap<String, Vertex> = HashMap::new();
    let mut resolve = |name: &str| {
        if let Some(v) = numbered(name) {
            return v;
        }
        *names.entry(name.to_string()).or_insert_with(|| {
            next += 1;
            next - 1
        })
    };
    let edges: Vec<(usize, Edge)> = rows
        .iter()
        .map(|(line, label, t, a)| (*line, Edge::new(*label, resolve(t), resolve(a))))
        .collect();
    let count = edges
        .iter()
        .flat_map(|(_, e)| [e.tail, e.antenna])
        .map(|v| v as usize + 1)
        .max()
        .unwrap_or(0)
        .max(declared);
    let mut w = Swarm::new();
    for _ in 0..count {
        w.add_vertex();
    }
    for (line, e) in edges {
        w.add_edge(e).map_err(|err| Error::Parse {
            line,
            column: 1,
            message: err.to_string(),
        })?;
    }
    Ok(w)
}

pub fn swarm_to_dot(w: &Swarm) -> String {
    let mut out = String::from("digraph swarm {\n  rankdir=LR;\n");
    for v in 0..w.vertex_count() {
        let shape = if w.out_edges(v as Vertex).is_empty() {
            "box"
        } else {
            "ellipse"
        };
        let _ = writeln!(out, "  v{v} [shape={shape}];");
    }
    for e in w.edges() {
        let color = match e.label.color {
            Color::Green => "darkgreen",
            Color::Red => "red",
        };
        let style = if e.label.is_full() { "bold" } else { "solid" };
        let _ = writeln!(
            out,
            "  v{} -> v{} [label=\"{}\", color={color}, fontcolor={color}, style={style}];",
            e.tail, e.antenna, e.label
        );
    }
    out.push_str("}\n");
    out
}
