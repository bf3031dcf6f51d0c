//! Graphviz export of ribbon graphs.
//!
//! DOT has no notion of a rotation system, so each vertex is drawn as a
//! record whose ports `p0, p1, ...` follow the clockwise order of its darts,
//! and every vertex is preceded by a `// rotation` comment listing the same
//! order. Layout engines are free to ignore port order; the comments are the
//! authoritative copy.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::ribbon::{EdgeId, RibbonGraph};
use crate::walks::Walk;

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

// Characters with a meaning inside record labels.
fn record_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        if matches!(c, '{' | '}' | '|' | '<' | '>' | '"' | '\\' | ' ') {
            out.push('\\');
        }
        out.push(c);
    }
    out
}

/// Renders `g` as an undirected DOT graph named `name`.
///
/// Edges traversed by `highlight` are drawn bold and annotated with the
/// number of traversals.
pub fn to_dot(g: &RibbonGraph, name: &str, highlight: Option<&Walk>) -> String {
    let mut uses: HashMap<EdgeId, usize> = HashMap::new();
    if let Some(w) = highlight {
        for &e in &w.edges {
            *uses.entry(e).or_default() += 1;
        }
    }
    let mut out = String::new();
    let _ = writeln!(out, "graph {} {{", quote(name));
    let _ = writeln!(out, "  node [shape=Mrecord, fontname=\"monospace\"];");
    let mut port = vec![0usize; g.darts().len()];
    for u in g.vertices() {
        let rot = g.rotation(u);
        let labels: Vec<&str> = rot.iter().map(|&d| g.edge_label(g.dart(d).edge)).collect();
        let _ = writeln!(out, "  // rotation at {}: {}", g.vertex_label(u), labels.join(" "));
        let mut ports = Vec::with_capacity(rot.len());
        for (i, &d) in rot.iter().enumerate() {
            port[d.index()] = i;
            ports.push(format!("<p{i}> {}", record_escape(labels[i])));
        }
        let _ = writeln!(
            out,
            "  {} [label={}];",
            quote(g.vertex_label(u)),
            quote(&format!("{{{}|{{{}}}}}", record_escape(g.vertex_label(u)), ports.join("|")))
        );
    }
    for d in g.darts() {
        let p = g.partner(d.id);
        if p.index() < d.id.index() {
            continue;
        }
        let other = g.dart(p);
        let mut attrs = vec![format!("label={}", quote(g.edge_label(d.edge)))];
        if let Some(n) = uses.get(&d.edge) {
            attrs.push("style=bold".to_string());
            attrs.push(format!("xlabel=\"x{n}\""));
        }
        let _ = writeln!(
            out,
            "  {}:p{} -- {}:p{} [{}];",
            quote(g.vertex_label(d.vertex)),
            port[d.id.index()],
            quote(g.vertex_label(other.vertex)),
            port[p.index()],
            attrs.join(", ")
        );
    }
    out.push_str("}\n");
    out
}
