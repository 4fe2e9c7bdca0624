//! Graphviz export of a truncation, optionally with a map overlaid.

use std::fmt::Write;

use crate::tree::RootedTree;
use crate::wco::SelfMap;

const PALETTE: [&str; 8] = [
    "#fde725", "#a0da39", "#4ac16d", "#1fa187", "#277f8e", "#365c8d", "#46327e", "#440154",
];

fn node_label(tree: &RootedTree, v: crate::tree::VertexId) -> String {
    match tree.zline_label(v) {
        Some(n) => format!("{v} ({n})"),
        None => v.to_string(),
    }
}

fn write_tree(out: &mut String, tree: &RootedTree, prefix: &str, indent: &str) {
    for v in tree.vertices() {
        let d = tree.depth(v);
        let color = PALETTE[d % PALETTE.len()];
        let font = if d % PALETTE.len() >= 4 { "white" } else { "black" };
        let _ = writeln!(
            out,
            "{indent}{prefix}{} [label=\"{}\", fillcolor=\"{color}\", fontcolor=\"{font}\"];",
            v.0,
            node_label(tree, v)
        );
    }
    for [p, c] in tree.edges() {
        let _ = writeln!(out, "{indent}{prefix}{p} -> {prefix}{c};");
    }
}

/// DOT text for `tree` with nodes colored by depth. With a map, edges
/// `v → φ(v)` are drawn dashed; when the map's source differs from its
/// target the two truncations are drawn as separate clusters.
pub fn to_dot(tree: &RootedTree, phi: Option<&SelfMap>) -> String {
    let mut out = String::from("digraph tree {\n  node [style=filled, shape=circle];\n");
    match phi {
        Some(phi) if **phi.source() != **phi.target() || **phi.target() != *tree => {
            out.push_str("  subgraph cluster_source {\n    label=\"source\";\n");
            write_tree(&mut out, phi.source(), "s", "    ");
            out.push_str("  }\n  subgraph cluster_target {\n    label=\"target\";\n");
            write_tree(&mut out, phi.target(), "n", "    ");
            out.push_str("  }\n");
            for (v, w) in phi.pairs() {
                let _ = writeln!(
                    out,
                    "  s{} -> n{} [style=dashed, color=\"#d62728\", constraint=false];",
                    v.0, w.0
                );
            }
        }
        _ => {
            write_tree(&mut out, tree, "n", "  ");
            if let Some(phi) = phi {
                for (v, w) in phi.pairs() {
                    let _ = writeln!(
                        out,
                        "  n{} -> n{} [style=dashed, color=\"#d62728\", constraint=false];",
                        v.0, w.0
                    );
                }
            }
        }
    }
    out.push_str("}\n");
    out
}
