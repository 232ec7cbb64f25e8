//! Graphviz export: Hasse arrows, component shading, neighborhood labels.

use std::fmt::Write;

use crate::families::FamilyWindow;
use crate::poset::Element;
use crate::symbolic::Q;
use crate::topology::IndexSpace;

const PALETTE: [&str; 10] = [
    "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462", "#b3de69", "#fccde5", "#d9d9d9", "#bc80bd",
];

pub fn component_color(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

fn to_f64(q: &Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn fill(space: &IndexSpace, a: Element) -> String {
    let colors: Vec<&str> = space.u(a).iter().map(|&i| component_color(i)).collect();
    if colors.len() == 1 {
        format!("style=filled, fillcolor=\"{}\"", colors[0])
    } else {
        format!("style=wedged, fillcolor=\"{}\"", colors.join(":"))
    }
}

fn index_list(space: &IndexSpace, a: Element) -> String {
    let parts: Vec<String> = space.u(a).iter().map(ToString::to_string).collect();
    format!("{{{}}}", parts.join(","))
}

fn legend(out: &mut String, space: &IndexSpace) {
    out.push_str("  subgraph cluster_legend {\n    label=\"components\";\n");
    for k in space.components() {
        let _ = writeln!(
            out,
            "    \"legend_{i}\" [shape=box, style=filled, fillcolor=\"{c}\", label=\"K_{i} = ↓{top}\"];",
            i = k.index,
            c = component_color(k.index),
            top = escape(space.poset().name(k.top)),
        );
    }
    out.push_str("  }\n");
}

/// Hasse diagram of a finite poset, nodes shaded by the components containing
/// them and labelled with `U_a`.
pub fn poset_dot(space: &IndexSpace) -> String {
    let p = space.poset();
    let mut out = String::from("digraph poset {\n  rankdir=BT;\n  node [shape=ellipse];\n");
    for a in p.elements() {
        let _ = writeln!(
            out,
            "  \"{name}\" [label=\"{name}\\nU = {u}\", {fill}];",
            name = escape(p.name(a)),
            u = index_list(space, a),
            fill = fill(space, a),
        );
    }
    for &(a, b) in p.covers() {
        let _ = writeln!(out, "  \"{}\" -> \"{}\";", escape(p.name(a)), escape(p.name(b)));
    }
    legend(&mut out, space);
    out.push_str("}\n");
    out
}

/// A family window drawn at its coordinates, with the symbolic neighborhood
/// of every point and the window components as shading.
pub fn window_dot(window: &FamilyWindow, space: &IndexSpace) -> String {
    let p = &window.poset;
    let mut out = String::from("digraph window {\n  layout=neato;\n  node [shape=circle, fontsize=9];\n");
    let _ = writeln!(
        out,
        "  label=\"{} window {}\";",
        window.family.kind().cli_name(),
        escape(&window.bounds.to_string())
    );
    for a in p.elements() {
        let point = window.point(a);
        let u = window
            .family
            .neighborhood(&point)
            .map(|n| n.to_string())
            .unwrap_or_default();
        let (x, y) = (to_f64(&point.x), to_f64(&point.y));
        let _ = writeln!(
            out,
            "  \"{name}\" [label=\"{name}\", tooltip=\"U = {u}\", xlabel=\"{u}\", pos=\"{px},{py}!\", {fill}];",
            name = escape(p.name(a)),
            u = escape(&u),
            px = 2.0 * x,
            py = 1.2 * y,
            fill = fill(space, a),
        );
    }
    for &(a, b) in p.covers() {
        let _ = writeln!(out, "  \"{}\" -> \"{}\";", escape(p.name(a)), escape(p.name(b)));
    }
    legend(&mut out, space);
    out.push_str("}\n");
    out
}
