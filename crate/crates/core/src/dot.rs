//! Graphviz output for the lattices and the cross-language relation.
//!
//! Node ids are `l<side>_<bits>`. Edges point from the stronger proposition
//! to the weaker one; the extra top element is not drawn.

use std::fmt::Write as _;

use petgraph::algo::tred::{dag_to_toposorted_adjacency_list, dag_transitive_reduction_closure};
use petgraph::algo::{condensation, toposort};
use petgraph::graph::{DiGraph, NodeIndex};
use petgraph::visit::IntoNeighbors;

use crate::algebra::{Algebra, Prop, Side, StarProp};
use crate::implication::{CrossImplication, Node};

fn node_id(side: Side, p: Prop) -> String {
    format!("l{}_{}", side.number(), p.0)
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Covering pairs `(p, q)` of the algebra, `q` having one more atom.
fn covers(a: &Algebra) -> impl Iterator<Item = (Prop, Prop)> + '_ {
    a.props().flat_map(move |p| {
        (0..a.model_count())
            .filter(move |m| p.0 >> m & 1 == 0)
            .map(move |m| (p, Prop(p.0 | 1 << m)))
    })
}

fn write_nodes(out: &mut String, a: &Algebra, side: Side, indent: &str) {
    for p in a.props() {
        let _ = writeln!(
            out,
            "{indent}{} [label={}];",
            node_id(side, p),
            quote(&a.render(p.into()))
        );
    }
}

fn write_hasse(out: &mut String, a: &Algebra, side: Side) {
    for (p, q) in covers(a) {
        let _ = writeln!(out, "  {} -> {};", node_id(side, p), node_id(side, q));
    }
}

/// Hasse diagram of one algebra.
pub fn algebra_dot(a: &Algebra, side: Side) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", quote(a.name()));
    out.push_str("  rankdir=BT;\n  node [shape=box];\n");
    write_nodes(&mut out, a, side, "  ");
    write_hasse(&mut out, a, side);
    out.push_str("}\n");
    out
}

/// Cross-language edges left after transitive reduction.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CrossEdges {
    /// Pairs implying each other, first-language node first.
    pub equivalent: Vec<(Node, Node)>,
    /// One-way implications not already drawn as a covering pair.
    pub implications: Vec<(Node, Node)>,
}

/// Reduce the relation (without the extra tops) to its covering structure
/// and keep what the two Hasse diagrams do not already show.
pub fn reduced_cross_edges(r: &CrossImplication) -> CrossEdges {
    let sizes = [r.algebra(Side::One).prop_count(), r.algebra(Side::Two).prop_count()];
    let node_of = |k: usize| -> Node {
        if k < sizes[0] {
            Node::new(Side::One, StarProp::Prop(Prop(k as u64)))
        } else {
            Node::new(Side::Two, StarProp::Prop(Prop((k - sizes[0]) as u64)))
        }
    };
    let global = |side: Side, p: Prop| p.0 as usize + if side == Side::Two { sizes[0] } else { 0 };

    let mut g: DiGraph<usize, ()> = DiGraph::new();
    for k in 0..sizes[0] + sizes[1] {
        g.add_node(k);
    }
    let edge = |g: &mut DiGraph<usize, ()>, a: usize, b: usize| {
        g.add_edge(NodeIndex::new(a), NodeIndex::new(b), ());
    };
    for side in Side::BOTH {
        let a = r.algebra(side);
        let other = r.algebra(side.other());
        for (p, q) in covers(a) {
            edge(&mut g, global(side, p), global(side, q));
        }
        for (x, y) in r.excess_pairs(side) {
            if let (StarProp::Prop(x), StarProp::Prop(y)) = (x, y) {
                edge(&mut g, global(side, x), global(side, y));
            }
        }
        // Minimal elements of each cross row generate the rest with the
        // other language's order.
        for p in a.props() {
            let row = r.cross_row(side, p.into());
            for q in other.props().filter(|q| row.contains(q.0 as usize)) {
                let minimal = q.models().all(|m| !row.contains((q.0 & !(1 << m)) as usize));
                if minimal {
                    edge(&mut g, global(side, p), global(side.other(), q));
                }
            }
        }
    }

    let classes = condensation(g, true);
    let order = match toposort(&classes, None) {
        Ok(order) => order,
        Err(_) => unreachable!("a condensation is acyclic"),
    };
    let (list, revmap) = dag_to_toposorted_adjacency_list::<_, u32>(&classes, &order);
    let (reduction, _) = dag_transitive_reduction_closure(&list);

    let mut result = CrossEdges::default();
    for members in classes.node_weights() {
        let mut sorted = members.clone();
        sorted.sort_unstable();
        for pair in sorted.windows(2) {
            result.equivalent.push((node_of(pair[0]), node_of(pair[1])));
        }
    }
    for c in classes.node_indices() {
        let from = &classes[c];
        for d_rank in reduction.neighbors(revmap[c.index()]) {
            let to = &classes[order[d_rank as usize]];
            let realized = from.iter().any(|&x| {
                to.iter().any(|&y| {
                    let (nx, ny) = (node_of(x), node_of(y));
                    nx.side == ny.side && nx.value.implies(ny.value)
                })
            });
            if realized {
                continue;
            }
            let pair = from
                .iter()
                .flat_map(|&x| to.iter().map(move |&y| (x, y)))
                .filter(|&(x, y)| node_of(x).side != node_of(y).side)
                .min();
            if let Some((x, y)) = pair {
                result.implications.push((node_of(x), node_of(y)));
            }
        }
    }
    let key = |&(a, b): &(Node, Node)| (a.side, a.value, b.side, b.value);
    result.equivalent.sort_by_key(key);
    result.implications.sort_by_key(key);
    result
}

/// Both lattices with the cross relation: its transitive reduction, or
/// every cross pair when `closure` is set.
pub fn cross_dot(r: &CrossImplication, closure: bool) -> String {
    let mut out = String::new();
    out.push_str("digraph cross {\n  rankdir=BT;\n  node [shape=box];\n");
    for side in Side::BOTH {
        let a = r.algebra(side);
        let _ = writeln!(out, "  subgraph cluster_{} {{", side.number());
        let _ = writeln!(out, "    label={};", quote(a.name()));
        write_nodes(&mut out, a, side, "    ");
        out.push_str("  }\n");
    }
    for side in Side::BOTH {
        write_hasse(&mut out, r.algebra(side), side);
    }
    let id = |n: Node| match n.value {
        StarProp::Prop(p) => node_id(n.side, p),
        StarProp::Star => unreachable!("the extra top is never drawn"),
    };
    if closure {
        for side in Side::BOTH {
            let a = r.algebra(side);
            let other = r.algebra(side.other());
            for p in a.props() {
                let row = r.cross_row(side, p.into());
                for q in other.props().filter(|q| row.contains(q.0 as usize)) {
                    let _ = writeln!(
                        out,
                        "  {} -> {} [style=dashed, color=blue];",
                        node_id(side, p),
                        node_id(side.other(), q)
                    );
                }
            }
        }
    } else {
        let edges = reduced_cross_edges(r);
        for (a, b) in edges.equivalent {
            let _ = writeln!(out, "  {} -> {} [dir=both, color=darkgreen];", id(a), id(b));
        }
        for (a, b) in edges.implications {
            let _ = writeln!(out, "  {} -> {} [style=dashed, color=blue];", id(a), id(b));
        }
    }
    out.push_str("}\n");
    out
}
