//! Tree-pair diagrams in the DOT language.

use std::collections::BTreeSet;
use std::fmt::Write;

use vn_core::{VnElement, Word};

fn node_id(side: char, w: &Word) -> String {
    let letters: Vec<String> = w.letters().iter().map(u8::to_string).collect();
    format!("{side}_{}", letters.join("_"))
}

fn tree(out: &mut String, side: char, title: &str, leaves: &[Word]) {
    let mut nodes = BTreeSet::new();
    for leaf in leaves {
        for k in 0..=leaf.len() {
            nodes.insert(leaf.prefix(k));
        }
    }
    let leaf_set: BTreeSet<&Word> = leaves.iter().collect();
    writeln!(out, "  subgraph cluster_{side} {{").unwrap();
    writeln!(out, "    label=\"{title}\";").unwrap();
    for w in &nodes {
        if leaf_set.contains(w) {
            writeln!(out, "    {} [label=\"{w}\", shape=box];", node_id(side, w)).unwrap();
        } else {
            writeln!(out, "    {} [label=\"\", shape=point];", node_id(side, w)).unwrap();
        }
    }
    for w in nodes.iter().filter(|w| !w.is_empty()) {
        let parent = w.prefix(w.len() - 1);
        writeln!(out, "    {} -> {};", node_id(side, &parent), node_id(side, w)).unwrap();
    }
    writeln!(out, "  }}").unwrap();
}

/// Domain tree, range tree, and a dashed edge from each domain leaf to its
/// image leaf.
pub fn render_dot(g: &VnElement) -> String {
    let mut out = String::from("digraph tree_pair {\n  node [fontname=\"monospace\"];\n");
    tree(&mut out, 'd', "domain", g.domain());
    let mut range = g.images().to_vec();
    range.sort();
    tree(&mut out, 'r', "range", &range);
    for (d, r) in g.pairs() {
        writeln!(
            out,
            "  {} -> {} [style=dashed, constraint=false];",
            node_id('d', d),
            node_id('r', r)
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use vn_core::{make_tau, Alphabet};

    #[test]
    fn identity_is_two_roots() {
        let dot = render_dot(&VnElement::identity(Alphabet::new(2).unwrap()));
        assert!(dot.contains("d_ [label=\"eps\", shape=box]"));
        assert!(dot.contains("r_ [label=\"eps\", shape=box]"));
        assert!(dot.contains("d_ -> r_ [style=dashed"));
    }

    #[test]
    fn tau_in_v5_has_nine_domain_leaves() {
        let dot = render_dot(&make_tau(Alphabet::new(5).unwrap()));
        let leaves: Vec<&str> = dot
            .lines()
            .filter(|l| l.trim_start().starts_with("d_") && l.contains("shape=box"))
            .collect();
        assert_eq!(leaves.len(), 9);
        for w in ["1.1", "1.5", "2", "5"] {
            assert!(dot.contains(&format!("[label=\"{w}\", shape=box]")), "{w}");
        }
    }
}
