//! Graphviz export: goals as boxes, strategies as parallelograms, evidence
//! as circles, with optional regression badges.

use std::collections::BTreeMap;
use std::fmt::Write;

use super::{Body, Goal, Node, VarGoal};

pub trait DotGoal {
    fn label(&self) -> String;
    /// Presence condition printed beneath the goal, if any.
    fn pc(&self) -> Option<String>;
}

impl DotGoal for Goal {
    fn label(&self) -> String {
        self.to_string()
    }

    fn pc(&self) -> Option<String> {
        None
    }
}

impl DotGoal for VarGoal {
    fn label(&self) -> String {
        self.goal.to_string()
    }

    fn pc(&self) -> Option<String> {
        Some(self.pc.to_string())
    }
}

/// A colored annotation attached to a node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Badge {
    pub color: &'static str,
    pub text: String,
}

fn esc(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Renders the tree. `badges` is keyed by node id for goals, `<id>/s` for
/// strategies and `<id>/e` for evidence.
pub fn to_dot<G: DotGoal>(root: &Node<G>, badges: &BTreeMap<String, Vec<Badge>>) -> String {
    let mut out = String::from("digraph ac {\n  rankdir=TB;\n  node [fontname=\"Helvetica\"];\n");
    let label = |key: &str, head: &str, body: String| {
        let mut l = format!("{head}: {}", esc(&body));
        for b in badges.get(key).into_iter().flatten() {
            let _ = write!(l, "\\n[{}]", esc(&b.text));
        }
        let color = badges.get(key).and_then(|bs| bs.first()).map(|b| b.color);
        (l, color)
    };
    let style = |color: Option<&str>| match color {
        Some(c) => format!(", style=filled, fillcolor={c}"),
        None => String::new(),
    };
    root.walk(&mut |n| {
        let mut body = n.goal.label();
        if let Some(pc) = n.goal.pc() {
            body = format!("{body}\n{pc}");
        }
        let (l, color) = label(&n.id, &n.id, body);
        let _ = writeln!(
            out,
            "  \"{}\" [shape=box, label=\"{}\"{}];",
            esc(&n.id),
            l.replace('\n', "\\n"),
            style(color)
        );
        match &n.body {
            Body::Und => {}
            Body::Evd { evidence } => {
                let key = format!("{}/e", n.id);
                let (l, color) = label(&key, evidence, String::from("evidence"));
                let _ = writeln!(
                    out,
                    "  \"{}\" [shape=circle, label=\"{}\"{}];",
                    esc(&key),
                    l,
                    style(color)
                );
                let _ = writeln!(out, "  \"{}\" -> \"{}\";", esc(&n.id), esc(&key));
            }
            Body::Decomp { strategy, children } => {
                let key = format!("{}/s", n.id);
                let (l, color) = label(
                    &key,
                    &strategy.label,
                    match strategy.template_input() {
                        Some((t, _)) => t.to_string(),
                        None => String::from("manual"),
                    },
                );
                let _ = writeln!(
                    out,
                    "  \"{}\" [shape=parallelogram, label=\"{}\"{}];",
                    esc(&key),
                    l,
                    style(color)
                );
                let _ = writeln!(out, "  \"{}\" -> \"{}\";", esc(&n.id), esc(&key));
                for c in children {
                    let _ = writeln!(out, "  \"{}\" -> \"{}\";", esc(&key), esc(&c.id));
                }
            }
        }
    });
    out.push_str("}\n");
    out
}
