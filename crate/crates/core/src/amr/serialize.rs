use std::collections::HashSet;
use std::fmt::Write;

use super::{AmrError, AmrGraph, Target};

/// Output layout for [`serialize_penman`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// Everything on one line.
    Compact,
    /// One role per line, four spaces per nesting level.
    Indented,
}

/// Writes the graph as PENMAN. The first mention of a variable (in DFS order
/// over the edge list) expands the node; later mentions are bare variables.
pub fn serialize_penman(graph: &AmrGraph, layout: Layout) -> Result<String, AmrError> {
    let index = graph.child_index();
    let mut out = String::new();
    let mut expanded = HashSet::new();
    write_node(
        graph,
        &index,
        &graph.root,
        0,
        layout,
        &mut expanded,
        &mut out,
    );
    if expanded.len() != graph.nodes.len() {
        let missing = graph
            .nodes
            .keys()
            .find(|v| !expanded.contains(v.as_str()))
            .expect("count mismatch implies a missing node");
        return Err(AmrError::UnreachableNode(missing.clone()));
    }
    Ok(out)
}

fn write_node<'g>(
    graph: &'g AmrGraph,
    index: &std::collections::HashMap<&str, Vec<usize>>,
    var: &'g str,
    depth: usize,
    layout: Layout,
    expanded: &mut HashSet<&'g str>,
    out: &mut String,
) {
    expanded.insert(var);
    let _ = write!(out, "({} / {}", var, graph.nodes[var]);
    for &i in index.get(var).map(Vec::as_slice).unwrap_or(&[]) {
        let edge = &graph.edges[i];
        match layout {
            Layout::Compact => out.push(' '),
            Layout::Indented => {
                out.push('\n');
                for _ in 0..=depth {
                    out.push_str("    ");
                }
            }
        }
        let _ = write!(out, "{} ", edge.role);
        match &edge.target {
            Target::Node(t) if !expanded.contains(t.as_str()) => {
                write_node(graph, index, t, depth + 1, layout, expanded, out);
            }
            Target::Node(t) => out.push_str(t),
            Target::Const(c) => {
                let _ = write!(out, "{c}");
            }
        }
    }
    out.push(')');
}

impl AmrGraph {
    /// Single-line PENMAN.
    pub fn to_penman(&self) -> String {
        serialize_penman(self, Layout::Compact).expect("graph invariants hold")
    }

    /// Reorders the edge list into serialization order and drops nodes that
    /// are no longer reachable from the root (along with their edges).
    pub(crate) fn normalize(&mut self) {
        let reach: HashSet<String> = self.reachable_from(&self.root).into_iter().collect();
        self.nodes.retain(|v, _| reach.contains(v));
        self.edges.retain(|e| reach.contains(&e.source));

        let index = self.child_index();
        let mut order = Vec::with_capacity(self.edges.len());
        let mut expanded = HashSet::new();
        let mut stack: Vec<(&str, usize)> = vec![(self.root.as_str(), 0)];
        expanded.insert(self.root.as_str());
        // Iterative pre-order walk mirroring write_node.
        while let Some((var, pos)) = stack.pop() {
            let kids = index.get(var).map(Vec::as_slice).unwrap_or(&[]);
            if pos >= kids.len() {
                continue;
            }
            stack.push((var, pos + 1));
            let i = kids[pos];
            order.push(i);
            if let Target::Node(t) = &self.edges[i].target {
                if expanded.insert(t.as_str()) {
                    stack.push((t.as_str(), 0));
                }
            }
        }
        let mut slots: Vec<Option<super::Edge>> = self.edges.drain(..).map(Some).collect();
        self.edges = order
            .into_iter()
            .map(|i| slots[i].take().expect("each edge visited once"))
            .collect();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amr::parse_penman;

    #[test]
    fn identity_on_leaf() {
        let g = parse_penman("(a / amr-unknown)").unwrap();
        assert_eq!(
            serialize_penman(&g, Layout::Compact).unwrap(),
            "(a / amr-unknown)"
        );
    }

    #[test]
    fn reentrant_variable_emitted_bare() {
        let text = "(c / cook-01 :ARG0 (y / you) :purpose (p / prepare-01 :ARG0 y))";
        let g = parse_penman(text).unwrap();
        assert_eq!(g.to_penman(), text);
    }

    #[test]
    fn indented_layout() {
        let g = parse_penman("(m / mix-01 :ARG1 (s / salt :quant 2) :mode imperative)").unwrap();
        assert_eq!(
            serialize_penman(&g, Layout::Indented).unwrap(),
            "(m / mix-01\n    :ARG1 (s / salt\n        :quant 2)\n    :mode imperative)"
        );
    }

    #[test]
    fn normalize_is_identity_on_parsed_graphs() {
        let g = parse_penman("(a / and :op1 (b / bean :mod (r / red)) :op2 b :op3 (c / corn))")
            .unwrap();
        let mut n = g.clone();
        n.normalize();
        assert_eq!(n, g);
        // A forward reference moves the definition to the first mention.
        let fwd = parse_penman("(a / and :op1 b :op2 (b / bean))").unwrap();
        assert_eq!(fwd.to_penman(), "(a / and :op1 (b / bean) :op2 b)");
        assert!(parse_penman(&fwd.to_penman())
            .unwrap()
            .structurally_eq(&fwd));
    }
}
