//! Non-destructive graph surgery. Every public operation clones, edits the
//! copy, and returns it in canonical edge order with unreachable nodes pruned.

use std::collections::{BTreeMap, HashSet};

use super::{AmrError, AmrGraph, Constant, Edge, GraphPath, Role, Target};

/// Concept marking the questioned element.
pub const UNKNOWN_CONCEPT: &str = "amr-unknown";

const HOLE: &str = "\u{0}hole";

fn hole() -> Target {
    Target::Const(Constant::Symbol(HOLE.to_string()))
}

impl AmrGraph {
    /// A variable name not bound in this graph, derived from the concept's
    /// first letter: `a`, then `a2`, `a3`, ...
    pub fn fresh_var(&self, concept: &str) -> String {
        let base = concept
            .chars()
            .find(char::is_ascii_alphabetic)
            .map_or('x', |c| c.to_ascii_lowercase());
        let first = base.to_string();
        if !self.nodes.contains_key(&first) {
            return first;
        }
        (2..)
            .map(|k| format!("{base}{k}"))
            .find(|v| !self.nodes.contains_key(v))
            .expect("unbounded search")
    }

    /// The subgraph rooted at `var`: every node reachable from it, with all of
    /// their outgoing edges.
    pub fn subgraph(&self, var: &str) -> AmrGraph {
        let reach = self.reachable_from(var);
        let keep: HashSet<&str> = reach.iter().map(String::as_str).collect();
        let mut g = AmrGraph {
            root: var.to_string(),
            nodes: reach
                .iter()
                .map(|v| (v.clone(), self.nodes[v].clone()))
                .collect(),
            edges: self
                .edges
                .iter()
                .filter(|e| keep.contains(e.source.as_str()))
                .cloned()
                .collect(),
            id: None,
        };
        g.normalize();
        g
    }

    /// The subgraph hanging off edge `idx`; a constant becomes a one-node graph.
    pub(crate) fn edge_target_graph(&self, idx: usize) -> AmrGraph {
        match &self.edges[idx].target {
            Target::Node(t) => self.subgraph(t),
            Target::Const(c) => {
                let text = c.text();
                let var = text
                    .chars()
                    .find(char::is_ascii_alphabetic)
                    .map_or('v', |c| c.to_ascii_lowercase())
                    .to_string();
                AmrGraph::leaf(var, text)
            }
        }
    }

    // Copy with edge `idx` cut loose (target replaced by a marker) and the
    // orphaned part of its old subgraph pruned.
    fn detach(&self, idx: usize) -> AmrGraph {
        let mut g = self.clone();
        g.edges[idx].target = hole();
        g.normalize();
        g
    }

    fn fill_hole(&mut self, target: Target) {
        let i = self
            .edges
            .iter()
            .position(|e| matches!(&e.target, Target::Const(Constant::Symbol(s)) if s == HOLE))
            .expect("detached graph has a hole");
        self.edges[i].target = target;
    }

    /// Replaces the subgraph at `path` with a fresh `amr-unknown` node.
    /// Returns `(question, answer)`; nodes of the answer that are still
    /// referenced elsewhere in the question graph survive there.
    pub fn replace_with_unknown(&self, path: &GraphPath) -> Result<(AmrGraph, AmrGraph), AmrError> {
        let idx = path.resolve(self)?;
        let edge = &self.edges[idx];
        if matches!(edge.target, Target::Const(_)) && edge.role.name() == "mode" {
            return Err(AmrError::PathTargetsConstant(path.to_string()));
        }
        let answer = self.edge_target_graph(idx);
        let mut q = self.detach(idx);
        let var = q.fresh_var(UNKNOWN_CONCEPT);
        q.nodes.insert(var.clone(), UNKNOWN_CONCEPT.to_string());
        q.fill_hole(Target::Node(var));
        q.normalize();
        debug_assert!(q.validate().is_ok());
        Ok((q, answer))
    }

    /// Replaces the subgraph at `path` with `donor`. Donor variables that
    /// collide with the host are renamed `v_1`, `v_2`, ... (smallest free k).
    pub fn graft_subgraph(&self, path: &GraphPath, donor: &AmrGraph) -> Result<AmrGraph, AmrError> {
        let idx = path.resolve(self)?;
        Ok(self.graft_at(idx, donor))
    }

    pub(crate) fn graft_at(&self, idx: usize, donor: &AmrGraph) -> AmrGraph {
        let mut g = self.detach(idx);
        let root = g.absorb(donor);
        g.fill_hole(Target::Node(root));
        g.normalize();
        debug_assert!(g.validate().is_ok());
        g
    }

    /// Copies `donor`'s nodes and edges into `self` (renaming on collision)
    /// and returns the variable now naming the donor's root. The donor is not
    /// attached to anything; callers add the linking edge.
    pub(crate) fn absorb(&mut self, donor: &AmrGraph) -> String {
        let donor_vars: HashSet<&str> = donor.nodes.keys().map(String::as_str).collect();
        let mut taken: HashSet<String> = self.nodes.keys().cloned().collect();
        let mut rename: BTreeMap<&str, String> = BTreeMap::new();
        for v in donor.nodes.keys() {
            if !taken.contains(v) {
                continue;
            }
            let new = (1..)
                .map(|k| format!("{v}_{k}"))
                .find(|c| !taken.contains(c) && !donor_vars.contains(c.as_str()))
                .expect("unbounded search");
            taken.insert(new.clone());
            rename.insert(v, new);
        }
        let map = |v: &str| rename.get(v).cloned().unwrap_or_else(|| v.to_string());
        for (v, c) in &donor.nodes {
            self.nodes.insert(map(v), c.clone());
        }
        for e in &donor.edges {
            let target = match &e.target {
                Target::Node(t) => Target::Node(map(t)),
                c => c.clone(),
            };
            self.edges.push(Edge {
                source: map(&e.source),
                role: e.role.clone(),
                target,
            });
        }
        map(&donor.root)
    }

    /// Drops every root edge whose role is not in `keep`, together with any
    /// subgraph no longer reachable.
    pub fn remove_roles(&self, keep: &HashSet<Role>) -> AmrGraph {
        self.retain_root_roles(|r| keep.contains(r))
    }

    pub fn retain_root_roles(&self, keep: impl Fn(&Role) -> bool) -> AmrGraph {
        let mut g = self.clone();
        let root = g.root.clone();
        g.edges.retain(|e| e.source != root || keep(&e.role));
        g.normalize();
        g
    }

    /// Removes every outgoing `role` edge of `var`.
    pub fn remove_child_role(&self, var: &str, role: &Role) -> AmrGraph {
        let mut g = self.clone();
        g.edges.retain(|e| !(e.source == var && &e.role == role));
        g.normalize();
        g
    }

    /// Relabels the edge at `path`.
    pub fn rename_edge_role(&self, path: &GraphPath, role: Role) -> Result<AmrGraph, AmrError> {
        let idx = path.resolve(self)?;
        let mut g = self.clone();
        g.edges[idx].role = role;
        Ok(g)
    }

    /// Adds `(var / concept)` under `source` via `role`, appended after the
    /// source's existing edges. Returns the graph and the new variable.
    pub fn add_child_node(&self, source: &str, role: Role, concept: &str) -> (AmrGraph, String) {
        let mut g = self.clone();
        let var = g.fresh_var(concept);
        g.nodes.insert(var.clone(), concept.to_string());
        g.edges
            .push(Edge::new(source, role, Target::Node(var.clone())));
        g.normalize();
        (g, var)
    }

    pub fn with_concept(&self, var: &str, concept: &str) -> AmrGraph {
        let mut g = self.clone();
        if let Some(c) = g.nodes.get_mut(var) {
            *c = concept.to_string();
        }
        g
    }

    /// Replaces the node `slot` with `filler`: the merged node takes the
    /// filler's root variable and concept, keeps the slot's incoming edges,
    /// and lists the filler's edges before the slot's own.
    pub fn fill_slot(&self, slot: &str, filler: &AmrGraph) -> AmrGraph {
        const PENDING: &str = "\u{0}slot";
        let mut g = self.clone();
        g.nodes.remove(slot);
        let retarget = |g: &mut AmrGraph, from: &str, to: &str| {
            for e in &mut g.edges {
                if e.source == from {
                    e.source = to.to_string();
                }
                if let Target::Node(t) = &mut e.target {
                    if t == from {
                        *t = to.to_string();
                    }
                }
            }
        };
        retarget(&mut g, slot, PENDING);
        let template_edges = g.edges.iter().filter(|e| e.source == PENDING).count();
        let r = g.absorb(filler);
        retarget(&mut g, PENDING, &r);
        // Only relative order among one node's edges matters, so moving the
        // slot's template edges to the end puts the filler's first.
        let (mut slot_edges, mut rest): (Vec<Edge>, Vec<Edge>) = (Vec::new(), Vec::new());
        let mut seen = 0;
        for e in g.edges.drain(..) {
            if e.source == r && seen < template_edges {
                seen += 1;
                slot_edges.push(e);
            } else {
                rest.push(e);
            }
        }
        rest.append(&mut slot_edges);
        g.edges = rest;
        g.finish()
    }

    // Crate-internal mutators used by the generators, which build several
    // intermediate shapes before normalizing once.

    pub(crate) fn edges_mut(&mut self) -> &mut Vec<Edge> {
        &mut self.edges
    }

    pub(crate) fn insert_node(&mut self, var: String, concept: String) {
        self.nodes.insert(var, concept);
    }

    pub(crate) fn finish(mut self) -> AmrGraph {
        self.normalize();
        debug_assert!(self.validate().is_ok(), "{:?}", self.validate());
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amr::parse_penman;

    const MIX: &str = "(m / mix-01 :ARG0 (w / we) :ARG1 (s / salt) :ARG2 (c / chicken))";

    fn g(s: &str) -> AmrGraph {
        parse_penman(s).unwrap()
    }

    #[test]
    fn unknown_on_arg2_matches_golden() {
        let (q, a) = g(MIX)
            .replace_with_unknown(&GraphPath::of(&[":ARG2"]))
            .unwrap();
        assert_eq!(
            q.to_penman(),
            "(m / mix-01 :ARG0 (w / we) :ARG1 (s / salt) :ARG2 (a / amr-unknown))"
        );
        assert_eq!(a.to_penman(), "(c / chicken)");
    }

    #[test]
    fn root_cannot_be_unknowned() {
        let err = g("(a / amr-unknown)")
            .replace_with_unknown(&GraphPath::root())
            .unwrap_err();
        assert!(matches!(err, AmrError::PathNotFound(_)));
    }

    #[test]
    fn mode_is_not_questionable_but_quant_is() {
        let src = g("(c / cook-01 :mode imperative :ARG1 (r / rice :quant 2))");
        assert!(matches!(
            src.replace_with_unknown(&GraphPath::of(&[":mode"])),
            Err(AmrError::PathTargetsConstant(_))
        ));
        let (q, a) = src
            .replace_with_unknown(&GraphPath::of(&[":ARG1", ":quant"]))
            .unwrap();
        assert_eq!(q.count_concept(UNKNOWN_CONCEPT), 1);
        assert_eq!(a.root_concept(), "2");
    }

    #[test]
    fn unknown_keeps_shared_nodes() {
        let src = g("(c / cook-01 :ARG0 (y / you) :purpose (p / prepare-01 :ARG0 y))");
        let (q, a) = src
            .replace_with_unknown(&GraphPath::of(&[":ARG0"]))
            .unwrap();
        assert_eq!(a.to_penman(), "(y / you)");
        assert_eq!(
            q.to_penman(),
            "(c / cook-01 :ARG0 (a / amr-unknown) :purpose (p / prepare-01 :ARG0 (y / you)))"
        );
    }

    #[test]
    fn fresh_var_ignores_pruned_nodes() {
        let src = g("(s / stir-01 :ARG1 (a / and :op1 (b / bean) :op2 (c / corn)))");
        let (q, _) = src
            .replace_with_unknown(&GraphPath::of(&[":ARG1"]))
            .unwrap();
        assert_eq!(q.to_penman(), "(s / stir-01 :ARG1 (a / amr-unknown))");
    }

    #[test]
    fn graft_disjoint() {
        let out = g(MIX)
            .graft_subgraph(&GraphPath::of(&[":ARG2"]), &g("(b / bowl)"))
            .unwrap();
        assert_eq!(
            out.to_penman(),
            "(m / mix-01 :ARG0 (w / we) :ARG1 (s / salt) :ARG2 (b / bowl))"
        );
        assert_eq!(out.count_concept("chicken"), 0);
    }

    #[test]
    fn graft_renames_collisions() {
        let out = g(MIX)
            .graft_subgraph(
                &GraphPath::of(&[":ARG2"]),
                &g("(s / sauce :mod (s_1 / soy))"),
            )
            .unwrap();
        assert!(out.validate().is_ok());
        assert_eq!(out.concept("s"), Some("salt"));
        assert_eq!(out.concept("s_2"), Some("sauce"));
        assert_eq!(out.concept("s_1"), Some("soy"));
    }

    #[test]
    fn graft_back_restores_original() {
        let src = g(MIX);
        let path = GraphPath::of(&[":ARG1"]);
        let (q, answer) = src.replace_with_unknown(&path).unwrap();
        let back = q.graft_subgraph(&path, &answer).unwrap();
        assert!(back.structurally_eq(&src));
    }

    #[test]
    fn remove_roles_filters_root_edges() {
        let src = g("(c / cook-01 :mode imperative :ARG0 (y / you) :ARG1 (r / rice) :purpose (p / prepare-01 :ARG0 y))");
        let keep: HashSet<Role> = [Role::named(":ARG1")].into_iter().collect();
        assert_eq!(
            src.remove_roles(&keep).to_penman(),
            "(c / cook-01 :ARG1 (r / rice))"
        );
        let all: HashSet<Role> = src.root_edges().map(|e| e.role.clone()).collect();
        assert_eq!(src.remove_roles(&all), src);
        let empty = src.remove_roles(&HashSet::new());
        assert_eq!(empty.to_penman(), "(c / cook-01)");
    }

    #[test]
    fn inputs_are_untouched() {
        let src = g(MIX);
        let before = src.clone();
        let _ = src.replace_with_unknown(&GraphPath::of(&[":ARG1"]));
        let _ = src.graft_subgraph(&GraphPath::of(&[":ARG1"]), &g("(b / bowl)"));
        let _ = src.remove_roles(&HashSet::new());
        assert_eq!(src, before);
    }
}
