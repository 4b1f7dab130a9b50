//! Graph isomorphism for AMR graphs: concepts, role labels, constants and
//! the root must line up; variable names are free. Inverse roles are
//! normalized to their base direction first, so `(a :ARG1-of b)` and
//! `(b :ARG1 a)` compare equal.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use super::{AmrGraph, Constant, Target};

#[derive(Clone, PartialEq, Eq, Hash)]
enum End {
    Node(usize),
    Const(Constant),
}

struct Norm {
    concepts: Vec<String>,
    root: usize,
    // (source, role name, inverse-normalized target)
    edges: Vec<(usize, String, End)>,
    incident: Vec<Vec<usize>>,
}

fn normalize(g: &AmrGraph) -> Norm {
    let vars: Vec<&str> = g.nodes.keys().map(String::as_str).collect();
    let ix: HashMap<&str, usize> = vars.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let concepts = vars.iter().map(|v| g.nodes[*v].clone()).collect();
    let mut edges = Vec::with_capacity(g.edges.len());
    for e in &g.edges {
        let s = ix[e.source.as_str()];
        match &e.target {
            Target::Node(t) if e.role.is_inverse() => {
                edges.push((ix[t.as_str()], e.role.name().to_string(), End::Node(s)));
            }
            Target::Node(t) => edges.push((s, e.role.to_string(), End::Node(ix[t.as_str()]))),
            Target::Const(c) => edges.push((s, e.role.to_string(), End::Const(c.clone()))),
        }
    }
    let mut incident = vec![Vec::new(); vars.len()];
    for (i, (s, _, t)) in edges.iter().enumerate() {
        incident[*s].push(i);
        if let End::Node(t) = t {
            if t != s {
                incident[*t].push(i);
            }
        }
    }
    Norm {
        concepts,
        root: ix[g.root.as_str()],
        edges,
        incident,
    }
}

fn hash_of<T: Hash>(value: &T) -> u64 {
    let mut h = DefaultHasher::new();
    value.hash(&mut h);
    h.finish()
}

// Weisfeiler-Lehman style colour refinement; colours are comparable across
// graphs because the hasher is unkeyed.
fn colours(n: &Norm, rounds: usize) -> Vec<u64> {
    let mut col: Vec<u64> = n
        .concepts
        .iter()
        .enumerate()
        .map(|(i, c)| hash_of(&(c, i == n.root)))
        .collect();
    for _ in 0..rounds {
        let next: Vec<u64> = (0..col.len())
            .map(|v| {
                let mut sig: Vec<(bool, &str, u64)> = n.incident[v]
                    .iter()
                    .map(|&ei| {
                        let (s, r, t) = &n.edges[ei];
                        if *s == v {
                            let other = match t {
                                End::Node(t) => col[*t],
                                End::Const(c) => hash_of(c),
                            };
                            (true, r.as_str(), other)
                        } else {
                            (false, r.as_str(), col[*s])
                        }
                    })
                    .collect();
                sig.sort_unstable();
                hash_of(&(col[v], sig))
            })
            .collect();
        col = next;
    }
    col
}

struct Search<'a> {
    a: &'a Norm,
    b: &'a Norm,
    ca: Vec<u64>,
    cb: Vec<u64>,
    map_ab: Vec<Option<usize>>,
    map_ba: Vec<Option<usize>>,
    used_b: Vec<bool>,
    done_a: Vec<bool>,
}

impl Search<'_> {
    fn node_ok(&self, x: usize, y: usize) -> bool {
        match (self.map_ab[x], self.map_ba[y]) {
            (Some(m), _) => m == y,
            (None, Some(_)) => false,
            (None, None) => self.ca[x] == self.cb[y] && self.a.concepts[x] == self.b.concepts[y],
        }
    }

    fn next_edge(&self) -> Option<usize> {
        (0..self.a.edges.len()).find(|&i| {
            !self.done_a[i] && {
                let (s, _, t) = &self.a.edges[i];
                self.map_ab[*s].is_some() || matches!(t, End::Node(t) if self.map_ab[*t].is_some())
            }
        })
    }

    fn run(&mut self) -> bool {
        let Some(ea) = self.next_edge() else {
            return self.done_a.iter().all(|d| *d) && self.map_ab.iter().all(Option::is_some);
        };
        let (sa, ra, ta) = self.a.edges[ea].clone();
        for eb in 0..self.b.edges.len() {
            if self.used_b[eb] {
                continue;
            }
            let (sb, rb, tb) = &self.b.edges[eb];
            if *rb != ra || !self.node_ok(sa, *sb) {
                continue;
            }
            let target_ok = match (&ta, tb) {
                (End::Const(x), End::Const(y)) => x == y,
                (End::Node(x), End::Node(y)) => {
                    if *x == sa || *y == *sb {
                        *x == sa && *y == *sb
                    } else {
                        self.node_ok(*x, *y)
                    }
                }
                _ => false,
            };
            if !target_ok {
                continue;
            }
            let mut bound = Vec::new();
            let mut bind = |s: &mut Self, x: usize, y: usize| {
                if s.map_ab[x].is_none() {
                    s.map_ab[x] = Some(y);
                    s.map_ba[y] = Some(x);
                    bound.push(x);
                }
            };
            bind(self, sa, *sb);
            if let (End::Node(x), End::Node(y)) = (&ta, tb) {
                bind(self, *x, *y);
            }
            self.used_b[eb] = true;
            self.done_a[ea] = true;
            if self.run() {
                return true;
            }
            self.used_b[eb] = false;
            self.done_a[ea] = false;
            for x in bound {
                let y = self.map_ab[x].take().expect("bound above");
                self.map_ba[y] = None;
            }
        }
        false
    }
}

pub(super) fn isomorphic(a: &AmrGraph, b: &AmrGraph) -> bool {
    if a.nodes.len() != b.nodes.len() || a.edges.len() != b.edges.len() {
        return false;
    }
    let na = normalize(a);
    let nb = normalize(b);
    let rounds = na.concepts.len().min(8);
    let ca = colours(&na, rounds);
    let cb = colours(&nb, rounds);
    let mut sa = ca.clone();
    let mut sb = cb.clone();
    sa.sort_unstable();
    sb.sort_unstable();
    if sa != sb || na.concepts[na.root] != nb.concepts[nb.root] || ca[na.root] != cb[nb.root] {
        return false;
    }
    let mut search = Search {
        map_ab: vec![None; na.concepts.len()],
        map_ba: vec![None; nb.concepts.len()],
        used_b: vec![false; nb.edges.len()],
        done_a: vec![false; na.edges.len()],
        a: &na,
        b: &nb,
        ca,
        cb,
    };
    search.map_ab[na.root] = Some(nb.root);
    search.map_ba[nb.root] = Some(na.root);
    search.run()
}

#[cfg(test)]
mod tests {
    use crate::amr::parse_penman;

    fn iso(a: &str, b: &str) -> bool {
        parse_penman(a)
            .unwrap()
            .structurally_eq(&parse_penman(b).unwrap())
    }

    #[test]
    fn renaming_is_invisible() {
        assert!(iso(
            "(m / mix-01 :ARG1 (s / salt) :ARG2 (c / chicken))",
            "(x / mix-01 :ARG2 (y / chicken) :ARG1 (z / salt))"
        ));
    }

    #[test]
    fn concepts_and_roles_matter() {
        assert!(!iso(
            "(m / mix-01 :ARG1 (s / salt))",
            "(m / mix-01 :ARG2 (s / salt))"
        ));
        assert!(!iso(
            "(m / mix-01 :ARG1 (s / salt))",
            "(m / mix-01 :ARG1 (s / sugar))"
        ));
        assert!(!iso("(m / mix-01 :quant 2)", "(m / mix-01 :quant 3)"));
    }

    #[test]
    fn reentrancy_structure_matters() {
        assert!(iso(
            "(c / cook-01 :ARG0 (y / you) :purpose (p / prepare-01 :ARG0 y))",
            "(c / cook-01 :ARG0 (q / you) :purpose (r / prepare-01 :ARG0 q))"
        ));
        assert!(!iso(
            "(c / cook-01 :ARG0 (y / you) :purpose (p / prepare-01 :ARG0 y))",
            "(c / cook-01 :ARG0 (y / you) :purpose (p / prepare-01 :ARG0 (y2 / you)))"
        ));
    }

    #[test]
    fn inverse_roles_normalize() {
        assert!(iso(
            "(w / wing :ARG1-of (c / coat-01))",
            "(w / wing :ARG1-of (k / coat-01))"
        ));
    }

    #[test]
    fn root_is_anchored() {
        assert!(!iso("(a / x :ARG1 (b / x))", "(b / x :ARG1-of (a / x))"));
    }

    #[test]
    fn op_labels_are_ordered() {
        assert!(!iso(
            "(a / and :op1 (b / bean) :op2 (c / corn))",
            "(a / and :op1 (c / corn) :op2 (b / bean))"
        ));
    }
}
