use std::fmt;
use std::str::FromStr;

use super::{AmrError, AmrGraph, Role, Target};

/// A route from the root to one edge: each step picks the `occurrence`-th
/// (0-based, edge-list order) outgoing edge with the given role.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct GraphPath {
    steps: Vec<(Role, usize)>,
}

impl GraphPath {
    pub fn root() -> Self {
        GraphPath::default()
    }

    /// Path of single steps with occurrence 0, e.g. `of(&[":ARG1", ":mod"])`.
    pub fn of(roles: &[&str]) -> Self {
        GraphPath {
            steps: roles.iter().map(|r| (Role::named(r), 0)).collect(),
        }
    }

    pub fn then(mut self, role: Role, occurrence: usize) -> Self {
        self.steps.push((role, occurrence));
        self
    }

    pub fn steps(&self) -> &[(Role, usize)] {
        &self.steps
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Index into `graph.edges()` of the addressed edge.
    pub fn resolve(&self, graph: &AmrGraph) -> Result<usize, AmrError> {
        let not_found = || AmrError::PathNotFound(self.to_string());
        let mut node = graph.root().to_string();
        let mut found = None;
        for (n, (role, occ)) in self.steps.iter().enumerate() {
            let (i, edge) = graph
                .edges()
                .iter()
                .enumerate()
                .filter(|(_, e)| e.source == node && &e.role == role)
                .nth(*occ)
                .ok_or_else(not_found)?;
            found = Some(i);
            if n + 1 < self.steps.len() {
                match &edge.target {
                    Target::Node(t) => node = t.clone(),
                    Target::Const(_) => return Err(not_found()),
                }
            }
        }
        found.ok_or_else(not_found)
    }
}

impl fmt::Display for GraphPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (role, occ)) in self.steps.iter().enumerate() {
            if i > 0 {
                f.write_str("/")?;
            }
            write!(f, "{role}")?;
            if *occ > 0 {
                write!(f, "#{occ}")?;
            }
        }
        f.write_str("]")
    }
}

impl FromStr for GraphPath {
    type Err = AmrError;

    /// Parses `:ARG1/:op2#1` (brackets optional, `#k` gives the occurrence).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let body = s.trim().trim_start_matches('[').trim_end_matches(']');
        let mut steps = Vec::new();
        for part in body.split('/').map(str::trim).filter(|p| !p.is_empty()) {
            let (role, occ) = match part.split_once('#') {
                Some((r, k)) => (
                    r,
                    k.parse().map_err(|_| AmrError::InvalidRole(part.into()))?,
                ),
                None => (part, 0),
            };
            steps.push((Role::parse(role)?, occ));
        }
        Ok(GraphPath { steps })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amr::parse_penman;

    #[test]
    fn occurrence_counts_left_to_right() {
        let g = parse_penman("(w / wing :mod (a / big) :mod (b / crispy))").unwrap();
        let p: GraphPath = ":mod#1".parse().unwrap();
        let i = p.resolve(&g).unwrap();
        assert_eq!(g.edges()[i].target, Target::Node("b".into()));
        assert!(":mod#2".parse::<GraphPath>().unwrap().resolve(&g).is_err());
    }

    #[test]
    fn empty_path_resolves_to_nothing() {
        let g = parse_penman("(a / amr-unknown)").unwrap();
        assert!(matches!(
            GraphPath::root().resolve(&g),
            Err(AmrError::PathNotFound(_))
        ));
    }

    #[test]
    fn display_round_trip() {
        let p = GraphPath::of(&[":ARG1"]).then(Role::named(":op2"), 1);
        assert_eq!(p.to_string(), "[:ARG1/:op2#1]");
        assert_eq!(p.to_string().parse::<GraphPath>().unwrap(), p);
    }
}
