//! AMR graphs in PENMAN notation.
//!
//! An [`AmrGraph`] keeps the edge list in the order edges were written, with
//! each edge stored in the direction it appears in the tree (so `:ARG1-of`
//! edges point from the syntactic parent to the child). That makes the
//! PENMAN tree recoverable exactly while still exposing the underlying graph.

mod edit;
mod iso;
mod parse;
mod path;
mod serialize;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use edit::UNKNOWN_CONCEPT;
pub use parse::{parse_penman, parse_penman_blocks};
pub use path::GraphPath;
pub use serialize::{serialize_penman, Layout};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AmrError {
    #[error("empty input at byte {offset}")]
    EmptyInput { offset: usize },
    #[error("unbalanced parentheses at byte {offset}")]
    UnbalancedParens { offset: usize },
    #[error("variable `{var}` defined twice (second definition at byte {offset})")]
    DuplicateVariableDefinition { var: String, offset: usize },
    #[error("reference to undefined variable `{var}` at byte {offset}")]
    DanglingVariableReference { var: String, offset: usize },
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("invalid role label `{0}`")]
    InvalidRole(String),
    #[error("node `{0}` is not reachable from the root")]
    UnreachableNode(String),
    #[error("variable `{0}` is used but has no concept")]
    UndefinedVariable(String),
    #[error("path {0} does not resolve to an edge")]
    PathNotFound(String),
    #[error("path {0} targets a constant that cannot be questioned")]
    PathTargetsConstant(String),
}

/// An edge label such as `:ARG1` or `:location`; `-of` forms are inverse.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Role {
    name: String,
    inverse: bool,
}

// Roles whose surface form ends in `-of` without being inverses.
const NON_INVERSE_OF: &[&str] = &["consist-of", "prep-out-of", "prep-on-behalf-of"];

impl Role {
    pub fn parse(label: &str) -> Result<Self, AmrError> {
        let body = label
            .strip_prefix(':')
            .ok_or_else(|| AmrError::InvalidRole(label.to_string()))?;
        if body.is_empty() || !body.chars().all(|c| c.is_ascii_alphanumeric() || c == '-') {
            return Err(AmrError::InvalidRole(label.to_string()));
        }
        if let Some(base) = body.strip_suffix("-of") {
            if !base.is_empty() && !NON_INVERSE_OF.contains(&body) {
                return Ok(Role {
                    name: base.to_string(),
                    inverse: true,
                });
            }
        }
        Ok(Role {
            name: body.to_string(),
            inverse: false,
        })
    }

    /// Builds a role from a literal label; panics on malformed input.
    pub fn named(label: &str) -> Self {
        Self::parse(label).unwrap_or_else(|e| panic!("{e}"))
    }

    /// Base name without the leading colon or `-of` suffix.
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_inverse(&self) -> bool {
        self.inverse
    }

    pub fn base(&self) -> Role {
        Role {
            name: self.name.clone(),
            inverse: false,
        }
    }

    /// `:ARG0`, `:ARG1`, ... (non-inverse).
    pub fn arg_index(&self) -> Option<u32> {
        if self.inverse {
            return None;
        }
        self.name.strip_prefix("ARG").and_then(|n| n.parse().ok())
    }

    /// `:op1`, `:op2`, ... index.
    pub fn op_index(&self) -> Option<u32> {
        if self.inverse {
            return None;
        }
        self.name.strip_prefix("op").and_then(|n| n.parse().ok())
    }

    pub fn op(index: u32) -> Role {
        Role {
            name: format!("op{index}"),
            inverse: false,
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverse {
            write!(f, ":{}-of", self.name)
        } else {
            write!(f, ":{}", self.name)
        }
    }
}

impl FromStr for Role {
    type Err = AmrError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Role::parse(s)
    }
}

/// Attribute values: numbers, bare symbols (`imperative`, `-`) and quoted strings.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Constant {
    Number(String),
    Symbol(String),
    Str(String),
}

impl Constant {
    pub(crate) fn from_symbol(s: &str) -> Self {
        if s.parse::<f64>().is_ok() {
            Constant::Number(s.to_string())
        } else {
            Constant::Symbol(s.to_string())
        }
    }

    /// The value without quoting.
    pub fn text(&self) -> &str {
        match self {
            Constant::Number(s) | Constant::Symbol(s) | Constant::Str(s) => s,
        }
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constant::Number(s) | Constant::Symbol(s) => f.write_str(s),
            Constant::Str(s) => {
                f.write_str("\"")?;
                for c in s.chars() {
                    if c == '"' || c == '\\' {
                        f.write_str("\\")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str("\"")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Target {
    Node(String),
    Const(Constant),
}

impl Target {
    pub fn as_node(&self) -> Option<&str> {
        match self {
            Target::Node(v) => Some(v),
            Target::Const(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub source: String,
    pub role: Role,
    pub target: Target,
}

impl Edge {
    pub fn new(source: impl Into<String>, role: Role, target: Target) -> Self {
        Edge {
            source: source.into(),
            role,
            target,
        }
    }
}

/// A rooted, labeled, possibly re-entrant semantic graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AmrGraph {
    root: String,
    nodes: BTreeMap<String, String>,
    edges: Vec<Edge>,
    id: Option<String>,
}

impl AmrGraph {
    /// Single-node graph.
    pub fn leaf(var: impl Into<String>, concept: impl Into<String>) -> Self {
        let var = var.into();
        let mut nodes = BTreeMap::new();
        nodes.insert(var.clone(), concept.into());
        AmrGraph {
            root: var,
            nodes,
            edges: Vec::new(),
            id: None,
        }
    }

    /// Assembles a graph from parts and checks every invariant.
    pub fn from_parts(
        root: impl Into<String>,
        nodes: impl IntoIterator<Item = (String, String)>,
        edges: Vec<Edge>,
    ) -> Result<Self, AmrError> {
        let g = AmrGraph {
            root: root.into(),
            nodes: nodes.into_iter().collect(),
            edges,
            id: None,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn root(&self) -> &str {
        &self.root
    }

    pub fn root_concept(&self) -> &str {
        &self.nodes[&self.root]
    }

    pub fn concept(&self, var: &str) -> Option<&str> {
        self.nodes.get(var).map(String::as_str)
    }

    pub fn nodes(&self) -> impl Iterator<Item = (&str, &str)> {
        self.nodes.iter().map(|(v, c)| (v.as_str(), c.as_str()))
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn id(&self) -> Option<&str> {
        self.id.as_deref()
    }

    pub fn with_id(mut self, id: Option<String>) -> Self {
        self.id = id;
        self
    }

    /// Outgoing edges of `var` in edge-list order.
    pub fn children<'a>(&'a self, var: &'a str) -> impl Iterator<Item = &'a Edge> + 'a {
        self.edges.iter().filter(move |e| e.source == var)
    }

    pub fn root_edges(&self) -> impl Iterator<Item = &Edge> + '_ {
        self.children(&self.root)
    }

    /// First outgoing edge of `var` with the given role.
    pub fn child(&self, var: &str, role: &Role) -> Option<&Edge> {
        self.edges
            .iter()
            .find(|e| e.source == var && &e.role == role)
    }

    pub fn has_root_role(&self, role: &Role) -> bool {
        self.child(&self.root, role).is_some()
    }

    pub fn count_concept(&self, concept: &str) -> usize {
        self.nodes.values().filter(|c| *c == concept).count()
    }

    /// Variables reachable from `start` along stored edge direction, in DFS order.
    pub fn reachable_from(&self, start: &str) -> Vec<String> {
        let index = self.child_index();
        let mut seen = HashSet::new();
        let mut order = Vec::new();
        let mut stack = vec![start.to_string()];
        while let Some(v) = stack.pop() {
            if !seen.insert(v.clone()) {
                continue;
            }
            order.push(v.clone());
            if let Some(kids) = index.get(v.as_str()) {
                for &i in kids.iter().rev() {
                    if let Target::Node(t) = &self.edges[i].target {
                        if !seen.contains(t) {
                            stack.push(t.clone());
                        }
                    }
                }
            }
        }
        order
    }

    /// Checks concept binding, edge endpoints and reachability.
    pub fn validate(&self) -> Result<(), AmrError> {
        if !self.nodes.contains_key(&self.root) {
            return Err(AmrError::UndefinedVariable(self.root.clone()));
        }
        for e in &self.edges {
            if !self.nodes.contains_key(&e.source) {
                return Err(AmrError::UndefinedVariable(e.source.clone()));
            }
            if let Target::Node(t) = &e.target {
                if !self.nodes.contains_key(t) {
                    return Err(AmrError::UndefinedVariable(t.clone()));
                }
            }
        }
        let reach: HashSet<String> = self.reachable_from(&self.root).into_iter().collect();
        if let Some(v) = self.nodes.keys().find(|v| !reach.contains(*v)) {
            return Err(AmrError::UnreachableNode(v.clone()));
        }
        Ok(())
    }

    /// Structural equality up to consistent variable renaming.
    pub fn structurally_eq(&self, other: &AmrGraph) -> bool {
        iso::isomorphic(self, other)
    }

    pub(crate) fn child_index(&self) -> HashMap<&str, Vec<usize>> {
        let mut index: HashMap<&str, Vec<usize>> = HashMap::new();
        for (i, e) in self.edges.iter().enumerate() {
            index.entry(e.source.as_str()).or_default().push(i);
        }
        index
    }
}

impl fmt::Display for AmrGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = serialize_penman(self, Layout::Indented).map_err(|_| fmt::Error)?;
        f.write_str(&text)
    }
}

impl FromStr for AmrGraph {
    type Err = AmrError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_penman(s)
    }
}

/// Concept lemma without a PropBank sense suffix (`cook-01` → `cook`).
pub fn lemma(concept: &str) -> &str {
    match concept.rsplit_once('-') {
        Some((head, sense))
            if !head.is_empty()
                && !sense.is_empty()
                && sense.bytes().all(|b| b.is_ascii_digit()) =>
        {
            head
        }
        _ => concept,
    }
}

/// True for PropBank-style frames such as `cook-01`.
pub fn is_frame(concept: &str) -> bool {
    lemma(concept).len() != concept.len()
}
