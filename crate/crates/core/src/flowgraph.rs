//! Recipe action flow graphs: actions linked by the provenance of their
//! ingredients and cookware, plus explicit sequel links.

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use indexmap::{IndexMap, IndexSet};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Input name for an unnamed mixture carried over from an earlier action.
pub const IMPLICIT: &str = "implicit";

const PRONOUNS: &[&str] = &["it", "them", "they", "this", "these", "that", "those"];

#[derive(Debug, Error)]
pub enum FlowGraphError {
    #[error("cannot read flow graph {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("flow graph schema violation: {0}")]
    SchemaViolation(String),
    #[error("action {act_id} input `{name}` refers to action {index}, which does not precede it")]
    ForwardProvenance {
        act_id: usize,
        name: String,
        index: i64,
    },
    #[error("action links form a cycle through action {0}")]
    CycleDetected(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Action {
    pub act_id: usize,
    #[serde(skip)]
    pub sent_index: usize,
    #[serde(rename = "action")]
    pub verb: String,
    #[serde(rename = "input", default)]
    pub inputs: IndexMap<String, i64>,
    #[serde(default)]
    pub cookware: IndexMap<String, i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub next_action: Option<usize>,
}

impl Action {
    /// Earlier actions whose outputs (food or cookware) this action uses.
    pub fn provenance_parents(&self) -> BTreeSet<usize> {
        self.inputs
            .values()
            .chain(self.cookware.values())
            .filter(|&&p| p >= 0)
            .map(|&p| p as usize)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct SentenceRecord {
    sent_index: usize,
    sent: String,
    #[serde(default)]
    actions: Vec<Action>,
}

/// An intermediate food item consumed by some action.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MixtureRef {
    pub name: String,
    pub producing_act: usize,
    /// False for `implicit` entries and pronouns.
    pub named: bool,
}

impl MixtureRef {
    pub fn new(name: &str, producing_act: usize) -> Self {
        let lower = name.trim().to_lowercase();
        MixtureRef {
            name: name.to_string(),
            producing_act,
            named: lower != IMPLICIT && !PRONOUNS.contains(&lower.as_str()),
        }
    }
}

/// A comparable pair of actions; `first` is whichever is the ancestor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderPair {
    pub a: usize,
    pub b: usize,
    pub first: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowGraph {
    sentences: Vec<(usize, String)>,
    actions: Vec<Action>,
}

impl FlowGraph {
    /// Builds and validates a graph. `sentences` pairs each sentence index
    /// with its text; every action's `sent_index` must name one of them.
    pub fn new(
        sentences: Vec<(usize, String)>,
        actions: Vec<Action>,
    ) -> Result<Self, FlowGraphError> {
        let g = FlowGraph { sentences, actions };
        g.validate()?;
        Ok(g)
    }

    pub fn from_json(text: &str) -> Result<Self, FlowGraphError> {
        let records: Vec<SentenceRecord> = serde_json::from_str(text)
            .map_err(|e| FlowGraphError::SchemaViolation(e.to_string()))?;
        let mut sentences = Vec::new();
        let mut actions = Vec::new();
        for r in records {
            for mut a in r.actions {
                a.sent_index = r.sent_index;
                actions.push(a);
            }
            sentences.push((r.sent_index, r.sent));
        }
        Self::new(sentences, actions)
    }

    pub fn load(path: &Path) -> Result<Self, FlowGraphError> {
        let text = fs::read_to_string(path).map_err(|source| FlowGraphError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        let records: Vec<SentenceRecord> = self
            .sentences
            .iter()
            .map(|(i, s)| SentenceRecord {
                sent_index: *i,
                sent: s.clone(),
                actions: self
                    .actions
                    .iter()
                    .filter(|a| a.sent_index == *i)
                    .cloned()
                    .collect(),
            })
            .collect();
        serde_json::to_string_pretty(&records).expect("plain data serializes")
    }

    fn validate(&self) -> Result<(), FlowGraphError> {
        let bad = |m: String| Err(FlowGraphError::SchemaViolation(m));
        let n = self.actions.len();
        let mut last_sent = None;
        for (i, a) in self.actions.iter().enumerate() {
            if a.act_id != i {
                return bad(format!("expected act_id {i}, found {}", a.act_id));
            }
            if !self.sentences.iter().any(|(s, _)| *s == a.sent_index) {
                return bad(format!(
                    "action {i} names unknown sentence {}",
                    a.sent_index
                ));
            }
            if last_sent.is_some_and(|l| a.sent_index < l) {
                return bad(format!("action {i} goes back to sentence {}", a.sent_index));
            }
            last_sent = Some(a.sent_index);
            for (name, &p) in a.inputs.iter().chain(a.cookware.iter()) {
                if name.trim().is_empty() {
                    return bad(format!("action {i} has an empty item name"));
                }
                if p < -1 {
                    return bad(format!("action {i} item `{name}` has provenance {p}"));
                }
                if p >= i as i64 {
                    return Err(FlowGraphError::ForwardProvenance {
                        act_id: i,
                        name: name.clone(),
                        index: p,
                    });
                }
            }
            if a.inputs.get(IMPLICIT).is_some_and(|&p| p < 0) {
                return bad(format!(
                    "action {i} has an implicit input without provenance"
                ));
            }
            if let Some(nx) = a.next_action {
                if nx >= n {
                    return bad(format!("action {i} has next_action {nx} out of range"));
                }
            }
        }
        self.check_acyclic()
    }

    // Provenance edges point backwards by construction; explicit sequel
    // links can still close a loop.
    fn check_acyclic(&self) -> Result<(), FlowGraphError> {
        let n = self.actions.len();
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut indeg = vec![0usize; n];
        for a in &self.actions {
            for p in a.provenance_parents() {
                succ[p].push(a.act_id);
                indeg[a.act_id] += 1;
            }
            if let Some(nx) = a.next_action {
                succ[a.act_id].push(nx);
                indeg[nx] += 1;
            }
        }
        let mut queue: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut seen = 0;
        while let Some(v) = queue.pop() {
            seen += 1;
            for &w in &succ[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push(w);
                }
            }
        }
        if seen < n {
            let stuck = (0..n)
                .find(|&i| indeg[i] > 0)
                .expect("some node is on a cycle");
            return Err(FlowGraphError::CycleDetected(stuck));
        }
        Ok(())
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn action(&self, act_id: usize) -> Option<&Action> {
        self.actions.get(act_id)
    }

    pub fn sentences(&self) -> &[(usize, String)] {
        &self.sentences
    }

    pub fn sentence(&self, sent_index: usize) -> Option<&str> {
        self.sentences
            .iter()
            .find(|(i, _)| *i == sent_index)
            .map(|(_, s)| s.as_str())
    }

    /// Every intermediate input of every action, in action then input order.
    pub fn mixtures(&self) -> Vec<MixtureRef> {
        self.actions
            .iter()
            .flat_map(|a| {
                a.inputs
                    .iter()
                    .filter(|(_, &p)| p >= 0)
                    .map(|(name, &p)| MixtureRef::new(name, p as usize))
            })
            .collect()
    }

    /// Raw ingredients that went into `mixture`, first-seen order.
    pub fn ingredients_of(&self, mixture: &MixtureRef) -> IndexSet<String> {
        let mut memo = HashMap::new();
        self.ingredients_of_act(mixture.producing_act, &mut memo)
    }

    fn ingredients_of_act(
        &self,
        act: usize,
        memo: &mut HashMap<usize, IndexSet<String>>,
    ) -> IndexSet<String> {
        if let Some(r) = memo.get(&act) {
            return r.clone();
        }
        let mut out = IndexSet::new();
        for (name, &p) in &self.actions[act].inputs {
            if p < 0 {
                out.insert(name.clone());
            } else {
                out.extend(self.ingredients_of_act(p as usize, memo));
            }
        }
        memo.insert(act, out.clone());
        out
    }

    /// Provenance parents plus any action whose explicit sequel is `act_id`,
    /// ascending.
    pub fn prev_actions(&self, act_id: usize) -> Vec<usize> {
        let Some(a) = self.action(act_id) else {
            return Vec::new();
        };
        let mut out = a.provenance_parents();
        out.extend(
            self.actions
                .iter()
                .filter(|o| o.next_action == Some(act_id))
                .map(|o| o.act_id),
        );
        out.into_iter().collect()
    }

    /// The explicit sequel, then the sequel's other predecessors that come
    /// later than `act_id`.
    pub fn next_actions(&self, act_id: usize) -> Vec<usize> {
        let Some(next) = self.action(act_id).and_then(|a| a.next_action) else {
            return Vec::new();
        };
        let mut out = vec![next];
        out.extend(
            self.prev_actions(next)
                .into_iter()
                .filter(|&a| a > act_id && a != next),
        );
        out
    }

    /// For each action, all actions it transitively depends on.
    pub fn ancestors(&self) -> Vec<BTreeSet<usize>> {
        let mut anc: Vec<BTreeSet<usize>> = Vec::with_capacity(self.actions.len());
        for a in &self.actions {
            let mut set = BTreeSet::new();
            for p in a.provenance_parents() {
                set.insert(p);
                set.extend(anc[p].iter().copied());
            }
            anc.push(set);
        }
        anc
    }

    /// Pairs ordered by provenance, `a < b`.
    pub fn order_pairs(&self) -> Vec<OrderPair> {
        let anc = self.ancestors();
        let n = self.actions.len();
        let mut out = Vec::new();
        for a in 0..n {
            for (b, anc_b) in anc.iter().enumerate().skip(a + 1) {
                if anc_b.contains(&a) {
                    out.push(OrderPair { a, b, first: a });
                }
            }
        }
        out
    }
}
