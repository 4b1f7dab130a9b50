//! Temporal questions composed from flow graphs and AMR templates.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs;
use std::path::Path;

use indexmap::IndexSet;
use thiserror::Error;

use super::{Category, Provenance, QaCandidate, QgenError};
use crate::amr::{is_frame, lemma, parse_penman, AmrError, AmrGraph, Constant, Edge, Role, Target};
use crate::flowgraph::{FlowGraph, MixtureRef};
use crate::realize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TemplateKind {
    Mixture,
    Next,
    Prev,
    Order,
}

impl TemplateKind {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "mixture" => TemplateKind::Mixture,
            "next" => TemplateKind::Next,
            "prev" => TemplateKind::Prev,
            "order" => TemplateKind::Order,
            _ => return None,
        })
    }

    pub fn category(self) -> Category {
        match self {
            TemplateKind::Mixture => Category::TemporalMixture,
            TemplateKind::Next => Category::TemporalNext,
            TemplateKind::Prev => Category::TemporalPrev,
            TemplateKind::Order => Category::TemporalOrder,
        }
    }

    // Next/prev also allow a context-free variant without a slot.
    fn allowed_slots(self) -> &'static [usize] {
        match self {
            TemplateKind::Mixture => &[1],
            TemplateKind::Next | TemplateKind::Prev => &[0, 1],
            TemplateKind::Order => &[2],
        }
    }
}

#[derive(Debug, Error)]
pub enum TemplateError {
    #[error("cannot read templates {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("template at line {line}: {source}")]
    Parse {
        line: usize,
        #[source]
        source: AmrError,
    },
    #[error("template at line {line} lacks `# ::{field}`")]
    MissingField { line: usize, field: &'static str },
    #[error("template {id}: unknown category `{value}`")]
    UnknownCategory { id: String, value: String },
    #[error("template {id}: {found} slot(s), expected {expected:?}")]
    BadPlaceholderCount {
        id: String,
        found: usize,
        expected: &'static [usize],
    },
    #[error("duplicate template id `{0}`")]
    DuplicateTemplateId(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuestionTemplate {
    pub id: String,
    pub kind: TemplateKind,
    pub pattern: AmrGraph,
    /// English form with `{mixture_name}`, `{A}`, `{B}`, `{A_ing}`, `{B_ing}`.
    pub surface: String,
}

fn slot_concept(k: usize) -> String {
    format!("slot-{k}")
}

impl QuestionTemplate {
    pub fn slots(&self) -> usize {
        self.pattern
            .nodes()
            .filter(|(_, c)| c.starts_with("slot-"))
            .count()
    }

    fn slots_well_formed(&self) -> bool {
        let n = self.slots();
        (1..=n).all(|k| self.pattern.count_concept(&slot_concept(k)) == 1)
    }

    /// Fills `slot-1`, `slot-2`, ... with `fillers` in order.
    pub fn instantiate(&self, fillers: &[AmrGraph]) -> AmrGraph {
        assert_eq!(fillers.len(), self.slots(), "template {}", self.id);
        let mut g = self.pattern.clone();
        for (k, f) in fillers.iter().enumerate() {
            let want = slot_concept(k + 1);
            let var = g
                .nodes()
                .find(|(_, c)| *c == want)
                .map(|(v, _)| v.to_string())
                .expect("validated slot");
            g = g.fill_slot(&var, f);
        }
        g
    }

    pub fn render(&self, bindings: &[(&str, &str)]) -> String {
        let mut s = self.surface.clone();
        for (k, v) in bindings {
            s = s.replace(&format!("{{{k}}}"), v);
        }
        s
    }
}

/// Parses a template file: blank-line separated blocks of `# ::` headers
/// followed by one PENMAN graph.
pub fn parse_templates(text: &str) -> Result<Vec<QuestionTemplate>, TemplateError> {
    let mut out: Vec<QuestionTemplate> = Vec::new();
    let mut seen = HashSet::new();
    let lines: Vec<&str> = text.lines().collect();
    let mut i = 0;
    while i < lines.len() {
        if lines[i].trim().is_empty() {
            i += 1;
            continue;
        }
        let start = i + 1;
        let mut meta = BTreeMap::new();
        let mut body = String::new();
        while i < lines.len() && !lines[i].trim().is_empty() {
            let l = lines[i].trim();
            if let Some(h) = l.strip_prefix("# ::") {
                let (k, v) = h.split_once(char::is_whitespace).unwrap_or((h, ""));
                meta.insert(k.to_string(), v.trim().to_string());
            } else if !l.starts_with('#') {
                body.push_str(lines[i]);
                body.push('\n');
            }
            i += 1;
        }
        if body.trim().is_empty() {
            continue;
        }
        let field = |f: &'static str| {
            meta.get(f).cloned().ok_or(TemplateError::MissingField {
                line: start,
                field: f,
            })
        };
        let id = field("id")?;
        let cat = field("category")?;
        let surface = field("surface")?;
        let kind = TemplateKind::parse(&cat).ok_or_else(|| TemplateError::UnknownCategory {
            id: id.clone(),
            value: cat,
        })?;
        let pattern = parse_penman(&body).map_err(|source| TemplateError::Parse {
            line: start,
            source,
        })?;
        let t = QuestionTemplate {
            id: id.clone(),
            kind,
            pattern,
            surface,
        };
        if !kind.allowed_slots().contains(&t.slots()) || !t.slots_well_formed() {
            return Err(TemplateError::BadPlaceholderCount {
                id,
                found: t.slots(),
                expected: kind.allowed_slots(),
            });
        }
        if !seen.insert(id.clone()) {
            return Err(TemplateError::DuplicateTemplateId(id));
        }
        out.push(t);
    }
    Ok(out)
}

pub fn load_templates(path: &Path) -> Result<Vec<QuestionTemplate>, TemplateError> {
    let text = fs::read_to_string(path).map_err(|source| TemplateError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_templates(&text)
}

/// The shipped set: 12 mixture templates plus next/prev/order frames.
pub fn default_templates() -> Vec<QuestionTemplate> {
    parse_templates(include_str!("../../data/templates.amr")).expect("bundled templates are valid")
}

/// One action's part of its sentence AMR, with a surface form.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionAmr {
    pub act_id: usize,
    pub amr: AmrGraph,
    pub realized: String,
}

fn top_frames(g: &AmrGraph) -> Vec<String> {
    if g.root_concept() == "and" {
        let mut ops: Vec<(u32, String)> = g
            .root_edges()
            .filter_map(|e| Some((e.role.op_index()?, e.target.as_node()?.to_string())))
            .filter(|(_, v)| g.concept(v).is_some_and(is_frame))
            .collect();
        ops.sort();
        ops.into_iter().map(|(_, v)| v).collect()
    } else {
        vec![g.root().to_string()]
    }
}

fn sentence_case(s: &str) -> String {
    let t = s.trim();
    if t.ends_with(['.', '!', '?']) {
        realize::capitalize(t)
    } else {
        format!("{}.", realize::capitalize(t))
    }
}

/// Splits sentence AMRs into per-action graphs. A sentence with one action
/// contributes its whole AMR; otherwise top-level frames are matched to
/// actions by verb, then by position, falling back to the whole AMR.
pub fn extract_action_amrs(
    graph: &FlowGraph,
    sentence_amrs: &BTreeMap<usize, AmrGraph>,
) -> BTreeMap<usize, ActionAmr> {
    let mut out = BTreeMap::new();
    for (sent, text) in graph.sentences() {
        let Some(amr) = sentence_amrs.get(sent) else {
            continue;
        };
        let acts: Vec<_> = graph
            .actions()
            .iter()
            .filter(|a| a.sent_index == *sent)
            .collect();
        if acts.len() == 1 {
            out.insert(
                acts[0].act_id,
                ActionAmr {
                    act_id: acts[0].act_id,
                    amr: amr.clone(),
                    realized: sentence_case(text),
                },
            );
            continue;
        }
        let frames = top_frames(amr);
        let mut used = HashSet::new();
        for (k, a) in acts.iter().enumerate() {
            let by_verb = frames
                .iter()
                .find(|v| !used.contains(*v) && amr.concept(v).map(lemma) == Some(a.verb.as_str()));
            let pick = by_verb.or_else(|| frames.get(k).filter(|v| !used.contains(*v)));
            let sub = match pick {
                Some(v) => {
                    used.insert(v.clone());
                    amr.subgraph(v)
                }
                None => {
                    log::warn!("action {} ({}): no frame of its own in sentence {sent}; using the whole AMR", a.act_id, a.verb);
                    amr.clone()
                }
            };
            let realized = sentence_case(&realize::phrase(&sub));
            out.insert(
                a.act_id,
                ActionAmr {
                    act_id: a.act_id,
                    amr: sub,
                    realized,
                },
            );
        }
    }
    out
}

/// The action graph as it appears inside a template: no mood or subject.
fn slot_filler(a: &AmrGraph) -> AmrGraph {
    a.retain_root_roles(|r| !matches!(r.name(), "mode" | "ARG0") || r.is_inverse())
}

fn base_text(realized: &str) -> String {
    let t = realized.trim().trim_end_matches(['.', '!', '?']);
    let mut c = t.chars();
    match c.next() {
        Some(f) => f.to_lowercase().chain(c).collect(),
        None => String::new(),
    }
}

fn gerund_text(realized: &str) -> String {
    let base = base_text(realized);
    match base.split_once(' ') {
        Some((verb, rest)) => format!("{} {rest}", realize::gerund(verb)),
        None => realize::gerund(&base),
    }
}

const NUMBER_WORDS: &[(&str, &str)] = &[
    ("one", "1"),
    ("two", "2"),
    ("three", "3"),
    ("four", "4"),
    ("five", "5"),
    ("six", "6"),
    ("seven", "7"),
    ("eight", "8"),
    ("nine", "9"),
    ("ten", "10"),
];

pub(crate) fn singular(word: &str) -> String {
    if let Some(s) = word.strip_suffix("ies") {
        format!("{s}y")
    } else if let Some(s) = word.strip_suffix("oes") {
        format!("{s}o")
    } else if ["ches", "shes", "sses", "xes"]
        .iter()
        .any(|x| word.ends_with(x))
    {
        word[..word.len() - 2].to_string()
    } else if word.ends_with('s') && !word.ends_with("ss") && word.len() > 3 {
        word[..word.len() - 1].to_string()
    } else {
        word.to_string()
    }
}

fn participle_stem(word: &str) -> Option<String> {
    let stem = word.strip_suffix("ed")?;
    let b = stem.as_bytes();
    if b.len() < 2 {
        return None;
    }
    let vowel = |c: u8| b"aeiou".contains(&c);
    let n = b.len();
    Some(if b[n - 1] == b[n - 2] && !vowel(b[n - 1]) {
        stem[..n - 1].to_string()
    } else if n >= 3
        && !vowel(b[n - 1])
        && vowel(b[n - 2])
        && !vowel(b[n - 3])
        && !b"wxy".contains(&b[n - 1])
    {
        format!("{stem}e")
    } else {
        stem.to_string()
    })
}

/// A noun-phrase AMR for an item name such as "two chopped onions".
pub fn item_amr(name: &str) -> AmrGraph {
    let words: Vec<String> = name
        .split_whitespace()
        .map(|w| {
            w.trim_matches(|c: char| !c.is_alphanumeric() && c != '-')
                .to_lowercase()
        })
        .filter(|w| !w.is_empty() && !matches!(w.as_str(), "a" | "an" | "the" | "some"))
        .collect();
    let Some((head, mods)) = words.split_last() else {
        return AmrGraph::leaf("t", "thing");
    };
    let head = singular(head);
    let root = head
        .chars()
        .find(char::is_ascii_alphabetic)
        .unwrap_or('x')
        .to_string();
    let mut g = AmrGraph::leaf(root.clone(), head);
    for w in mods {
        let number = NUMBER_WORDS
            .iter()
            .find(|(k, _)| k == w)
            .map(|(_, v)| v.to_string())
            .or_else(|| w.parse::<f64>().is_ok().then(|| w.clone()));
        if let Some(n) = number {
            g.edges_mut().push(Edge::new(
                root.as_str(),
                Role::named(":quant"),
                Target::Const(Constant::from_symbol(&n)),
            ));
        } else if let Some(stem) = participle_stem(w) {
            g = g
                .add_child_node(&root, Role::named(":ARG1-of"), &format!("{stem}-01"))
                .0;
        } else {
            g = g.add_child_node(&root, Role::named(":mod"), w).0;
        }
    }
    g.finish()
}

/// `and` compound of the item graphs (or the single item).
pub fn compound_amr(items: &[String]) -> AmrGraph {
    if items.len() == 1 {
        return item_amr(&items[0]);
    }
    let mut g = AmrGraph::leaf("a", "and");
    for (i, name) in items.iter().enumerate() {
        let r = g.absorb(&item_amr(name));
        g.edges_mut()
            .push(Edge::new("a", Role::op(i as u32 + 1), Target::Node(r)));
    }
    g.finish()
}

/// The graph naming a mixture: the matching node of the sentence that uses
/// it when there is one, else built from the name.
fn mixture_amr(m: &MixtureRef, sentence: Option<&AmrGraph>) -> AmrGraph {
    let head = m
        .name
        .split_whitespace()
        .last()
        .map(|w| singular(&w.to_lowercase()))
        .unwrap_or_default();
    if let Some(s) = sentence {
        if let Some((v, _)) = s.nodes().find(|(_, c)| *c == head) {
            return s.subgraph(v);
        }
    }
    item_amr(&m.name)
}

fn contributing_acts(graph: &FlowGraph, act: usize, out: &mut BTreeSet<usize>) {
    if !out.insert(act) {
        return;
    }
    for &p in graph.actions()[act].inputs.values() {
        if p >= 0 {
            contributing_acts(graph, p as usize, out);
        }
    }
}

fn sentences_of(graph: &FlowGraph, acts: impl IntoIterator<Item = usize>) -> Vec<usize> {
    let set: BTreeSet<usize> = acts
        .into_iter()
        .map(|a| graph.actions()[a].sent_index)
        .collect();
    set.into_iter().collect()
}

fn of_kind(
    templates: &[QuestionTemplate],
    kind: TemplateKind,
) -> impl Iterator<Item = &QuestionTemplate> {
    templates.iter().filter(move |t| t.kind == kind)
}

/// Every mixture template for every named mixture; the answer lists the
/// mixture's raw ingredients.
pub fn gen_mixture_questions(
    graph: &FlowGraph,
    templates: &[QuestionTemplate],
    sentence_amrs: &BTreeMap<usize, AmrGraph>,
) -> Vec<QaCandidate> {
    let mut out = Vec::new();
    for action in graph.actions() {
        for (name, &p) in &action.inputs {
            if p < 0 {
                continue;
            }
            let m = MixtureRef::new(name, p as usize);
            if !m.named {
                continue;
            }
            let ingredients: Vec<String> = graph.ingredients_of(&m).into_iter().collect();
            if ingredients.is_empty() {
                continue;
            }
            let answer = compound_amr(&ingredients);
            let hint = sentence_case(&realize::join_list(&ingredients, "and"));
            let filler = mixture_amr(&m, sentence_amrs.get(&action.sent_index));
            let mut acts = BTreeSet::new();
            contributing_acts(graph, m.producing_act, &mut acts);
            acts.insert(action.act_id);
            let sentences = sentences_of(graph, acts);
            for t in of_kind(templates, TemplateKind::Mixture) {
                let mut c = QaCandidate::with_answer_amr(
                    t.instantiate(std::slice::from_ref(&filler)),
                    answer.clone(),
                    t.kind.category(),
                );
                c.question_hint = Some(t.render(&[("mixture_name", &m.name)]));
                c.answer_hint = Some(hint.clone());
                c.provenance = Provenance {
                    recipe_id: None,
                    sentences: sentences.clone(),
                    fallback: false,
                };
                out.push(c);
            }
        }
    }
    out
}

fn action_amr(amrs: &BTreeMap<usize, ActionAmr>, act: usize) -> Result<&ActionAmr, QgenError> {
    amrs.get(&act).ok_or(QgenError::MissingActionAmr(act))
}

/// "What do we do after/before ...?" with one candidate per neighbouring
/// action, plus context-free variants.
pub fn gen_next_prev_questions(
    graph: &FlowGraph,
    templates: &[QuestionTemplate],
    action_amrs: &BTreeMap<usize, ActionAmr>,
) -> Result<Vec<QaCandidate>, QgenError> {
    let mut out = Vec::new();
    for kind in [TemplateKind::Next, TemplateKind::Prev] {
        for action in graph.actions() {
            let others = match kind {
                TemplateKind::Next => graph.next_actions(action.act_id),
                _ => graph.prev_actions(action.act_id),
            };
            if others.is_empty() {
                continue;
            }
            let focus = action_amr(action_amrs, action.act_id)?;
            let filler = slot_filler(&focus.amr);
            let ing = gerund_text(&focus.realized);
            for o in others {
                let answer = action_amr(action_amrs, o)?;
                for t in of_kind(templates, kind) {
                    let q = if t.slots() == 1 {
                        t.instantiate(std::slice::from_ref(&filler))
                    } else {
                        t.pattern.clone()
                    };
                    let mut c =
                        QaCandidate::with_answer_amr(q, answer.amr.clone(), kind.category());
                    c.question_hint =
                        Some(t.render(&[("A_ing", &ing), ("A", &base_text(&focus.realized))]));
                    c.answer_hint = Some(answer.realized.clone());
                    c.provenance.sentences = sentences_of(graph, [action.act_id, o]);
                    out.push(c);
                }
            }
        }
    }
    Ok(out)
}

/// Four questions per comparable pair: each order frame in both slot
/// orders. The answer is the earlier action marked as first.
pub fn gen_order_questions(
    graph: &FlowGraph,
    templates: &[QuestionTemplate],
    action_amrs: &BTreeMap<usize, ActionAmr>,
) -> Result<Vec<QaCandidate>, QgenError> {
    let mut out = Vec::new();
    for pair in graph.order_pairs() {
        let a = action_amr(action_amrs, pair.a)?;
        let b = action_amr(action_amrs, pair.b)?;
        let first = if pair.first == pair.a { a } else { b };
        let answer = {
            let g = slot_filler(&first.amr);
            let root = g.root().to_string();
            let (mut g, ord) = g.add_child_node(&root, Role::named(":ord"), "ordinal-entity");
            g.edges_mut().push(Edge::new(
                ord,
                Role::named(":value"),
                Target::Const(Constant::from_symbol("1")),
            ));
            g.finish()
        };
        let hint = format!("First, {}.", base_text(&first.realized));
        for t in of_kind(templates, TemplateKind::Order) {
            for (x, y) in [(a, b), (b, a)] {
                let q = t.instantiate(&[slot_filler(&x.amr), slot_filler(&y.amr)]);
                let mut c = QaCandidate::with_answer_amr(q, answer.clone(), t.kind.category());
                c.question_hint = Some(t.render(&[
                    ("A_ing", &gerund_text(&x.realized)),
                    ("B_ing", &gerund_text(&y.realized)),
                    ("A", &base_text(&x.realized)),
                    ("B", &base_text(&y.realized)),
                ]));
                c.answer_hint = Some(hint.clone());
                c.provenance.sentences = sentences_of(graph, [pair.a, pair.b]);
                out.push(c);
            }
        }
    }
    Ok(out)
}

/// Ingredient names for every named mixture, keyed by the mixture.
pub fn mixture_ingredients(graph: &FlowGraph) -> Vec<(MixtureRef, IndexSet<String>)> {
    graph
        .mixtures()
        .into_iter()
        .filter(|m| m.named)
        .map(|m| {
            let ing = graph.ingredients_of(&m);
            (m, ing)
        })
        .collect()
}
