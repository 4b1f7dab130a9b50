//! Rule-based AMR linearization used when no neural realizer is available.
//! Output is plain and deterministic rather than fluent.

use std::collections::HashSet;

use crate::amr::{is_frame, lemma, AmrGraph, Edge, Target, UNKNOWN_CONCEPT};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerbForm {
    Base,
    Gerund,
}

fn is_vowel(c: u8) -> bool {
    matches!(c, b'a' | b'e' | b'i' | b'o' | b'u')
}

// Short consonant-vowel-consonant stems double their last letter (chop, stir).
fn doubles_final(word: &str) -> bool {
    let b = word.as_bytes();
    let n = b.len();
    (3..=4).contains(&n)
        && !is_vowel(b[n - 1])
        && !matches!(b[n - 1], b'w' | b'x' | b'y')
        && is_vowel(b[n - 2])
        && !is_vowel(b[n - 3])
}

pub fn gerund(verb: &str) -> String {
    if let Some(stem) = verb.strip_suffix("ie") {
        format!("{stem}ying")
    } else if verb.ends_with('e') && !verb.ends_with("ee") && verb.len() > 2 {
        format!("{}ing", &verb[..verb.len() - 1])
    } else if doubles_final(verb) {
        format!("{verb}{}ing", &verb[verb.len() - 1..])
    } else {
        format!("{verb}ing")
    }
}

pub fn past_participle(verb: &str) -> String {
    let b = verb.as_bytes();
    if verb.ends_with('e') {
        format!("{verb}d")
    } else if verb.ends_with('y') && b.len() > 1 && !is_vowel(b[b.len() - 2]) {
        format!("{}ied", &verb[..verb.len() - 1])
    } else if doubles_final(verb) {
        format!("{verb}{}ed", &verb[verb.len() - 1..])
    } else {
        format!("{verb}ed")
    }
}

pub fn plural(noun: &str) -> String {
    if noun.ends_with("ch") || noun.ends_with("sh") || noun.ends_with('s') || noun.ends_with('x') {
        format!("{noun}es")
    } else {
        format!("{noun}s")
    }
}

/// Joins with commas and a final conjunction: `a, b and c`.
pub fn join_list(items: &[String], conj: &str) -> String {
    match items {
        [] => String::new(),
        [one] => one.clone(),
        [init @ .., last] => format!("{} {conj} {last}", init.join(", ")),
    }
}

pub fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

pub(crate) fn tidy(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Linearizes a graph from its root.
pub fn phrase(g: &AmrGraph) -> String {
    Realizer::new(g, None).node(g.root(), VerbForm::Base)
}

pub(crate) fn pronoun(concept: &str) -> Option<&'static str> {
    match concept {
        "i" => Some("I"),
        "we" => Some("we"),
        "you" => Some("you"),
        "they" => Some("they"),
        "it" => Some("it"),
        _ => None,
    }
}

pub(crate) struct Realizer<'g> {
    g: &'g AmrGraph,
    skip: Option<&'g Edge>,
    active: HashSet<&'g str>,
}

impl<'g> Realizer<'g> {
    /// `skip` names one edge to leave out of the output.
    pub(crate) fn new(g: &'g AmrGraph, skip: Option<&'g Edge>) -> Self {
        Realizer {
            g,
            skip,
            active: HashSet::new(),
        }
    }

    fn kids(&self, var: &str) -> Vec<&'g Edge> {
        self.g
            .edges()
            .iter()
            .filter(|e| e.source == var && !self.skip.is_some_and(|s| std::ptr::eq(*e, s)))
            .collect()
    }

    fn target(&mut self, t: &'g Target, form: VerbForm) -> String {
        match t {
            Target::Node(v) => self.node(v, form),
            Target::Const(c) => c.text().to_string(),
        }
    }

    fn concept(&self, var: &str) -> &'g str {
        self.g.concept(var).unwrap_or("")
    }

    pub(crate) fn node(&mut self, var: &'g str, form: VerbForm) -> String {
        let concept = self.concept(var);
        if !self.active.insert(var) {
            return pronoun(concept).map_or_else(|| lemma(concept).to_string(), str::to_string);
        }
        let out = self.node_inner(var, concept, form);
        self.active.remove(var);
        out
    }

    fn ops(&mut self, var: &'g str, form: VerbForm) -> Vec<String> {
        let mut ops: Vec<(u32, &'g Target)> = self
            .kids(var)
            .into_iter()
            .filter_map(|e| e.role.op_index().map(|i| (i, &e.target)))
            .collect();
        ops.sort_by_key(|(i, _)| *i);
        ops.into_iter().map(|(_, t)| self.target(t, form)).collect()
    }

    fn has_args(&self, var: &str) -> bool {
        self.kids(var).iter().any(|e| e.role.arg_index().is_some())
    }

    fn node_inner(&mut self, var: &'g str, concept: &'g str, form: VerbForm) -> String {
        if concept == UNKNOWN_CONCEPT {
            return "what".into();
        }
        if let Some(p) = pronoun(concept) {
            return p.into();
        }
        match concept {
            "and" | "or" | "amr-choice" => {
                let items = self.ops(var, form);
                let conj = if concept == "and" { "and" } else { "or" };
                return join_list(&items, conj);
            }
            "between" => {
                let items = self.ops(var, form);
                return format!("between {}", join_list(&items, "and"));
            }
            "until" | "after" | "before" | "next" => {
                let items = self.ops(var, VerbForm::Gerund);
                return tidy(&format!("{concept} {}", items.join(" ")));
            }
            "ordinal-entity" => {
                return match self.child_text(var, "value").as_deref() {
                    Some("1") => "first".into(),
                    Some(v) => format!("number {v}"),
                    None => "first".into(),
                };
            }
            _ => {}
        }
        if concept.ends_with("-quantity") {
            return self.quantity(var);
        }
        if is_frame(concept) && self.has_args(var) {
            return self.clause(var, form);
        }
        self.noun(var, concept)
    }

    fn child_text(&mut self, var: &'g str, role: &str) -> Option<String> {
        let e = self
            .kids(var)
            .into_iter()
            .find(|e| e.role.name() == role && !e.role.is_inverse())?;
        Some(self.target(&e.target, VerbForm::Base))
    }

    fn quantity(&mut self, var: &'g str) -> String {
        let quant = self.child_text(var, "quant");
        let unit = self.child_text(var, "unit").or_else(|| {
            self.child_text(var, "scale")
                .map(|s| format!("degrees {s}"))
        });
        match (quant, unit) {
            (Some(q), Some(u)) if q != "1" && !u.starts_with("degrees") => {
                format!("{q} {}", plural(&u))
            }
            (Some(q), Some(u)) => format!("{q} {u}"),
            (Some(q), None) => q,
            (None, Some(u)) => u,
            (None, None) => lemma(self.concept(var)).to_string(),
        }
    }

    fn noun(&mut self, var: &'g str, concept: &'g str) -> String {
        let mut pre = Vec::new();
        let mut post = Vec::new();
        let mut quant = None;
        for e in self.kids(var) {
            match (e.role.name(), e.role.is_inverse()) {
                ("quant", false) => quant = Some(self.target(&e.target, VerbForm::Base)),
                ("mod", false) => pre.push(self.target(&e.target, VerbForm::Base)),
                ("poss", false) => {
                    pre.insert(0, format!("{}'s", self.target(&e.target, VerbForm::Base)))
                }
                ("part" | "consist", false) => {
                    post.push(format!("of {}", self.target(&e.target, VerbForm::Base)))
                }
                ("part", true) => {
                    pre.insert(0, format!("{}'s", self.target(&e.target, VerbForm::Base)))
                }
                (_, true) if e.role.arg_index_any() == Some(1) => {
                    if let Target::Node(v) = &e.target {
                        pre.push(past_participle(lemma(self.concept(v))));
                    }
                }
                ("domain", false) => {
                    post.push(format!("is {}", self.target(&e.target, VerbForm::Base)))
                }
                _ => {}
            }
        }
        let mut words = Vec::new();
        words.extend(quant);
        words.extend(pre);
        words.push(lemma(concept).to_string());
        words.extend(post);
        tidy(&words.join(" "))
    }

    /// Verb phrase without its subject.
    pub(crate) fn clause(&mut self, var: &'g str, form: VerbForm) -> String {
        let verb = lemma(self.concept(var));
        let mut words = vec![match form {
            VerbForm::Base => verb.to_string(),
            VerbForm::Gerund => gerund(verb),
        }];
        let mut tail = Vec::new();
        for e in self.kids(var) {
            if e.role.is_inverse() {
                continue;
            }
            let name = e.role.name();
            let piece = match name {
                "ARG0" | "mode" | "polarity" | "ord" => continue,
                "ARG1" => self.target(&e.target, VerbForm::Gerund),
                "ARG2" | "instrument" | "accompanier" => {
                    format!("with {}", self.target(&e.target, VerbForm::Base))
                }
                "location" => format!("in {}", self.target(&e.target, VerbForm::Base)),
                "duration" => format!("for {}", self.target(&e.target, VerbForm::Base)),
                "manner" => format!("over {}", self.target(&e.target, VerbForm::Base)),
                "purpose" => format!("to {}", self.target(&e.target, VerbForm::Base)),
                "extent" | "time" => self.target(&e.target, VerbForm::Gerund),
                _ => self.target(&e.target, VerbForm::Base),
            };
            if name == "ARG1" {
                words.push(piece);
            } else {
                tail.push(piece);
            }
        }
        words.extend(tail);
        tidy(&words.join(" "))
    }
}

trait ArgIndexAny {
    fn arg_index_any(&self) -> Option<u32>;
}

impl ArgIndexAny for crate::amr::Role {
    fn arg_index_any(&self) -> Option<u32> {
        self.name().strip_prefix("ARG").and_then(|n| n.parse().ok())
    }
}
