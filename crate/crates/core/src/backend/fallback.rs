//! Deterministic surface realization for offline runs: a question skeleton
//! per category, filled with a plain linearization of the question graph.

use thiserror::Error;

use crate::amr::{is_frame, AmrGraph, Edge, Target, UNKNOWN_CONCEPT};
use crate::qgen::{Category, QaCandidate};
use crate::realize::{capitalize, phrase, plural, pronoun, tidy, Realizer, VerbForm};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FallbackError {
    #[error("no fallback skeleton for category `{0}`")]
    UnknownCategory(String),
}

const ROLE_SKELETONS: [&str; 13] = [
    "location",
    "duration",
    "extent",
    "time",
    "instrument",
    "accompanier",
    "purpose",
    "manner",
    "degree",
    "quant",
    "mod",
    "domain",
    "value",
];

fn question(s: &str) -> String {
    let s = tidy(s);
    let s = s.trim_end_matches(['.', '?', ' ']);
    format!("{}?", capitalize(s))
}

fn sentence(s: &str) -> String {
    let s = tidy(s);
    let s = s.trim_end_matches(['.', ' ']);
    format!("{}.", capitalize(s))
}

fn unknown_edge(g: &AmrGraph) -> Option<&Edge> {
    g.edges().iter().find(|e| {
        !e.role.is_inverse()
            && e.target.as_node().and_then(|v| g.concept(v)) == Some(UNKNOWN_CONCEPT)
    })
}

struct Subject {
    text: String,
    aux: &'static str,
}

fn subject(g: &AmrGraph) -> Subject {
    let arg0 = g
        .root_edges()
        .find(|e| e.role.name() == "ARG0" && !e.role.is_inverse());
    let Some(e) = arg0 else {
        return Subject {
            text: "you".into(),
            aux: "do",
        };
    };
    let concept = e.target.as_node().and_then(|v| g.concept(v)).unwrap_or("");
    let text = match &e.target {
        Target::Node(v) => Realizer::new(g, None).node(v, VerbForm::Base),
        Target::Const(c) => c.text().to_string(),
    };
    let aux = match pronoun(concept) {
        Some("it") => "does",
        Some(_) => "do",
        None => "does",
    };
    Subject { text, aux }
}

fn clause_without(g: &AmrGraph, skip: Option<&Edge>) -> String {
    if is_frame(g.root_concept()) {
        Realizer::new(g, skip).clause(g.root(), VerbForm::Base)
    } else {
        Realizer::new(g, skip).node(g.root(), VerbForm::Base)
    }
}

fn root_skeleton(g: &AmrGraph, e: &Edge) -> String {
    let Subject { text: s, aux } = subject(g);
    let c = clause_without(g, Some(e));
    let role = e.role.name();
    match role {
        "ARG0" => format!("Who {c}"),
        _ if e.role.arg_index().is_some() => format!("What {aux} {s} {c}"),
        "location" => format!("Where {aux} {s} {c}"),
        "duration" => format!("How long {aux} {s} {c}"),
        "extent" => format!("Until when {aux} {s} {c}"),
        "time" => format!("When {aux} {s} {c}"),
        "instrument" | "accompanier" => format!("What {aux} {s} {c} with"),
        "purpose" => format!("For what purpose {aux} {s} {c}"),
        "manner" => format!("How {aux} {s} {c}"),
        "degree" => format!("To what degree {aux} {s} {c}"),
        "quant" => format!("How much {aux} {s} {c}"),
        "mod" => format!("In what way {aux} {s} {c}"),
        "polarity" => format!("{} {s} {c}", capitalize(aux)),
        _ => format!("What is the {role} when {s} {c}"),
    }
}

fn nested_skeleton(g: &AmrGraph, e: &Edge) -> String {
    let reach = |t: &Edge| {
        t.target
            .as_node()
            .is_some_and(|v| g.reachable_from(v).contains(&e.source))
    };
    let top = g.root_edges().find(|t| reach(t));
    let entity = Realizer::new(g, Some(e)).node(&e.source, VerbForm::Base);
    let Subject { text: s, aux } = subject(g);
    let rest = clause_without(g, top);
    match e.role.name() {
        "quant" if entity.starts_with("degrees") || entity.ends_with('s') => {
            format!("How many {entity} {aux} {s} {rest}")
        }
        "quant" => format!("How many {} {aux} {s} {rest}", plural(&entity)),
        "mod" => format!("What kind of {entity} {aux} {s} {rest}"),
        role => format!("What is the {role} of the {entity} when {s} {rest}"),
    }
}

/// Question text for a candidate, without any backend.
pub fn realize_question(c: &QaCandidate) -> Result<String, FallbackError> {
    if let Category::RoleSpecific(r) = &c.category {
        if r.is_inverse() || !(r.arg_index().is_some() || ROLE_SKELETONS.contains(&r.name())) {
            return Err(FallbackError::UnknownCategory(c.category.to_string()));
        }
    }
    if let Some(h) = &c.question_hint {
        return Ok(question(h));
    }
    let g = &c.question_amr;
    let text = match unknown_edge(g) {
        Some(e) if e.source == g.root() => root_skeleton(g, e),
        Some(e) => nested_skeleton(g, e),
        None => phrase(g),
    };
    Ok(question(&text))
}

/// Answer text: explicit text first, then a known surface hint, then a
/// linearization of the answer graph. Instructions read as imperatives.
pub fn realize_answer(c: &QaCandidate) -> String {
    if let Some(t) = c.answer_text.as_ref().or(c.answer_hint.as_ref()) {
        return t.clone();
    }
    let Some(g) = &c.answer_amr else {
        return String::new();
    };
    if is_frame(g.root_concept()) && g.root_edges().any(|e| e.role.arg_index().is_some()) {
        sentence(&Realizer::new(g, None).clause(g.root(), VerbForm::Base))
    } else {
        phrase(g)
    }
}

/// Fills in missing question and answer text and marks the candidate as
/// realized offline.
pub fn fallback_realize(c: &mut QaCandidate) -> Result<(), FallbackError> {
    let q = realize_question(c)?;
    if c.question_text.is_none() {
        c.question_text = Some(q);
    }
    if c.answer_text.is_none() {
        c.answer_text = Some(realize_answer(c));
    }
    c.provenance.fallback = true;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amr::{parse_penman, Role};

    fn cand(q: &str, cat: Category) -> QaCandidate {
        let g = parse_penman(q).unwrap();
        QaCandidate::with_answer_text(g, "x", cat)
    }

    #[test]
    fn location_skeleton() {
        let c = cand(
            "(c / cook-01 :ARG0 (y / you) :ARG1 (a / and :op1 (c2 / chicken) :op2 (i / ingredient :mod (o / other))) :location (a2 / amr-unknown))",
            Category::RoleSpecific(Role::named(":location")),
        );
        assert_eq!(
            realize_question(&c).unwrap(),
            "Where do you cook chicken and other ingredient?"
        );
    }

    #[test]
    fn instrument_and_nested() {
        let c = cand(
            "(s / stir-01 :ARG1 (b / buttermilk) :instrument (a / amr-unknown))",
            Category::RoleSpecific(Role::named(":instrument")),
        );
        assert_eq!(
            realize_question(&c).unwrap(),
            "What do you stir buttermilk with?"
        );
        let c = cand(
            "(p / preheat-01 :ARG1 (o / oven) :ARG2 (t / temperature-quantity :quant (a / amr-unknown) :scale (c / celsius)))",
            Category::RoleSpecific(Role::named(":quant")),
        );
        assert_eq!(
            realize_question(&c).unwrap(),
            "How many degrees celsius do you preheat oven?"
        );
    }

    #[test]
    fn unsupported_role() {
        let c = cand(
            "(c / cook-01 :frequency (a / amr-unknown))",
            Category::RoleSpecific(Role::named(":frequency")),
        );
        assert_eq!(
            realize_question(&c),
            Err(FallbackError::UnknownCategory(
                "role_specific(:frequency)".into()
            ))
        );
    }

    #[test]
    fn answers() {
        let g = parse_penman("(c / cook-01 :ARG0 (y / you) :ARG1 (c2 / chicken) :duration (t / temporal-quantity :quant 20 :unit (m / minute)))").unwrap();
        let c = QaCandidate::with_answer_amr(g.clone(), g, Category::InstructionHow);
        assert_eq!(realize_answer(&c), "Cook chicken for 20 minutes.");
        let t = parse_penman("(t / temporal-quantity :quant 20 :unit (m / minute))").unwrap();
        let c = QaCandidate::with_answer_amr(
            t.clone(),
            t,
            Category::RoleSpecific(Role::named(":duration")),
        );
        assert_eq!(realize_answer(&c), "20 minutes");
    }

    #[test]
    fn marks_provenance() {
        let mut c = cand(
            "(c / cook-01 :ARG1 (a / amr-unknown))",
            Category::RoleSpecific(Role::named(":ARG1")),
        );
        fallback_realize(&mut c).unwrap();
        assert_eq!(c.question_text.as_deref(), Some("What do you cook?"));
        assert_eq!(c.answer_text.as_deref(), Some("x"));
        assert!(c.provenance.fallback);
    }
}
