//! Question generators over one instruction's AMR.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Category, QaCandidate, QgenError, RuleLexicons};
use crate::amr::{AmrError, AmrGraph, Edge, GraphPath, Role, Target, UNKNOWN_CONCEPT};
use crate::realize;

/// Roles asked about by [`gen_role_questions`], besides `:ARG1`/`:ARG2`/`:time`.
pub const DIRECT_ROLES: &[&str] = &[
    "duration",
    "location",
    "instrument",
    "mod",
    "domain",
    "purpose",
    "accompanier",
    "degree",
    "value",
    "quant",
];

const SUBJECTS: [&str; 3] = ["i", "we", "you"];

fn role(label: &str) -> Role {
    Role::named(label)
}

/// Path addressing edge `idx`, found by walking the tree from the root.
pub(crate) fn edge_path(g: &AmrGraph, idx: usize) -> Option<GraphPath> {
    fn walk(
        g: &AmrGraph,
        var: &str,
        idx: usize,
        path: GraphPath,
        seen: &mut Vec<String>,
    ) -> Option<GraphPath> {
        seen.push(var.to_string());
        let kids: Vec<(usize, &Edge)> = g
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, e)| e.source == var)
            .collect();
        for (n, &(i, e)) in kids.iter().enumerate() {
            let occ = kids[..n].iter().filter(|(_, o)| o.role == e.role).count();
            let here = path.clone().then(e.role.clone(), occ);
            if i == idx {
                return Some(here);
            }
            if let Target::Node(t) = &e.target {
                if !seen.contains(t) {
                    if let Some(p) = walk(g, t, idx, here, seen) {
                        return Some(p);
                    }
                }
            }
        }
        None
    }
    walk(g, g.root(), idx, GraphPath::root(), &mut Vec::new())
}

fn root_edge_indices(g: &AmrGraph, role: &Role) -> Vec<usize> {
    g.edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| e.source == g.root() && &e.role == role)
        .map(|(i, _)| i)
        .collect()
}

fn unknown_at(g: &AmrGraph, path: &GraphPath, category: Category) -> Result<QaCandidate, AmrError> {
    let (q, a) = g.replace_with_unknown(path)?;
    Ok(QaCandidate::with_answer_amr(q, a, category))
}

fn target_concept<'a>(g: &'a AmrGraph, t: &'a Target) -> &'a str {
    match t {
        Target::Node(v) => g.concept(v).unwrap_or(""),
        Target::Const(c) => c.text(),
    }
}

/// Preposition right before the word for `concept` in `sentence`, skipping
/// determiners and up to one modifier. Stands in for an alignment.
pub fn governing_preposition(sentence: &str, concept: &str) -> Option<String> {
    const PREPS: &[&str] = &[
        "in", "on", "to", "into", "onto", "over", "with", "from", "at", "for", "by", "under",
        "through",
    ];
    let head = crate::amr::lemma(concept).to_lowercase();
    let words: Vec<String> = sentence
        .split(|c: char| !c.is_alphanumeric() && c != '-')
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect();
    let pos = words
        .iter()
        .position(|w| w == &head || w.strip_suffix('s') == Some(&head))?;
    words[pos.saturating_sub(3)..pos]
        .iter()
        .rev()
        .find(|w| PREPS.contains(&w.as_str()))
        .cloned()
}

/// Every role-specific question for the instruction, in document order of
/// the root's roles, followed by quantity questions.
pub fn gen_role_questions(
    amr: &AmrGraph,
    lex: &RuleLexicons,
    arg2_preposition: Option<&str>,
) -> Vec<QaCandidate> {
    let mut out = Vec::new();
    let mut done: Vec<Role> = Vec::new();
    for e in amr.root_edges() {
        if e.role.is_inverse() || done.contains(&e.role) {
            continue;
        }
        done.push(e.role.clone());
        match e.role.name() {
            "ARG1" => {
                out.extend(gen_arg1_questions(amr, lex, arg2_preposition).unwrap_or_default())
            }
            "ARG2" => {
                out.extend(gen_arg2_questions(amr, lex, arg2_preposition).unwrap_or_default())
            }
            "time" => out.extend(gen_time_question(amr)),
            name if DIRECT_ROLES.contains(&name) => {
                let n = root_edge_indices(amr, &e.role).len();
                out.extend((0..n).filter_map(|k| direct_at(amr, &e.role, k).ok()));
            }
            _ => {}
        }
    }
    out.extend(gen_quantity_questions(amr));
    out
}

fn attribute_questions(g: &AmrGraph, entity_path: &GraphPath) -> Vec<QaCandidate> {
    let Ok(idx) = entity_path.resolve(g) else {
        return Vec::new();
    };
    let Target::Node(entity) = &g.edges()[idx].target else {
        return Vec::new();
    };
    let quant = role(":quant");
    let modr = role(":mod");
    let mut out = Vec::new();
    let mut mods = 0;
    for e in g.children(entity) {
        if e.role == modr {
            let base = if g.child(entity, &quant).is_some() {
                g.remove_child_role(entity, &quant)
            } else {
                g.clone()
            };
            let path = entity_path.clone().then(modr.clone(), mods);
            mods += 1;
            out.extend(unknown_at(&base, &path, Category::RoleSpecific(modr.clone())).ok());
        } else if e.role == quant {
            let path = entity_path.clone().then(quant.clone(), 0);
            out.extend(unknown_at(g, &path, Category::RoleSpecific(quant.clone())).ok());
        }
    }
    out
}

fn arg2_is_equivalent(g: &AmrGraph, arg2: &Target, lex: &RuleLexicons, prep: Option<&str>) -> bool {
    !lex.is_directional_verb(g.root_concept())
        && !prep.is_some_and(|p| lex.is_directional_preposition(p))
        && !lex.is_instrument(target_concept(g, arg2))
}

fn op_targets(g: &AmrGraph, var: &str) -> Vec<Target> {
    let mut ops: Vec<(u32, Target)> = g
        .children(var)
        .filter_map(|e| e.role.op_index().map(|i| (i, e.target.clone())))
        .collect();
    ops.sort_by_key(|(i, _)| *i);
    ops.into_iter().map(|(_, t)| t).collect()
}

// `:ARG1` becomes the `k`-th entity of the compound; the others move to `:ARG2`.
fn split_compound(
    g: &AmrGraph,
    and_var: &str,
    k: usize,
    lex: &RuleLexicons,
    prep: Option<&str>,
) -> AmrGraph {
    let root = g.root().to_string();
    let items = op_targets(g, and_var);
    let entity = items[k].clone();
    let mut rest: Vec<Target> = items
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != k)
        .map(|(_, t)| t.clone())
        .collect();

    let mut out = g.clone();
    let arg1 = role(":ARG1");
    let arg2 = role(":ARG2");
    let existing = out.child(&root, &arg2).map(|e| e.target.clone());
    let merge = existing
        .as_ref()
        .is_some_and(|t| arg2_is_equivalent(g, t, lex, prep));
    if merge {
        let t = existing.clone().expect("merge implies :ARG2");
        match &t {
            Target::Node(v) if g.concept(v) == Some("and") => rest.extend(op_targets(g, v)),
            _ => rest.push(t),
        }
    }

    let edges = out.edges_mut();
    edges.retain(|e| !(e.source == and_var && e.role.op_index().is_some()));
    if rest.len() > 1 {
        for (i, t) in rest.iter().enumerate() {
            edges.push(Edge::new(and_var, Role::op(i as u32 + 1), t.clone()));
        }
    }
    let new_arg2 = match rest.as_slice() {
        [one] => one.clone(),
        _ => Target::Node(and_var.to_string()),
    };
    let a1 = edges
        .iter()
        .position(|e| e.source == root && e.role == arg1)
        .expect("caller checked :ARG1");
    edges[a1].target = entity;
    if let Some(a2) = edges
        .iter()
        .position(|e| e.source == root && e.role == arg2)
    {
        if merge {
            edges[a2].target = new_arg2;
        } else {
            let concept = existing.as_ref().map_or("", |t| target_concept(g, t));
            edges[a2].role = if lex.is_instrument(concept) {
                role(":instrument")
            } else {
                role(":location")
            };
            edges.insert(a1 + 1, Edge::new(root.as_str(), arg2, new_arg2));
        }
    } else if !rest.is_empty() {
        edges.insert(a1 + 1, Edge::new(root.as_str(), arg2, new_arg2));
    }
    out.finish()
}

/// Whole-`:ARG1` question, per-entity questions for compounds, and
/// `:mod`/`:quant` attribute questions.
pub fn gen_arg1_questions(
    amr: &AmrGraph,
    lex: &RuleLexicons,
    arg2_preposition: Option<&str>,
) -> Result<Vec<QaCandidate>, QgenError> {
    let arg1 = role(":ARG1");
    let edge = amr.child(amr.root(), &arg1).ok_or(QgenError::MissingArg1)?;
    let cat = Category::RoleSpecific(arg1.clone());
    let path = GraphPath::of(&[":ARG1"]);
    let mut out = vec![unknown_at(amr, &path, cat.clone())?];
    match &edge.target {
        Target::Node(v) if amr.concept(v) == Some("and") && !op_targets(amr, v).is_empty() => {
            let n = op_targets(amr, v).len();
            for k in 0..n {
                let split = split_compound(amr, v, k, lex, arg2_preposition);
                out.push(unknown_at(&split, &path, cat.clone())?);
                out.extend(attribute_questions(&split, &path));
            }
        }
        _ => out.extend(attribute_questions(amr, &path)),
    }
    Ok(out)
}

/// `:ARG2` questions: as `:instrument` for tools, as `:location` after a
/// directional verb or preposition, otherwise by swapping with `:ARG1`.
pub fn gen_arg2_questions(
    amr: &AmrGraph,
    lex: &RuleLexicons,
    arg2_preposition: Option<&str>,
) -> Result<Vec<QaCandidate>, QgenError> {
    let arg1 = role(":ARG1");
    let arg2 = role(":ARG2");
    let idx = *root_edge_indices(amr, &arg2)
        .first()
        .ok_or(QgenError::MissingArg2)?;
    let concept = target_concept(amr, &amr.edges()[idx].target);
    let convert = if lex.is_instrument(concept) {
        Some(role(":instrument"))
    } else if lex.is_directional_verb(amr.root_concept())
        || arg2_preposition.is_some_and(|p| lex.is_directional_preposition(p))
    {
        Some(role(":location"))
    } else {
        None
    };
    if let Some(new_role) = convert {
        let g = amr.rename_edge_role(&GraphPath::of(&[":ARG2"]), new_role.clone())?;
        let path = edge_path(&g, idx).expect("renamed edge is reachable");
        return Ok(vec![unknown_at(
            &g,
            &path,
            Category::RoleSpecific(new_role),
        )?]);
    }
    let cat = Category::RoleSpecific(arg2.clone());
    let Some(a1) = root_edge_indices(amr, &arg1).first().copied() else {
        let g = amr.rename_edge_role(&GraphPath::of(&[":ARG2"]), arg1)?;
        return Ok(vec![unknown_at(&g, &GraphPath::of(&[":ARG1"]), cat)?]);
    };
    let mut g = amr.clone();
    let edges = g.edges_mut();
    let t1 = edges[a1].target.clone();
    edges[a1].target = std::mem::replace(&mut edges[idx].target, t1);
    let g = g.finish();
    Ok(vec![unknown_at(&g, &GraphPath::of(&[":ARG1"]), cat)?])
}

/// Question on `:time`, asked as `:extent` when the time is an "until" clause.
pub fn gen_time_question(amr: &AmrGraph) -> Option<QaCandidate> {
    let time = role(":time");
    let idx = *root_edge_indices(amr, &time).first()?;
    let sub = amr.edge_target_graph(idx);
    let until = sub.root_concept() == "until" || realize::phrase(&sub).starts_with("until");
    let keep = [role(":ARG1"), role(":ARG2"), time.clone()];
    let mut g = amr.retain_root_roles(|r| keep.contains(r));
    let cat = Category::RoleSpecific(time.clone());
    if until {
        g = g
            .rename_edge_role(&GraphPath::of(&[":time"]), role(":extent"))
            .ok()?;
        return unknown_at(&g, &GraphPath::of(&[":extent"]), cat).ok();
    }
    unknown_at(&g, &GraphPath::of(&[":time"]), cat).ok()
}

fn is_questionable_quantity(concept: &str) -> bool {
    concept.ends_with("-quantity") && concept != "temporal-quantity"
}

/// One question per non-temporal `*-quantity` node that has a `:quant`.
pub fn gen_quantity_questions(amr: &AmrGraph) -> Vec<QaCandidate> {
    let quant = role(":quant");
    let mut out = Vec::new();
    for (var, concept) in amr.nodes() {
        if !is_questionable_quantity(concept) || amr.child(var, &quant).is_none() {
            continue;
        }
        let Some(top) = amr.root_edges().find(|e| {
            e.target
                .as_node()
                .is_some_and(|t| amr.reachable_from(t).iter().any(|r| r == var))
        }) else {
            continue;
        };
        let keep = [
            role(":ARG1"),
            role(":ARG2"),
            role(":location"),
            top.role.clone(),
        ];
        let g = amr.retain_root_roles(|r| keep.contains(r));
        let Some(i) = g
            .edges()
            .iter()
            .position(|e| e.source == var && e.role == quant)
        else {
            continue;
        };
        let Some(path) = edge_path(&g, i) else {
            continue;
        };
        if let Ok((q, _)) = g.replace_with_unknown(&path) {
            out.push(QaCandidate::with_answer_amr(
                q,
                amr.subgraph(var),
                Category::RoleSpecific(quant.clone()),
            ));
        }
    }
    out
}

fn direct_at(amr: &AmrGraph, r: &Role, occurrence: usize) -> Result<QaCandidate, QgenError> {
    let cat = Category::RoleSpecific(r.clone());
    let path = GraphPath::root().then(r.clone(), occurrence);
    let g = match r.name() {
        "mod" => amr.remove_child_role(amr.root(), &role(":quant")),
        "quant" => {
            let keep = [role(":ARG1"), role(":ARG2"), role(":location"), r.clone()];
            amr.retain_root_roles(|x| keep.contains(x))
        }
        _ => amr.clone(),
    };
    Ok(unknown_at(&g, &path, cat)?)
}

/// Question on the first `role` edge of the root.
pub fn gen_direct_role_question(
    amr: &AmrGraph,
    role: &Role,
) -> Result<Option<QaCandidate>, QgenError> {
    if role.is_inverse() || !DIRECT_ROLES.contains(&role.name()) {
        return Err(QgenError::UnsupportedRole(role.clone()));
    }
    if !amr.has_root_role(role) {
        return Ok(None);
    }
    direct_at(amr, role, 0).map(Some)
}

fn is_arg(r: &Role) -> bool {
    r.arg_index().is_some()
}

/// "How do you ...?": core roles only, plus `:manner` unknown. The answer is
/// the whole instruction.
pub fn gen_how_question(amr: &AmrGraph) -> QaCandidate {
    let g = amr.retain_root_roles(is_arg);
    let root = g.root().to_string();
    let (q, _) = g.add_child_node(&root, role(":manner"), UNKNOWN_CONCEPT);
    QaCandidate::with_answer_amr(q, amr.clone(), Category::InstructionHow)
}

/// "What do you do with ...?": the object arguments become the `:ARG2` of a
/// `do-02` frame, asked once as a whole and once per entity.
pub fn gen_what_with_questions(amr: &AmrGraph) -> Result<Vec<QaCandidate>, QgenError> {
    let g = amr.retain_root_roles(is_arg);
    let root = g.root().to_string();
    let objects: Vec<(usize, Target)> = g
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| e.source == root && e.role.arg_index().is_some_and(|i| i >= 1))
        .map(|(i, e)| (i, e.target.clone()))
        .collect();
    let Some(&(first, _)) = objects.first() else {
        return Err(QgenError::NoObjectArgs);
    };
    let mut entities = Vec::new();
    for (_, t) in &objects {
        match t {
            Target::Node(v) if g.concept(v) == Some("and") && !op_targets(&g, v).is_empty() => {
                entities.extend(op_targets(&g, v))
            }
            _ => entities.push(t.clone()),
        }
    }
    let frame = |arg2: Target, extra_and: Option<(String, &[Target])>| -> AmrGraph {
        let mut f = g.with_concept(&root, "do-02");
        if let Some((var, items)) = &extra_and {
            f.insert_node(var.clone(), "and".to_string());
            for (i, t) in items.iter().enumerate() {
                f.edges_mut()
                    .push(Edge::new(var.as_str(), Role::op(i as u32 + 1), t.clone()));
            }
        }
        let edges = f.edges_mut();
        let mut k = 0;
        edges.retain(|_| {
            k += 1;
            !objects.iter().any(|(i, _)| *i == k - 1)
        });
        edges.insert(first, Edge::new(root.as_str(), role(":ARG2"), arg2));
        let f = f.finish();
        f.add_child_node(&root, role(":ARG1"), UNKNOWN_CONCEPT).0
    };
    let mut out = Vec::new();
    let mk =
        |q: AmrGraph| QaCandidate::with_answer_amr(q, amr.clone(), Category::InstructionWhatWith);
    if entities.len() > 1 {
        let compound = match objects.as_slice() {
            [(_, t @ Target::Node(v))] if g.concept(v) == Some("and") => frame(t.clone(), None),
            _ => {
                let var = g.fresh_var("and");
                frame(Target::Node(var.clone()), Some((var, &entities)))
            }
        };
        out.push(mk(compound));
    }
    for e in &entities {
        out.push(mk(frame(e.clone(), None)));
    }
    Ok(out)
}

/// The "Yes" question always; the "No" question when a donor supplies a
/// different subgraph for some role.
pub fn gen_polarity_questions(
    amr: &AmrGraph,
    donors: &[AmrGraph],
    seed: u64,
) -> (QaCandidate, Result<QaCandidate, QgenError>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let subject = SUBJECTS[rng.random_range(0..SUBJECTS.len())];
    let mut g =
        amr.retain_root_roles(|r| !matches!(r.name(), "mode" | "polarity") || r.is_inverse());
    let root = g.root().to_string();
    let arg0 = role(":ARG0");
    match g.child(&root, &arg0).map(|e| e.target.clone()) {
        Some(Target::Node(v)) if realize::pronoun(g.concept(&v).unwrap_or("")).is_some() => {
            g = g.with_concept(&v, subject);
        }
        Some(_) => {}
        None => {
            let var = g.fresh_var(subject);
            g.insert_node(var.clone(), subject.to_string());
            g.edges_mut()
                .insert(0, Edge::new(root.as_str(), arg0.clone(), Target::Node(var)));
            g = g.finish();
        }
    }
    let (yes_q, _) = g.add_child_node(&root, role(":polarity"), UNKNOWN_CONCEPT);
    let yes = QaCandidate::with_answer_text(yes_q.clone(), "Yes", Category::PolarityYes);

    let mut options = Vec::new();
    for (i, e) in yes_q.edges().iter().enumerate() {
        if e.source != root || matches!(e.role.name(), "ARG0" | "mode" | "polarity") {
            continue;
        }
        let Target::Node(_) = e.target else { continue };
        // Compare against the source graph: the subject rewrite must not
        // make an identical donor look different.
        let occ = yes_q.edges()[..i]
            .iter()
            .filter(|o| o.source == root && o.role == e.role)
            .count();
        let Some(&src) = root_edge_indices(amr, &e.role).get(occ) else {
            continue;
        };
        let own = amr.edge_target_graph(src);
        for d in donors {
            for (j, de) in d.edges().iter().enumerate() {
                if de.source != d.root() || de.role != e.role || de.target.as_node().is_none() {
                    continue;
                }
                let sub = d.edge_target_graph(j);
                if sub.count_concept(UNKNOWN_CONCEPT) == 0 && !sub.structurally_eq(&own) {
                    options.push((i, sub));
                }
            }
        }
    }
    let no = if options.is_empty() {
        Err(QgenError::NoReplaceableRole)
    } else {
        let (i, sub) = &options[rng.random_range(0..options.len())];
        let q = yes_q.graft_at(*i, sub);
        Ok(QaCandidate::with_answer_text(q, "No", Category::PolarityNo))
    };
    (yes, no)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amr::parse_penman;

    fn g(s: &str) -> AmrGraph {
        parse_penman(s).unwrap()
    }

    fn lex() -> RuleLexicons {
        RuleLexicons::defaults()
    }

    const COOK_SOUP: &str = "(c / cook-01 :mode imperative :ARG0 (y / you) \
        :ARG1 (a / and :op1 (c2 / chicken) :op2 (ii / ingredient :mod (o / other))) \
        :location (p / pot) :duration (t / temporal-quantity :quant 20 :unit (m / minute)) \
        :manner (h / heat-01 :mod (m2 / medium)) :purpose (p2 / prepare-01 :ARG0 y :ARG1 (s / soup)))";
    const STIR: &str =
        "(s / stir-01 :ARG1 (a / and :op1 (b / buttermilk) :op2 (p / powder :mod (c / chili)) \
        :op3 (p2 / pepper :mod (c2 / cayenne))) :location (b2 / bowl))";
    const MIX: &str = "(m / mix-01 :ARG0 (w / we) :ARG1 (s / salt) :ARG2 (c / chicken))";
    const FRY: &str = "(f / fry-01 :mode imperative :ARG0 (y / you) \
        :ARG1 (w / wing :part-of (c / chicken) :ARG1-of (c2 / coat-01)) :ARG2 (o / oil) \
        :location (t / temperature-quantity :quant 350 :scale (c3 / celsius)) \
        :duration (b / between :op1 (t2 / temporal-quantity :quant 3 :unit (m / minute)) \
        :op2 (t3 / temporal-quantity :quant 5 :unit (m2 / minute))))";

    fn find<'a>(cs: &'a [QaCandidate], r: &str) -> Vec<&'a QaCandidate> {
        let cat = Category::RoleSpecific(role(r));
        cs.iter().filter(|c| c.category == cat).collect()
    }

    #[test]
    fn cook_soup_roles() {
        let cs = gen_role_questions(&g(COOK_SOUP), &lex(), None);
        let loc = find(&cs, ":location");
        assert_eq!(loc.len(), 1);
        assert_eq!(loc[0].answer_amr.as_ref().unwrap().to_penman(), "(p / pot)");
        let dur = find(&cs, ":duration");
        assert_eq!(
            realize::phrase(dur[0].answer_amr.as_ref().unwrap()),
            "20 minutes"
        );
        assert!(!find(&cs, ":purpose").is_empty());
        assert!(cs.iter().all(|c| c.unknown_count() == 1));
    }

    #[test]
    fn no_supported_roles() {
        assert!(gen_role_questions(&g("(s / sleep-01 :ARG0 (y / you))"), &lex(), None).is_empty());
    }

    #[test]
    fn stir_split_matches_golden() {
        let cs = gen_arg1_questions(&g(STIR), &lex(), None).unwrap();
        let want = g("(s / stir-01 :ARG1 (a2 / amr-unknown) :ARG2 (a / and :op1 (p / powder :mod (c / chili)) \
             :op2 (p2 / pepper :mod (c2 / cayenne))) :location (b2 / bowl))");
        assert_eq!(cs[1].question_amr, want);
        assert_eq!(
            cs[1].answer_amr.as_ref().unwrap().to_penman(),
            "(b / buttermilk)"
        );
        // whole + 3 entities + one :mod each for powder and pepper
        assert_eq!(cs.len(), 6);
        let roles: Vec<_> = gen_role_questions(&g(STIR), &lex(), None)
            .into_iter()
            .map(|c| c.category)
            .collect();
        assert!(roles.contains(&Category::RoleSpecific(role(":location"))));
        assert!(roles.contains(&Category::RoleSpecific(role(":mod"))));
    }

    #[test]
    fn arg1_quant_attribute() {
        let cs = gen_arg1_questions(&g("(c / cut-01 :ARG1 (o / onion :quant 2))"), &lex(), None)
            .unwrap();
        assert_eq!(cs.len(), 2);
        assert_eq!(
            cs[1].question_amr.to_penman(),
            "(c / cut-01 :ARG1 (o / onion :quant (a / amr-unknown)))"
        );
        let one = gen_arg1_questions(&g("(c / cut-01 :ARG1 (o / onion))"), &lex(), None).unwrap();
        assert_eq!(one.len(), 1);
        let modq = gen_arg1_questions(
            &g("(c / cut-01 :ARG1 (o / onion :quant 2 :mod (r / red)))"),
            &lex(),
            None,
        )
        .unwrap();
        let m = modq
            .iter()
            .find(|c| c.category == Category::RoleSpecific(role(":mod")))
            .unwrap();
        assert_eq!(
            m.question_amr.to_penman(),
            "(c / cut-01 :ARG1 (o / onion :mod (a / amr-unknown)))"
        );
        assert!(matches!(
            gen_arg1_questions(&g("(s / sleep-01)"), &lex(), None),
            Err(QgenError::MissingArg1)
        ));
    }

    #[test]
    fn split_with_arg2_converted_or_merged() {
        let add =
            g("(a / add-02 :ARG1 (a2 / and :op1 (o / oil) :op2 (o2 / onion)) :ARG2 (p / pan))");
        let cs = gen_arg1_questions(&add, &lex(), None).unwrap();
        assert_eq!(
            cs[1].question_amr.to_penman(),
            "(a / add-02 :ARG1 (a2 / amr-unknown) :ARG2 (o2 / onion) :location (p / pan))"
        );
        let mix = g(
            "(m / mix-01 :ARG1 (a / and :op1 (s / salt) :op2 (p / pepper)) :ARG2 (c / chicken))",
        );
        let cs = gen_arg1_questions(&mix, &lex(), None).unwrap();
        assert_eq!(
            cs[1].question_amr.to_penman(),
            "(m / mix-01 :ARG1 (a2 / amr-unknown) :ARG2 (a / and :op1 (p / pepper) :op2 (c / chicken)))"
        );
    }

    #[test]
    fn arg2_swap_matches_golden() {
        let cs = gen_arg2_questions(&g(MIX), &lex(), None).unwrap();
        assert_eq!(cs.len(), 1);
        assert_eq!(
            cs[0].question_amr,
            g("(m / mix-01 :ARG0 (w / we) :ARG1 (a / amr-unknown) :ARG2 (s / salt))")
        );
        assert_eq!(
            cs[0].answer_amr.as_ref().unwrap().to_penman(),
            "(c / chicken)"
        );
    }

    #[test]
    fn arg2_directional_and_instrument() {
        let add = g("(a / add-02 :ARG1 (s / salt) :ARG2 (p / pan))");
        let cs = gen_arg2_questions(&add, &lex(), None).unwrap();
        assert_eq!(cs[0].category, Category::RoleSpecific(role(":location")));
        assert_eq!(
            cs[0].question_amr.to_penman(),
            "(a / add-02 :ARG1 (s / salt) :location (a2 / amr-unknown))"
        );

        let mix = g("(m / mix-01 :ARG1 (s / salt) :ARG2 (c / chicken))");
        let cs = gen_arg2_questions(&mix, &lex(), Some("into")).unwrap();
        assert_eq!(cs[0].category, Category::RoleSpecific(role(":location")));

        let whisk = g("(b / beat-01 :ARG1 (e / egg) :ARG2 (w / whisk))");
        let cs = gen_arg2_questions(&whisk, &lex(), None).unwrap();
        assert_eq!(cs[0].category, Category::RoleSpecific(role(":instrument")));
        assert!(cs[0].question_amr.has_root_role(&role(":instrument")));
        assert!(!cs[0].question_amr.has_root_role(&role(":ARG2")));
    }

    #[test]
    fn time_until_becomes_extent() {
        let a = g(
            "(c / cook-01 :ARG0 (y / you) :ARG1 (o / onion) :location (p / pan) \
                   :time (u / until :op1 (b / brown-01 :ARG1 o)))",
        );
        let c = gen_time_question(&a).unwrap();
        assert_eq!(
            c.question_amr.to_penman(),
            "(c / cook-01 :ARG1 (o / onion) :extent (a / amr-unknown))"
        );
        let d = g("(s / simmer-01 :ARG1 (s2 / soup) :time (d / dawn))");
        assert_eq!(
            gen_time_question(&d).unwrap().question_amr.to_penman(),
            "(s / simmer-01 :ARG1 (s2 / soup) :time (a / amr-unknown))"
        );
        assert!(gen_time_question(&g(MIX)).is_none());
    }

    #[test]
    fn quantity_questions() {
        let cs = gen_quantity_questions(&g(FRY));
        assert_eq!(cs.len(), 1);
        assert_eq!(
            cs[0].question_amr.to_penman(),
            "(f / fry-01 :ARG1 (w / wing :part-of (c / chicken) :ARG1-of (c2 / coat-01)) :ARG2 (o / oil) \
             :location (t / temperature-quantity :quant (a / amr-unknown) :scale (c3 / celsius)))"
        );
        assert_eq!(
            realize::phrase(cs[0].answer_amr.as_ref().unwrap()),
            "350 degrees celsius"
        );
        assert!(gen_quantity_questions(&g(COOK_SOUP)).is_empty());
    }

    #[test]
    fn direct_role() {
        let c = gen_direct_role_question(&g(COOK_SOUP), &role(":location"))
            .unwrap()
            .unwrap();
        assert_eq!(c.answer_amr.unwrap().to_penman(), "(p / pot)");
        let m = g("(c / cook-01 :mod (s / slow) :quant 2)");
        let c = gen_direct_role_question(&m, &role(":mod"))
            .unwrap()
            .unwrap();
        assert_eq!(
            c.question_amr.to_penman(),
            "(c / cook-01 :mod (a / amr-unknown))"
        );
        assert!(gen_direct_role_question(&g(MIX), &role(":location"))
            .unwrap()
            .is_none());
        assert!(matches!(
            gen_direct_role_question(&g(MIX), &role(":ARG1")),
            Err(QgenError::UnsupportedRole(_))
        ));
    }

    #[test]
    fn how_question() {
        let c = gen_how_question(&g("(c / cook-01 :ARG1 (r / rice))"));
        assert_eq!(
            c.question_amr.to_penman(),
            "(c / cook-01 :ARG1 (r / rice) :manner (a / amr-unknown))"
        );
        let c = gen_how_question(&g(COOK_SOUP));
        assert_eq!(c.question_amr.count_concept("heat-01"), 0);
        assert_eq!(c.answer_amr.unwrap(), g(COOK_SOUP));
    }

    #[test]
    fn what_with_matches_golden() {
        let cs = gen_what_with_questions(&g(FRY)).unwrap();
        assert_eq!(cs.len(), 3);
        assert_eq!(
            cs[0].question_amr,
            g(
                "(f / do-02 :ARG0 (y / you) :ARG2 (a / and :op1 (w / wing :part-of (c / chicken) \
               :ARG1-of (c2 / coat-01)) :op2 (o / oil)) :ARG1 (a2 / amr-unknown))"
            )
        );
        assert_eq!(
            cs[2].question_amr,
            g("(f / do-02 :ARG0 (y / you) :ARG2 (o / oil) :ARG1 (a / amr-unknown))")
        );
        let single = gen_what_with_questions(&g("(c / cook-01 :ARG1 (r / rice))")).unwrap();
        assert_eq!(single.len(), 1);
        assert!(matches!(
            gen_what_with_questions(&g("(s / sleep-01 :ARG0 (y / you))")),
            Err(QgenError::NoObjectArgs)
        ));
    }

    #[test]
    fn polarity() {
        let donors = vec![g(MIX), g(STIR)];
        let (yes, no) = gen_polarity_questions(&g(COOK_SOUP), &donors, 7);
        let y = &yes.question_amr;
        assert!(!y.has_root_role(&role(":mode")));
        assert!(y.to_penman().contains(":polarity (a2 / amr-unknown)"));
        assert_eq!(yes.answer_text.as_deref(), Some("Yes"));
        let no = no.unwrap();
        assert_eq!(no.unknown_count(), 1);
        assert!(!no.question_amr.structurally_eq(y));
        let (_, err) = gen_polarity_questions(&g(COOK_SOUP), &[g(COOK_SOUP)], 7);
        assert!(matches!(err, Err(QgenError::NoReplaceableRole)));
        let (y2, n2) = gen_polarity_questions(&g(COOK_SOUP), &donors, 7);
        assert_eq!(y2, yes);
        assert_eq!(n2.unwrap(), no);
    }

    #[test]
    fn polarity_inserts_subject() {
        let (yes, _) = gen_polarity_questions(&g("(c / cook-01 :ARG1 (r / rice))"), &[], 1);
        let e = &yes.question_amr.edges()[0];
        assert_eq!(e.role, role(":ARG0"));
        let subj = yes
            .question_amr
            .concept(e.target.as_node().unwrap())
            .unwrap();
        assert!(SUBJECTS.contains(&subj));
    }

    #[test]
    fn preposition_recovery() {
        assert_eq!(
            governing_preposition("Add oil and onions to a pan.", "pan").as_deref(),
            Some("to")
        );
        assert_eq!(
            governing_preposition("Mix the salt with chicken", "chicken").as_deref(),
            Some("with")
        );
        assert_eq!(
            governing_preposition("Mix salt and chicken", "chicken"),
            None
        );
    }
}
