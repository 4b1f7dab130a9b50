use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::{ingest, read_file, PipelineConfig, PipelineError, RecipeDoc};
use crate::amr::{parse_penman, parse_penman_blocks, AmrGraph, Role};
use crate::augment::{answer_based_augment, paraphrase_augment, AugmentOutcome};
use crate::backend::{fallback_realize, BackendClient, HttpClient};
use crate::dataset::{write_jsonl, AugmentationRecord, DatasetRecord, RealizerKind};
use crate::flowgraph::FlowGraph;
use crate::qgen::single::{
    gen_how_question, gen_polarity_questions, gen_role_questions, gen_what_with_questions,
    governing_preposition,
};
use crate::qgen::temporal::{
    default_templates, extract_action_amrs, gen_mixture_questions, gen_next_prev_questions,
    gen_order_questions, load_templates, QuestionTemplate,
};
use crate::qgen::{QaCandidate, RuleLexicons};

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for one sentence, independent of scheduling and enabled stages.
pub fn derive_seed(seed: u64, recipe_id: &str, sentence: usize) -> u64 {
    let fnv = recipe_id.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    });
    splitmix64(splitmix64(seed ^ fnv) ^ sentence as u64)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct StageReport {
    pub attempted: usize,
    pub skipped: usize,
    pub added: usize,
    pub skipped_fraction: f64,
}

impl StageReport {
    fn of(o: &AugmentOutcome) -> Self {
        StageReport {
            attempted: o.attempted,
            skipped: o.skipped.len(),
            added: o.added(),
            skipped_fraction: if o.attempted == 0 {
                0.0
            } else {
                o.skipped.len() as f64 / o.attempted as f64
            },
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct RunSummary {
    pub recipes: usize,
    pub records: usize,
    pub per_category: BTreeMap<String, usize>,
    pub per_family: BTreeMap<String, usize>,
    /// Skipped items per stage.
    pub skips: BTreeMap<String, usize>,
    pub diagnostics: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub paraphrase: Option<StageReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub answer_based: Option<StageReport>,
    pub wall_time_ms: u128,
}

#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    pub records: Vec<DatasetRecord>,
    pub audit: Vec<AugmentationRecord>,
    pub summary: RunSummary,
}

struct Context<'a> {
    config: &'a PipelineConfig,
    client: Option<&'a dyn BackendClient>,
    lexicons: RuleLexicons,
    templates: Vec<QuestionTemplate>,
    sidecar: HashMap<(String, usize), AmrGraph>,
}

#[derive(Default)]
struct RecipeResult {
    records: Vec<DatasetRecord>,
    skips: Vec<(&'static str, String)>,
}

impl RecipeResult {
    fn skip(&mut self, stage: &'static str, msg: String) {
        log::debug!("{stage}: {msg}");
        self.skips.push((stage, msg));
    }
}

/// Reads one PENMAN file, or every `.amr` file of a directory in name order.
fn load_sidecar(
    path: &Path,
    diagnostics: &mut Vec<String>,
) -> Result<HashMap<(String, usize), AmrGraph>, PipelineError> {
    if path.is_dir() {
        let mut files: Vec<_> = fs::read_dir(path)
            .map_err(|source| PipelineError::Io {
                path: path.display().to_string(),
                source,
            })?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "amr"))
            .collect();
        files.sort();
        let mut out = HashMap::new();
        for f in files {
            out.extend(load_sidecar(&f, diagnostics)?);
        }
        return Ok(out);
    }
    let text = read_file(path)?;
    let graphs = parse_penman_blocks(&text).map_err(|(line, source)| PipelineError::Amr {
        path: path.display().to_string(),
        line,
        source,
    })?;
    let mut out = HashMap::new();
    for g in graphs {
        let key = g
            .id()
            .and_then(|id| id.rsplit_once('.'))
            .and_then(|(r, i)| Some((r.to_string(), i.parse::<usize>().ok()?)));
        match key {
            Some(k) => {
                out.insert(k, g);
            }
            None => diagnostics.push(format!(
                "{}: graph rooted at `{}` has no `# ::id recipe.index` header",
                path.display(),
                g.root_concept()
            )),
        }
    }
    Ok(out)
}

fn sentence_amrs(
    doc: &RecipeDoc,
    ctx: &Context,
    res: &mut RecipeResult,
) -> BTreeMap<usize, AmrGraph> {
    let mut out = BTreeMap::new();
    for (i, step) in doc.steps.iter().enumerate() {
        if let Some(g) = ctx.sidecar.get(&(doc.id.clone(), i)) {
            out.insert(i, g.clone());
            continue;
        }
        let Some(client) = ctx.client else {
            res.skip("amr", format!("{}.{i}: no AMR and no backend", doc.id));
            continue;
        };
        match client.to_amr(step).map(|p| parse_penman(&p)) {
            Ok(Ok(g)) => {
                out.insert(i, g);
            }
            Ok(Err(e)) => res.skip(
                "amr",
                format!("{}.{i}: backend returned bad PENMAN: {e}", doc.id),
            ),
            Err(e) => res.skip("amr", format!("{}.{i}: {e}", doc.id)),
        }
    }
    out
}

fn single_candidates(
    doc: &RecipeDoc,
    amrs: &BTreeMap<usize, AmrGraph>,
    ctx: &Context,
    res: &mut RecipeResult,
) -> Vec<QaCandidate> {
    let seed = ctx.config.seed.unwrap_or_default();
    let arg2 = Role::named(":ARG2");
    let mut out = Vec::new();
    for (&i, amr) in amrs {
        let mut cs = Vec::new();
        let prep = amr
            .child(amr.root(), &arg2)
            .and_then(|e| e.target.as_node())
            .and_then(|v| amr.concept(v))
            .and_then(|c| governing_preposition(&doc.steps[i], c));
        cs.extend(gen_role_questions(amr, &ctx.lexicons, prep.as_deref()));
        cs.push(gen_how_question(amr));
        match gen_what_with_questions(amr) {
            Ok(v) => cs.extend(v),
            Err(e) => res.skip("qgen_single", format!("{}.{i}: what-with: {e}", doc.id)),
        }
        let donors: Vec<AmrGraph> = amrs
            .iter()
            .filter(|(&j, _)| j != i)
            .map(|(_, g)| g.clone())
            .collect();
        let (yes, no) = gen_polarity_questions(amr, &donors, derive_seed(seed, &doc.id, i));
        cs.push(yes);
        match no {
            Ok(c) => cs.push(c),
            Err(e) => res.skip("qgen_single", format!("{}.{i}: polarity no: {e}", doc.id)),
        }
        for c in &mut cs {
            if c.provenance.sentences.is_empty() {
                c.provenance.sentences = vec![i];
            }
        }
        out.extend(cs);
    }
    out
}

fn temporal_candidates(
    doc: &RecipeDoc,
    amrs: &BTreeMap<usize, AmrGraph>,
    ctx: &Context,
    res: &mut RecipeResult,
) -> Vec<QaCandidate> {
    let Some(dir) = &ctx.config.flow_graphs else {
        return Vec::new();
    };
    let path = dir.join(format!("{}.flow.json", doc.id));
    if !path.exists() {
        res.skip(
            "qgen_temporal",
            format!("{}: no flow graph at {}", doc.id, path.display()),
        );
        return Vec::new();
    }
    let graph = match FlowGraph::load(&path) {
        Ok(g) => g,
        Err(e) => {
            res.skip("qgen_temporal", format!("{}: {e}", path.display()));
            return Vec::new();
        }
    };
    let actions = extract_action_amrs(&graph, amrs);
    let mut out = gen_mixture_questions(&graph, &ctx.templates, amrs);
    for part in [
        gen_next_prev_questions(&graph, &ctx.templates, &actions),
        gen_order_questions(&graph, &ctx.templates, &actions),
    ] {
        match part {
            Ok(v) => out.extend(v),
            Err(e) => res.skip("qgen_temporal", format!("{}: {e}", doc.id)),
        }
    }
    out
}

fn neural_texts(c: &QaCandidate, client: &dyn BackendClient) -> Result<(String, String), String> {
    let q = client
        .to_text(&c.question_amr.to_penman())
        .map_err(|e| e.to_string())?;
    let a = match (&c.answer_text, &c.answer_hint, &c.answer_amr) {
        (Some(t), _, _) | (None, Some(t), _) => t.clone(),
        (None, None, Some(g)) => client.to_text(&g.to_penman()).map_err(|e| e.to_string())?,
        (None, None, None) => return Err("candidate has no answer".into()),
    };
    Ok((q, a))
}

fn realize(
    mut c: QaCandidate,
    ctx: &Context,
    res: &mut RecipeResult,
) -> Option<(QaCandidate, String, String, RealizerKind)> {
    if let Some(client) = ctx.client {
        match neural_texts(&c, client) {
            Ok((q, a)) if !q.trim().is_empty() && !a.trim().is_empty() => {
                return Some((c, q, a, RealizerKind::Neural));
            }
            Ok(_) => res.skip("realize_backend", "empty realization".into()),
            Err(e) => res.skip("realize_backend", e),
        }
    }
    if let Err(e) = fallback_realize(&mut c) {
        res.skip("realize", e.to_string());
        return None;
    }
    let q = c.question_text.clone().unwrap_or_default();
    let a = c.answer_text.clone().unwrap_or_default();
    if q.trim().is_empty() || a.trim().is_empty() {
        res.skip("realize", format!("empty text for {}", c.category));
        return None;
    }
    Some((c, q, a, RealizerKind::Fallback))
}

fn process_recipe(doc: &RecipeDoc, ctx: &Context) -> RecipeResult {
    let mut res = RecipeResult::default();
    let stages = &ctx.config.stages;
    if !stages.single && !stages.temporal {
        return res;
    }
    let amrs = sentence_amrs(doc, ctx, &mut res);
    let mut cands = Vec::new();
    if stages.single {
        cands.extend(single_candidates(doc, &amrs, ctx, &mut res));
    }
    if stages.temporal {
        cands.extend(temporal_candidates(doc, &amrs, ctx, &mut res));
    }
    cands.sort_by_key(|c| c.category.rank());
    for mut c in cands {
        c.provenance.recipe_id = Some(doc.id.clone());
        let Some((c, question, answer, realizer)) = realize(c, ctx, &mut res) else {
            continue;
        };
        let n = res.records.len() + 1;
        res.records.push(DatasetRecord {
            qa_id: format!("{}-{n:04}", doc.id),
            recipe_id: doc.id.clone(),
            question,
            answer,
            category: c.category.clone(),
            question_penman: Some(c.question_amr.to_penman()),
            answer_penman: c.answer_amr.as_ref().map(AmrGraph::to_penman),
            sentences: c.provenance.sentences.clone(),
            augmentation: None,
            realizer,
        });
    }
    res
}

fn write_text(path: &Path, text: &str) -> Result<(), PipelineError> {
    let io = |source| PipelineError::Io {
        path: path.display().to_string(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io)?;
    }
    fs::write(path, text).map_err(io)
}

/// Runs every enabled stage and writes the configured outputs. The backend
/// is built from the config unless it is offline or has none.
pub fn run(config: &PipelineConfig) -> Result<RunOutput, PipelineError> {
    let client = match (&config.backend, config.offline) {
        (Some(b), false) => Some(HttpClient::new(b.clone())?),
        _ => None,
    };
    run_with(config, client.as_ref().map(|c| c as &dyn BackendClient))
}

/// [`run`] with an explicit backend; `None` means offline.
pub fn run_with(
    config: &PipelineConfig,
    client: Option<&dyn BackendClient>,
) -> Result<RunOutput, PipelineError> {
    let start = Instant::now();
    config.validate()?;
    let client = if config.offline { None } else { client };
    if client.is_none() {
        if config.stages.paraphrase {
            return Err(PipelineError::BackendRequiredButUnavailable("paraphrase"));
        }
        if config.stages.answer_based {
            return Err(PipelineError::BackendRequiredButUnavailable("answer_based"));
        }
    }
    if config.stages.temporal && config.flow_graphs.is_none() {
        return Err(PipelineError::MissingFlowGraph);
    }
    let mut summary = RunSummary::default();
    let ingested = ingest(&config.recipes)?;
    summary.diagnostics.extend(
        ingested
            .diagnostics
            .iter()
            .map(|d| format!("{}: {d}", config.recipes.display())),
    );
    let mut recipes = ingested.recipes;
    recipes.sort_by(|a, b| a.id.cmp(&b.id));
    let sidecar = match &config.amr {
        Some(p) => load_sidecar(p, &mut summary.diagnostics)?,
        None => HashMap::new(),
    };
    let ctx = Context {
        config,
        client,
        lexicons: config.lexicons()?,
        templates: match &config.templates {
            Some(p) => load_templates(p)?,
            None => default_templates(),
        },
        sidecar,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers.unwrap_or(0))
        .build()
        .map_err(|e| PipelineError::Config(e.to_string()))?;
    let results: Vec<RecipeResult> = pool.install(|| {
        recipes
            .par_iter()
            .map(|d| process_recipe(d, &ctx))
            .collect()
    });

    let mut records = Vec::new();
    for r in results {
        for (stage, msg) in r.skips {
            *summary.skips.entry(stage.to_string()).or_default() += 1;
            summary.diagnostics.push(format!("{stage}: {msg}"));
        }
        records.extend(r.records);
    }
    let mut audit = Vec::new();
    if let (Some(client), true) = (client, config.stages.paraphrase) {
        let o = pool.install(|| paraphrase_augment(&records, client, config.paraphrases));
        summary.paraphrase = Some(StageReport::of(&o));
        *summary.skips.entry("paraphrase".into()).or_default() += o.skipped.len();
        records = o.dataset;
        audit.extend(o.audit);
    }
    if let (Some(client), true) = (client, config.stages.answer_based) {
        let texts: BTreeMap<String, Vec<String>> = recipes
            .iter()
            .map(|r| (r.id.clone(), r.steps.clone()))
            .collect();
        let o =
            pool.install(|| answer_based_augment(&records, &texts, client, &config.answer_based));
        summary.answer_based = Some(StageReport::of(&o));
        *summary.skips.entry("answer_based".into()).or_default() += o.skipped.len();
        records = o.dataset;
        audit.extend(o.audit);
    }

    summary.recipes = recipes.len();
    summary.records = records.len();
    for r in &records {
        *summary
            .per_category
            .entry(r.category.to_string())
            .or_default() += 1;
        *summary
            .per_family
            .entry(r.category.family().to_string())
            .or_default() += 1;
    }
    write_jsonl(&config.output.dataset, &records)?;
    if let Some(p) = &config.output.audit {
        let mut buf = Vec::new();
        for a in &audit {
            serde_json::to_writer(&mut buf, a).expect("audit entries serialize");
            buf.write_all(b"\n").expect("write to memory");
        }
        write_text(p, &String::from_utf8(buf).expect("JSON is UTF-8"))?;
    }
    summary.wall_time_ms = start.elapsed().as_millis();
    if let Some(p) = &config.output.summary {
        write_text(
            p,
            &serde_json::to_string_pretty(&summary).expect("summary serializes"),
        )?;
    }
    Ok(RunOutput {
        records,
        audit,
        summary,
    })
}
