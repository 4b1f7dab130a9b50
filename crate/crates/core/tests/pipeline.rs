mod common;

use std::fs;
use std::path::{Path, PathBuf};

use common::FnClient;
use graphqa::backend::{BackendConfig, HttpClient};
use graphqa::dataset::{read_jsonl, RealizerKind};
use graphqa::pipeline::{evaluate, run, run_with, validate_dataset, PipelineConfig, PipelineError};

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/corpus")
}

fn config(out: &Path) -> PipelineConfig {
    let mut c = PipelineConfig::load(&corpus().join("config.json")).unwrap();
    c.output.dataset = out.join("dataset.jsonl");
    c.output.summary = Some(out.join("summary.json"));
    c
}

#[test]
fn offline_run_covers_every_family() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&config(dir.path())).unwrap();
    let s = &out.summary;
    assert_eq!(s.recipes, 3);
    for family in ["role_specific", "instruction", "polarity", "temporal"] {
        assert!(
            s.per_family.get(family).copied().unwrap_or(0) > 0,
            "{family}: {:?}",
            s.per_family
        );
    }
    assert!(!s.skips.contains_key("realize"), "{:?}", s.diagnostics);
    // temporal questions only where a flow graph exists
    for r in &out.records {
        if r.category.is_temporal() {
            assert_eq!(r.recipe_id, "shepherd-pie");
        }
        assert_eq!(r.realizer, RealizerKind::Fallback);
        assert!(r.question.ends_with('?'), "{}", r.question);
    }
    let written = read_jsonl(&dir.path().join("dataset.jsonl")).unwrap();
    assert_eq!(written, out.records);
    assert!(validate_dataset(&dir.path().join("dataset.jsonl"))
        .unwrap()
        .ok());
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["records"], out.records.len());
}

#[test]
fn records_are_ordered_by_recipe_then_category() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&config(dir.path())).unwrap();
    let keys: Vec<_> = out
        .records
        .iter()
        .map(|r| (r.recipe_id.clone(), r.category.rank()))
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn same_seed_gives_identical_files() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run(&config(a.path())).unwrap();
    let mut cb = config(b.path());
    cb.workers = Some(1);
    run(&cb).unwrap();
    assert_eq!(
        fs::read(a.path().join("dataset.jsonl")).unwrap(),
        fs::read(b.path().join("dataset.jsonl")).unwrap()
    );
}

#[test]
fn disabling_temporal_keeps_single_output() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let full = run(&config(a.path())).unwrap();
    let mut c = config(b.path());
    c.stages.temporal = false;
    let single = run(&c).unwrap();
    let expected: Vec<_> = full
        .records
        .into_iter()
        .filter(|r| !r.category.is_temporal())
        .collect();
    assert_eq!(single.records, expected);
}

#[test]
fn temporal_without_flow_graphs_is_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(dir.path());
    c.flow_graphs = None;
    assert!(matches!(run(&c), Err(PipelineError::MissingFlowGraph)));
    c.stages.temporal = false;
    assert!(run(&c).is_ok());
}

#[test]
fn augmentation_needs_a_backend() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(dir.path());
    c.stages.paraphrase = true;
    assert!(matches!(
        run(&c),
        Err(PipelineError::BackendRequiredButUnavailable("paraphrase"))
    ));
}

#[test]
fn paraphrase_with_backend_down_completes() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(dir.path());
    c.offline = false;
    c.stages.paraphrase = true;
    c.backend = Some(BackendConfig {
        max_retries: 0,
        ..BackendConfig::new(common::dead_url())
    });
    let out = run(&c).unwrap();
    let p = out.summary.paraphrase.unwrap();
    assert!(p.attempted > 0);
    assert_eq!(p.skipped, p.attempted);
    assert_eq!(p.skipped_fraction, 1.0);
    assert_eq!(p.added, 0);
    // realization falls back when the backend cannot generate text
    assert!(out
        .records
        .iter()
        .all(|r| r.realizer == RealizerKind::Fallback));
}

#[test]
fn neural_realizer_and_augmentation_through_a_client() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(dir.path());
    c.offline = false;
    c.stages.paraphrase = true;
    c.stages.answer_based = true;
    c.output.audit = Some(dir.path().join("audit.jsonl"));
    let client = FnClient {
        to_text: Some(Box::new(|p| Ok(format!("text of {}?", p.len())))),
        paraphrase: Some(Box::new(|(t, n)| {
            Ok((0..n).map(|i| format!("{t} v{i}")).collect())
        })),
        qg: Some(Box::new(|(_, a, _)| Ok(vec![format!("Which is {a}?")]))),
        answer: Some(Box::new(|(_, q)| {
            Ok(q.trim_start_matches("Which is ").to_string())
        })),
    };
    let out = run_with(&c, Some(&client)).unwrap();
    let base: Vec<_> = out
        .records
        .iter()
        .filter(|r| r.augmentation.is_none())
        .collect();
    assert!(base.iter().all(|r| r.realizer == RealizerKind::Neural));
    let p = out.summary.paraphrase.as_ref().unwrap();
    assert_eq!(p.skipped, 0);
    assert!(p.added > 0);
    let a = out.summary.answer_based.as_ref().unwrap();
    assert!(a.added > 0 && a.skipped == 0);
    let audit = fs::read_to_string(dir.path().join("audit.jsonl")).unwrap();
    assert_eq!(audit.lines().count(), out.audit.len());
    assert!(validate_dataset(&dir.path().join("dataset.jsonl"))
        .unwrap()
        .ok());
}

#[test]
fn backend_client_from_config_is_lazy() {
    // building the client never touches the network
    assert!(HttpClient::new(BackendConfig::new(common::dead_url())).is_ok());
}

#[test]
fn evaluate_against_itself() {
    let dir = tempfile::tempdir().unwrap();
    run(&config(dir.path())).unwrap();
    let d = dir.path().join("dataset.jsonl");
    let r = evaluate(&d, Some(&d), "exact").unwrap();
    assert_eq!(r.coverage.as_ref().unwrap().coverage, 1.0);
    assert!(r.diversity.ngram_diversity > 0.0 && r.diversity.ngram_diversity <= 1.0);
    assert!(matches!(
        evaluate(&d, Some(&d), "bleurt"),
        Err(PipelineError::Metrics(_))
    ));
    let empty = dir.path().join("empty.jsonl");
    fs::write(&empty, "").unwrap();
    assert!(matches!(
        evaluate(&d, Some(&empty), "exact"),
        Err(PipelineError::Metrics(_))
    ));
}

#[test]
fn evaluate_hand_built_sets() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.jsonl");
    let r = dir.path().join("r.jsonl");
    fs::write(
        &g,
        "{\"qa_id\":\"g1\",\"question\":\"a b\"}\n{\"qa_id\":\"g2\",\"question\":\"c d\"}\n",
    )
    .unwrap();
    fs::write(
        &r,
        "{\"id\":\"r1\",\"question\":\"a x\"}\n{\"question\":\"c d\"}\n",
    )
    .unwrap();
    let rep = evaluate(&g, Some(&r), "rouge1").unwrap();
    let cov = rep.coverage.unwrap();
    // r1 vs g1: one shared token of two each, F1 0.5; r2 vs g2: 1.0
    assert_eq!(cov.coverage, 0.75);
    assert_eq!(cov.per_reference[0].best_generated_id, "g1");
    assert_eq!(cov.per_reference[1].reference_id, "line2");
    assert_eq!(rep.diversity.dist[&1], 1.0);
    assert_eq!(rep.diversity.dist[&2], 1.0);
    assert_eq!(rep.diversity.dist[&3], 0.0);
}
