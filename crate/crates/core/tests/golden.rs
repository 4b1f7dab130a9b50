use std::fs;
use std::path::Path;

use graphqa::pipeline::{run, PipelineConfig};

// Set GRAPHQA_BLESS=1 to rewrite the golden file.
#[test]
fn fallback_output_matches_golden() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let dir = tempfile::tempdir().unwrap();
    let mut c = PipelineConfig::load(&root.join("corpus/config.json")).unwrap();
    c.output.dataset = dir.path().join("dataset.jsonl");
    c.output.summary = None;
    let out = run(&c).unwrap();
    let got: String = out
        .records
        .iter()
        .map(|r| {
            format!(
                "{}\t{}\t{}\t{}\n",
                r.qa_id, r.category, r.question, r.answer
            )
        })
        .collect();
    let golden = root.join("fallback_golden.tsv");
    if std::env::var_os("GRAPHQA_BLESS").is_some() {
        fs::write(&golden, &got).unwrap();
    }
    let want = fs::read_to_string(&golden).unwrap();
    for (i, (g, w)) in got.lines().zip(want.lines()).enumerate() {
        assert_eq!(g, w, "line {}", i + 1);
    }
    assert_eq!(got.lines().count(), want.lines().count());
}
