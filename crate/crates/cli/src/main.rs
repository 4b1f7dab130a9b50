use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use graphqa::augment::{answer_based_augment, paraphrase_augment, DEFAULT_PARAPHRASES};
use graphqa::backend::{BackendClient, BackendConfig, HttpClient};
use graphqa::dataset::{read_jsonl, write_jsonl, AugmentationRecord};
use graphqa::pipeline::{evaluate, ingest, run, validate_dataset, PipelineConfig, PipelineError};

#[derive(Parser)]
#[command(
    name = "graphqa",
    version,
    about = "Question-answer generation from AMR and recipe flow graphs"
)]
struct Cli {
    /// Pipeline configuration file (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Never contact a backend.
    #[arg(long, global = true)]
    offline: bool,
    /// Round-trip filter threshold in [0, 1].
    #[arg(long, global = true)]
    threshold: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the generation pipeline described by --config.
    Gen,
    /// Add language-model questions to an existing dataset.
    Augment {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value = "paraphrase")]
        method: Method,
        /// Recipes file, for answer-based context; defaults to the configured one.
        #[arg(long)]
        recipes: Option<PathBuf>,
        /// Paraphrases per question.
        #[arg(long)]
        paraphrases: Option<usize>,
        /// Writes one line per produced question, kept or not.
        #[arg(long)]
        audit: Option<PathBuf>,
        #[arg(long)]
        endpoint: Option<String>,
    },
    /// Diversity of a question set, and coverage of a reference set.
    Eval {
        generated: PathBuf,
        #[arg(long)]
        reference: Option<PathBuf>,
        #[arg(long, default_value = "rouge1")]
        scorer: String,
        /// Writes the report here as well as to stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check a dataset file, or the configuration when no file is given.
    Validate { dataset: Option<PathBuf> },
    /// Backend operations.
    Backends {
        #[command(subcommand)]
        command: BackendsCommand,
    },
}

#[derive(Subcommand)]
enum BackendsCommand {
    /// Query the backend health endpoint.
    Ping {
        #[arg(long)]
        endpoint: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Paraphrase,
    AnswerBased,
    Both,
}

impl Cli {
    fn load_config(&self) -> Result<Option<PipelineConfig>> {
        let Some(path) = &self.config else {
            return Ok(None);
        };
        let mut c =
            PipelineConfig::load(path).with_context(|| format!("loading {}", path.display()))?;
        if let Some(s) = self.seed {
            c.seed = Some(s);
        }
        if self.offline {
            c.offline = true;
        }
        if let Some(t) = self.threshold {
            c.answer_based.threshold = t;
        }
        Ok(Some(c))
    }

    fn require_config(&self) -> Result<PipelineConfig> {
        self.load_config()?.context("--config is required")
    }

    fn client(
        &self,
        config: Option<&PipelineConfig>,
        endpoint: Option<&str>,
    ) -> Result<HttpClient> {
        if self.offline || config.is_some_and(|c| c.offline) {
            return Err(PipelineError::BackendRequiredButUnavailable("backend").into());
        }
        let backend = match (endpoint, config.and_then(|c| c.backend.clone())) {
            (Some(e), Some(b)) => BackendConfig {
                endpoint: e.to_string(),
                ..b
            },
            (Some(e), None) => BackendConfig::new(e),
            (None, Some(b)) => b,
            (None, None) => bail!("no backend: pass --endpoint or configure one"),
        };
        Ok(HttpClient::new(backend)?)
    }
}

fn print_json(value: &impl serde::Serialize) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn write_audit(path: &Path, audit: &[AugmentationRecord]) -> Result<()> {
    let mut text = String::new();
    for a in audit {
        text.push_str(&serde_json::to_string(a)?);
        text.push('\n');
    }
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn gen(cli: &Cli) -> Result<ExitCode> {
    let config = cli.require_config()?;
    let out = run(&config)?;
    log::info!(
        "wrote {} records to {}",
        out.records.len(),
        config.output.dataset.display()
    );
    print_json(&out.summary)?;
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn augment(
    cli: &Cli,
    input: &Path,
    output: &Path,
    method: Method,
    recipes: Option<&Path>,
    paraphrases: Option<usize>,
    audit_path: Option<&Path>,
    endpoint: Option<&str>,
) -> Result<ExitCode> {
    let config = cli.load_config()?;
    let mut opts = config
        .as_ref()
        .map(|c| c.answer_based.clone())
        .unwrap_or_default();
    if let Some(t) = cli.threshold {
        opts.threshold = t;
    }
    if !(0.0..=1.0).contains(&opts.threshold) {
        bail!("threshold {} outside [0, 1]", opts.threshold);
    }
    let k = paraphrases
        .or(config.as_ref().map(|c| c.paraphrases))
        .unwrap_or(DEFAULT_PARAPHRASES);
    let answer_based = matches!(method, Method::AnswerBased | Method::Both);
    let texts: BTreeMap<String, Vec<String>> = if answer_based {
        let path = recipes
            .map(Path::to_path_buf)
            .or(config.as_ref().map(|c| c.recipes.clone()))
            .context("answer-based augmentation needs --recipes or a config")?;
        ingest(&path)?
            .recipes
            .into_iter()
            .map(|r| (r.id, r.steps))
            .collect()
    } else {
        BTreeMap::new()
    };
    let client = cli.client(config.as_ref(), endpoint)?;
    let mut records = read_jsonl(input)?;
    let mut audit = Vec::new();
    if matches!(method, Method::Paraphrase | Method::Both) {
        let o = paraphrase_augment(&records, &client, k);
        log::info!(
            "paraphrase: {} added, {} of {} skipped",
            o.added(),
            o.skipped.len(),
            o.attempted
        );
        records = o.dataset;
        audit.extend(o.audit);
    }
    if answer_based {
        let o = answer_based_augment(&records, &texts, &client, &opts);
        log::info!(
            "answer-based: {} added, {} of {} skipped",
            o.added(),
            o.skipped.len(),
            o.attempted
        );
        records = o.dataset;
        audit.extend(o.audit);
    }
    write_jsonl(output, &records)?;
    if let Some(p) = audit_path {
        write_audit(p, &audit)?;
    }
    print_json(&serde_json::json!({"records": records.len(), "audited": audit.len()}))?;
    Ok(ExitCode::SUCCESS)
}

fn validate(cli: &Cli, dataset: Option<&Path>) -> Result<ExitCode> {
    if let Some(path) = dataset {
        let report = validate_dataset(path)?;
        print_json(&report)?;
        return Ok(if report.ok() {
            ExitCode::SUCCESS
        } else {
            ExitCode::FAILURE
        });
    }
    let config = cli.require_config()?;
    let mut problems = Vec::new();
    if let Err(e) = config.validate() {
        problems.push(e.to_string());
    }
    let mut paths = vec![("recipes", config.recipes.clone())];
    paths.extend(config.amr.clone().map(|p| ("amr", p)));
    paths.extend(config.flow_graphs.clone().map(|p| ("flow_graphs", p)));
    paths.extend(config.templates.clone().map(|p| ("templates", p)));
    for (what, p) in paths {
        if !p.exists() {
            problems.push(format!("{what}: {} does not exist", p.display()));
        }
    }
    if config.recipes.exists() {
        match ingest(&config.recipes) {
            Ok(i) => problems.extend(i.diagnostics.iter().map(|d| format!("recipes: {d}"))),
            Err(e) => problems.push(e.to_string()),
        }
    }
    if let Err(e) = config.lexicons() {
        problems.push(e.to_string());
    }
    print_json(&serde_json::json!({"valid": problems.is_empty(), "problems": problems}))?;
    Ok(if problems.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn ping(cli: &Cli, endpoint: Option<&str>) -> Result<ExitCode> {
    let config = cli.load_config()?;
    let client = cli.client(config.as_ref(), endpoint)?;
    let health = client
        .health()
        .with_context(|| format!("health check failed ({})", client.identity()))?;
    print_json(&health)?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen => gen(&cli),
        Command::Augment {
            input,
            output,
            method,
            recipes,
            paraphrases,
            audit,
            endpoint,
        } => augment(
            &cli,
            input,
            output,
            *method,
            recipes.as_deref(),
            *paraphrases,
            audit.as_deref(),
            endpoint.as_deref(),
        ),
        Command::Eval {
            generated,
            reference,
            scorer,
            output,
        } => (|| {
            let report = evaluate(generated, reference.as_deref(), scorer)?;
            if let Some(p) = output {
                fs::write(p, serde_json::to_string_pretty(&report)?)
                    .with_context(|| format!("writing {}", p.display()))?;
            }
            print_json(&report)?;
            Ok(ExitCode::SUCCESS)
        })(),
        Command::Validate { dataset } => validate(&cli, dataset.as_deref()),
        Command::Backends {
            command: BackendsCommand::Ping { endpoint },
        } => ping(&cli, endpoint.as_deref()),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
