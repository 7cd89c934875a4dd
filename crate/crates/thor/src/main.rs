//! Command-line front end: corpus generation, preprocessing, training,
//! proving, evaluation, and ablations.
//!
//! Exit codes: 0 on success, 1 on usage or input errors (synopsis or message
//! to stderr), 2 on an internal invariant failure.

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use std::fs;
use std::panic::AssertUnwindSafe;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;
use thor::corpus::generate::{generate_corpus, GeneratorProfile};
use thor::corpus::store::{load_corpus, save_corpus};
use thor::corpus::{split_corpus, Corpus};
use thor::harness::{
    parse_config, render_eval_table, render_histogram_csv, render_histogram_table, report_json,
    run_ablations, run_eval, write_atomic, EvalInputs, EvalRun, RunConfig, RunManifest, SystemSet,
};
use thor::logic::kernel::check_proof;
use thor::policy::retrieval::{train, RetrievalPolicyModel};
use thor::search::{best_first_search, write_trace_jsonl, SearchMode, TraceEvent};

#[derive(Parser)]
#[command(name = "thor", version, about = "Neuro-symbolic theorem proving on a synthetic corpus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Flat key=value config file; unknown keys are errors.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Root RNG seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output directory (reports, corpora, models, the run manifest).
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads for theorem-level parallelism.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Write per-theorem search traces (JSONL) under <out>/traces/.
    #[arg(long, global = true)]
    trace: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic corpus with ground-truth proofs into <out>/corpus.
    GenCorpus,
    /// Rewrite a corpus's train split: hammer-solvable steps become <hammer>.
    Preprocess {
        /// Corpus directory to preprocess.
        #[arg(long)]
        corpus: PathBuf,
    },
    /// Train the retrieval policy on a corpus's train split.
    Train {
        /// Corpus directory to train on.
        #[arg(long)]
        corpus: PathBuf,
    },
    /// Search for a proof of one theorem with the full protocol.
    Prove {
        /// Theorem name (as listed in the corpus).
        theorem: String,
        /// Corpus directory the theorem lives in.
        #[arg(long)]
        corpus: PathBuf,
        /// Trained policy model for this corpus.
        #[arg(long)]
        model: PathBuf,
    },
    /// Evaluate proving systems over the test split.
    Eval {
        /// Raw corpus directory (the test split is the target).
        #[arg(long)]
        corpus: PathBuf,
        /// Preprocessed corpus directory (required for thor).
        #[arg(long)]
        preprocessed: Option<PathBuf>,
        /// Model trained on the raw corpus (required for policy_only).
        #[arg(long)]
        raw_model: Option<PathBuf>,
        /// Model trained on the preprocessed corpus (required for thor).
        #[arg(long)]
        model: Option<PathBuf>,
        /// Comma-separated subset of policy_only,hammer_only,thor.
        #[arg(long, default_value = "policy_only,hammer_only,thor")]
        systems: String,
    },
    /// Run the base protocol and its three ablations over the test split.
    Ablate {
        /// Raw corpus directory.
        #[arg(long)]
        corpus: PathBuf,
        /// Preprocessed corpus directory.
        #[arg(long)]
        preprocessed: PathBuf,
        /// Model trained on the raw corpus (learning-how variant).
        #[arg(long)]
        raw_model: PathBuf,
        /// Model trained on the preprocessed corpus (base variant).
        #[arg(long)]
        model: PathBuf,
    },
    /// Replay ground-truth proofs through the kernel.
    CheckCert {
        /// Corpus directory to check.
        #[arg(long)]
        corpus: PathBuf,
        /// Restrict the check to one theorem.
        theorem: Option<String>,
    },
    /// Model utilities.
    Policy {
        #[command(subcommand)]
        command: PolicyCommand,
    },
}

#[derive(Subcommand)]
enum PolicyCommand {
    /// Print index statistics for a trained model.
    Inspect {
        /// Model file to inspect.
        #[arg(long)]
        model: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match std::panic::catch_unwind(AssertUnwindSafe(|| real_main(cli))) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(_) => {
            eprintln!("thor: internal invariant failure");
            ExitCode::from(2)
        }
    }
}

fn real_main(cli: Cli) -> Result<()> {
    let started = Instant::now();
    if cli.jobs == 0 {
        bail!("--jobs must be at least 1");
    }
    let config = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            parse_config(&text).with_context(|| format!("parsing config {}", path.display()))?
        }
        None => RunConfig::default(),
    };
    // preprocess_corpus parallelizes over the global pool; size it once.
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build_global()
        .ok();

    let subcommand = subcommand_name(&cli.command);
    let mut manifest = RunManifest::new(subcommand, cli.seed, cli.jobs, config.clone());
    match &cli.command {
        Command::GenCorpus => cmd_gen_corpus(&cli, &config, &mut manifest)?,
        Command::Preprocess { corpus } => cmd_preprocess(&cli, &config, corpus, &mut manifest)?,
        Command::Train { corpus } => cmd_train(&cli, &config, corpus, &mut manifest)?,
        Command::Prove {
            theorem,
            corpus,
            model,
        } => cmd_prove(&cli, &config, theorem, corpus, model, &mut manifest)?,
        Command::Eval {
            corpus,
            preprocessed,
            raw_model,
            model,
            systems,
        } => cmd_eval(
            &cli,
            &config,
            corpus,
            preprocessed.as_deref(),
            raw_model.as_deref(),
            model.as_deref(),
            systems,
            &mut manifest,
        )?,
        Command::Ablate {
            corpus,
            preprocessed,
            raw_model,
            model,
        } => cmd_ablate(&cli, &config, corpus, preprocessed, raw_model, model, &mut manifest)?,
        Command::CheckCert { corpus, theorem } => {
            cmd_check_cert(corpus, theorem.as_deref(), &mut manifest)?
        }
        Command::Policy {
            command: PolicyCommand::Inspect { model },
        } => cmd_policy_inspect(model, &mut manifest)?,
    }
    manifest.wallclock_secs = started.elapsed().as_secs_f64();
    manifest
        .write(&cli.out)
        .with_context(|| format!("writing manifest under {}", cli.out.display()))?;
    Ok(())
}

fn subcommand_name(command: &Command) -> &'static str {
    match command {
        Command::GenCorpus => "gen-corpus",
        Command::Preprocess { .. } => "preprocess",
        Command::Train { .. } => "train",
        Command::Prove { .. } => "prove",
        Command::Eval { .. } => "eval",
        Command::Ablate { .. } => "ablate",
        Command::CheckCert { .. } => "check-cert",
        Command::Policy { .. } => "policy-inspect",
    }
}

fn cmd_gen_corpus(cli: &Cli, config: &RunConfig, manifest: &mut RunManifest) -> Result<()> {
    let corpus = generate_corpus(
        cli.seed,
        config.n_theories,
        config.theorems_per_theory,
        &GeneratorProfile::default(),
    )
    .context("generating corpus")?;
    let corpus = split_corpus(corpus, config.fractions(), cli.seed).context("splitting corpus")?;
    let dir = cli.out.join("corpus");
    save_corpus(&corpus, &dir).with_context(|| format!("saving corpus to {}", dir.display()))?;
    manifest.output(dir.display().to_string());
    println!(
        "corpus {}: {} theorems, {} datapoints -> {}",
        corpus.fingerprint(),
        corpus.theorems.len(),
        corpus.datapoints.len(),
        dir.display()
    );
    Ok(())
}

fn cmd_preprocess(
    cli: &Cli,
    config: &RunConfig,
    corpus_dir: &Path,
    manifest: &mut RunManifest,
) -> Result<()> {
    let corpus = load_dir(corpus_dir)?;
    manifest.inputs.insert("corpus".into(), corpus_dir.display().to_string());
    let (prep, report) = thor::search::preprocess_corpus(
        &corpus,
        &config.preprocess_budget(),
        config.use_trace_shortcut,
    )
    .context("preprocessing corpus")?;
    let dir = cli.out.join("corpus");
    save_corpus(&prep, &dir).with_context(|| format!("saving corpus to {}", dir.display()))?;
    manifest.output(dir.display().to_string());
    let report_path = cli.out.join("preprocess_report.json");
    let mut body = serde_json::to_string_pretty(&report)?;
    body.push('\n');
    write_atomic(&report_path, body.as_bytes())?;
    manifest.output(report_path.display().to_string());
    println!(
        "preprocessed {} -> {}: replaced {} of {} train steps ({} via trace shortcut, {} hammer calls)",
        corpus.fingerprint(),
        prep.fingerprint(),
        report.replaced,
        report.replaced + report.kept,
        report.shortcut,
        report.hammer_calls,
    );
    Ok(())
}

fn cmd_train(
    cli: &Cli,
    config: &RunConfig,
    corpus_dir: &Path,
    manifest: &mut RunManifest,
) -> Result<()> {
    let corpus = load_dir(corpus_dir)?;
    manifest.inputs.insert("corpus".into(), corpus_dir.display().to_string());
    let model = train(&corpus, config.use_context).context("training policy model")?;
    let path = cli.out.join("model.bin");
    fs::create_dir_all(&cli.out)?;
    model
        .save(&path)
        .with_context(|| format!("saving model to {}", path.display()))?;
    manifest.output(path.display().to_string());
    println!("{}", serde_json::to_string_pretty(&model.stats())?);
    Ok(())
}

fn cmd_prove(
    cli: &Cli,
    config: &RunConfig,
    theorem: &str,
    corpus_dir: &Path,
    model_path: &Path,
    manifest: &mut RunManifest,
) -> Result<()> {
    let corpus = load_dir(corpus_dir)?;
    let model = load_model(model_path)?;
    manifest.inputs.insert("corpus".into(), corpus_dir.display().to_string());
    manifest.inputs.insert("model".into(), model_path.display().to_string());
    if model.trained_on != corpus.fingerprint() {
        bail!(
            "model was trained on `{}` but the corpus fingerprint is `{}`",
            model.trained_on,
            corpus.fingerprint()
        );
    }
    let thm = corpus
        .theorem(theorem)
        .with_context(|| format!("theorem `{theorem}` is not in the corpus"))?;
    let store = corpus.cert_store();
    let mut trace: Vec<TraceEvent> = Vec::new();
    let outcome = best_first_search(
        &corpus.library,
        &thm.statement,
        &model,
        Some(&store),
        SearchMode::Base,
        &config.search,
        cli.seed,
        Some(&mut trace),
    );
    if cli.trace {
        let path = cli.out.join("traces").join(format!("{theorem}.jsonl"));
        fs::create_dir_all(path.parent().unwrap())?;
        write_trace_jsonl(&path, &trace)?;
        manifest.output(path.display().to_string());
    }
    println!(
        "{}: {} ({} queries, {} hammer calls, cost {})",
        theorem,
        outcome.status.as_str(),
        outcome.stats.queries,
        outcome.stats.hammer_calls,
        outcome.stats.cost
    );
    if let Some(steps) = &outcome.proof {
        for step in steps {
            println!("  {}", step.canonical_string());
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_eval(
    cli: &Cli,
    config: &RunConfig,
    corpus_dir: &Path,
    prep_dir: Option<&Path>,
    raw_model_path: Option<&Path>,
    model_path: Option<&Path>,
    systems: &str,
    manifest: &mut RunManifest,
) -> Result<()> {
    let systems = parse_systems(systems)?;
    let corpus = load_dir(corpus_dir)?;
    manifest.inputs.insert("corpus".into(), corpus_dir.display().to_string());
    let preprocessed = prep_dir.map(load_dir).transpose()?;
    if let Some(dir) = prep_dir {
        manifest.inputs.insert("preprocessed".into(), dir.display().to_string());
    }
    let raw_model = raw_model_path.map(load_model).transpose()?;
    if let Some(path) = raw_model_path {
        manifest.inputs.insert("raw_model".into(), path.display().to_string());
    }
    let model = model_path.map(load_model).transpose()?;
    if let Some(path) = model_path {
        manifest.inputs.insert("model".into(), path.display().to_string());
    }
    let inputs = EvalInputs {
        corpus: &corpus,
        preprocessed: preprocessed.as_ref(),
        raw_model: raw_model.as_ref(),
        preprocessed_model: model.as_ref(),
    };
    let run = run_eval(&inputs, config, systems, cli.seed, cli.jobs)?;
    write_eval_outputs(&cli.out, &run, cli.trace, manifest)?;
    print!("{}", render_eval_table(&run.report));
    Ok(())
}

fn cmd_ablate(
    cli: &Cli,
    config: &RunConfig,
    corpus_dir: &Path,
    prep_dir: &Path,
    raw_model_path: &Path,
    model_path: &Path,
    manifest: &mut RunManifest,
) -> Result<()> {
    let corpus = load_dir(corpus_dir)?;
    let preprocessed = load_dir(prep_dir)?;
    let raw_model = load_model(raw_model_path)?;
    let model = load_model(model_path)?;
    manifest.inputs.insert("corpus".into(), corpus_dir.display().to_string());
    manifest.inputs.insert("preprocessed".into(), prep_dir.display().to_string());
    manifest.inputs.insert("raw_model".into(), raw_model_path.display().to_string());
    manifest.inputs.insert("model".into(), model_path.display().to_string());
    let inputs = EvalInputs {
        corpus: &corpus,
        preprocessed: Some(&preprocessed),
        raw_model: Some(&raw_model),
        preprocessed_model: Some(&model),
    };
    let set = run_ablations(&inputs, config, cli.seed, cli.jobs)?;
    for (name, run) in set.variants() {
        let dir = cli.out.join(name);
        fs::create_dir_all(&dir)?;
        let mut sub = manifest.clone();
        write_eval_outputs(&dir, run, cli.trace, &mut sub)?;
        manifest.outputs.extend(sub.outputs.into_iter().skip(manifest.outputs.len()));
    }
    let table_path = cli.out.join("comparison.txt");
    write_atomic(&table_path, set.comparison_table.as_bytes())?;
    manifest.output(table_path.display().to_string());
    print!("{}", set.comparison_table);
    Ok(())
}

fn cmd_check_cert(
    corpus_dir: &Path,
    theorem: Option<&str>,
    manifest: &mut RunManifest,
) -> Result<()> {
    let corpus = load_dir(corpus_dir)?;
    manifest.inputs.insert("corpus".into(), corpus_dir.display().to_string());
    let theorems: Vec<_> = match theorem {
        Some(name) => vec![corpus
            .theorem(name)
            .with_context(|| format!("theorem `{name}` is not in the corpus"))?],
        None => corpus.theorems.iter().collect(),
    };
    let mut rejected = 0usize;
    for thm in &theorems {
        match check_proof(&corpus.library, &thm.statement, &thm.ground_truth_proof) {
            Ok(()) => println!("ACCEPTED {}", thm.name),
            Err(e) => {
                rejected += 1;
                println!("REJECTED {}: {e}", thm.name);
            }
        }
    }
    println!("{} checked, {} rejected", theorems.len(), rejected);
    if rejected > 0 {
        bail!("{rejected} ground-truth proofs were rejected");
    }
    Ok(())
}

fn cmd_policy_inspect(model_path: &Path, manifest: &mut RunManifest) -> Result<()> {
    let model = load_model(model_path)?;
    manifest.inputs.insert("model".into(), model_path.display().to_string());
    println!("{}", serde_json::to_string_pretty(&model.stats())?);
    Ok(())
}

/// Write the report (JSON + text), histogram CSVs, and optionally traces.
fn write_eval_outputs(
    out: &Path,
    run: &EvalRun,
    traces: bool,
    manifest: &mut RunManifest,
) -> Result<()> {
    let report = &run.report;
    let report_path = out.join("report.json");
    write_atomic(&report_path, report_json(report).as_bytes())?;
    manifest.output(report_path.display().to_string());

    let mut text = render_eval_table(report);
    let found: Vec<(&str, &thor::harness::Histogram)> = report
        .found_premise_histograms
        .iter()
        .map(|(k, v)| (k.as_str(), v))
        .collect();
    let ground: Vec<(&str, &thor::harness::Histogram)> = report
        .ground_truth_premise_histograms
        .iter()
        .map(|(k, v)| (k.as_str(), v))
        .collect();
    text.push('\n');
    text.push_str(&render_histogram_table("premises per found proof", &found));
    text.push('\n');
    text.push_str(&render_histogram_table(
        "premises per ground-truth proof (solved theorems)",
        &ground,
    ));
    if let Some(metric) = &report.premise_step_metric {
        text.push('\n');
        text.push_str(&metric.render_text());
    }
    let text_path = out.join("report.txt");
    write_atomic(&text_path, text.as_bytes())?;
    manifest.output(text_path.display().to_string());

    let found_csv = out.join("found_premises.csv");
    write_atomic(&found_csv, render_histogram_csv(&found).as_bytes())?;
    manifest.output(found_csv.display().to_string());
    let ground_csv = out.join("ground_truth_premises.csv");
    write_atomic(&ground_csv, render_histogram_csv(&ground).as_bytes())?;
    manifest.output(ground_csv.display().to_string());

    if traces {
        for (system, map) in [("policy_only", &run.policy_traces), ("thor", &run.thor_traces)] {
            for (theorem, events) in map {
                let path = out.join("traces").join(system).join(format!("{theorem}.jsonl"));
                fs::create_dir_all(path.parent().unwrap())?;
                write_trace_jsonl(&path, events)?;
            }
            if !map.is_empty() {
                manifest.output(out.join("traces").join(system).display().to_string());
            }
        }
    }
    Ok(())
}

fn parse_systems(text: &str) -> Result<SystemSet> {
    let mut set = SystemSet::none();
    for name in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match name {
            "policy_only" | "policy-only" => set.policy_only = true,
            "hammer_only" | "hammer-only" => set.hammer_only = true,
            "thor" => set.thor = true,
            other => bail!("unknown system `{other}` (expected policy_only, hammer_only, thor)"),
        }
    }
    Ok(set)
}

fn load_dir(dir: &Path) -> Result<Corpus> {
    load_corpus(dir).with_context(|| format!("loading corpus from {}", dir.display()))
}

fn load_model(path: &Path) -> Result<RetrievalPolicyModel> {
    RetrievalPolicyModel::load(path)
        .with_context(|| format!("loading model from {}", path.display()))
}
