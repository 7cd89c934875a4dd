//! Corpus persistence: a directory of JSON / JSONL files.
//!
//! Layout: `library.json` (signature + facts in insertion order),
//! `theorems.jsonl` (steps as canonical strings), `certs.json` (certificate
//! payloads keyed by id), `datapoints.jsonl`, `split.json`, `model.json`.
//! Formulas and steps round-trip through their canonical text, so the files
//! stay diffable; `by_cert` payloads are reattached from the side-table on
//! load. All files are UTF-8 with LF line endings.

use super::datapoint::{parse_datapoint, serialize_datapoint, Datapoint};
use super::split::SplitInfo;
use super::Corpus;
use crate::hammer::certificate::Certificate;
use crate::logic::goal::{Theorem, TheoremLibrary};
use crate::logic::model::FiniteModel;
use crate::logic::parse::{parse_formula, parse_step};
use crate::logic::step::ProofStep;
use crate::logic::term::Signature;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::Arc;

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Malformed { path: String, message: String },
    #[error("{path}:{line}: {message}")]
    MalformedLine {
        path: String,
        line: usize,
        message: String,
    },
    #[error("theorem {theorem} cites certificate {cert_id} missing from certs.json")]
    MissingCertificate { theorem: String, cert_id: String },
}

#[derive(Serialize, Deserialize)]
struct LibraryFile {
    signature: Signature,
    /// Insertion-ordered, as premise selection depends on fact order.
    facts: Vec<(String, String)>,
}

#[derive(Serialize, Deserialize)]
struct TheoremLine {
    name: String,
    statement: String,
    steps: Vec<String>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), StoreError> {
    fs::write(path, contents).map_err(io_err(path))
}

fn read_file(path: &Path) -> Result<String, StoreError> {
    fs::read_to_string(path).map_err(io_err(path))
}

pub fn save_corpus(corpus: &Corpus, dir: &Path) -> Result<(), StoreError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;

    let library = LibraryFile {
        signature: corpus.library.signature.clone(),
        facts: corpus
            .library
            .iter()
            .map(|(n, f)| (n.clone(), f.to_string()))
            .collect(),
    };
    write_file(
        &dir.join("library.json"),
        &format!("{}\n", serde_json::to_string_pretty(&library).expect("serializable")),
    )?;

    let mut theorem_lines = String::new();
    for thm in &corpus.theorems {
        let line = TheoremLine {
            name: thm.name.clone(),
            statement: thm.statement.to_string(),
            steps: thm
                .ground_truth_proof
                .iter()
                .map(|s| s.canonical_string())
                .collect(),
        };
        theorem_lines.push_str(&serde_json::to_string(&line).expect("serializable"));
        theorem_lines.push('\n');
    }
    write_file(&dir.join("theorems.jsonl"), &theorem_lines)?;

    let store = corpus.cert_store();
    let certs: BTreeMap<&str, &Certificate> = store
        .iter()
        .map(|(id, cert)| (id.as_str(), &**cert))
        .collect();
    write_file(
        &dir.join("certs.json"),
        &format!("{}\n", serde_json::to_string_pretty(&certs).expect("serializable")),
    )?;

    let mut dp_lines = String::new();
    for dp in &corpus.datapoints {
        dp_lines.push_str(&serialize_datapoint(dp));
        dp_lines.push('\n');
    }
    write_file(&dir.join("datapoints.jsonl"), &dp_lines)?;

    write_file(
        &dir.join("split.json"),
        &format!(
            "{}\n",
            serde_json::to_string_pretty(&corpus.split).expect("serializable")
        ),
    )?;
    write_file(
        &dir.join("model.json"),
        &format!(
            "{}\n",
            serde_json::to_string_pretty(&corpus.model).expect("serializable")
        ),
    )?;
    Ok(())
}

pub fn load_corpus(dir: &Path) -> Result<Corpus, StoreError> {
    let lib_path = dir.join("library.json");
    let lib_file: LibraryFile = serde_json::from_str(&read_file(&lib_path)?).map_err(|e| {
        StoreError::Malformed {
            path: lib_path.display().to_string(),
            message: e.to_string(),
        }
    })?;
    let mut library = TheoremLibrary::new(lib_file.signature);
    for (name, text) in lib_file.facts {
        let formula = parse_formula(&text).map_err(|e| StoreError::Malformed {
            path: lib_path.display().to_string(),
            message: format!("fact {name}: {e}"),
        })?;
        library
            .add_fact(name.clone(), formula)
            .map_err(|e| StoreError::Malformed {
                path: lib_path.display().to_string(),
                message: format!("fact {name}: {e}"),
            })?;
    }

    let certs_path = dir.join("certs.json");
    let certs: BTreeMap<String, Certificate> =
        serde_json::from_str(&read_file(&certs_path)?).map_err(|e| StoreError::Malformed {
            path: certs_path.display().to_string(),
            message: e.to_string(),
        })?;
    let certs: BTreeMap<String, Arc<Certificate>> = certs
        .into_iter()
        .map(|(id, c)| (id, Arc::new(c)))
        .collect();

    let thm_path = dir.join("theorems.jsonl");
    let mut theorems = Vec::new();
    for (lineno, raw) in read_file(&thm_path)?.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        let bad_line = |message: String| StoreError::MalformedLine {
            path: thm_path.display().to_string(),
            line: lineno + 1,
            message,
        };
        let line: TheoremLine =
            serde_json::from_str(raw).map_err(|e| bad_line(e.to_string()))?;
        let statement =
            parse_formula(&line.statement).map_err(|e| bad_line(format!("statement: {e}")))?;
        let mut steps = Vec::new();
        for text in &line.steps {
            let step = parse_step(text).map_err(|e| bad_line(format!("step `{text}`: {e}")))?;
            let step = match step {
                ProofStep::ByCertificate(cs) => {
                    let cert = certs.get(&cs.cert_id).cloned().ok_or_else(|| {
                        StoreError::MissingCertificate {
                            theorem: line.name.clone(),
                            cert_id: cs.cert_id.clone(),
                        }
                    })?;
                    ProofStep::ByCertificate(cs.with_certificate(cert))
                }
                other => other,
            };
            steps.push(step);
        }
        theorems.push(Theorem {
            name: line.name,
            statement,
            ground_truth_proof: steps,
        });
    }

    let dp_path = dir.join("datapoints.jsonl");
    let mut datapoints: Vec<Datapoint> = Vec::new();
    for (lineno, raw) in read_file(&dp_path)?.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        let dp = parse_datapoint(raw).map_err(|e| StoreError::MalformedLine {
            path: dp_path.display().to_string(),
            line: lineno + 1,
            message: e.to_string(),
        })?;
        datapoints.push(dp);
    }

    let split_path = dir.join("split.json");
    let split: SplitInfo =
        serde_json::from_str(&read_file(&split_path)?).map_err(|e| StoreError::Malformed {
            path: split_path.display().to_string(),
            message: e.to_string(),
        })?;

    let model_path = dir.join("model.json");
    let model: FiniteModel =
        serde_json::from_str(&read_file(&model_path)?).map_err(|e| StoreError::Malformed {
            path: model_path.display().to_string(),
            message: e.to_string(),
        })?;
    model.validate().map_err(|e| StoreError::Malformed {
        path: model_path.display().to_string(),
        message: e.to_string(),
    })?;

    Ok(Corpus {
        library,
        theorems,
        datapoints,
        split,
        model,
    })
}
