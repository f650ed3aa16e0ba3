use std::fs;
use std::io::Write;
use std::path::Path;

use log::info;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use citeworthy::corpus::{build_corpus, read_articles, CanonicalSection, Document, Label, PatternSet};
use citeworthy::dataset::{
    check_window_length, read_dataset, read_manifest, select_part, split_documents, write_dataset, write_manifest,
    DatasetError, DatasetHeader, SplitManifest, SplitPart, SplitRatios, DEFAULT_RATIOS,
};
use citeworthy::eval::{compute_metrics, evaluate};
use citeworthy::models::{
    load_checkpoint, predict, predict_documents, save_checkpoint, train, ExternalVectors, Formulation,
    ProviderSpec, TrainConfig,
};
use citeworthy::provenance::{RunConfig, TOOL_VERSION};
use citeworthy::rng;

use crate::config::Resolver;
use crate::error::CliError;
use crate::{AuditArgs, BuildCorpusArgs, Command, EvalArgs, PredictArgs, SplitArgs, TrainArgs};

pub fn run(command: &Command, config: Option<&Path>) -> Result<(), CliError> {
    let r = Resolver::new(command.name(), config)?;
    match command {
        Command::BuildCorpus(a) => build_corpus_cmd(a, r),
        Command::Split(a) => split_cmd(a, r),
        Command::Train(a) => train_cmd(a, r),
        Command::Eval(a) => eval_cmd(a, r),
        Command::Predict(a) => predict_cmd(a, r),
        Command::Audit(a) => audit_cmd(a, r),
    }
}

fn write_file(path: &str, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::runtime("Io", format!("{path}: {e}")))
}

fn pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json value serializes");
    s.push('\n');
    s
}

fn jsonl<T: Serialize>(rows: impl IntoIterator<Item = T>) -> String {
    let mut out = String::new();
    for row in rows {
        out.push_str(&serde_json::to_string(&row).expect("row serializes"));
        out.push('\n');
    }
    out
}

fn provenance(run_config: &RunConfig) -> Value {
    json!({ "tool_version": TOOL_VERSION, "run_config": run_config })
}

fn load_vectors(path: Option<&str>) -> Result<Option<ExternalVectors>, CliError> {
    path.map(|p| ExternalVectors::load(Path::new(p))).transpose().map_err(CliError::from)
}

/// One row of the manual labeling audit file. Annotators fill `manual`.
#[derive(Debug, Serialize, Deserialize)]
struct AuditRow {
    doc_id: String,
    index: usize,
    section: CanonicalSection,
    label: Label,
    original_text: String,
    text: String,
    manual: Option<Label>,
}

fn audit_sample(documents: &[Document], n: usize, seed: u64) -> Vec<AuditRow> {
    let mut all: Vec<(usize, usize)> = documents
        .iter()
        .enumerate()
        .flat_map(|(d, doc)| (1..=doc.num_sentences()).map(move |i| (d, i)))
        .collect();
    rng::shuffle(&mut rng::seeded(seed), &mut all);
    all.truncate(n);
    all.sort_unstable();
    all.into_iter()
        .map(|(d, i)| {
            let doc = &documents[d];
            let s = doc.sentences().nth(i - 1).expect("index within document");
            AuditRow {
                doc_id: doc.doc_id.clone(),
                index: i,
                section: s.section,
                label: s.sentence.label,
                original_text: s.sentence.original_text.clone(),
                text: s.sentence.text.clone(),
                manual: None,
            }
        })
        .collect()
}

fn build_corpus_cmd(a: &BuildCorpusArgs, mut r: Resolver) -> Result<(), CliError> {
    let input: String = r.required("in", a.input.clone())?;
    let patterns_path: Option<String> = r.optional("patterns", a.patterns.clone())?;
    let out: String = r.required("out", a.out.clone())?;
    let stats_path = r.value("stats", a.stats.clone(), format!("{out}.stats.json"))?;
    let skip_path = r.value("skip_log", a.skip_log.clone(), format!("{out}.skipped.jsonl"))?;
    let sample_n: Option<usize> = r.optional("sample_validation", a.sample_validation)?;
    let sample_path = match sample_n {
        Some(_) => Some(r.value("sample_out", a.sample_out.clone(), format!("{out}.sample.jsonl"))?),
        None => r.optional::<String>("sample_out", a.sample_out.clone()).map(|_| None)?,
    };
    let seed = r.value("seed", a.seed, 0u64)?;
    let run_config = r.finish()?;

    let owned;
    let patterns = match &patterns_path {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| CliError::runtime("Io", format!("{p}: {e}")))?;
            owned = PatternSet::parse(&text)?;
            &owned
        }
        None => PatternSet::default_set(),
    };
    let articles = read_articles(Path::new(&input))?;
    let built = build_corpus(articles, patterns)?;
    info!("{} documents, {} skipped", built.documents.len(), built.skipped.len());

    write_dataset(Path::new(&out), &built.documents, &DatasetHeader::new(run_config.clone()))?;
    let mut stats = provenance(&run_config);
    stats["stats"] = built.stats.to_json();
    stats["skipped_articles"] = built.skipped.len().into();
    write_file(&stats_path, pretty(&stats))?;
    write_file(&skip_path, jsonl(&built.skipped))?;

    if let (Some(n), Some(path)) = (sample_n, sample_path) {
        let rows = audit_sample(&built.documents, n, seed);
        if rows.len() < n {
            log::warn!("corpus has only {} sentences, sampled all of them", rows.len());
        }
        write_file(&path, jsonl(&rows))?;
    }
    println!(
        "{} documents, {} sentences ({} citing), {} skipped",
        built.stats.articles,
        built.stats.sentences,
        built.stats.sentences_with_citation,
        built.skipped.len()
    );
    Ok(())
}

fn parse_ratios(raw: &str) -> Result<SplitRatios, CliError> {
    let parts: Vec<f64> = raw
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::usage("BadRatios", format!("--ratios {raw:?}: {e}")))?;
    match parts[..] {
        [train, val, test] => Ok(SplitRatios::new(train, val, test)?),
        _ => Err(CliError::usage("BadRatios", format!("--ratios needs three comma-separated values, got {raw:?}"))),
    }
}

fn split_cmd(a: &SplitArgs, mut r: Resolver) -> Result<(), CliError> {
    let input: String = r.required("in", a.input.clone())?;
    let default = format!("{},{},{}", DEFAULT_RATIOS.train, DEFAULT_RATIOS.val, DEFAULT_RATIOS.test);
    let ratios_raw = r.value("ratios", a.ratios.clone(), default)?;
    let seed = r.value("seed", a.seed, 0u64)?;
    let out: String = r.required("out", a.out.clone())?;
    let run_config = r.finish()?;
    let ratios = parse_ratios(&ratios_raw)?;

    let (_, documents) = read_dataset(Path::new(&input))?;
    let split = split_documents(documents.iter().map(|d| d.doc_id.as_str()), ratios, seed)?;
    println!("train {} / val {} / test {} documents", split.train.len(), split.val.len(), split.test.len());
    write_manifest(Path::new(&out), &SplitManifest::new(split, run_config))?;
    Ok(())
}

fn train_cmd(a: &TrainArgs, mut r: Resolver) -> Result<(), CliError> {
    let d = TrainConfig::default();
    let data: String = r.required("data", a.data.clone())?;
    let split_path: String = r.required("split", a.split.clone())?;
    let name = r.value("formulation", a.formulation.clone(), "ssm".to_string())?;
    let m = r.value("m", a.m, 16usize)?;
    let include_section = r.switch("include_section", a.include_section)?;
    let provider = r.value("provider", a.provider.clone(), "trainable".to_string())?;
    let vectors_path: Option<String> = r.optional("vectors", a.vectors.clone())?;
    let out: String = r.required("out", a.out.clone())?;
    let max_epochs = r.value("epochs", a.epochs, d.max_epochs)?;
    let batch_size = r.value("batch_size", a.batch_size, d.batch_size)?;
    let lr = r.value("lr", a.lr, d.lr)?;
    let d_emb = r.value("d_emb", a.d_emb, d.d_emb)?;
    let hidden = r.value("hidden", a.hidden, d.hidden)?;
    let max_vocab = r.value("max_vocab", a.max_vocab, d.max_vocab)?;
    let clip_norm = r.value("clip_norm", a.clip_norm, d.clip_norm)?;
    let seed = r.value("seed", a.seed, d.seed)?;
    let run_config = r.finish()?;

    check_window_length(m)?;
    let formulation = Formulation::parse(&name, m, include_section)?;
    let vectors = match (provider.as_str(), &vectors_path) {
        ("trainable", None) => None,
        ("trainable", Some(_)) => {
            return Err(CliError::usage("BadProvider", "--vectors only applies to --provider external"))
        }
        ("external", Some(p)) => load_vectors(Some(p))?,
        ("external", None) => return Err(CliError::usage("BadProvider", "--provider external needs --vectors")),
        (other, _) => return Err(CliError::usage("BadProvider", format!("unknown provider {other:?}"))),
    };
    let config = TrainConfig { formulation, batch_size, lr, max_epochs, seed, clip_norm, d_emb, hidden, max_vocab, ..d };
    config.validate()?;

    let (_, documents) = read_dataset(Path::new(&data))?;
    let split = read_manifest(Path::new(&split_path))?.assignment();
    let train_docs = select_part(&documents, &split, SplitPart::Train);
    let val_docs = select_part(&documents, &split, SplitPart::Val);
    let spec = match &vectors {
        Some(v) => ProviderSpec::External(v),
        None => ProviderSpec::Trainable,
    };
    let mut checkpoint = train(&train_docs, &val_docs, &config, spec)?;
    checkpoint.run_config = run_config.clone();
    save_checkpoint(Path::new(&out), &checkpoint)?;

    let mut log = provenance(&run_config);
    log["training_log"] = serde_json::to_value(&checkpoint.log).expect("log serializes");
    write_file(&format!("{out}.log.json"), pretty(&log))?;
    let best = checkpoint.log.epochs.iter().find(|e| e.epoch == checkpoint.log.selected_epoch);
    match best.and_then(|e| e.val.as_ref()) {
        Some(v) => println!("{formulation}: selected epoch {} (val F1 {:.4})", checkpoint.log.selected_epoch, v.f1),
        None => println!("{formulation}: selected epoch {}", checkpoint.log.selected_epoch),
    }
    Ok(())
}

fn eval_cmd(a: &EvalArgs, mut r: Resolver) -> Result<(), CliError> {
    let data: String = r.required("data", a.data.clone())?;
    let split_path: String = r.required("split", a.split.clone())?;
    let part_raw = r.value("part", a.part.clone(), "test".to_string())?;
    let ckpt: String = r.required("ckpt", a.ckpt.clone())?;
    let report_path: String = r.required("report", a.report.clone())?;
    let by_section = r.switch("by_section", a.by_section)?;
    let vectors_path: Option<String> = r.optional("vectors", a.vectors.clone())?;
    let run_config = r.finish()?;
    let part: SplitPart = part_raw.parse().map_err(|m: String| CliError::usage("BadPart", m))?;

    let checkpoint = load_checkpoint(Path::new(&ckpt))?;
    let vectors = load_vectors(vectors_path.as_deref())?;
    let (_, documents) = read_dataset(Path::new(&data))?;
    let split = read_manifest(Path::new(&split_path))?.assignment();
    checkpoint.check_vocabulary(select_part(&documents, &split, SplitPart::Train))?;
    let docs = select_part(&documents, &split, part);
    if docs.iter().all(|d| d.num_sentences() == 0) {
        return Err(DatasetError::EmptyCorpus.into());
    }

    let preds: Vec<Label> =
        predict_documents(&checkpoint, &docs, vectors.as_ref())?.into_iter().flatten().map(|p| p.label).collect();
    let golds: Vec<Label> = docs.iter().flat_map(|d| d.labels()).collect();
    let sections: Vec<CanonicalSection> = docs.iter().flat_map(|d| d.sentences().map(|s| s.section)).collect();
    let report = evaluate(&preds, &golds, &sections)?;

    let mut out = serde_json::to_value(&report).expect("report serializes");
    let obj = out.as_object_mut().expect("report is an object");
    if !by_section {
        obj.remove("per_section");
    }
    obj.insert("part".into(), json!(part));
    obj.insert("documents".into(), docs.len().into());
    obj.insert("formulation".into(), json!(checkpoint.formulation()));
    obj.insert("tool_version".into(), TOOL_VERSION.into());
    obj.insert("run_config".into(), json!(run_config));
    write_file(&report_path, pretty(&out))?;
    print!("{}", report.to_table(&checkpoint.formulation().to_string()));
    Ok(())
}

fn predict_cmd(a: &PredictArgs, mut r: Resolver) -> Result<(), CliError> {
    let input: String = r.required("in", a.input.clone())?;
    let ckpt: String = r.required("ckpt", a.ckpt.clone())?;
    let out: String = r.required("out", a.out.clone())?;
    let vectors_path: Option<String> = r.optional("vectors", a.vectors.clone())?;
    let run_config = r.finish()?;

    let raw = fs::read_to_string(&input).map_err(|e| CliError::runtime("Io", format!("{input}: {e}")))?;
    if raw.trim().is_empty() {
        return Err(DatasetError::EmptyCorpus.into());
    }
    let (_, documents) = read_dataset(Path::new(&input))?;
    if documents.iter().all(|d| d.num_sentences() == 0) {
        return Err(DatasetError::EmptyCorpus.into());
    }
    let checkpoint = load_checkpoint(Path::new(&ckpt))?;
    let vectors = load_vectors(vectors_path.as_deref())?;
    let docs: Vec<&Document> = documents.iter().collect();
    let predictions = predict(&checkpoint, &docs, vectors.as_ref())?;

    let mut file = fs::File::create(&out).map_err(|e| CliError::runtime("Io", format!("{out}: {e}")))?;
    file.write_all(jsonl(&predictions).as_bytes())?;
    let mut meta = provenance(&run_config);
    meta["rows"] = predictions.len().into();
    meta["formulation"] = json!(checkpoint.formulation());
    write_file(&format!("{out}.meta.json"), pretty(&meta))?;
    let cites = predictions.iter().filter(|p| p.label.is_cite()).count();
    println!("{} sentences labeled, {} cite", predictions.len(), cites);
    Ok(())
}

fn audit_cmd(a: &AuditArgs, mut r: Resolver) -> Result<(), CliError> {
    let sample: String = r.required("sample", a.sample.clone())?;
    let report_path: Option<String> = r.optional("report", a.report.clone())?;
    let run_config = r.finish()?;

    let text = fs::read_to_string(&sample).map_err(|e| CliError::runtime("Io", format!("{sample}: {e}")))?;
    let mut auto = Vec::new();
    let mut manual = Vec::new();
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let row: AuditRow = serde_json::from_str(line)
            .map_err(|e| CliError::runtime("BadSample", format!("{sample}:{}: {e}", i + 1)))?;
        if let Some(m) = row.manual {
            auto.push(row.label);
            manual.push(m);
        }
    }
    if manual.is_empty() {
        return Err(CliError::runtime("BadSample", format!("{sample}: no row has a manual label")));
    }
    let agree = auto.iter().zip(&manual).filter(|(a, m)| a == m).count();
    let metrics = compute_metrics(&auto, &manual)?;
    let mut report = provenance(&run_config);
    report["annotated"] = manual.len().into();
    report["agree"] = agree.into();
    report["agreement"] = (agree as f64 / manual.len() as f64).into();
    report["metrics"] = serde_json::to_value(&metrics).expect("report serializes");
    if let Some(path) = report_path {
        write_file(&path, pretty(&report))?;
    }
    println!(
        "{agree}/{} automatic labels agree with the annotation ({:.1}%), cite P {:.3} R {:.3}",
        manual.len(),
        100.0 * agree as f64 / manual.len() as f64,
        metrics.precision,
        metrics.recall
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratios_parsing() {
        assert_eq!(parse_ratios("0.6, 0.2,0.2").unwrap(), DEFAULT_RATIOS);
        for bad in ["0.5,0.5,0.5", "0.5,0.5", "a,b,c", "1,0,0"] {
            let e = parse_ratios(bad).unwrap_err();
            assert_eq!((e.code.as_str(), e.exit_code), ("BadRatios", 2), "{bad}");
        }
    }
}
