//! Acceptance checks. Each criterion prints one PASS/FAIL/SKIP line; the
//! process exits nonzero if any criterion fails.
//!
//! The optional full-scale check runs only when `CITEWORTHY_FULL_CORPUS`
//! names an article directory (and `CITEWORTHY_FULL_VECTORS` a vector file
//! for the model comparison).

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use citeworthy::corpus::{build_corpus, read_articles, Document, Label, PatternSet};
use citeworthy::dataset::{
    compute_stats, make_inference_window, make_training_windows, read_dataset, select_part, split_documents,
    write_dataset, DatasetError, DatasetHeader, SplitPart, SplitRatios, DEFAULT_RATIOS,
};
use citeworthy::eval::compute_metrics;
use citeworthy::models::synthetic::{context_corpus, overfit_corpus, ContextCorpusConfig};
use citeworthy::models::*;
use citeworthy::nn::{adam_step, AdamConfig, AdamState, Tensor};
use citeworthy::rng::{self, Rng};
use rand::RngCore;

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

type Check = fn() -> Outcome;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn within(limit: Duration, start: Instant, detail: String) -> Outcome {
    let elapsed = start.elapsed();
    if elapsed > limit {
        Outcome::Fail(format!("{detail}; took {elapsed:.1?}, limit {limit:?}"))
    } else {
        Outcome::Pass(detail)
    }
}

fn labeling_fixture() -> Outcome {
    let start = Instant::now();
    let text = std::fs::read_to_string(fixture("labeling.tsv")).expect("labeling fixture");
    let patterns = PatternSet::default_set();
    let mut families = HashSet::new();
    let mut negatives = 0;
    let mut rows = 0;
    let mut errors = Vec::new();
    for line in text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()) {
        let mut parts = line.splitn(3, '\t');
        let (gold, family, sentence) = (parts.next().unwrap(), parts.next().unwrap(), parts.next().unwrap());
        rows += 1;
        let gold = if gold == "cite" { Label::Cite } else { Label::NoCite };
        if gold == Label::Cite {
            families.insert(family.to_string());
        } else {
            negatives += 1;
        }
        let (clean, label) = patterns.label_and_sanitize(sentence);
        if label != gold {
            errors.push(format!("{sentence:?}: got {label}, want {gold}"));
        }
        if patterns.is_match(&clean) {
            errors.push(format!("{clean:?} still matches {:?}", patterns.matching(&clean)));
        }
        if label == Label::NoCite && clean != sentence {
            errors.push(format!("{sentence:?} changed without a citation"));
        }
    }
    if rows != 60 || families.len() < 10 || negatives != 20 {
        return Outcome::Fail(format!("fixture shape: {rows} rows, {} families, {negatives} negatives", families.len()));
    }
    if !errors.is_empty() {
        return Outcome::Fail(errors.join("; "));
    }
    within(
        Duration::from_secs(1),
        start,
        format!("{rows}/{rows} labels agree, {} families, no residual matches", families.len()),
    )
}

fn windowing() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for m in [2usize, 4, 8, 16] {
        for n in 1..=64usize {
            let windows = make_training_windows("d", n, m).unwrap();
            // Oracle: starts 1, 1+m/2, ... while the window fits, then one
            // window ending at n if coverage is incomplete; short documents
            // get a single padded window.
            let mut starts = Vec::new();
            if n <= m {
                starts.push(1);
            } else {
                let mut s = 1;
                while s + m - 1 <= n {
                    starts.push(s);
                    s += m / 2;
                }
                if starts.last().unwrap() + m - 1 < n {
                    starts.push(n - m + 1);
                }
            }
            let got: Vec<usize> = windows.iter().map(|w| w.start as usize).collect();
            if got != starts {
                return Outcome::Fail(format!("n={n} m={m}: starts {got:?}, want {starts:?}"));
            }
            for pair in got.windows(2).take(got.len().saturating_sub(2)) {
                if pair[1] - pair[0] != m / 2 {
                    return Outcome::Fail(format!("n={n} m={m}: step {} between full windows", pair[1] - pair[0]));
                }
            }
            let mut covered = vec![false; n + 1];
            for w in &windows {
                if w.indices.len() != m {
                    return Outcome::Fail(format!("n={n} m={m}: window of {} slots", w.indices.len()));
                }
                for (k, &i) in w.indices.iter().enumerate() {
                    let want = if w.start as usize + k <= n { w.start as usize + k } else { 0 };
                    if i != want {
                        return Outcome::Fail(format!("n={n} m={m}: slot {k} holds {i}, want {want}"));
                    }
                    covered[i] = true;
                }
            }
            if !covered[1..].iter().all(|&c| c) {
                return Outcome::Fail(format!("n={n} m={m}: incomplete coverage"));
            }
            for i in 1..=n {
                let w = make_inference_window("d", n, i, m).unwrap();
                let want: Vec<usize> = (0..m)
                    .map(|k| i as i64 - (m / 2) as i64 + k as i64)
                    .map(|j| if j >= 1 && j <= n as i64 { j as usize } else { 0 })
                    .collect();
                let before = want[..m / 2].iter().filter(|&&j| j != 0).count();
                let after = want[m / 2 + 1..].iter().filter(|&&j| j != 0).count();
                let pads = (m / 2 - before) + (m / 2 - 1 - after);
                if w.indices != want || w.padding_count() != pads || w.indices[m / 2] != i {
                    return Outcome::Fail(format!("n={n} m={m} i={i}: {:?} vs {want:?}", w.indices));
                }
                checked += 1;
            }
        }
    }
    let worked: Vec<(usize, usize)> = make_training_windows("d", 32, 16)
        .unwrap()
        .iter()
        .map(|w| (w.indices[0], *w.indices.last().unwrap()))
        .collect();
    if worked != [(1, 16), (9, 24), (17, 32)] {
        return Outcome::Fail(format!("n=32 m=16 gave {worked:?}"));
    }
    within(Duration::from_secs(5), start, format!("n<=64, m in {{2,4,8,16}}, {checked} inference windows"))
}

fn split_properties() -> Outcome {
    let start = Instant::now();
    let mut r = rng::seeded(2024);
    for trial in 0..1000 {
        let n = 3 + rng::uniform_index(&mut r, 1500) as usize;
        let seed = r.next_u64();
        let ids: Vec<String> = (0..n).map(|k| format!("doc{k:05}")).collect();
        let a = split_documents(&ids, DEFAULT_RATIOS, seed).unwrap();
        let b = split_documents(ids.iter().rev(), DEFAULT_RATIOS, seed).unwrap();
        if a != b {
            return Outcome::Fail(format!("trial {trial}: not deterministic"));
        }
        let mut all: Vec<&String> = a.train.iter().chain(&a.val).chain(&a.test).collect();
        let total = all.len();
        all.sort();
        all.dedup();
        if total != n || all.len() != n {
            return Outcome::Fail(format!("trial {trial}: {total} assigned, {} distinct, {n} documents", all.len()));
        }
        let floor = |r: f64| (r * n as f64 + 1e-9).floor() as usize;
        if a.val.len() != floor(0.2) || a.test.len() != floor(0.2) || a.train.len() != n - 2 * floor(0.2) {
            return Outcome::Fail(format!("trial {trial}: sizes {}/{}/{} for N={n}", a.train.len(), a.val.len(), a.test.len()));
        }
    }
    if split_documents(["a", "b", "c"], SplitRatios { train: 0.5, val: 0.5, test: 0.5 }, 0).is_ok() {
        return Outcome::Fail("bad ratios accepted".into());
    }
    within(Duration::from_secs(10), start, "1000 trials: disjoint, exhaustive, deterministic, floored sizes".into())
}

fn random_example(r: &mut Rng, vocab: usize, m: usize) -> Example {
    let n = 1 + rng::uniform_index(r, m as u64) as usize;
    let lead = rng::uniform_index(r, (m - n + 1) as u64) as usize;
    let slots: Vec<SlotInput> = (0..m)
        .map(|k| {
            if k < lead || k >= lead + n {
                SlotInput::Padding
            } else {
                let len = rng::uniform_index(r, 6) as usize;
                SlotInput::Tokens((0..len).map(|_| rng::uniform_index(r, vocab as u64) as u32).collect())
            }
        })
        .collect();
    let labels = slots
        .iter()
        .map(|s| (!s.is_padding()).then(|| Label::from_class_index(rng::uniform_index(r, 2) as usize)))
        .collect();
    Example { slots, labels }
}

fn gradient_checks() -> Outcome {
    let start = Instant::now();
    let h = 1e-5;
    let mut worst = 0.0f64;
    let mut worst_at = String::new();
    let mut compared = 0usize;
    for seed in 0..20u64 {
        let mut r = rng::seeded(1000 + seed);
        let dims = ModelDims::new(Formulation::Ssm { m: 4, include_section: false }, Some(9), 4, 3);
        let mut params = ModelParams::init(dims, &mut r);
        // Larger weights than the initializer so every gate is exercised.
        for t in params.tensors_mut() {
            t.data_mut().iter_mut().for_each(|v| *v = rng::uniform_f64(&mut r, -1.0, 1.0));
        }
        let example = random_example(&mut r, 9, 4);
        let mut grads = params.zeros_like();
        loss_and_grads(&params, &example, &mut grads).unwrap();
        let names: Vec<String> = grads.named_tensors().into_iter().map(|(n, _)| n).collect();
        let analytic: Vec<Vec<f64>> = grads.named_tensors().into_iter().map(|(_, t)| t.data().to_vec()).collect();
        for (k, name) in names.iter().enumerate() {
            for idx in 0..analytic[k].len() {
                let orig = params.tensors_mut()[k].data()[idx];
                params.tensors_mut()[k].data_mut()[idx] = orig + h;
                let up = loss(&params, &example).unwrap();
                params.tensors_mut()[k].data_mut()[idx] = orig - h;
                let down = loss(&params, &example).unwrap();
                params.tensors_mut()[k].data_mut()[idx] = orig;
                let numeric = (up - down) / (2.0 * h);
                let a = analytic[k][idx];
                let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-6);
                compared += 1;
                if rel > worst {
                    worst = rel;
                    worst_at = format!("seed {seed} {name}[{idx}]");
                }
            }
        }
        if names.len() != 1 + 24 + 2 {
            return Outcome::Fail(format!("unexpected tensor set {names:?}"));
        }
    }
    if worst >= 1e-4 {
        return Outcome::Fail(format!("max relative error {worst:.2e} at {worst_at}"));
    }
    within(
        Duration::from_secs(60),
        start,
        format!("{compared} entries over 20 instances, max relative error {worst:.2e}"),
    )
}

fn adam_first_step() -> Outcome {
    let mut w = Tensor::from_vec(&[1], vec![1.0]).unwrap();
    let g = Tensor::from_vec(&[1], vec![0.5]).unwrap();
    let config = AdamConfig::default();
    let mut state = AdamState::new(config, [&w]);
    adam_step(&mut [&mut w], &[&g], &mut state).unwrap();
    let m: f64 = (1.0 - 0.9) * 0.5;
    let v: f64 = (1.0 - 0.999) * 0.25;
    let m_hat = m / (1.0 - 0.9);
    let v_hat = v / (1.0 - 0.999);
    let want = 1.0 - 1e-5 * m_hat / (v_hat.sqrt() + 1e-8);
    let got = w.data()[0];
    if (got - want).abs() <= 1e-12 && (got - (1.0 - 1e-5)).abs() <= 1e-12 {
        Outcome::Pass(format!("w1 = {got:.15}"))
    } else {
        Outcome::Fail(format!("w1 = {got}, want {want}"))
    }
}

fn metrics_oracle() -> Outcome {
    let mut r = rng::seeded(77);
    let mut worst = 0.0f64;
    for trial in 0..1000 {
        let n = 1 + rng::uniform_index(&mut r, 200) as usize;
        let bias = rng::unit_f64(&mut r);
        let draw = |r: &mut Rng| if rng::unit_f64(r) < bias { Label::Cite } else { Label::NoCite };
        let preds: Vec<Label> = (0..n).map(|_| draw(&mut r)).collect();
        let golds: Vec<Label> = (0..n).map(|_| draw(&mut r)).collect();
        let report = compute_metrics(&preds, &golds).unwrap();

        let count = |p: Label, g: Label| preds.iter().zip(&golds).filter(|(a, b)| **a == p && **b == g).count() as f64;
        let (tp, fp, fneg, tn) =
            (count(Label::Cite, Label::Cite), count(Label::Cite, Label::NoCite), count(Label::NoCite, Label::Cite), count(Label::NoCite, Label::NoCite));
        let div = |a: f64, b: f64| if b == 0.0 { 0.0 } else { a / b };
        let f = |p: f64, r: f64| if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
        let (p, rc) = (div(tp, tp + fp), div(tp, tp + fneg));
        let f1 = f(p, rc);
        let f1n = f(div(tn, tn + fneg), div(tn, tn + fp));
        let wf1 = ((tp + fneg) * f1 + (tn + fp) * f1n) / n as f64;
        for (got, want) in [(report.precision, p), (report.recall, rc), (report.f1, f1), (report.f1_no_cite, f1n), (report.weighted_f1, wf1)] {
            worst = worst.max((got - want).abs());
        }
        let lo = f1.min(f1n) - 1e-12;
        let hi = f1.max(f1n) + 1e-12;
        if !(lo..=hi).contains(&report.weighted_f1) {
            return Outcome::Fail(format!("trial {trial}: weighted F1 {} outside [{lo}, {hi}]", report.weighted_f1));
        }
    }
    if worst > 1e-12 {
        return Outcome::Fail(format!("max deviation {worst:.2e}"));
    }
    Outcome::Pass(format!("1000 sets, max deviation {worst:.1e}, weighted-F1 bounds hold"))
}

fn refs(docs: &[Document]) -> Vec<&Document> {
    docs.iter().collect()
}

fn f1_on(ck: &ModelCheckpoint, docs: &[&Document]) -> f64 {
    let preds: Vec<Label> = predict_documents(ck, docs, None).unwrap().into_iter().flatten().map(|p| p.label).collect();
    let golds: Vec<Label> = docs.iter().flat_map(|d| d.labels()).collect();
    compute_metrics(&preds, &golds).unwrap().f1
}

fn overfit_sanity() -> Outcome {
    let start = Instant::now();
    let docs = overfit_corpus(20, 1);
    let config = TrainConfig { d_emb: 32, hidden: 32, lr: 1e-3, max_epochs: 200, seed: 1, ..Default::default() };
    let ck = train(&refs(&docs), &refs(&docs), &config, ProviderSpec::Trainable).unwrap();
    let f1 = f1_on(&ck, &refs(&docs));
    let detail = format!("train F1 {f1:.4} (selected epoch {} of {})", ck.log.selected_epoch, config.max_epochs);
    if f1 < 0.99 {
        return Outcome::Fail(detail);
    }
    within(Duration::from_secs(300), start, detail)
}

fn context_benefit() -> Outcome {
    let start = Instant::now();
    let docs = context_corpus(&ContextCorpusConfig::default(), 11);
    let ids: Vec<&str> = docs.iter().map(|d| d.doc_id.as_str()).collect();
    let split = split_documents(ids, DEFAULT_RATIOS, 11).unwrap();
    let (tr, va, te) = (
        select_part(&docs, &split, SplitPart::Train),
        select_part(&docs, &split, SplitPart::Val),
        select_part(&docs, &split, SplitPart::Test),
    );
    let mut scores = Vec::new();
    for f in [Formulation::Sc, Formulation::Spc { include_section: false }, Formulation::Ssm { m: 8, include_section: false }] {
        let config = TrainConfig { formulation: f, d_emb: 32, hidden: 32, lr: 1e-3, max_epochs: 40, seed: 11, ..Default::default() };
        let ck = train(&tr, &va, &config, ProviderSpec::Trainable).unwrap();
        scores.push(f1_on(&ck, &te));
    }
    let (sc, spc, ssm) = (scores[0], scores[1], scores[2]);
    let detail = format!("test F1 SC {sc:.3}, SPC {spc:.3}, SSM(m=8) {ssm:.3}; SSM-SC {:.3}", ssm - sc);
    if !(ssm >= spc && spc >= sc && ssm - sc >= 0.2) {
        return Outcome::Fail(detail);
    }
    within(Duration::from_secs(900), start, detail)
}

fn containment() -> Outcome {
    let start = Instant::now();
    let docs = context_corpus(&ContextCorpusConfig { n_docs: 40, ..Default::default() }, 5);
    let mut r = rng::seeded(55);
    let m = 8;
    let formulations = [Formulation::Sc, Formulation::Spc { include_section: true }, Formulation::Ssm { m, include_section: true }];
    for f in formulations {
        let config = TrainConfig { formulation: f, d_emb: 16, hidden: 8, lr: 1e-2, max_epochs: 2, seed: 5, ..Default::default() };
        let ck = train(&refs(&docs[..30]), &[], &config, ProviderSpec::Trainable).unwrap();
        let mut trials = 0;
        while trials < 100 {
            let doc = &docs[rng::uniform_index(&mut r, docs.len() as u64) as usize];
            let n = doc.num_sentences();
            let i = 1 + rng::uniform_index(&mut r, n as u64) as usize;
            let j = 1 + rng::uniform_index(&mut r, n as u64) as usize;
            let in_scope = match f {
                Formulation::Sc => j == i,
                Formulation::Spc { .. } => j + 1 >= i && j <= i + 1,
                Formulation::Ssm { m, .. } => j + m / 2 >= i && j < i + m / 2,
            };
            if in_scope {
                continue;
            }
            let mut edited = doc.clone();
            edited.sentence_mut(j).unwrap().text = format!("notably mutated text {trials} with extra words");
            let before = &predict_documents(&ck, &[doc], None).unwrap()[0][i - 1];
            let after = &predict_documents(&ck, &[&edited], None).unwrap()[0][i - 1];
            if before != after {
                return Outcome::Fail(format!("{f}: editing sentence {j} changed prediction {i} of {}", doc.doc_id));
            }
            trials += 1;
        }
    }
    within(Duration::from_secs(120), start, "100 out-of-scope mutations each for SC, SPC, SSM(m=8)".into())
}

fn round_trips() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let docs = context_corpus(&ContextCorpusConfig { n_docs: 10, ..Default::default() }, 8);

    let path = dir.path().join("dataset.jsonl");
    let mut header = DatasetHeader::new(Default::default());
    header.run_config.insert("seed".into(), "8".into());
    write_dataset(&path, &docs, &header).unwrap();
    let (h2, back) = read_dataset(&path).unwrap();
    if h2 != header || back != docs {
        return Outcome::Fail("dataset round trip differs".into());
    }
    let text = std::fs::read_to_string(&path).unwrap();
    let bumped = text.replacen("\"schema_version\":1", "\"schema_version\":99", 1);
    std::fs::write(&path, &bumped).unwrap();
    if !matches!(read_dataset(&path), Err(DatasetError::SchemaMismatch { .. })) {
        return Outcome::Fail("schema bump not detected".into());
    }
    std::fs::write(&path, &text[..text.len() - 30]).unwrap();
    if !matches!(read_dataset(&path), Err(DatasetError::Io { .. })) {
        return Outcome::Fail("truncated dataset not detected".into());
    }

    let probe: Vec<&Document> = docs.iter().collect();
    let mut sentences = 0;
    for f in [Formulation::Sc, Formulation::Spc { include_section: false }, Formulation::Ssm { m: 4, include_section: true }] {
        let config = TrainConfig { formulation: f, d_emb: 8, hidden: 8, lr: 1e-2, max_epochs: 1, ..Default::default() };
        let ck = train(&probe[..7], &probe[7..], &config, ProviderSpec::Trainable).unwrap();
        let ck_path = dir.path().join("model.ckpt");
        save_checkpoint(&ck_path, &ck).unwrap();
        let loaded = load_checkpoint(&ck_path).unwrap();
        let a = predict(&ck, &probe, None).unwrap();
        let b = predict(&loaded, &probe, None).unwrap();
        if a.iter().zip(&b).any(|(x, y)| x.label != y.label || x.p_cite.to_bits() != y.p_cite.to_bits()) || a.len() != b.len() {
            return Outcome::Fail(format!("{f}: predictions differ after reload"));
        }
        sentences = a.len();
        let bytes = std::fs::read(&ck_path).unwrap();
        let mut bumped = bytes.clone();
        bumped[8] = bumped[8].wrapping_add(1);
        if !matches!(ModelCheckpoint::from_bytes(&bumped), Err(ModelError::FormatVersionMismatch { .. })) {
            return Outcome::Fail("version bump not detected".into());
        }
        if !matches!(ModelCheckpoint::from_bytes(&bytes[..bytes.len() - 100]), Err(ModelError::CorruptCheckpoint(_))) {
            return Outcome::Fail("truncated payload not detected".into());
        }
    }
    Outcome::Pass(format!("dataset and checkpoints round-trip bitwise on {sentences} sentences; faults detected"))
}

fn full_scale() -> Outcome {
    let Some(corpus) = std::env::var_os("CITEWORTHY_FULL_CORPUS") else {
        return Outcome::Skip("set CITEWORTHY_FULL_CORPUS to an article directory to run".into());
    };
    let articles = match read_articles(Path::new(&corpus)) {
        Ok(a) => a,
        Err(e) => return Outcome::Fail(format!("reading corpus: {e}")),
    };
    let built = match build_corpus(articles, PatternSet::default_set()) {
        Ok(b) => b,
        Err(e) => return Outcome::Fail(format!("building corpus: {e}")),
    };
    let stats = compute_stats(&built.documents).unwrap();
    let sentence_dev = (stats.sentences as f64 - 2_706_792.0).abs() / 2_706_792.0;
    let rate = stats.citation_rate();
    let mut detail = format!("{} sentences ({:+.2}%), citation rate {:.2}%", stats.sentences, 100.0 * sentence_dev, 100.0 * rate);
    if sentence_dev > 0.02 || (rate - 0.113).abs() > 0.015 {
        return Outcome::Fail(detail);
    }
    let Some(vectors_path) = std::env::var_os("CITEWORTHY_FULL_VECTORS") else {
        return Outcome::Pass(format!("{detail}; model comparison skipped (no CITEWORTHY_FULL_VECTORS)"));
    };
    let vectors = match ExternalVectors::load(Path::new(&vectors_path)) {
        Ok(v) => v,
        Err(e) => return Outcome::Fail(format!("loading vectors: {e}")),
    };
    let ids: Vec<&str> = built.documents.iter().map(|d| d.doc_id.as_str()).collect();
    let split = split_documents(ids, DEFAULT_RATIOS, 0).unwrap();
    let parts = |p| select_part(&built.documents, &split, p);
    let (tr, va, te) = (parts(SplitPart::Train), parts(SplitPart::Val), parts(SplitPart::Test));
    let mut f1 = Vec::new();
    for f in [Formulation::Sc, Formulation::Ssm { m: 16, include_section: true }] {
        let config = TrainConfig { formulation: f, ..Default::default() };
        let ck = match train(&tr, &va, &config, ProviderSpec::External(&vectors)) {
            Ok(c) => c,
            Err(e) => return Outcome::Fail(format!("training {f}: {e}")),
        };
        let preds: Vec<Label> = predict_documents(&ck, &te, Some(&vectors)).unwrap().into_iter().flatten().map(|p| p.label).collect();
        let golds: Vec<Label> = te.iter().flat_map(|d| d.labels()).collect();
        f1.push(compute_metrics(&preds, &golds).unwrap().f1);
    }
    detail.push_str(&format!("; test F1 SC {:.3}, SSM(16)+section {:.3}", f1[0], f1[1]));
    if f1[1] - f1[0] < 0.05 {
        return Outcome::Fail(detail);
    }
    Outcome::Pass(detail)
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 11] = [
        ("labeling fixture", labeling_fixture),
        ("windowing enumeration", windowing),
        ("split properties", split_properties),
        ("gradient checks", gradient_checks),
        ("adam first step", adam_first_step),
        ("metrics oracle", metrics_oracle),
        ("overfit sanity", overfit_sanity),
        ("context benefit ordering", context_benefit),
        ("containment properties", containment),
        ("round trips", round_trips),
        ("full-scale corpus and models (optional)", full_scale),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let (tag, detail) = match outcome {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Outcome::Skip(d) => ("SKIP", d),
        };
        println!("{tag} {:>2}. {name}: {detail} [{elapsed:.2?}]", k + 1);
    }
    println!("acceptance: {} passed or skipped, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
