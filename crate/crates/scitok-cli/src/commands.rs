//! One function per subcommand.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::Deserialize;
use serde_json::json;

use scitok::codec::{self, token_count, TokenSequence};
use scitok::detector::{segment, DetectorConfig};
use scitok::metrics::{compare, CrAccumulator, CrOptions};
use scitok::packer::{build_plan, simulate_ranks, Document};
use scitok::vocab::{assemble, train_bpe as train_vocab, Vocabulary, VocabularySet};
use scitok::Modality;

use crate::io::{for_each_jsonl, map_jsonl, parse_line, AtomicFile, Manifest};
use crate::{CliError, CrBenchArgs, DecodeArgs, DetectArgs, EncodeArgs, PackArgs, TrainBpeArgs};

#[derive(Deserialize)]
struct TextRecord {
    id: serde_json::Value,
    text: String,
}

#[derive(Deserialize)]
struct IdsRecord {
    id: serde_json::Value,
    ids: Vec<u32>,
}

#[derive(Deserialize)]
struct PackRecord {
    id: serde_json::Value,
    length: Option<u64>,
    text: Option<String>,
}

fn load_rules(config: &Option<PathBuf>) -> Result<DetectorConfig, CliError> {
    match config {
        None => Ok(DetectorConfig::default()),
        Some(path) => DetectorConfig::from_file(path).map_err(|e| CliError::Input {
            path: Some(path.display().to_string()),
            line: None,
            message: e.to_string(),
        }),
    }
}

fn load_vocab(path: &Path) -> Result<VocabularySet, CliError> {
    VocabularySet::load(path).map_err(|e| CliError::Input {
        path: Some(path.display().to_string()),
        line: None,
        message: e.to_string(),
    })
}

fn params(args: &impl serde::Serialize) -> serde_json::Value {
    serde_json::to_value(args).expect("args serialize")
}

pub fn detect(args: &DetectArgs, workers: usize) -> Result<(), CliError> {
    let rules = load_rules(&args.config)?;
    let mut manifest = Manifest::new("detect", params(args), None);
    manifest.fingerprint_input(&args.input)?;
    if let Some(c) = &args.config {
        manifest.fingerprint_input(c)?;
    }
    let mut out = AtomicFile::create(&args.output)?;
    map_jsonl(&args.input, out.writer(), workers, |line_no, raw| {
        let rec: TextRecord = parse_line(&args.input, line_no, raw)?;
        let seg = segment(&rec.text, &rules).map_err(|e| CliError::contract_at(line_no, e))?;
        let spans: Vec<serde_json::Value> = seg
            .spans()
            .iter()
            .map(|s| {
                json!({
                    "start": s.start,
                    "end": s.end,
                    "modality": s.modality.as_str(),
                    "origin": s.origin.as_str(),
                })
            })
            .collect();
        Ok(json!({"id": rec.id, "spans": spans}).to_string())
    })?;
    out.commit()?;
    manifest.write_beside(&args.output)
}

pub fn train_bpe(args: &TrainBpeArgs) -> Result<(), CliError> {
    let mut corpus: Vec<String> = Vec::new();
    for_each_jsonl(&args.input, |line_no, raw| {
        let rec: TextRecord = parse_line(&args.input, line_no, raw)?;
        corpus.push(rec.text);
        Ok(())
    })?;

    let mut manifest = Manifest::new("train-bpe", params(args), args.seed);
    manifest.fingerprint_input(&args.input)?;

    // an existing vocab file keeps its other modalities; a fresh one starts
    // with the remaining modalities empty
    let existing = if args.out.exists() {
        manifest.fingerprint_input(&args.out)?;
        Some(load_vocab(&args.out)?)
    } else {
        None
    };
    let trained =
        train_vocab(&corpus, args.modality, args.target_size).map_err(CliError::contract)?;
    let vocabularies: Vec<Vocabulary> = Modality::ALL
        .iter()
        .map(|&m| {
            if m == args.modality {
                trained.clone()
            } else {
                match &existing {
                    Some(set) => set.vocabulary(m).clone(),
                    None => Vocabulary::empty(m),
                }
            }
        })
        .collect();
    let set = assemble(vocabularies).map_err(CliError::contract)?;

    let mut out = AtomicFile::create(&args.out)?;
    out.writer()
        .write_all(set.to_canonical_json().as_bytes())
        .map_err(|e| CliError::io(&args.out, e))?;
    out.commit()?;
    manifest.write_beside(&args.out)
}

pub fn encode(args: &EncodeArgs, workers: usize) -> Result<(), CliError> {
    let rules = load_rules(&args.config)?;
    let vs = load_vocab(&args.vocab)?;
    let mut manifest = Manifest::new("encode", params(args), None);
    manifest.fingerprint_input(&args.input)?;
    manifest.fingerprint_input(&args.vocab)?;
    if let Some(c) = &args.config {
        manifest.fingerprint_input(c)?;
    }
    let unknown = AtomicU64::new(0);
    let mut out = AtomicFile::create(&args.output)?;
    map_jsonl(&args.input, out.writer(), workers, |line_no, raw| {
        let rec: TextRecord = parse_line(&args.input, line_no, raw)?;
        let seg = segment(&rec.text, &rules).map_err(|e| CliError::contract_at(line_no, e))?;
        let ts = codec::encode(&seg, &vs).map_err(|e| CliError::contract_at(line_no, e))?;
        unknown.fetch_add(ts.unknown_substitutions, Ordering::Relaxed);
        Ok(json!({"id": rec.id, "ids": ts.ids}).to_string())
    })?;
    let substitutions = unknown.load(Ordering::Relaxed);
    if substitutions > 0 {
        log::warn!("{substitutions} characters were replaced by unknown tokens");
    }
    out.commit()?;
    manifest.write_beside(&args.output)
}

pub fn decode(args: &DecodeArgs, workers: usize) -> Result<(), CliError> {
    let vs = load_vocab(&args.vocab)?;
    let mut manifest = Manifest::new("decode", params(args), None);
    manifest.fingerprint_input(&args.input)?;
    manifest.fingerprint_input(&args.vocab)?;
    let mut out = AtomicFile::create(&args.output)?;
    map_jsonl(&args.input, out.writer(), workers, |line_no, raw| {
        let rec: IdsRecord = parse_line(&args.input, line_no, raw)?;
        let ts = TokenSequence {
            ids: rec.ids,
            ..TokenSequence::default()
        };
        let text = codec::decode(&ts, &vs).map_err(|e| CliError::contract_at(line_no, e))?;
        Ok(json!({"id": rec.id, "text": text}).to_string())
    })?;
    out.commit()?;
    manifest.write_beside(&args.output)
}

pub fn cr_bench(args: &CrBenchArgs) -> Result<(), CliError> {
    let rules = load_rules(&args.config)?;
    let opts = CrOptions {
        count_specials: !args.exclude_specials,
    };
    let mut manifest = Manifest::new("cr-bench", params(args), None);
    manifest.fingerprint_input(&args.data)?;
    if let Some(c) = &args.config {
        manifest.fingerprint_input(c)?;
    }

    let mut reports = Vec::with_capacity(args.vocab.len());
    for vocab_path in &args.vocab {
        manifest.fingerprint_input(vocab_path)?;
        let vs = load_vocab(vocab_path)?;
        let name = vocab_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| vocab_path.display().to_string());
        let mut acc = CrAccumulator::new(name, opts);
        for_each_jsonl(&args.data, |line_no, raw| {
            let rec: TextRecord = parse_line(&args.data, line_no, raw)?;
            acc.add_document(&rec.text, &vs, &rules)
                .map_err(|e| CliError::contract_at(line_no, e))
        })?;
        reports.push(acc.finish().map_err(CliError::contract)?);
    }

    let payload = if reports.len() == 1 {
        serde_json::to_value(&reports[0]).expect("report serializes")
    } else {
        let table = compare(&reports).map_err(CliError::contract)?;
        print!("{}", table.render_text());
        json!({"reports": reports, "comparison": table})
    };
    let mut out = AtomicFile::create(&args.out)?;
    let mut text = serde_json::to_string_pretty(&payload).expect("payload serializes");
    text.push('\n');
    out.writer()
        .write_all(text.as_bytes())
        .map_err(|e| CliError::io(&args.out, e))?;
    out.commit()?;
    manifest.write_beside(&args.out)
}

fn id_string(v: &serde_json::Value) -> Option<String> {
    match v {
        serde_json::Value::String(s) => Some(s.clone()),
        serde_json::Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

pub fn pack(args: &PackArgs) -> Result<(), CliError> {
    let mut manifest = Manifest::new("pack", params(args), Some(args.seed));
    manifest.fingerprint_input(&args.data)?;
    if let Some(v) = &args.vocab {
        manifest.fingerprint_input(v)?;
    }
    if let Some(c) = &args.config {
        manifest.fingerprint_input(c)?;
    }
    let tokenizer = match &args.vocab {
        Some(v) => Some((load_vocab(v)?, load_rules(&args.config)?)),
        None => None,
    };

    let mut docs: Vec<Document> = Vec::new();
    for_each_jsonl(&args.data, |line_no, raw| {
        let rec: PackRecord = parse_line(&args.data, line_no, raw)?;
        let id = id_string(&rec.id).ok_or_else(|| CliError::Input {
            path: Some(args.data.display().to_string()),
            line: Some(line_no),
            message: "id must be a string or a number".into(),
        })?;
        let length = match (rec.length, rec.text) {
            (Some(length), _) => length,
            (None, Some(text)) => {
                let (vs, rules) = tokenizer.as_ref().ok_or_else(|| {
                    CliError::Usage(
                        "--vocab is required when records carry text without length".into(),
                    )
                })?;
                token_count(&text, vs, rules).map_err(|e| CliError::contract_at(line_no, e))? as u64
            }
            (None, None) => {
                return Err(CliError::Input {
                    path: Some(args.data.display().to_string()),
                    line: Some(line_no),
                    message: "record needs a length or a text field".into(),
                })
            }
        };
        docs.push(Document { id, length });
        Ok(())
    })?;

    let plan = build_plan(
        &docs,
        args.capacity,
        args.seed,
        args.window,
        args.cost_model,
    )
    .map_err(CliError::contract)?;
    let stats = simulate_ranks(&plan, args.ranks).map_err(CliError::contract)?;

    let mut out = AtomicFile::create(&args.out)?;
    for (i, bucket) in plan.buckets.iter().enumerate() {
        let line = json!({
            "bucket": i,
            "doc_ids": bucket.doc_ids,
            "max_len": bucket.max_len,
        });
        writeln!(out.writer(), "{line}").map_err(|e| CliError::io(&args.out, e))?;
    }
    out.commit()?;
    manifest.write_beside(&args.out)?;

    let mut stats_json = serde_json::to_string_pretty(&stats).expect("stats serialize");
    stats_json.push('\n');
    print!("{stats_json}");
    Ok(())
}
