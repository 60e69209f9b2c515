//! JSONL streaming, atomic output files, and run manifests.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

/// Output file written to a sibling temp path and renamed on commit, so a
/// failed run never leaves a partial output behind.
pub struct AtomicFile {
    tmp: PathBuf,
    dest: PathBuf,
    writer: Option<BufWriter<File>>,
}

impl AtomicFile {
    pub fn create(dest: &Path) -> Result<AtomicFile, CliError> {
        let tmp = dest.with_extension(format!(
            "{}tmp-{}",
            dest.extension()
                .map(|e| format!("{}.", e.to_string_lossy()))
                .unwrap_or_default(),
            std::process::id()
        ));
        let file = File::create(&tmp).map_err(|e| CliError::io(&tmp, e))?;
        Ok(AtomicFile {
            tmp,
            dest: dest.to_path_buf(),
            writer: Some(BufWriter::new(file)),
        })
    }

    pub fn writer(&mut self) -> &mut BufWriter<File> {
        self.writer.as_mut().expect("file not yet committed")
    }

    pub fn commit(mut self) -> Result<(), CliError> {
        let mut writer = self.writer.take().expect("file not yet committed");
        writer.flush().map_err(|e| CliError::io(&self.tmp, e))?;
        drop(writer);
        std::fs::rename(&self.tmp, &self.dest).map_err(|e| CliError::io(&self.dest, e))
    }
}

impl Drop for AtomicFile {
    fn drop(&mut self) {
        if self.writer.is_some() {
            let _ = std::fs::remove_file(&self.tmp);
        }
    }
}

pub fn sha256_file(path: &Path) -> Result<String, CliError> {
    let mut file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = file.read(&mut buf).map_err(|e| CliError::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect())
}

/// Everything needed to reproduce a run: the resolved argv, the parsed
/// parameters, and content fingerprints of every input file.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub argv: Vec<String>,
    pub params: serde_json::Value,
    pub inputs: BTreeMap<String, String>,
    pub seed: Option<u64>,
}

impl Manifest {
    pub fn new(command: &str, params: serde_json::Value, seed: Option<u64>) -> Manifest {
        Manifest {
            tool: "scitok",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            argv: std::env::args().skip(1).collect(),
            params,
            inputs: BTreeMap::new(),
            seed,
        }
    }

    pub fn fingerprint_input(&mut self, path: &Path) -> Result<(), CliError> {
        self.inputs
            .insert(path.display().to_string(), sha256_file(path)?);
        Ok(())
    }

    /// Writes `<output>.manifest.json` beside the output file.
    pub fn write_beside(&self, output: &Path) -> Result<(), CliError> {
        let path = PathBuf::from(format!("{}.manifest.json", output.display()));
        let mut json = serde_json::to_string_pretty(self).expect("manifest serializes");
        json.push('\n');
        let mut file = AtomicFile::create(&path)?;
        file.writer()
            .write_all(json.as_bytes())
            .map_err(|e| CliError::io(&path, e))?;
        file.commit()
    }
}

pub fn parse_line<T: DeserializeOwned>(
    path: &Path,
    line_no: u64,
    raw: &str,
) -> Result<T, CliError> {
    serde_json::from_str(raw).map_err(|e| CliError::Input {
        path: Some(path.display().to_string()),
        line: Some(line_no),
        message: format!("malformed JSONL record: {e}"),
    })
}

fn open_lines(
    path: &Path,
) -> Result<impl Iterator<Item = Result<(u64, String), CliError>>, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let path = path.to_path_buf();
    Ok(BufReader::new(file)
        .lines()
        .enumerate()
        .map(move |(i, line)| {
            line.map(|l| (i as u64 + 1, l))
                .map_err(|e| CliError::io(&path, e))
        }))
}

/// Applies `f` to every non-empty line in order: sequential fold, constant
/// memory.
pub fn for_each_jsonl<F>(path: &Path, mut f: F) -> Result<u64, CliError>
where
    F: FnMut(u64, &str) -> Result<(), CliError>,
{
    let mut count = 0;
    for item in open_lines(path)? {
        let (line_no, line) = item?;
        if line.trim().is_empty() {
            continue;
        }
        f(line_no, &line)?;
        count += 1;
    }
    Ok(count)
}

/// Maps every line to one output line, preserving input order. With more
/// than one worker, lines are processed in bounded chunks on a rayon pool;
/// the order-preserving collect keeps output identical to the sequential
/// path.
pub fn map_jsonl<F>(
    input: &Path,
    out: &mut dyn Write,
    workers: usize,
    f: F,
) -> Result<u64, CliError>
where
    F: Fn(u64, &str) -> Result<String, CliError> + Sync,
{
    let mut count = 0u64;
    if workers <= 1 {
        for item in open_lines(input)? {
            let (line_no, line) = item?;
            if line.trim().is_empty() {
                continue;
            }
            let mapped = f(line_no, &line)?;
            writeln!(out, "{mapped}").map_err(|e| CliError::io(input, e))?;
            count += 1;
        }
        return Ok(count);
    }

    const CHUNK: usize = 1024;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot build worker pool: {e}")))?;
    let mut lines = open_lines(input)?;
    loop {
        let mut chunk = Vec::with_capacity(CHUNK);
        for item in lines.by_ref().take(CHUNK) {
            let (line_no, line) = item?;
            if !line.trim().is_empty() {
                chunk.push((line_no, line));
            }
        }
        if chunk.is_empty() {
            return Ok(count);
        }
        let mapped: Vec<Result<String, CliError>> = pool.install(|| {
            use rayon::prelude::*;
            chunk.par_iter().map(|(n, l)| f(*n, l)).collect()
        });
        for m in mapped {
            writeln!(out, "{}", m?).map_err(|e| CliError::io(input, e))?;
            count += 1;
        }
    }
}
