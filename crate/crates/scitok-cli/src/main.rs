//! Batch pipeline driver: detect -> train-bpe -> encode/decode -> cr-bench
//! -> pack, over JSONL corpora.
//!
//! Exit codes: 0 success, 2 bad usage, 3 unreadable or malformed input
//! (line number reported where known), 4 contract violation from a library
//! module (the module error is propagated verbatim). Every nonzero exit
//! prints one machine-readable error JSON object on stderr. Outputs are
//! written atomically (temp file + rename) and every output file gets a
//! `<output>.manifest.json` recording the resolved argv, parameters, and
//! input fingerprints. Log level comes from `SCITOK_LOG`.

mod commands;
mod io;

use clap::{Args, Parser, Subcommand};
use scitok::packer::CostModel;
use scitok::Modality;
use serde::Serialize;
use std::path::PathBuf;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input {
        path: Option<String>,
        line: Option<u64>,
        message: String,
    },
    Contract {
        line: Option<u64>,
        message: String,
    },
}

impl CliError {
    pub fn io(path: &std::path::Path, e: std::io::Error) -> CliError {
        CliError::Input {
            path: Some(path.display().to_string()),
            line: None,
            message: e.to_string(),
        }
    }

    pub fn contract(e: impl std::fmt::Display) -> CliError {
        CliError::Contract {
            line: None,
            message: e.to_string(),
        }
    }

    pub fn contract_at(line: u64, e: impl std::fmt::Display) -> CliError {
        CliError::Contract {
            line: Some(line),
            message: e.to_string(),
        }
    }

    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Input { .. } => 3,
            CliError::Contract { .. } => 4,
        }
    }

    fn to_json(&self) -> serde_json::Value {
        let (kind, message, path, line) = match self {
            CliError::Usage(m) => ("usage", m.clone(), None, None),
            CliError::Input {
                path,
                line,
                message,
            } => ("input", message.clone(), path.clone(), *line),
            CliError::Contract { line, message } => ("contract", message.clone(), None, *line),
        };
        serde_json::json!({
            "error": {
                "code": self.code(),
                "kind": kind,
                "message": message,
                "path": path,
                "line": line,
            }
        })
    }
}

#[derive(Parser)]
#[command(
    name = "scitok",
    version,
    about = "Modality-aware dynamic tokenization pipeline over JSONL corpora"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads for per-line processing; output order is always the
    /// input order
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Detect modality spans: {"id","text"} -> {"id","spans":[...]}
    Detect(DetectArgs),
    /// Train one modality's BPE vocabulary into a vocab file
    TrainBpe(TrainBpeArgs),
    /// Encode documents: {"id","text"} -> {"id","ids":[...]}
    Encode(EncodeArgs),
    /// Decode token ids: {"id","ids"} -> {"id","text"}
    Decode(DecodeArgs),
    /// Measure compression ratios, comparing vocab files when several are given
    CrBench(CrBenchArgs),
    /// Pack documents into a load-balanced training plan
    Pack(PackArgs),
}

#[derive(Args, Serialize)]
pub struct DetectArgs {
    /// Input JSONL with {"id","text"}
    #[arg(long)]
    input: PathBuf,
    /// Output JSONL path
    #[arg(long)]
    output: PathBuf,
    /// Detector config file (key=value); defaults apply when omitted
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct TrainBpeArgs {
    /// Training corpus JSONL with {"id","text"}
    #[arg(long)]
    input: PathBuf,
    /// Modality to train: TEXT, SMILES, NUCLEOTIDE or PROTEIN
    #[arg(long)]
    modality: Modality,
    /// Total token count (alphabet + merges)
    #[arg(long)]
    target_size: usize,
    /// Vocab file to create or update; other modalities in an existing file
    /// are kept
    #[arg(long)]
    out: PathBuf,
    /// Recorded in the manifest; training itself is deterministic
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Serialize)]
pub struct EncodeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Assembled vocab file
    #[arg(long)]
    vocab: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct DecodeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    vocab: PathBuf,
}

#[derive(Args, Serialize)]
pub struct CrBenchArgs {
    /// Vocab file; repeat the flag to compare tokenizers
    #[arg(long = "vocab", required = true)]
    vocab: Vec<PathBuf>,
    /// Dataset JSONL with {"id","text"}
    #[arg(long)]
    data: PathBuf,
    /// Report JSON output path
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Leave tag special tokens out of the token totals (ablation)
    #[arg(long)]
    exclude_specials: bool,
}

#[derive(Args, Serialize)]
pub struct PackArgs {
    /// JSONL with {"id","length"} or {"id","text"} (text needs --vocab)
    #[arg(long)]
    data: PathBuf,
    /// Bucket capacity in tokens
    #[arg(long)]
    capacity: u64,
    /// Window size S in buckets for within-window sorting
    #[arg(long)]
    window: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Data-parallel rank count for the balance simulation
    #[arg(long)]
    ranks: usize,
    #[arg(long, default_value = "padded-max")]
    cost_model: CostModel,
    /// Plan output path, one bucket per line
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    vocab: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SCITOK_LOG", "error"))
        .format_timestamp(None)
        .init();
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            let err = CliError::Usage(e.to_string());
            eprintln!("{}", err.to_json());
            return 2;
        }
    };
    let result = match cli.command {
        Command::Detect(args) => commands::detect(&args, cli.workers),
        Command::TrainBpe(args) => commands::train_bpe(&args),
        Command::Encode(args) => commands::encode(&args, cli.workers),
        Command::Decode(args) => commands::decode(&args, cli.workers),
        Command::CrBench(args) => commands::cr_bench(&args),
        Command::Pack(args) => commands::pack(&args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.code()
        }
    }
}
