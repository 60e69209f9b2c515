//! Variable-length balanced packing: seeded random bucket packing with
//! max-length recording, tiling-window grouping with within-window sorting,
//! and a desk-scale rank-load simulator.
//!
//! The three steps: (1) visit documents in a seed-determined random
//! permutation and pack them next-fit into capacity-bounded buckets,
//! recording each bucket's maximum document length; (2) tile the bucket list
//! into consecutive windows of `S`; (3) sort each window by recorded maximum
//! length. Data-parallel consumption takes `num_ranks` consecutive buckets
//! per step, so a window spanning several steps (`S = k * num_ranks`,
//! `k >= 2`) hands each step a run of similar peak lengths and the per-step
//! rank costs tighten around their mean. A window of exactly one step only
//! permutes buckets among the ranks of that step and leaves every per-step
//! cost multiset unchanged.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PackError {
    #[error("no documents to pack")]
    NoDocuments,
    #[error("document {id} has zero length")]
    ZeroLength { id: String },
    #[error("document {id} has length {length}, above bucket capacity {capacity}")]
    OversizeDocument {
        id: String,
        length: u64,
        capacity: u64,
    },
    #[error("window size must be at least 1")]
    ZeroWindow,
    #[error("rank count must be at least 1")]
    ZeroRanks,
}

/// A document to pack, reduced to its stable id and token count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub length: u64,
}

/// A capacity-bounded group of documents packed for one step on one rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bucket {
    pub doc_ids: Vec<String>,
    pub lengths: Vec<u64>,
    pub used: u64,
    pub capacity: u64,
    pub max_len: u64,
}

impl Bucket {
    fn new(capacity: u64) -> Bucket {
        Bucket {
            doc_ids: Vec::new(),
            lengths: Vec::new(),
            used: 0,
            capacity,
            max_len: 0,
        }
    }

    fn push(&mut self, doc: &Document) {
        self.doc_ids.push(doc.id.clone());
        self.lengths.push(doc.length);
        self.used += doc.length;
        self.max_len = self.max_len.max(doc.length);
    }

    /// Per-step cost of this bucket under a cost model.
    pub fn cost(&self, model: CostModel) -> u64 {
        match model {
            // every document padded to the bucket's max length
            CostModel::PaddedMax => self.max_len * self.doc_ids.len() as u64,
            CostModel::QuadraticAttention => self.lengths.iter().map(|&l| l * l).sum(),
        }
    }
}

/// Workload model for the rank-load simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CostModel {
    /// Padded batching: cost = max_len x document count.
    PaddedMax,
    /// Variable-length attention: cost = sum of squared lengths.
    QuadraticAttention,
}

impl std::str::FromStr for CostModel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "padded-max" => Ok(CostModel::PaddedMax),
            "quad-attn" => Ok(CostModel::QuadraticAttention),
            other => Err(format!(
                "unknown cost model {other:?} (expected padded-max or quad-attn)"
            )),
        }
    }
}

/// An ordered bucket list with the parameters that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct PackingPlan {
    pub buckets: Vec<Bucket>,
    /// Window size S used for within-window sorting (1 = unsorted order).
    pub window: usize,
    pub seed: u64,
    pub cost_model: CostModel,
}

/// Packs documents into buckets: a seeded uniform random permutation,
/// filled next-fit (a new bucket opens whenever the current one cannot take
/// the document). Deterministic given `(docs, capacity, seed)`.
pub fn pack(docs: &[Document], capacity: u64, seed: u64) -> Result<Vec<Bucket>, PackError> {
    if docs.is_empty() {
        return Err(PackError::NoDocuments);
    }
    for doc in docs {
        if doc.length == 0 {
            return Err(PackError::ZeroLength { id: doc.id.clone() });
        }
        if doc.length > capacity {
            return Err(PackError::OversizeDocument {
                id: doc.id.clone(),
                length: doc.length,
                capacity,
            });
        }
    }

    let mut order: Vec<usize> = (0..docs.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let mut buckets = Vec::new();
    let mut current = Bucket::new(capacity);
    for &i in &order {
        let doc = &docs[i];
        if current.used + doc.length > capacity {
            buckets.push(std::mem::replace(&mut current, Bucket::new(capacity)));
        }
        current.push(doc);
    }
    buckets.push(current);
    Ok(buckets)
}

/// Tiles `buckets` into consecutive groups of `window` (the last group may
/// be smaller) and sorts each group ascending by `max_len`, ties keeping
/// their original order. Group order is preserved.
pub fn window_sort(mut buckets: Vec<Bucket>, window: usize) -> Result<Vec<Bucket>, PackError> {
    if window == 0 {
        return Err(PackError::ZeroWindow);
    }
    for group in buckets.chunks_mut(window) {
        group.sort_by_key(|b| b.max_len); // stable
    }
    Ok(buckets)
}

/// The full strategy: pack, then window-sort with window `window`.
/// `window = 1` leaves the random packing order untouched, which is the
/// unsorted baseline the balance property is measured against.
pub fn build_plan(
    docs: &[Document],
    capacity: u64,
    seed: u64,
    window: usize,
    cost_model: CostModel,
) -> Result<PackingPlan, PackError> {
    let buckets = window_sort(pack(docs, capacity, seed)?, window)?;
    Ok(PackingPlan {
        buckets,
        window,
        seed,
        cost_model,
    })
}

/// Load-balance statistics from a simulated data-parallel consumption.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BalanceStats {
    pub steps: usize,
    /// Mean over steps of (max rank cost / mean rank cost).
    pub mean_imbalance: f64,
    pub max_imbalance: f64,
    pub per_rank_totals: Vec<u64>,
}

/// Consumes the plan's buckets in order, `num_ranks` at a time (one bucket
/// per rank per step; the final step may be partial), and measures per-step
/// imbalance `max cost / mean cost` under the plan's cost model.
pub fn simulate_ranks(plan: &PackingPlan, num_ranks: usize) -> Result<BalanceStats, PackError> {
    if num_ranks == 0 {
        return Err(PackError::ZeroRanks);
    }
    let mut per_rank_totals = vec![0u64; num_ranks];
    let mut mean_imbalance = 0.0;
    let mut max_imbalance = 0.0f64;
    let mut steps = 0usize;
    for step in plan.buckets.chunks(num_ranks) {
        let costs: Vec<u64> = step.iter().map(|b| b.cost(plan.cost_model)).collect();
        for (rank, &cost) in costs.iter().enumerate() {
            per_rank_totals[rank] += cost;
        }
        let max = *costs.iter().max().expect("non-empty step") as f64;
        let mean = costs.iter().sum::<u64>() as f64 / costs.len() as f64;
        let imbalance = max / mean;
        mean_imbalance += imbalance;
        max_imbalance = max_imbalance.max(imbalance);
        steps += 1;
    }
    mean_imbalance /= steps as f64;
    Ok(BalanceStats {
        steps,
        mean_imbalance,
        max_imbalance,
        per_rank_totals,
    })
}
