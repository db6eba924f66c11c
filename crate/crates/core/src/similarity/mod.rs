//! Pairwise entity similarity iterated to a fixed point.
//!
//! Only candidate pairs, subjects sharing at least one predicate, are ever
//! scored. Each round recomputes every candidate from the frozen matrix of
//! the previous round, so rounds parallelize without changing the result.

mod matching;
mod measures;

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId, PredId};
use crate::weights::{DescriptorWeights, PairWeights};

pub use matching::{
    exact_total, greedy_total, max_match_score, MatchingMode, ScoreGrid, AUTO_EXACT_LIMIT,
};
pub use measures::{comparable_literals, jaccard, literal_sim, predicate_overlap};

/// How the weighted neighborhood sum is scaled before the decay floor.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairNormalization {
    /// `|L(u) ∩ L(v)| / |L(u) ∪ L(v)|`; identical entities score 1.
    #[default]
    WeightedJaccard,
    /// `1 / |L(u) ∪ L(v)|`, the printed form of the update rule.
    UnionReciprocal,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterationParams {
    pub beta: f64,
    pub max_iter: usize,
    pub ict: f64,
    pub matching: MatchingMode,
    /// Predicates used by more than this fraction of subjects do not
    /// generate candidate pairs on their own.
    pub noise_fraction: f64,
    pub normalization: PairNormalization,
}

impl Default for IterationParams {
    fn default() -> Self {
        Self {
            beta: 0.15,
            max_iter: 10,
            ict: 0.001,
            matching: MatchingMode::Auto,
            noise_fraction: 1.0,
            normalization: PairNormalization::WeightedJaccard,
        }
    }
}

impl IterationParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "beta must lie in (0, 1), got {}",
                self.beta
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max-iter must be positive".into()));
        }
        if self.ict.is_nan() || self.ict < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "ict must be non-negative, got {}",
                self.ict
            )));
        }
        if !(self.noise_fraction > 0.0 && self.noise_fraction <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "noise-fraction must lie in (0, 1], got {}",
                self.noise_fraction
            )));
        }
        Ok(())
    }
}

/// Neighbors of both pair members reached through one shared predicate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelNeighbors {
    pub predicate: PredId,
    pub left: Vec<NodeId>,
    pub right: Vec<NodeId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidatePair {
    pub u: NodeId,
    pub v: NodeId,
    /// All predicates shared by `u` and `v`, including noise predicates.
    pub common: Vec<LabelNeighbors>,
    pub union_size: usize,
}

impl CandidatePair {
    pub fn labels(&self) -> impl Iterator<Item = PredId> + '_ {
        self.common.iter().map(|l| l.predicate)
    }
}

#[inline]
fn ordered(u: NodeId, v: NodeId) -> (NodeId, NodeId) {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Sparse symmetric score table over candidate pairs.
///
/// Pairs that are not candidates read as 0; a node compared with itself
/// reads as 1.
#[derive(Clone, Debug)]
pub struct SimilarityMatrix {
    index: Arc<HashMap<(NodeId, NodeId), usize>>,
    keys: Arc<Vec<(NodeId, NodeId)>>,
    scores: Vec<f64>,
}

impl SimilarityMatrix {
    pub fn from_entries<I>(entries: I) -> Self
    where
        I: IntoIterator<Item = ((NodeId, NodeId), f64)>,
    {
        let mut keys = Vec::new();
        let mut scores = Vec::new();
        let mut index = HashMap::new();
        for ((u, v), s) in entries {
            let key = ordered(u, v);
            match index.get(&key) {
                Some(&i) => scores[i] = s,
                None => {
                    index.insert(key, keys.len());
                    keys.push(key);
                    scores.push(s);
                }
            }
        }
        Self {
            index: Arc::new(index),
            keys: Arc::new(keys),
            scores,
        }
    }

    fn with_scores(&self, scores: Vec<f64>) -> Self {
        debug_assert_eq!(scores.len(), self.keys.len());
        Self {
            index: Arc::clone(&self.index),
            keys: Arc::clone(&self.keys),
            scores,
        }
    }

    pub fn get(&self, u: NodeId, v: NodeId) -> f64 {
        if u == v {
            return 1.0;
        }
        self.index
            .get(&ordered(u, v))
            .map_or(0.0, |&i| self.scores[i])
    }

    pub fn position(&self, u: NodeId, v: NodeId) -> Option<usize> {
        self.index.get(&ordered(u, v)).copied()
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// Stored `(u, v, score)` entries with `u < v`, in candidate order.
    pub fn iter(&self) -> impl Iterator<Item = (NodeId, NodeId, f64)> + '_ {
        self.keys
            .iter()
            .zip(&self.scores)
            .map(|(&(u, v), &s)| (u, v, s))
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    /// Largest absolute entrywise difference to `other` over this matrix's
    /// stored pairs.
    pub fn max_abs_diff(&self, other: &SimilarityMatrix) -> f64 {
        self.iter()
            .map(|(u, v, s)| (s - other.get(u, v)).abs())
            .fold(0.0, f64::max)
    }
}

/// Candidate pairs of `g` and the initial matrix (1 for every candidate).
///
/// Triples are walked sorted by (predicate, subject, object); every pair of
/// subjects sharing a non-noise predicate becomes a candidate.
pub fn build_candidate_pairs(
    g: &Graph,
    params: &IterationParams,
) -> (SimilarityMatrix, Vec<CandidatePair>) {
    let mut sorted: Vec<_> = g.triples().to_vec();
    sorted.sort_by_key(|t| (t.predicate, t.subject, t.object));

    let noise_limit = params.noise_fraction * g.subject_count() as f64;
    let mut keys: BTreeSet<(NodeId, NodeId)> = BTreeSet::new();
    let mut start = 0;
    while start < sorted.len() {
        let p = sorted[start].predicate;
        let end = start + sorted[start..].partition_point(|t| t.predicate == p);
        let users = g.predicate_subject_count(p);
        if users as f64 <= noise_limit {
            let mut subjects: Vec<NodeId> = sorted[start..end].iter().map(|t| t.subject).collect();
            subjects.dedup();
            for (i, &a) in subjects.iter().enumerate() {
                for &b in &subjects[i + 1..] {
                    keys.insert(ordered(a, b));
                }
            }
        } else {
            log::debug!(
                "predicate {} used by {users} subjects treated as noise",
                g.predicate_label(p)
            );
        }
        start = end;
    }

    let pairs: Vec<CandidatePair> = keys
        .iter()
        .map(|&(u, v)| {
            let (eu, ev) = (g.out_edges(u), g.out_edges(v));
            let common: Vec<LabelNeighbors> = eu
                .iter()
                .filter_map(|(p, left)| {
                    ev.get(p).map(|right| LabelNeighbors {
                        predicate: *p,
                        left: left.iter().copied().collect(),
                        right: right.iter().copied().collect(),
                    })
                })
                .collect();
            let union_size = eu.len() + ev.len() - common.len();
            CandidatePair {
                u,
                v,
                common,
                union_size,
            }
        })
        .collect();
    let matrix = SimilarityMatrix::from_entries(keys.into_iter().map(|k| (k, 1.0)));
    (matrix, pairs)
}

#[derive(Clone, Copy, Debug)]
enum Cell {
    Fixed(f64),
    Pair(usize),
}

#[derive(Clone, Debug)]
struct Block {
    rows: usize,
    cols: usize,
    cells: Vec<Cell>,
    weight: f64,
}

#[derive(Clone, Debug)]
struct PreparedPair {
    factor: f64,
    blocks: Vec<Block>,
}

/// Everything needed to iterate: candidates, their descriptor weights and
/// the neighbor cells that do not depend on the iteration.
pub struct SimilarityEngine<'g> {
    graph: &'g Graph,
    params: IterationParams,
    weights: DescriptorWeights,
    pairs: Vec<CandidatePair>,
    initial: SimilarityMatrix,
    prepared: Vec<PreparedPair>,
}

impl<'g> SimilarityEngine<'g> {
    pub fn new(graph: &'g Graph, params: IterationParams) -> Result<Self> {
        params.validate()?;
        let weights = DescriptorWeights::build(graph);
        let (initial, pairs) = build_candidate_pairs(graph, &params);
        let prepared = pairs
            .par_iter()
            .map(|pair| prepare(graph, &weights, &initial, &params, pair))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            graph,
            params,
            weights,
            pairs,
            initial,
            prepared,
        })
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn params(&self) -> &IterationParams {
        &self.params
    }

    pub fn weights(&self) -> &DescriptorWeights {
        &self.weights
    }

    pub fn pairs(&self) -> &[CandidatePair] {
        &self.pairs
    }

    pub fn initial_matrix(&self) -> &SimilarityMatrix {
        &self.initial
    }

    /// Normalized predicate weights of candidate `k`.
    pub fn pair_weights(&self, k: usize) -> PairWeights<PredId> {
        let pair = &self.pairs[k];
        PairWeights::normalize(
            pair.labels()
                .zip(&self.prepared[k].blocks)
                .map(|(p, b)| (p, b.weight))
                .collect(),
        )
    }

    /// New score of candidate `k` computed from `prev`.
    pub fn pair_sim_step(&self, k: usize, prev: &SimilarityMatrix) -> f64 {
        let prepared = &self.prepared[k];
        let mut weighted = 0.0;
        for block in &prepared.blocks {
            let cells = block
                .cells
                .iter()
                .map(|c| match *c {
                    Cell::Fixed(s) => s,
                    Cell::Pair(i) => prev.scores[i],
                })
                .collect();
            let grid = ScoreGrid::new(block.rows, block.cols, cells);
            weighted += max_match_score(&grid, self.params.matching) * block.weight;
        }
        let beta = self.params.beta;
        ((1.0 - beta) * prepared.factor * weighted + beta).clamp(beta, 1.0)
    }

    /// One Jacobi round over all candidates.
    pub fn step(&self, prev: &SimilarityMatrix) -> SimilarityMatrix {
        let scores = (0..self.pairs.len())
            .into_par_iter()
            .map(|k| self.pair_sim_step(k, prev))
            .collect();
        prev.with_scores(scores)
    }

    pub fn run(self) -> SimilarityRun {
        let mut current = self.initial.clone();
        let mut deltas = Vec::new();
        if !self.pairs.is_empty() {
            while deltas.len() < self.params.max_iter {
                let next = self.step(&current);
                let delta = next.max_abs_diff(&current);
                current = next;
                deltas.push(delta);
                log::debug!("iteration {} max delta {delta:.6}", deltas.len());
                if delta <= self.params.ict {
                    break;
                }
            }
        }
        let converged = deltas.last().is_none_or(|&d| d <= self.params.ict);
        SimilarityRun {
            matrix: current,
            pairs: self.pairs,
            iterations: deltas.len(),
            deltas,
            converged,
            weights: self.weights,
        }
    }
}

fn prepare(
    g: &Graph,
    weights: &DescriptorWeights,
    index: &SimilarityMatrix,
    params: &IterationParams,
    pair: &CandidatePair,
) -> Result<PreparedPair> {
    let pw = weights.pair_property_weights(g, pair.u, pair.v)?;
    let common = pair.common.len() as f64;
    let union = pair.union_size as f64;
    let factor = match params.normalization {
        PairNormalization::WeightedJaccard => common / union,
        PairNormalization::UnionReciprocal => 1.0 / union,
    };
    let mut blocks = Vec::with_capacity(pair.common.len());
    for label in &pair.common {
        let mut cells = Vec::with_capacity(label.left.len() * label.right.len());
        for &x in &label.left {
            for &y in &label.right {
                cells.push(neighbor_cell(g, weights, index, pair, x, y)?);
            }
        }
        blocks.push(Block {
            rows: label.left.len(),
            cols: label.right.len(),
            cells,
            weight: pw.get(&label.predicate),
        });
    }
    Ok(PreparedPair { factor, blocks })
}

fn neighbor_cell(
    g: &Graph,
    weights: &DescriptorWeights,
    index: &SimilarityMatrix,
    pair: &CandidatePair,
    x: NodeId,
    y: NodeId,
) -> Result<Cell> {
    let (nx, ny) = (g.node(x), g.node(y));
    Ok(match (nx.is_literal(), ny.is_literal()) {
        (true, true) => Cell::Fixed(static_literal_sim(weights, pair, nx, ny)?),
        (false, false) if x == y => Cell::Fixed(1.0),
        (false, false) => match index.position(x, y) {
            Some(i) => Cell::Pair(i),
            None => Cell::Fixed(0.0),
        },
        _ => Cell::Fixed(0.0),
    })
}

fn static_literal_sim(
    weights: &DescriptorWeights,
    pair: &CandidatePair,
    x: &crate::graph::Node,
    y: &crate::graph::Node,
) -> Result<f64> {
    if !comparable_literals(x, y) {
        return Ok(0.0);
    }
    match weights.pair_literal_term_weights(pair.u, pair.v, x, y) {
        Ok(w) => Ok(literal_sim(x, y, &w)),
        // Word-free literals compare by exact lexical form.
        Err(Error::EmptyLiterals) => Ok(if x.lexical == y.lexical { 1.0 } else { 0.0 }),
        Err(e) => Err(e),
    }
}

/// Outcome of the fixed-point iteration.
#[derive(Clone, Debug)]
pub struct SimilarityRun {
    pub matrix: SimilarityMatrix,
    pub pairs: Vec<CandidatePair>,
    /// Update rounds executed; initialization is not counted.
    pub iterations: usize,
    /// Max entrywise change of each round.
    pub deltas: Vec<f64>,
    pub converged: bool,
    pub weights: DescriptorWeights,
}

pub fn run_sim_measure(g: &Graph, params: &IterationParams) -> Result<SimilarityRun> {
    Ok(SimilarityEngine::new(g, params.clone())?.run())
}
