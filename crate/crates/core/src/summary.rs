//! Summary graph construction and quality metrics.
//!
//! The summary graph has one vertex per type class and an edge `(c1, p, c2)`
//! whenever some member of `c1` reaches a member of `c2` through `p`. Its
//! quality is judged by three numbers: the mean class predicate stability
//! (CPS) of its edges, the fraction of subjects that ended up in a
//! non-singleton class, and the summed per-class RMSD of member property
//! counts around the class centroid. Favorability combines them, and
//! [`find_optimum_epsilon`] scans thresholds to maximize it.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::sync::Once;

use rayon::prelude::*;
use serde::Serialize;

use crate::classes::{create_classes, ClassId, TypeClassMap};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId, PredId};
use crate::similarity::{CandidatePair, SimilarityMatrix};

/// Offset in the favorability denominator keeping it finite at zero RMSD.
pub const RMSD_OFFSET: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryEdge {
    pub source: ClassId,
    pub predicate: PredId,
    pub target: ClassId,
    pub cps: f64,
}

#[derive(Clone, Debug)]
pub struct SummaryGraph {
    pub classes: TypeClassMap,
    /// Sorted by (source, predicate, target).
    pub edges: Vec<SummaryEdge>,
    /// Predicates leading from class members to literals or unclassed nodes.
    pub datatype_properties: BTreeMap<ClassId, BTreeSet<PredId>>,
}

pub fn build_summary_graph(g: &Graph, classes: TypeClassMap) -> SummaryGraph {
    let mut witnesses: BTreeMap<(ClassId, PredId, ClassId), HashSet<NodeId>> = BTreeMap::new();
    let mut datatype_properties: BTreeMap<ClassId, BTreeSet<PredId>> = BTreeMap::new();
    for t in g.triples() {
        let Some(c1) = classes.class_of(t.subject) else {
            continue;
        };
        match classes.class_of(t.object) {
            Some(c2) => {
                witnesses
                    .entry((c1, t.predicate, c2))
                    .or_default()
                    .insert(t.subject);
            }
            None => {
                datatype_properties.entry(c1).or_default().insert(t.predicate);
            }
        }
    }
    let edges = witnesses
        .into_iter()
        .map(|((source, predicate, target), subjects)| SummaryEdge {
            source,
            predicate,
            target,
            cps: subjects.len() as f64 / classes.members(source).len() as f64,
        })
        .collect();
    SummaryGraph {
        classes,
        edges,
        datatype_properties,
    }
}

/// Fraction of `c1`'s members with at least one `p`-triple into `c2`.
pub fn cps_edge(g: &Graph, classes: &TypeClassMap, c1: ClassId, p: PredId, c2: ClassId) -> f64 {
    let members = classes.members(c1);
    let linked = members
        .iter()
        .filter(|&&u| {
            g.neighbors_by_predicate(u, p)
                .iter()
                .any(|&v| classes.class_of(v) == Some(c2))
        })
        .count();
    linked as f64 / members.len() as f64
}

/// Mean edge CPS; an edgeless summary counts as fully stable.
pub fn cps_graph(sg: &SummaryGraph) -> f64 {
    if sg.edges.is_empty() {
        static WARNED: Once = Once::new();
        WARNED.call_once(|| log::warn!("summary graph has no edges; stability defaults to 1.0"));
        return 1.0;
    }
    sg.edges.iter().map(|e| e.cps).sum::<f64>() / sg.edges.len() as f64
}

/// Root mean square of the members' Manhattan distances to the class
/// centroid, over predicate-count coordinates.
pub fn class_rmsd(g: &Graph, members: &[NodeId]) -> f64 {
    if members.len() < 2 {
        return 0.0;
    }
    let n = members.len() as f64;
    let mut centroid: BTreeMap<PredId, f64> = BTreeMap::new();
    for &u in members {
        for (&p, objects) in g.out_edges(u) {
            *centroid.entry(p).or_default() += objects.len() as f64;
        }
    }
    for c in centroid.values_mut() {
        *c /= n;
    }
    let sum_sq: f64 = members
        .iter()
        .map(|&u| {
            let edges = g.out_edges(u);
            let d: f64 = centroid
                .iter()
                .map(|(p, c)| {
                    let x = edges.get(p).map_or(0.0, |o| o.len() as f64);
                    (x - c).abs()
                })
                .sum();
            d * d
        })
        .sum();
    (sum_sq / n).sqrt()
}

/// Sum of per-class RMSD values.
pub fn rmsd(g: &Graph, classes: &TypeClassMap) -> f64 {
    classes.classes().map(|(_, m)| class_rmsd(g, m)).sum()
}

/// Fraction of subjects placed in a class with at least two members.
pub fn typification_rate(g: &Graph, classes: &TypeClassMap) -> f64 {
    let total = g.subject_count();
    if total == 0 {
        return 0.0;
    }
    let typed: usize = classes
        .classes()
        .filter(|(_, m)| m.len() >= 2)
        .map(|(_, m)| m.len())
        .sum();
    typed as f64 / total as f64
}

pub fn favorability_score(stability: f64, typification_rate: f64, rmsd: f64) -> f64 {
    stability * typification_rate / (rmsd + RMSD_OFFSET)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FavorabilityReport {
    pub epsilon: f64,
    pub stability: f64,
    pub typification_rate: f64,
    pub rmsd: f64,
    pub favorability: f64,
}

impl FavorabilityReport {
    pub fn of(g: &Graph, summary: &SummaryGraph, epsilon: f64) -> Self {
        let stability = cps_graph(summary);
        let typification_rate = typification_rate(g, &summary.classes);
        let rmsd = rmsd(g, &summary.classes);
        Self {
            epsilon,
            stability,
            typification_rate,
            rmsd,
            favorability: favorability_score(stability, typification_rate, rmsd),
        }
    }
}

/// Builds the summary for `classes` and scores it.
pub fn favorability(g: &Graph, classes: &TypeClassMap, epsilon: f64) -> FavorabilityReport {
    let summary = build_summary_graph(g, classes.clone());
    FavorabilityReport::of(g, &summary, epsilon)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdSearchParams {
    pub min_eps: f64,
    pub max_eps: f64,
    pub tries: usize,
    /// Epsilon convergence threshold: refine only while the best
    /// favorability moved by more than this.
    pub ect: f64,
}

impl Default for ThresholdSearchParams {
    fn default() -> Self {
        Self {
            min_eps: 0.0,
            max_eps: 1.0,
            tries: 10,
            ect: 0.9,
        }
    }
}

impl ThresholdSearchParams {
    pub fn validate(&self) -> Result<()> {
        let in_unit = |x: f64| (0.0..=1.0).contains(&x);
        if !in_unit(self.min_eps) || !in_unit(self.max_eps) {
            return Err(Error::InvalidParameter(
                "epsilon bounds must lie in [0, 1]".into(),
            ));
        }
        if self.min_eps >= self.max_eps {
            return Err(Error::InvalidParameter(format!(
                "min-eps ({}) must be below max-eps ({})",
                self.min_eps, self.max_eps
            )));
        }
        if self.tries < 2 {
            return Err(Error::InvalidParameter("tries must be at least 2".into()));
        }
        if self.ect.is_nan() || self.ect < 0.0 {
            return Err(Error::InvalidParameter("ect must be non-negative".into()));
        }
        Ok(())
    }
}

/// Refinement stops once the scanned interval is narrower than this.
pub const MIN_SEARCH_WIDTH: f64 = 1e-4;

#[derive(Clone, Debug)]
pub struct ThresholdSearch {
    pub epsilon: f64,
    pub best: FavorabilityReport,
    /// Every evaluated grid point, level by level.
    pub trace: Vec<FavorabilityReport>,
    pub levels: usize,
}

/// Grid scan of ε with recursive refinement around the best point.
///
/// Each level evaluates `tries + 1` evenly spaced thresholds. While the best
/// favorability improved by more than `ect` over the previous level, the
/// interval `[best - step, best + step]` is rescanned with half the tries.
/// Equal favorability keeps the smaller threshold.
pub fn find_optimum_epsilon(
    g: &Graph,
    similarity: &SimilarityMatrix,
    pairs: &[CandidatePair],
    params: &ThresholdSearchParams,
) -> Result<ThresholdSearch> {
    params.validate()?;
    let subjects = g.subjects();
    let evaluate = |eps: f64| -> Result<FavorabilityReport> {
        let classes = create_classes(subjects, similarity, pairs, eps)?;
        Ok(favorability(g, &classes, eps))
    };

    let mut trace = Vec::new();
    let mut best_favor = 0.0;
    let mut best_eps = params.min_eps;
    let mut best_report = None;
    let (mut lo, mut hi, mut tries) = (params.min_eps, params.max_eps, params.tries);
    let mut levels = 0;
    loop {
        levels += 1;
        let step = (hi - lo) / tries as f64;
        let grid: Vec<f64> = (0..=tries)
            .map(|i| if i == tries { hi } else { lo + step * i as f64 })
            .collect();
        let reports = grid
            .par_iter()
            .map(|&eps| evaluate(eps))
            .collect::<Result<Vec<_>>>()?;

        let prev_favor = best_favor;
        for r in &reports {
            let better = r.favorability > best_favor
                || (r.favorability == best_favor && r.epsilon < best_eps);
            if better || best_report.is_none() && r.epsilon == best_eps {
                best_favor = r.favorability;
                best_eps = r.epsilon;
                best_report = Some(*r);
            }
        }
        trace.extend(reports);

        let improvement = (best_favor - prev_favor).abs();
        log::debug!(
            "epsilon level {levels}: [{lo:.4}, {hi:.4}] x{tries}, best {best_eps:.4} favorability {best_favor:.4}"
        );
        let next_tries = tries / 2;
        if improvement <= params.ect || next_tries < 2 || hi - lo < MIN_SEARCH_WIDTH {
            break;
        }
        lo = (best_eps - step).max(params.min_eps);
        hi = (best_eps + step).min(params.max_eps);
        tries = next_tries;
    }

    let best = match best_report {
        Some(r) => r,
        None => evaluate(best_eps)?,
    };
    Ok(ThresholdSearch {
        epsilon: best_eps,
        best,
        trace,
        levels,
    })
}

/// Node-to-class lookup as a plain map, handy for exports.
pub fn class_index(classes: &TypeClassMap) -> HashMap<NodeId, ClassId> {
    classes
        .classes()
        .flat_map(|(c, m)| m.iter().map(move |&u| (u, c)))
        .collect()
}
