//! Precision of generated classes against gold `rdf:type` assertions.
//!
//! Every class is labeled with the gold type carried by most of its labeled
//! members; a member counts as correct when that label is among its own
//! gold types. Members without any gold type are ignored.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::classes::{ClassId, TypeClassMap};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

pub type GoldTypes = BTreeMap<NodeId, BTreeSet<String>>;

pub fn extract_gold(g: &Graph, type_predicate: &str) -> GoldTypes {
    let mut gold = GoldTypes::new();
    let Some(p) = g.predicate_id(type_predicate) else {
        return gold;
    };
    for &u in g.subjects() {
        let types = g.neighbors_by_predicate(u, p);
        if !types.is_empty() {
            gold.insert(u, types.iter().map(|&t| g.node(t).lexical.clone()).collect());
        }
    }
    gold
}

/// Re-keys gold types onto another graph's node ids by lexical identity.
pub fn remap_gold(from: &Graph, gold: &GoldTypes, to: &Graph) -> GoldTypes {
    gold.iter()
        .filter_map(|(&u, types)| to.lookup(from.node(u)).map(|v| (v, types.clone())))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassScore {
    pub class_id: ClassId,
    pub label: Option<String>,
    pub size: usize,
    pub labeled: usize,
    pub correct: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrecisionReport {
    pub precision: f64,
    pub labeled_members: usize,
    pub correct_members: usize,
    pub per_class: Vec<ClassScore>,
}

pub fn score_classes(classes: &TypeClassMap, gold: &GoldTypes) -> Result<PrecisionReport> {
    let mut per_class = Vec::with_capacity(classes.len());
    let (mut labeled_total, mut correct_total) = (0, 0);
    for (class_id, members) in classes.classes() {
        let labeled: Vec<&BTreeSet<String>> = members.iter().filter_map(|u| gold.get(u)).collect();
        let mut votes: BTreeMap<&str, usize> = BTreeMap::new();
        for types in &labeled {
            for t in types.iter() {
                *votes.entry(t).or_default() += 1;
            }
        }
        // Reverse so that max_by_key's last-wins picks the smallest type on ties.
        let label = votes
            .into_iter()
            .rev()
            .max_by_key(|(_, n)| *n)
            .map(|(t, _)| t.to_owned());
        let correct = match &label {
            Some(l) => labeled.iter().filter(|t| t.contains(l)).count(),
            None => 0,
        };
        labeled_total += labeled.len();
        correct_total += correct;
        per_class.push(ClassScore {
            class_id,
            label,
            size: members.len(),
            labeled: labeled.len(),
            correct,
        });
    }
    if labeled_total == 0 {
        return Err(Error::Unscorable(
            "no classed subject carries a gold type".into(),
        ));
    }
    Ok(PrecisionReport {
        precision: correct_total as f64 / labeled_total as f64,
        labeled_members: labeled_total,
        correct_members: correct_total,
        per_class,
    })
}

pub fn precision(classes: &TypeClassMap, gold: &GoldTypes) -> Result<f64> {
    score_classes(classes, gold).map(|r| r.precision)
}
