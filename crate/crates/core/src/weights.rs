//! tf-idf importance weights for entity descriptors.
//!
//! Two kinds of descriptors are weighted: the predicates a subject uses and
//! the words occurring in its literal neighbors. Weights are computed once
//! from the static graph and then normalized per entity pair so that the
//! descriptors shared by a pair sum to one.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::graph::{Graph, Node, NodeId, PredId};

/// Lowercases and splits on runs of non-alphanumeric characters.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// f(p, u): number of triples with subject `u` and predicate `p`.
pub fn raw_frequency(g: &Graph, p: PredId, u: NodeId) -> usize {
    g.neighbors_by_predicate(u, p).len()
}

/// tf(p, u) = f(p, u) / Σ_q f(q, u).
pub fn term_freq(g: &Graph, p: PredId, u: NodeId) -> Result<f64> {
    let total: usize = g.out_edges(u).values().map(|o| o.len()).sum();
    if total == 0 {
        return Err(Error::NoTriples(g.node(u).label()));
    }
    Ok(raw_frequency(g, p, u) as f64 / total as f64)
}

/// idf(p) = ln(#subjects / #subjects using p).
pub fn inverse_doc_freq(g: &Graph, p: PredId) -> Result<f64> {
    let users = g.predicate_subject_count(p);
    if users == 0 {
        let label = if p.index() < g.predicate_count() {
            g.predicate_label(p).to_owned()
        } else {
            format!("#{}", p.0)
        };
        return Err(Error::UnusedPredicate(label));
    }
    Ok((g.subject_count() as f64 / users as f64).ln())
}

/// Normalized weights of the descriptors shared by one entity pair.
#[derive(Clone, Debug, PartialEq)]
pub struct PairWeights<K: Ord> {
    weights: BTreeMap<K, f64>,
}

impl<K: Ord + Clone> PairWeights<K> {
    /// Scales raw non-negative scores to sum to one. When every raw score is
    /// zero the weights fall back to uniform.
    pub fn normalize(raw: BTreeMap<K, f64>) -> Self {
        let total: f64 = raw.values().sum();
        let weights = if total > 0.0 {
            raw.into_iter().map(|(k, w)| (k, w / total)).collect()
        } else {
            let uniform = 1.0 / raw.len().max(1) as f64;
            raw.into_keys().map(|k| (k, uniform)).collect()
        };
        Self { weights }
    }

    pub fn get(&self, key: &K) -> f64 {
        self.weights.get(key).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, f64)> {
        self.weights.iter().map(|(k, &w)| (k, w))
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.weights.values().sum()
    }
}

/// tfidf(p, u) for every subject `u` and every `p ∈ L(u)`.
#[derive(Clone, Debug, Default)]
pub struct PropertyWeightTable {
    scores: HashMap<(NodeId, PredId), f64>,
}

impl PropertyWeightTable {
    pub fn build(g: &Graph) -> Self {
        let idf: Vec<f64> = g
            .predicates()
            .map(|p| inverse_doc_freq(g, p).unwrap_or(0.0))
            .collect();
        let mut scores = HashMap::new();
        for &u in g.subjects() {
            let edges = g.out_edges(u);
            let total: usize = edges.values().map(|o| o.len()).sum();
            for (&p, objects) in edges {
                let tf = objects.len() as f64 / total as f64;
                scores.insert((u, p), tf * idf[p.index()]);
            }
        }
        Self { scores }
    }

    /// Zero whenever `p ∉ L(u)`.
    pub fn tfidf(&self, u: NodeId, p: PredId) -> f64 {
        self.scores.get(&(u, p)).copied().unwrap_or(0.0)
    }
}

/// tfidf of each word in the bag formed by a subject's literal neighbors.
///
/// Each subject's bag is one document; idf counts the subjects whose bag
/// contains the word.
#[derive(Clone, Debug, Default)]
pub struct TermWeightTable {
    scores: HashMap<NodeId, HashMap<String, f64>>,
}

impl TermWeightTable {
    pub fn build(g: &Graph) -> Self {
        let mut bags: Vec<(NodeId, HashMap<String, usize>)> = Vec::new();
        let mut doc_freq: HashMap<String, usize> = HashMap::new();
        for &u in g.subjects() {
            let mut bag: HashMap<String, usize> = HashMap::new();
            for objects in g.out_edges(u).values() {
                for &o in objects {
                    let node = g.node(o);
                    if node.is_literal() {
                        for token in tokenize(&node.lexical) {
                            *bag.entry(token).or_default() += 1;
                        }
                    }
                }
            }
            if bag.is_empty() {
                continue;
            }
            for token in bag.keys() {
                *doc_freq.entry(token.clone()).or_default() += 1;
            }
            bags.push((u, bag));
        }
        let docs = bags.len() as f64;
        let scores = bags
            .into_iter()
            .map(|(u, bag)| {
                let total: usize = bag.values().sum();
                let weights = bag
                    .into_iter()
                    .map(|(token, count)| {
                        let idf = (docs / doc_freq[&token] as f64).ln();
                        let w = count as f64 / total as f64 * idf;
                        (token, w)
                    })
                    .collect();
                (u, weights)
            })
            .collect();
        Self { scores }
    }

    pub fn tfidf(&self, u: NodeId, token: &str) -> f64 {
        self.scores
            .get(&u)
            .and_then(|bag| bag.get(token))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn contains(&self, u: NodeId, token: &str) -> bool {
        self.scores.get(&u).is_some_and(|bag| bag.contains_key(token))
    }
}

/// Both weight tables for one graph.
#[derive(Clone, Debug, Default)]
pub struct DescriptorWeights {
    pub properties: PropertyWeightTable,
    pub terms: TermWeightTable,
}

impl DescriptorWeights {
    pub fn build(g: &Graph) -> Self {
        Self {
            properties: PropertyWeightTable::build(g),
            terms: TermWeightTable::build(g),
        }
    }

    /// w_j ∝ tfidf(j, u) + tfidf(j, v) over `j ∈ L(u) ∩ L(v)`.
    pub fn pair_property_weights(
        &self,
        g: &Graph,
        u: NodeId,
        v: NodeId,
    ) -> Result<PairWeights<PredId>> {
        let (eu, ev) = (g.out_edges(u), g.out_edges(v));
        let raw: BTreeMap<PredId, f64> = eu
            .keys()
            .filter(|p| ev.contains_key(p))
            .map(|&p| (p, self.properties.tfidf(u, p) + self.properties.tfidf(v, p)))
            .collect();
        if raw.is_empty() {
            return Err(Error::NoCommonPredicate(
                g.node(u).label(),
                g.node(v).label(),
            ));
        }
        Ok(PairWeights::normalize(raw))
    }

    /// Word weights over the token union of two literal neighbors `x` (of
    /// `u`) and `y` (of `v`).
    pub fn pair_literal_term_weights(
        &self,
        u: NodeId,
        v: NodeId,
        x: &Node,
        y: &Node,
    ) -> Result<PairWeights<String>> {
        let mut raw: BTreeMap<String, f64> = BTreeMap::new();
        for token in tokenize(&x.lexical).into_iter().chain(tokenize(&y.lexical)) {
            raw.entry(token).or_insert(0.0);
        }
        if raw.is_empty() {
            return Err(Error::EmptyLiterals);
        }
        for (token, w) in raw.iter_mut() {
            *w = self.terms.tfidf(u, token) + self.terms.tfidf(v, token);
        }
        Ok(PairWeights::normalize(raw))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{parse_ntriples_str, ParseOptions};

    fn graph(text: &str) -> Graph {
        parse_ntriples_str(text, ParseOptions { strict: true }).unwrap()
    }

    fn id(g: &Graph, iri: &str) -> NodeId {
        g.lookup_iri(iri).unwrap()
    }

    fn pred(g: &Graph, iri: &str) -> PredId {
        g.predicate_id(iri).unwrap()
    }

    #[test]
    fn tokenize_lowercases_and_splits() {
        assert_eq!(tokenize("Pulmonary valve-repair!"), ["pulmonary", "valve", "repair"]);
        assert!(tokenize("  --- ").is_empty());
        assert_eq!(tokenize("xxx-xxx-xxxx"), ["xxx", "xxx", "xxxx"]);
    }

    #[test]
    fn raw_frequency_counts_distinct_objects() {
        let g = graph(
            "<u> <p> <a> .\n<u> <p> <b> .\n<u> <p> <c> .\n<u> <p> <d> .\n<u> <q> <a> .\n",
        );
        assert_eq!(raw_frequency(&g, pred(&g, "p"), id(&g, "u")), 4);
        assert_eq!(raw_frequency(&g, pred(&g, "q"), id(&g, "u")), 1);
        assert_eq!(raw_frequency(&g, pred(&g, "q"), id(&g, "a")), 0);
    }

    #[test]
    fn term_freq_values() {
        let g = graph("<u> <p1> <a> .\n<u> <p1> <b> .\n<u> <p1> <c> .\n<u> <p2> <a> .\n<w> <p1> <a> .\n");
        assert_eq!(term_freq(&g, pred(&g, "p1"), id(&g, "u")).unwrap(), 0.75);
        assert_eq!(term_freq(&g, pred(&g, "p2"), id(&g, "u")).unwrap(), 0.25);
        assert_eq!(term_freq(&g, pred(&g, "p1"), id(&g, "w")).unwrap(), 1.0);
        assert!(matches!(
            term_freq(&g, pred(&g, "p1"), id(&g, "a")),
            Err(Error::NoTriples(_))
        ));
    }

    #[test]
    fn idf_values() {
        let mut text = String::new();
        for i in 0..10 {
            text.push_str(&format!("<s{i}> <all> <x> .\n"));
        }
        text.push_str("<s0> <rare> <x> .\n<s1> <rare> <x> .\n<s2> <one> <x> .\n");
        let g = graph(&text);
        assert_eq!(inverse_doc_freq(&g, pred(&g, "all")).unwrap(), 0.0);
        assert!((inverse_doc_freq(&g, pred(&g, "rare")).unwrap() - 5f64.ln()).abs() < 1e-12);
        assert!((inverse_doc_freq(&g, pred(&g, "one")).unwrap() - 10f64.ln()).abs() < 1e-12);
        assert!(matches!(
            inverse_doc_freq(&g, PredId(99)),
            Err(Error::UnusedPredicate(_))
        ));
    }

    #[test]
    fn single_common_predicate_gets_full_weight() {
        let g = graph("<a> <p> <x> .\n<a> <q> <x> .\n<b> <p> <y> .\n<c> <r> <y> .\n");
        let w = DescriptorWeights::build(&g);
        let pw = w.pair_property_weights(&g, id(&g, "a"), id(&g, "b")).unwrap();
        assert_eq!(pw.len(), 1);
        assert_eq!(pw.get(&pred(&g, "p")), 1.0);
    }

    #[test]
    fn no_common_predicate_is_an_error() {
        let g = graph("<a> <p> <x> .\n<b> <q> <y> .\n");
        let w = DescriptorWeights::build(&g);
        assert!(matches!(
            w.pair_property_weights(&g, id(&g, "a"), id(&g, "b")),
            Err(Error::NoCommonPredicate(..))
        ));
    }

    #[test]
    fn universal_predicates_fall_back_to_uniform() {
        let g = graph("<a> <p> <x> .\n<a> <q> <x> .\n<b> <p> <y> .\n<b> <q> <y> .\n");
        let w = DescriptorWeights::build(&g);
        let pw = w.pair_property_weights(&g, id(&g, "a"), id(&g, "b")).unwrap();
        assert_eq!(pw.get(&pred(&g, "p")), 0.5);
        assert_eq!(pw.get(&pred(&g, "q")), 0.5);
    }

    #[test]
    fn universal_predicate_gets_zero_when_others_are_distinctive() {
        let g = graph(
            "<a> <name> \"a\" .\n<a> <p> <x> .\n<b> <name> \"b\" .\n<b> <p> <y> .\n<c> <name> \"c\" .\n",
        );
        let w = DescriptorWeights::build(&g);
        let pw = w.pair_property_weights(&g, id(&g, "a"), id(&g, "b")).unwrap();
        assert_eq!(pw.get(&pred(&g, "name")), 0.0);
        assert_eq!(pw.get(&pred(&g, "p")), 1.0);
    }

    #[test]
    fn identical_single_token_literals() {
        let g = graph("<a> <p> \"native\" .\n<b> <p> \"native\" .\n<c> <p> \"other\" .\n");
        let w = DescriptorWeights::build(&g);
        let x = Node::literal("native");
        let pw = w
            .pair_literal_term_weights(id(&g, "a"), id(&g, "b"), &x, &x)
            .unwrap();
        assert_eq!(pw.len(), 1);
        assert_eq!(pw.get(&"native".to_string()), 1.0);
    }

    #[test]
    fn empty_literals_are_undefined() {
        let g = graph("<a> <p> \"--\" .\n<b> <p> \"\" .\n");
        let w = DescriptorWeights::build(&g);
        let err = w.pair_literal_term_weights(
            id(&g, "a"),
            id(&g, "b"),
            &Node::literal("--"),
            &Node::literal(""),
        );
        assert!(matches!(err, Err(Error::EmptyLiterals)));
    }

    // Three subjects all using "valve": df = 3 of 3 docs, so idf = 0 and the
    // shared word carries no mass before normalization.
    #[test]
    fn corpus_wide_token_gets_zero_weight() {
        let g = graph(
            "<a> <d> \"cardiac valve\" .\n<b> <d> \"mitral valve\" .\n<c> <d> \"valve\" .\n",
        );
        let w = DescriptorWeights::build(&g);
        let (a, b) = (id(&g, "a"), id(&g, "b"));
        assert_eq!(w.terms.tfidf(a, "valve"), 0.0);
        // cardiac: tf 1/2, idf ln 3; mitral likewise for b.
        let expected = 0.5 * 3f64.ln();
        assert!((w.terms.tfidf(a, "cardiac") - expected).abs() < 1e-12);
        let pw = w
            .pair_literal_term_weights(
                a,
                b,
                &Node::literal("cardiac valve"),
                &Node::literal("mitral valve"),
            )
            .unwrap();
        assert_eq!(pw.get(&"valve".to_string()), 0.0);
        assert!((pw.get(&"cardiac".to_string()) - 0.5).abs() < 1e-12);
        assert!((pw.get(&"mitral".to_string()) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rare_words_outweigh_common_ones() {
        let mut text = String::from(
            "<p236> <desc> \"pulmonary valve repair\" .\n<p104> <desc> \"mitral valve repair\" .\n",
        );
        // "valve" is everywhere, "repair" is fairly common, "pulmonary" is rare.
        for i in 0..6 {
            text.push_str(&format!("<v{i}> <desc> \"aortic valve replacement {i}\" .\n"));
        }
        for i in 0..3 {
            text.push_str(&format!("<r{i}> <desc> \"tricuspid valve repair\" .\n"));
        }
        let g = graph(&text);
        let w = DescriptorWeights::build(&g);
        let pw = w
            .pair_literal_term_weights(
                id(&g, "p236"),
                id(&g, "p104"),
                &Node::literal("pulmonary valve repair"),
                &Node::literal("mitral valve repair"),
            )
            .unwrap();
        let get = |t: &str| pw.get(&t.to_string());
        assert!(get("pulmonary") > get("repair"));
        assert!(get("repair") > get("valve"));
        assert!((pw.sum() - 1.0).abs() < 1e-9);
    }
}
