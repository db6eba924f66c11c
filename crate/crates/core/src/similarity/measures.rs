use std::collections::BTreeMap;

use crate::graph::{Graph, Node, NodeId};
use crate::weights::{tokenize, PairWeights};

/// Weighted word-overlap similarity of two literals.
///
/// Each word contributes its total occurrence count across both lexical
/// forms times its pair weight; the score is shared mass over union mass.
/// Literals of different datatype or language never match.
pub fn literal_sim(x: &Node, y: &Node, weights: &PairWeights<String>) -> f64 {
    if !comparable_literals(x, y) {
        return 0.0;
    }
    let tx = tokenize(&x.lexical);
    let ty = tokenize(&y.lexical);
    let mut counts: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for t in &tx {
        counts.entry(t).or_default().0 += 1;
    }
    for t in &ty {
        counts.entry(t).or_default().1 += 1;
    }
    let mut shared = 0.0;
    let mut union = 0.0;
    for (token, (cx, cy)) in counts {
        let mass = (cx + cy) as f64 * weights.get(&token.to_owned());
        union += mass;
        if cx > 0 && cy > 0 {
            shared += mass;
        }
    }
    if union > 0.0 {
        shared / union
    } else {
        0.0
    }
}

/// Same datatype and same language tag.
pub fn comparable_literals(x: &Node, y: &Node) -> bool {
    x.is_literal() && y.is_literal() && x.datatype == y.datatype && x.language == y.language
}

/// |L(u) ∩ L(v)| / |L(u) ∪ L(v)|.
pub fn jaccard(g: &Graph, u: NodeId, v: NodeId) -> f64 {
    let (common, union) = predicate_overlap(g, u, v);
    if union == 0 {
        0.0
    } else {
        common as f64 / union as f64
    }
}

/// Sizes of `L(u) ∩ L(v)` and `L(u) ∪ L(v)`.
pub fn predicate_overlap(g: &Graph, u: NodeId, v: NodeId) -> (usize, usize) {
    let (eu, ev) = (g.out_edges(u), g.out_edges(v));
    let common = eu.keys().filter(|p| ev.contains_key(p)).count();
    (common, eu.len() + ev.len() - common)
}
