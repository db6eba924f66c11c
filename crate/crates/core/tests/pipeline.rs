mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rdf_summarize::classes::{create_classes, TypeClassMap};
use rdf_summarize::eval::{extract_gold, precision, score_classes};
use rdf_summarize::graph::{parse_ntriples_str, ParseOptions, RDF_TYPE};
use rdf_summarize::naming::name_classes;
use rdf_summarize::similarity::{run_sim_measure, CandidatePair, IterationParams, SimilarityMatrix};
use rdf_summarize::summary::{
    build_summary_graph, class_rmsd, cps_edge, favorability, favorability_score,
    find_optimum_epsilon, ThresholdSearchParams,
};
use rdf_summarize::{synthetic, Graph, NodeId};

fn parse(text: &str) -> Graph {
    parse_ntriples_str(text, ParseOptions { strict: true }).unwrap()
}

fn pair(u: u32, v: u32) -> CandidatePair {
    CandidatePair {
        u: NodeId(u),
        v: NodeId(v),
        common: Vec::new(),
        union_size: 1,
    }
}

fn random_matrix() -> impl Strategy<Value = (Vec<NodeId>, SimilarityMatrix, Vec<CandidatePair>)> {
    (2u32..12)
        .prop_flat_map(|n| {
            let all: Vec<(u32, u32)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
            (Just(n), prop::sample::subsequence(all.clone(), 0..=all.len()))
        })
        .prop_flat_map(|(n, keys)| {
            let len = keys.len();
            (Just(n), Just(keys), prop::collection::vec(0.0f64..=1.0, len))
        })
        .prop_map(|(n, keys, scores)| {
            let subjects = (0..n).map(NodeId).collect();
            let pairs = keys.iter().map(|&(u, v)| pair(u, v)).collect();
            let matrix = SimilarityMatrix::from_entries(
                keys.iter().zip(scores).map(|(&(u, v), s)| ((NodeId(u), NodeId(v)), s)),
            );
            (subjects, matrix, pairs)
        })
}

proptest! {
    #[test]
    fn partition_ignores_pair_order((subjects, matrix, pairs) in random_matrix(), eps in 0.0f64..=1.0, seed in any::<u64>()) {
        let reference = create_classes(&subjects, &matrix, &pairs, eps).unwrap();
        let mut shuffled = pairs.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let mut subj = subjects.clone();
        subj.reverse();
        prop_assert_eq!(create_classes(&subj, &matrix, &shuffled, eps).unwrap(), reference);
    }

    #[test]
    fn larger_threshold_coarsens((subjects, matrix, pairs) in random_matrix(), a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let fine = create_classes(&subjects, &matrix, &pairs, lo).unwrap();
        let coarse = create_classes(&subjects, &matrix, &pairs, hi).unwrap();
        prop_assert!(fine.refines(&coarse));
        prop_assert_eq!(fine.node_count(), subjects.len());
    }
}

#[test]
fn zero_threshold_keeps_singletons() {
    let g = parse(&synthetic::planted_types(2, 5, 1));
    let run = run_sim_measure(&g, &IterationParams::default()).unwrap();
    let classes = create_classes(g.subjects(), &run.matrix, &run.pairs, 0.0).unwrap();
    assert_eq!(classes.len(), g.subject_count());
    let report = favorability(&g, &classes, 0.0);
    assert_eq!(report.typification_rate, 0.0);
    assert_eq!(report.favorability, 0.0);
}

#[test]
fn full_threshold_merges_connected_candidates() {
    let g = parse(&synthetic::planted_types(3, 4, 2));
    let run = run_sim_measure(&g, &IterationParams::default()).unwrap();
    // Every pair shares `label`, so all subjects end up together.
    let classes = create_classes(g.subjects(), &run.matrix, &run.pairs, 1.0).unwrap();
    assert_eq!(classes.len(), 1);
}

#[test]
fn fully_linked_classes_have_full_cps() {
    let mut text = String::new();
    for i in 0..4 {
        text.push_str(&format!("<s{i}> <p> <t{}> .\n<t{i}> <q> \"x\" .\n", i % 2));
    }
    let g = parse(&text);
    let ids = |prefix: &str| -> Vec<NodeId> {
        (0..4).filter_map(|i| g.lookup_iri(&format!("{prefix}{i}"))).filter(|&u| g.is_subject(u)).collect()
    };
    let classes = TypeClassMap::from_groups([ids("s"), ids("t")]);
    let sg = build_summary_graph(&g, classes.clone());
    assert_eq!(sg.edges.len(), 1);
    let e = &sg.edges[0];
    assert_eq!(e.cps, 1.0);
    assert_eq!(cps_edge(&g, &classes, e.source, e.predicate, e.target), 1.0);
}

#[test]
fn summary_edges_match_cps_recount() {
    let g = parse(&synthetic::lubm_like(40, 3));
    let run = run_sim_measure(&g, &IterationParams::default()).unwrap();
    for eps in [0.1, 0.3, 0.6] {
        let classes = create_classes(g.subjects(), &run.matrix, &run.pairs, eps).unwrap();
        let sg = build_summary_graph(&g, classes.clone());
        for e in &sg.edges {
            let recount = cps_edge(&g, &classes, e.source, e.predicate, e.target);
            assert!((e.cps - recount).abs() < 1e-12);
            assert!(e.cps > 0.0 && e.cps <= 1.0);
        }
        let r = favorability(&g, &classes, eps);
        assert_eq!(r.favorability, favorability_score(r.stability, r.typification_rate, r.rmsd));
    }
}

#[test]
fn identical_members_have_zero_rmsd() {
    let g = parse("<a> <p> <x> .\n<a> <q> \"1\" .\n<b> <p> <y> .\n<b> <q> \"2\" .\n<c> <p> <x> .\n");
    let members: Vec<NodeId> = ["a", "b"].iter().map(|n| g.lookup_iri(n).unwrap()).collect();
    assert_eq!(class_rmsd(&g, &members), 0.0);
    let mixed: Vec<NodeId> = ["a", "c"].iter().map(|n| g.lookup_iri(n).unwrap()).collect();
    assert!(class_rmsd(&g, &mixed) > 0.0);
}

#[test]
fn class_names_are_unique() {
    let g = parse(&synthetic::semanticdb_like(15, 4));
    let run = run_sim_measure(&g, &IterationParams::default()).unwrap();
    for eps in [0.0, 0.2, 0.5, 0.9] {
        let classes = create_classes(g.subjects(), &run.matrix, &run.pairs, eps).unwrap();
        let names = name_classes(&g, &classes);
        assert_eq!(names.len(), classes.len());
        let distinct: BTreeSet<&String> = names.values().collect();
        assert_eq!(distinct.len(), names.len());
        assert!(names.values().all(|n| n.starts_with("C-")));
    }
}

#[test]
fn precision_drops_when_pure_classes_merge() {
    let g = parse(&synthetic::planted_types(2, 5, 9));
    let gold = extract_gold(&g, RDF_TYPE);
    let by_type = |kind: &str| -> Vec<NodeId> {
        g.subjects().iter().copied().filter(|u| gold[u].iter().any(|t| t.ends_with(kind))).collect()
    };
    let pure = TypeClassMap::from_groups([by_type("Person"), by_type("Place")]);
    assert_eq!(precision(&pure, &gold).unwrap(), 1.0);
    let merged = TypeClassMap::from_groups([g.subjects().to_vec()]);
    assert!(precision(&merged, &gold).unwrap() < 1.0);
    let report = score_classes(&pure, &gold).unwrap();
    assert_eq!(report.labeled_members, g.subject_count());
}

#[test]
fn threshold_search_trace_is_consistent() {
    let g = parse(&synthetic::planted_types(3, 8, 5));
    let run = run_sim_measure(&g, &IterationParams::default()).unwrap();
    let search = find_optimum_epsilon(&g, &run.matrix, &run.pairs, &ThresholdSearchParams::default()).unwrap();
    let best = search.trace.iter().map(|r| r.favorability).fold(f64::MIN, f64::max);
    assert_eq!(search.best.favorability, best);
    for r in &search.trace {
        assert_eq!(r.favorability, favorability_score(r.stability, r.typification_rate, r.rmsd));
    }
    let gold = extract_gold(&g, RDF_TYPE);
    let classes = create_classes(g.subjects(), &run.matrix, &run.pairs, search.epsilon).unwrap();
    assert!(precision(&classes, &gold).unwrap() >= 0.95);
}
