//! Shared helpers for integration tests: random small graphs, a brute-force
//! similarity oracle written against plain strings, and CLI plumbing.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const XSD_INT: &str = "http://www.w3.org/2001/XMLSchema#integer";
pub const LANG_STRING: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Term {
    Iri(String),
    Lit {
        lex: String,
        dt: Option<String>,
        lang: Option<String>,
    },
}

impl Term {
    fn is_literal(&self) -> bool {
        matches!(self, Term::Lit { .. })
    }

    fn render(&self) -> String {
        match self {
            Term::Iri(i) => format!("<{i}>"),
            Term::Lit { lex, dt, lang } => match (lang, dt) {
                (Some(l), _) => format!("\"{lex}\"@{l}"),
                (None, Some(d)) => format!("\"{lex}\"^^<{d}>"),
                (None, None) => format!("\"{lex}\""),
            },
        }
    }
}

/// Triples as plain strings, deduplicated.
#[derive(Clone, Debug, Default)]
pub struct RawGraph {
    pub triples: BTreeSet<(String, String, Term)>,
}

impl RawGraph {
    pub fn to_ntriples(&self) -> String {
        self.triples
            .iter()
            .map(|(s, p, o)| format!("<{s}> <{p}> {} .\n", o.render()))
            .collect()
    }

    pub fn subjects(&self) -> BTreeSet<&str> {
        self.triples.iter().map(|(s, _, _)| s.as_str()).collect()
    }

    fn objects(&self, s: &str, p: &str) -> Vec<&Term> {
        self.triples
            .iter()
            .filter(|(ts, tp, _)| ts == s && tp == p)
            .map(|(_, _, o)| o)
            .collect()
    }

    fn preds(&self, s: &str) -> BTreeSet<&str> {
        self.triples
            .iter()
            .filter(|(ts, _, _)| ts == s)
            .map(|(_, p, _)| p.as_str())
            .collect()
    }
}

/// Random graph with at most 6 subjects, 4 predicates and 3 objects per
/// (subject, predicate).
pub fn random_graph(seed: u64) -> RawGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_subj = rng.gen_range(2..=6);
    let n_pred = rng.gen_range(1..=4);
    let subjects: Vec<String> = (0..n_subj).map(|i| format!("http://t/s{i}")).collect();
    let preds: Vec<String> = (0..n_pred).map(|i| format!("http://t/p{i}")).collect();
    let lit = |lex: &str| Term::Lit { lex: lex.into(), dt: None, lang: None };
    let mut pool: Vec<Term> = vec![
        Term::Iri("http://t/x0".into()),
        Term::Iri("http://t/x1".into()),
        lit("red apple"),
        lit("green apple"),
        lit("red"),
        lit("apple pie pie"),
        lit("--"),
        lit("..."),
        Term::Lit { lex: "42".into(), dt: Some(XSD_INT.into()), lang: None },
        Term::Lit { lex: "7".into(), dt: Some(XSD_INT.into()), lang: None },
        Term::Lit { lex: "chat noir".into(), dt: Some(LANG_STRING.into()), lang: Some("fr".into()) },
        Term::Lit { lex: "chat".into(), dt: Some(LANG_STRING.into()), lang: Some("en".into()) },
    ];
    pool.extend(subjects.iter().map(|s| Term::Iri(s.clone())));

    let mut g = RawGraph::default();
    for s in &subjects {
        let k = rng.gen_range(1..=n_pred);
        for p in preds.choose_multiple(&mut rng, k) {
            for _ in 0..rng.gen_range(1..=3) {
                let o = pool.choose(&mut rng).unwrap().clone();
                g.triples.insert((s.clone(), p.clone(), o));
            }
        }
    }
    g
}

fn tokens(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for c in text.chars() {
        if c.is_alphanumeric() {
            cur.extend(c.to_lowercase());
        } else if !cur.is_empty() {
            out.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn normalize<K: Ord + Clone>(raw: &BTreeMap<K, f64>) -> BTreeMap<K, f64> {
    let total: f64 = raw.values().sum();
    raw.iter()
        .map(|(k, &w)| {
            let v = if total > 0.0 { w / total } else { 1.0 / raw.len() as f64 };
            (k.clone(), v)
        })
        .collect()
}

/// Best one-to-one assignment by trying every injection of the smaller side.
pub fn brute_force_match(grid: &[Vec<f64>]) -> f64 {
    let rows = grid.len();
    let cols = grid.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return 0.0;
    }
    fn go(grid: &[Vec<f64>], row: usize, used: &mut Vec<bool>, transposed: bool) -> f64 {
        let n = if transposed { grid[0].len() } else { grid.len() };
        if row == n {
            return 0.0;
        }
        let m = used.len();
        let mut best = f64::NEG_INFINITY;
        for j in 0..m {
            if used[j] {
                continue;
            }
            used[j] = true;
            let cell = if transposed { grid[j][row] } else { grid[row][j] };
            best = best.max(cell + go(grid, row + 1, used, transposed));
            used[j] = false;
        }
        best
    }
    let transposed = rows > cols;
    let mut used = vec![false; if transposed { rows } else { cols }];
    go(grid, 0, &mut used, transposed) / rows.max(cols) as f64
}

/// Reference similarity iteration over string identifiers.
pub struct Oracle<'a> {
    g: &'a RawGraph,
    beta: f64,
    subjects: Vec<&'a str>,
    prop_tfidf: BTreeMap<(&'a str, &'a str), f64>,
    term_tfidf: BTreeMap<(&'a str, String), f64>,
    pub candidates: BTreeSet<(&'a str, &'a str)>,
}

impl<'a> Oracle<'a> {
    pub fn new(g: &'a RawGraph, beta: f64) -> Self {
        let subjects: Vec<&str> = g.subjects().into_iter().collect();
        let n = subjects.len() as f64;

        let mut prop_tfidf = BTreeMap::new();
        for &u in &subjects {
            let preds = g.preds(u);
            let total: usize = preds.iter().map(|p| g.objects(u, p).len()).sum();
            for p in preds {
                let users = subjects.iter().filter(|s| g.preds(s).contains(p)).count() as f64;
                let tf = g.objects(u, p).len() as f64 / total as f64;
                prop_tfidf.insert((u, p), tf * (n / users).ln());
            }
        }

        let mut bags: BTreeMap<&str, BTreeMap<String, usize>> = BTreeMap::new();
        for (s, _, o) in &g.triples {
            if let Term::Lit { lex, .. } = o {
                for t in tokens(lex) {
                    *bags.entry(s.as_str()).or_default().entry(t).or_default() += 1;
                }
            }
        }
        let docs = bags.len() as f64;
        let mut term_tfidf = BTreeMap::new();
        for (&u, bag) in &bags {
            let total: usize = bag.values().sum();
            for (t, &c) in bag {
                let df = bags.values().filter(|b| b.contains_key(t)).count() as f64;
                term_tfidf.insert((u, t.clone()), c as f64 / total as f64 * (docs / df).ln());
            }
        }

        let mut candidates = BTreeSet::new();
        for (i, &u) in subjects.iter().enumerate() {
            for &v in &subjects[i + 1..] {
                if !g.preds(u).is_disjoint(&g.preds(v)) {
                    candidates.insert((u, v));
                }
            }
        }
        Self { g, beta, subjects, prop_tfidf, term_tfidf, candidates }
    }

    fn key(&self, a: &'a str, b: &'a str) -> (&'a str, &'a str) {
        if a <= b { (a, b) } else { (b, a) }
    }

    fn literal_sim(&self, u: &str, v: &str, x: &Term, y: &Term) -> f64 {
        let (Term::Lit { lex: lx, dt: dx, lang: gx }, Term::Lit { lex: ly, dt: dy, lang: gy }) = (x, y)
        else {
            return 0.0;
        };
        if dx != dy || gx != gy {
            return 0.0;
        }
        let (tx, ty) = (tokens(lx), tokens(ly));
        if tx.is_empty() && ty.is_empty() {
            return if lx == ly { 1.0 } else { 0.0 };
        }
        let tf = |s: &str, t: &str| {
            self.term_tfidf
                .iter()
                .find(|((a, b), _)| *a == s && b == t)
                .map_or(0.0, |(_, w)| *w)
        };
        let raw: BTreeMap<String, f64> = tx
            .iter()
            .chain(&ty)
            .map(|t| (t.clone(), tf(u, t) + tf(v, t)))
            .collect();
        let w = normalize(&raw);
        let (mut shared, mut union) = (0.0, 0.0);
        for (t, wt) in &w {
            let cx = tx.iter().filter(|s| *s == t).count();
            let cy = ty.iter().filter(|s| *s == t).count();
            let mass = (cx + cy) as f64 * wt;
            union += mass;
            if cx > 0 && cy > 0 {
                shared += mass;
            }
        }
        if union > 0.0 { shared / union } else { 0.0 }
    }

    fn neighbor(&self, u: &str, v: &str, x: &'a Term, y: &'a Term, prev: &BTreeMap<(&'a str, &'a str), f64>) -> f64 {
        match (x, y) {
            (Term::Iri(a), Term::Iri(b)) if a == b => 1.0,
            (Term::Iri(a), Term::Iri(b)) => prev.get(&self.key(a, b)).copied().unwrap_or(0.0),
            _ if x.is_literal() && y.is_literal() => self.literal_sim(u, v, x, y),
            _ => 0.0,
        }
    }

    pub fn pair_sim(&self, u: &'a str, v: &'a str, prev: &BTreeMap<(&'a str, &'a str), f64>) -> f64 {
        let (lu, lv) = (self.g.preds(u), self.g.preds(v));
        let common: Vec<&str> = lu.intersection(&lv).copied().collect();
        let union = lu.union(&lv).count() as f64;
        let raw: BTreeMap<&str, f64> = common
            .iter()
            .map(|&p| {
                let a = self.prop_tfidf.get(&(u, p)).copied().unwrap_or(0.0);
                let b = self.prop_tfidf.get(&(v, p)).copied().unwrap_or(0.0);
                (p, a + b)
            })
            .collect();
        let w = normalize(&raw);
        let mut sum = 0.0;
        for &p in &common {
            let (xs, ys) = (self.g.objects(u, p), self.g.objects(v, p));
            let grid: Vec<Vec<f64>> = xs
                .iter()
                .map(|x| ys.iter().map(|y| self.neighbor(u, v, x, y, prev)).collect())
                .collect();
            sum += w[p] * brute_force_match(&grid);
        }
        (1.0 - self.beta) * (common.len() as f64 / union) * sum + self.beta
    }

    /// Scores after exactly `rounds` Jacobi updates from all-ones.
    pub fn run(&self, rounds: usize) -> BTreeMap<(&'a str, &'a str), f64> {
        let mut cur: BTreeMap<_, _> = self.candidates.iter().map(|&k| (k, 1.0)).collect();
        for _ in 0..rounds {
            cur = self.candidates.iter().map(|&(u, v)| ((u, v), self.pair_sim(u, v, &cur))).collect();
        }
        cur
    }

    pub fn subjects(&self) -> &[&'a str] {
        &self.subjects
    }
}

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_rdf-summarize")
}

pub fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

pub fn run_cli(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

pub fn report(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stdout);
    serde_json::from_str(text.trim()).unwrap_or_else(|e| panic!("bad report {text:?}: {e}"))
}
