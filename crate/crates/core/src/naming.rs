//! Human-readable class names derived from member identifiers.
//!
//! Each member contributes one candidate stem: its local name with trailing
//! digits and separators removed, camel-split and re-joined in upper camel
//! case (`SurgeryProcedure:236` → `SurgeryProcedure`, `student_49` →
//! `Student`). The stem shared by most members names the class.

use std::collections::{BTreeMap, HashMap};

use crate::classes::{ClassId, TypeClassMap};
use crate::graph::Graph;

/// Candidate name stem of one node identifier, if it has any letters.
pub fn stem(identifier: &str) -> Option<String> {
    let local = identifier
        .rsplit(['/', '#'])
        .find(|s| !s.is_empty())
        .unwrap_or(identifier);
    // `Prefix:123` keeps its prefix; the numeric part is not a name.
    let trimmed = local.trim_end_matches(|c: char| c.is_ascii_digit() || is_separator(c));
    let last = trimmed.rsplit(':').next().unwrap_or(trimmed);
    let tokens = camel_tokens(last);
    if tokens.is_empty() {
        return None;
    }
    Some(tokens.iter().map(|t| capitalize(t)).collect())
}

fn is_separator(c: char) -> bool {
    matches!(c, ':' | '_' | '-' | '.')
}

/// Splits on non-alphanumerics and lower→upper case boundaries; digit runs
/// are dropped.
pub fn camel_tokens(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut prev_lower = false;
    for c in text.chars() {
        if c.is_alphabetic() {
            if c.is_uppercase() && prev_lower && !current.is_empty() {
                tokens.push(std::mem::take(&mut current));
            }
            current.push(c);
            prev_lower = c.is_lowercase();
        } else {
            if !current.is_empty() {
                tokens.push(std::mem::take(&mut current));
            }
            prev_lower = false;
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

fn capitalize(token: &str) -> String {
    let mut chars = token.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Unique `C-<Stem>` names; stems shared by several classes get `-1`, `-2`,
/// ... in class order.
pub fn name_classes(g: &Graph, classes: &TypeClassMap) -> BTreeMap<ClassId, String> {
    let mut bases: Vec<(ClassId, Option<String>)> = Vec::with_capacity(classes.len());
    for (id, members) in classes.classes() {
        let mut votes: BTreeMap<String, usize> = BTreeMap::new();
        for &u in members {
            if let Some(s) = stem(&g.node(u).lexical) {
                *votes.entry(s).or_default() += 1;
            }
        }
        // max_by_key keeps the last maximum; iterate reversed so the
        // lexicographically smallest stem wins ties.
        let best = votes
            .into_iter()
            .rev()
            .max_by_key(|(_, n)| *n)
            .map(|(s, _)| s);
        bases.push((id, best));
    }

    let mut totals: HashMap<&str, usize> = HashMap::new();
    for (_, base) in &bases {
        if let Some(b) = base {
            *totals.entry(b.as_str()).or_default() += 1;
        }
    }
    let mut seen: HashMap<&str, usize> = HashMap::new();
    let mut names = BTreeMap::new();
    for (id, base) in &bases {
        let name = match base {
            None => format!("C-Unnamed-{}", id.0),
            Some(b) if totals[b.as_str()] == 1 => format!("C-{b}"),
            Some(b) => {
                let k = seen.entry(b.as_str()).or_default();
                *k += 1;
                format!("C-{b}-{k}")
            }
        };
        names.insert(*id, name);
    }
    names
}
