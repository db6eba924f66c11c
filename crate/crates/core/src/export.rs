//! File formats for summaries, dumps and reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use flate2::write::GzEncoder;
use flate2::Compression;
use serde::Serialize;

use crate::classes::{ClassId, TypeClassMap};
use crate::error::Result;
use crate::eval::PrecisionReport;
use crate::graph::{Graph, Node, RDF_TYPE};
use crate::similarity::{comparable_literals, CandidatePair, SimilarityMatrix};
use crate::summary::{FavorabilityReport, SummaryGraph};
use crate::weights::DescriptorWeights;

/// Namespace of class IRIs in N-Triples output.
pub const CLASS_NAMESPACE: &str = "urn:rdf-summarize:class:";

/// Writes through a temporary file in the destination directory and renames
/// it into place, so a failed write leaves nothing behind.
///
/// Existing targets that are not regular files (devices, pipes) are written
/// in place rather than replaced.
pub fn write_atomic<F>(path: &Path, write: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    if fs::metadata(path).is_ok_and(|m| !m.is_file()) {
        let mut out = io::BufWriter::new(fs::OpenOptions::new().write(true).open(path)?);
        write(&mut out)?;
        out.flush()?;
        return Ok(());
    }
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    {
        let mut buf = io::BufWriter::new(tmp.as_file_mut());
        write(&mut buf)?;
        buf.flush()?;
    }
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Like [`write_atomic`], gzip-compressing when the path ends in `.gz`.
pub fn write_maybe_gz<F>(path: &Path, write: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    let gz = path.extension().is_some_and(|e| e == "gz");
    write_atomic(path, |w| {
        if gz {
            let mut enc = GzEncoder::new(w, Compression::default());
            write(&mut enc)?;
            enc.finish()?;
            Ok(())
        } else {
            write(w)
        }
    })
}

#[derive(Debug, Serialize)]
pub struct ClassRecord {
    pub class_id: ClassId,
    pub name: String,
    pub members: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct EdgeRecord {
    pub source: ClassId,
    pub source_name: String,
    pub predicate: String,
    pub target: ClassId,
    pub target_name: String,
    pub cps: f64,
}

#[derive(Debug, Serialize)]
pub struct DatatypeRecord {
    pub class_id: ClassId,
    pub name: String,
    pub predicates: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct SummaryDocument {
    pub classes: Vec<ClassRecord>,
    pub edges: Vec<EdgeRecord>,
    pub datatype_properties: Vec<DatatypeRecord>,
}

pub fn class_records(
    g: &Graph,
    classes: &TypeClassMap,
    names: &BTreeMap<ClassId, String>,
) -> Vec<ClassRecord> {
    classes
        .classes()
        .map(|(class_id, members)| ClassRecord {
            class_id,
            name: names[&class_id].clone(),
            members: members.iter().map(|&u| g.node(u).label()).collect(),
        })
        .collect()
}

pub fn summary_document(
    g: &Graph,
    sg: &SummaryGraph,
    names: &BTreeMap<ClassId, String>,
) -> SummaryDocument {
    let edges = sg
        .edges
        .iter()
        .map(|e| EdgeRecord {
            source: e.source,
            source_name: names[&e.source].clone(),
            predicate: g.predicate_label(e.predicate).to_owned(),
            target: e.target,
            target_name: names[&e.target].clone(),
            cps: e.cps,
        })
        .collect();
    let datatype_properties = sg
        .datatype_properties
        .iter()
        .map(|(&class_id, preds)| DatatypeRecord {
            class_id,
            name: names[&class_id].clone(),
            predicates: preds.iter().map(|&p| g.predicate_label(p).to_owned()).collect(),
        })
        .collect();
    SummaryDocument {
        classes: class_records(g, &sg.classes, names),
        edges,
        datatype_properties,
    }
}

pub fn summary_json(g: &Graph, sg: &SummaryGraph, names: &BTreeMap<ClassId, String>) -> Result<String> {
    let mut out = serde_json::to_string_pretty(&summary_document(g, sg, names))?;
    out.push('\n');
    Ok(out)
}

fn local_name(iri: &str) -> &str {
    iri.rsplit(['/', '#', ':'])
        .find(|s| !s.is_empty())
        .unwrap_or(iri)
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// GraphViz digraph with one node per class and CPS percentages on edges.
pub fn summary_dot(g: &Graph, sg: &SummaryGraph, names: &BTreeMap<ClassId, String>) -> String {
    let mut out = String::from("digraph summary {\n    rankdir=LR;\n    node [shape=box];\n");
    for (id, members) in sg.classes.classes() {
        let _ = writeln!(
            out,
            "    c{} [label=\"{}\\n({} members)\"];",
            id.0,
            dot_escape(&names[&id]),
            members.len()
        );
    }
    for e in &sg.edges {
        let label = local_name(g.predicate_label(e.predicate));
        let _ = writeln!(
            out,
            "    c{} -> c{} [label=\"{} ({:.1}%)\"];",
            e.source.0,
            e.target.0,
            dot_escape(label),
            e.cps * 100.0
        );
    }
    out.push_str("}\n");
    out
}

/// IRI of a named class in N-Triples output.
pub fn class_iri(name: &str) -> String {
    format!("{CLASS_NAMESPACE}{name}")
}

/// One `rdf:type` assertion per classed subject.
pub fn summary_ntriples(g: &Graph, sg: &SummaryGraph, names: &BTreeMap<ClassId, String>) -> String {
    let mut lines = Vec::new();
    for (id, members) in sg.classes.classes() {
        let class = Node::iri(class_iri(&names[&id]));
        for &u in members {
            lines.push(format!("{} <{RDF_TYPE}> {class} .", g.node(u)));
        }
    }
    lines.sort();
    let mut out = lines.join("\n");
    if !out.is_empty() {
        out.push('\n');
    }
    out
}

pub fn write_similarity_csv(w: &mut dyn Write, g: &Graph, matrix: &SimilarityMatrix) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["node_u", "node_v", "score"])?;
    for (u, v, s) in matrix.iter() {
        csv.write_record([g.node(u).label(), g.node(v).label(), s.to_string()])?;
    }
    csv.flush()?;
    Ok(())
}

/// Per-pair normalized descriptor weights: every shared predicate, then the
/// words of every comparable literal neighbor pair.
pub fn write_weights_csv(
    w: &mut dyn Write,
    g: &Graph,
    pairs: &[CandidatePair],
    weights: &DescriptorWeights,
) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["node_u", "node_v", "descriptor_type", "descriptor", "weight"])?;
    for pair in pairs {
        let (lu, lv) = (g.node(pair.u).label(), g.node(pair.v).label());
        let pw = weights.pair_property_weights(g, pair.u, pair.v)?;
        for (p, wt) in pw.iter() {
            csv.write_record([&lu, &lv, "property", g.predicate_label(*p), &wt.to_string()])?;
        }
        for label in &pair.common {
            for &x in &label.left {
                for &y in &label.right {
                    let (nx, ny) = (g.node(x), g.node(y));
                    if !comparable_literals(nx, ny) {
                        continue;
                    }
                    let Ok(tw) = weights.pair_literal_term_weights(pair.u, pair.v, nx, ny) else {
                        continue;
                    };
                    for (token, wt) in tw.iter() {
                        csv.write_record([&lu, &lv, "literal", token, &wt.to_string()])?;
                    }
                }
            }
        }
    }
    csv.flush()?;
    Ok(())
}

pub fn write_trace_csv(w: &mut dyn Write, trace: &[FavorabilityReport]) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["epsilon", "stability", "typification_rate", "rmsd", "favorability"])?;
    for r in trace {
        csv.write_record([
            r.epsilon.to_string(),
            r.stability.to_string(),
            r.typification_rate.to_string(),
            r.rmsd.to_string(),
            r.favorability.to_string(),
        ])?;
    }
    csv.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct EvalClassRecord {
    pub name: String,
    pub label: Option<String>,
    pub size: usize,
    pub correct: usize,
}

#[derive(Debug, Serialize)]
pub struct EvalDocument {
    pub precision: f64,
    pub class_count: usize,
    pub labeled_members: usize,
    pub per_class: Vec<EvalClassRecord>,
}

pub fn eval_document(report: &PrecisionReport, names: &BTreeMap<ClassId, String>) -> EvalDocument {
    EvalDocument {
        precision: report.precision,
        class_count: report.per_class.len(),
        labeled_members: report.labeled_members,
        per_class: report
            .per_class
            .iter()
            .map(|c| EvalClassRecord {
                name: names[&c.class_id].clone(),
                label: c.label.clone(),
                size: c.size,
                correct: c.correct,
            })
            .collect(),
    }
}

/// Reads a whole file, transparently un-gzipping `.gz` paths.
pub fn read_to_string(path: &Path) -> io::Result<String> {
    let bytes = fs::read(path)?;
    if path.extension().is_some_and(|e| e == "gz") {
        let mut out = String::new();
        io::Read::read_to_string(&mut flate2::read::GzDecoder::new(&bytes[..]), &mut out)?;
        Ok(out)
    } else {
        String::from_utf8(bytes).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
    }
}
