//! Indexed RDF graph and N-Triples ingestion.
//!
//! Nodes are interned from their lexical identity, so a [`NodeId`] is stable
//! for a given input order. Triples are kept with set semantics: exact
//! duplicates are dropped while reading.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::{self, Write as _};
use std::io::BufRead;

use serde::Serialize;

use crate::error::{Error, Result};

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const RDF_LANG_STRING: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PredId(pub u32);

impl PredId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum NodeKind {
    Iri,
    Blank,
    Literal,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Node {
    pub kind: NodeKind,
    pub lexical: String,
    pub datatype: Option<String>,
    pub language: Option<String>,
}

impl Node {
    pub fn iri(iri: impl Into<String>) -> Self {
        Self {
            kind: NodeKind::Iri,
            lexical: iri.into(),
            datatype: None,
            language: None,
        }
    }

    pub fn blank(label: impl Into<String>) -> Self {
        Self {
            kind: NodeKind::Blank,
            lexical: label.into(),
            datatype: None,
            language: None,
        }
    }

    /// A plain literal with neither datatype nor language tag.
    pub fn literal(lexical: impl Into<String>) -> Self {
        Self {
            kind: NodeKind::Literal,
            lexical: lexical.into(),
            datatype: None,
            language: None,
        }
    }

    pub fn typed_literal(lexical: impl Into<String>, datatype: impl Into<String>) -> Self {
        Self {
            kind: NodeKind::Literal,
            lexical: lexical.into(),
            datatype: Some(datatype.into()),
            language: None,
        }
    }

    /// A language-tagged literal; its datatype is always `rdf:langString`.
    pub fn lang_literal(lexical: impl Into<String>, language: impl Into<String>) -> Self {
        Self {
            kind: NodeKind::Literal,
            lexical: lexical.into(),
            datatype: Some(RDF_LANG_STRING.to_owned()),
            language: Some(language.into()),
        }
    }

    pub fn is_literal(&self) -> bool {
        self.kind == NodeKind::Literal
    }

    /// IRIs and blank nodes are both entities.
    pub fn is_entity(&self) -> bool {
        !self.is_literal()
    }

    /// Short human-facing form: the IRI itself, `_:label`, or the lexical form.
    pub fn label(&self) -> String {
        match self.kind {
            NodeKind::Iri => self.lexical.clone(),
            NodeKind::Blank => format!("_:{}", self.lexical),
            NodeKind::Literal => self.lexical.clone(),
        }
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            NodeKind::Iri => write!(f, "<{}>", self.lexical),
            NodeKind::Blank => write!(f, "_:{}", self.lexical),
            NodeKind::Literal => {
                f.write_char('"')?;
                for c in self.lexical.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        '\r' => f.write_str("\\r")?,
                        '\t' => f.write_str("\\t")?,
                        c => f.write_char(c)?,
                    }
                }
                f.write_char('"')?;
                match (&self.language, &self.datatype) {
                    (Some(lang), _) => write!(f, "@{lang}"),
                    (None, Some(dt)) => write!(f, "^^<{dt}>"),
                    (None, None) => Ok(()),
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub subject: NodeId,
    pub predicate: PredId,
    pub object: NodeId,
}

/// Outgoing edges of one node, grouped by predicate.
pub type OutEdges = BTreeMap<PredId, BTreeSet<NodeId>>;

static NO_EDGES: OutEdges = BTreeMap::new();
static NO_NEIGHBORS: BTreeSet<NodeId> = BTreeSet::new();

#[derive(Clone, Debug, Default)]
pub struct Graph {
    nodes: Vec<Node>,
    node_index: HashMap<Node, NodeId>,
    predicates: Vec<String>,
    predicate_index: HashMap<String, PredId>,
    triples: Vec<Triple>,
    spo: Vec<OutEdges>,
    subjects: Vec<NodeId>,
    predicate_subjects: Vec<usize>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern_node(&mut self, node: Node) -> NodeId {
        if let Some(&id) = self.node_index.get(&node) {
            return id;
        }
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(node.clone());
        self.node_index.insert(node, id);
        self.spo.push(OutEdges::new());
        id
    }

    pub fn intern_predicate(&mut self, iri: &str) -> PredId {
        if let Some(&id) = self.predicate_index.get(iri) {
            return id;
        }
        let id = PredId(self.predicates.len() as u32);
        self.predicates.push(iri.to_owned());
        self.predicate_index.insert(iri.to_owned(), id);
        self.predicate_subjects.push(0);
        id
    }

    /// Adds a triple; returns `false` when it was already present.
    ///
    /// Literal subjects are rejected.
    pub fn insert(&mut self, subject: Node, predicate: &str, object: Node) -> Result<bool> {
        if subject.is_literal() {
            return Err(Error::InvalidParameter(format!(
                "literal {subject} cannot be a triple subject"
            )));
        }
        let s = self.intern_node(subject);
        let p = self.intern_predicate(predicate);
        let o = self.intern_node(object);
        Ok(self.insert_ids(s, p, o))
    }

    fn insert_ids(&mut self, s: NodeId, p: PredId, o: NodeId) -> bool {
        let edges = &mut self.spo[s.index()];
        if edges.is_empty() {
            self.subjects.push(s);
        }
        let objects = edges.entry(p).or_insert_with(|| {
            self.predicate_subjects[p.index()] += 1;
            BTreeSet::new()
        });
        if !objects.insert(o) {
            return false;
        }
        self.triples.push(Triple {
            subject: s,
            predicate: p,
            object: o,
        });
        true
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.index()]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn lookup(&self, node: &Node) -> Option<NodeId> {
        self.node_index.get(node).copied()
    }

    pub fn lookup_iri(&self, iri: &str) -> Option<NodeId> {
        self.lookup(&Node::iri(iri))
    }

    pub fn predicate_label(&self, p: PredId) -> &str {
        &self.predicates[p.index()]
    }

    pub fn predicate_id(&self, iri: &str) -> Option<PredId> {
        self.predicate_index.get(iri).copied()
    }

    pub fn predicate_count(&self) -> usize {
        self.predicates.len()
    }

    pub fn predicates(&self) -> impl Iterator<Item = PredId> + '_ {
        (0..self.predicates.len() as u32).map(PredId)
    }

    /// Distinct triples in insertion order.
    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    /// Subject nodes in order of first appearance.
    pub fn subjects(&self) -> &[NodeId] {
        &self.subjects
    }

    pub fn subject_count(&self) -> usize {
        self.subjects.len()
    }

    pub fn is_subject(&self, u: NodeId) -> bool {
        self.spo.get(u.index()).is_some_and(|e| !e.is_empty())
    }

    /// Number of distinct subjects having at least one triple with `p`.
    pub fn predicate_subject_count(&self, p: PredId) -> usize {
        self.predicate_subjects.get(p.index()).copied().unwrap_or(0)
    }

    pub fn out_edges(&self, u: NodeId) -> &OutEdges {
        self.spo.get(u.index()).unwrap_or(&NO_EDGES)
    }

    /// L(u): the distinct predicates used on triples with subject `u`.
    pub fn predicate_set(&self, u: NodeId) -> BTreeSet<PredId> {
        self.out_edges(u).keys().copied().collect()
    }

    pub fn neighbors_by_predicate(&self, u: NodeId, p: PredId) -> &BTreeSet<NodeId> {
        self.out_edges(u).get(&p).unwrap_or(&NO_NEIGHBORS)
    }

    /// A copy of this graph without any triple using `predicate`.
    ///
    /// Node identifiers of the remaining nodes are assigned afresh in the
    /// original triple order.
    pub fn without_predicate(&self, predicate: &str) -> Graph {
        let mut out = Graph::new();
        for t in &self.triples {
            let label = self.predicate_label(t.predicate);
            if label == predicate {
                continue;
            }
            let s = out.intern_node(self.node(t.subject).clone());
            let p = out.intern_predicate(label);
            let o = out.intern_node(self.node(t.object).clone());
            out.insert_ids(s, p, o);
        }
        out
    }

    /// Canonical N-Triples, one line per triple, sorted by predicate, subject
    /// and object lexical form.
    pub fn to_ntriples(&self) -> String {
        let mut lines: Vec<(&str, String, String)> = self
            .triples
            .iter()
            .map(|t| {
                (
                    self.predicate_label(t.predicate),
                    self.node(t.subject).to_string(),
                    self.node(t.object).to_string(),
                )
            })
            .collect();
        lines.sort();
        let mut out = String::new();
        for (p, s, o) in lines {
            let _ = writeln!(out, "{s} <{p}> {o} .");
        }
        out
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    /// Fail on the first malformed line instead of skipping it.
    pub strict: bool,
}

pub fn parse_ntriples<R: BufRead>(reader: R, options: ParseOptions) -> Result<Graph> {
    let mut graph = Graph::new();
    let mut skipped = 0usize;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        match parse_line(&line) {
            Ok(None) => {}
            Ok(Some((s, p, o))) => {
                graph.insert(s, &p, o).expect("parser never yields literal subjects");
            }
            Err(message) => {
                let err = Error::Parse {
                    line: line_no,
                    text: line.clone(),
                    message,
                };
                if options.strict {
                    return Err(err);
                }
                log::warn!("skipping malformed input: {err}");
                skipped += 1;
            }
        }
    }
    if skipped > 0 {
        log::warn!("{skipped} malformed line(s) skipped");
    }
    Ok(graph)
}

pub fn parse_ntriples_str(text: &str, options: ParseOptions) -> Result<Graph> {
    parse_ntriples(text.as_bytes(), options)
}

type ParsedTriple = (Node, String, Node);

fn parse_line(line: &str) -> std::result::Result<Option<ParsedTriple>, String> {
    let mut cur = Cursor::new(line);
    cur.skip_ws();
    if cur.at_end() || cur.peek() == Some('#') {
        return Ok(None);
    }
    let subject = match cur.peek() {
        Some('<') => Node::iri(cur.iri()?),
        Some('_') => Node::blank(cur.blank()?),
        _ => return Err("subject must be an IRI or blank node".into()),
    };
    cur.require_ws()?;
    if cur.peek() != Some('<') {
        return Err("predicate must be an IRI".into());
    }
    let predicate = cur.iri()?;
    cur.require_ws()?;
    let object = match cur.peek() {
        Some('<') => Node::iri(cur.iri()?),
        Some('_') => Node::blank(cur.blank()?),
        Some('"') => cur.literal()?,
        _ => return Err("object must be an IRI, blank node or literal".into()),
    };
    cur.skip_ws();
    if !cur.pending_dot && cur.bump() != Some('.') {
        return Err("expected '.' terminating the triple".into());
    }
    cur.skip_ws();
    if !cur.at_end() && cur.peek() != Some('#') {
        return Err("unexpected trailing content".into());
    }
    Ok(Some((subject, predicate, object)))
}

struct Cursor<'a> {
    rest: std::iter::Peekable<std::str::Chars<'a>>,
    // Set when a blank node label swallowed the statement terminator.
    pending_dot: bool,
}

impl<'a> Cursor<'a> {
    fn new(s: &'a str) -> Self {
        Self {
            rest: s.chars().peekable(),
            pending_dot: false,
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.rest.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        self.rest.next()
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t' | '\r')) {
            self.bump();
        }
    }

    fn require_ws(&mut self) -> std::result::Result<(), String> {
        if !matches!(self.peek(), Some(' ' | '\t')) {
            return Err("expected whitespace between terms".into());
        }
        self.skip_ws();
        Ok(())
    }

    fn iri(&mut self) -> std::result::Result<String, String> {
        self.bump(); // '<'
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return Err("unterminated IRI".into()),
                Some('>') => break,
                Some('\\') => out.push(self.unicode_escape()?),
                Some(c) if c.is_whitespace() || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`') => {
                    return Err(format!("invalid character {c:?} in IRI"))
                }
                Some(c) => out.push(c),
            }
        }
        if out.is_empty() {
            return Err("empty IRI".into());
        }
        Ok(out)
    }

    fn blank(&mut self) -> std::result::Result<String, String> {
        self.bump(); // '_'
        if self.bump() != Some(':') {
            return Err("blank node must start with '_:'".into());
        }
        let mut label = String::new();
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || matches!(c, '_' | '-' | '.') {
                label.push(c);
                self.bump();
            } else {
                break;
            }
        }
        // A label may not end with '.', which belongs to the statement.
        let mut dots = 0;
        while label.ends_with('.') {
            label.pop();
            dots += 1;
        }
        if label.is_empty() {
            return Err("empty blank node label".into());
        }
        if dots > 0 {
            // Only the statement terminator can follow; anything else is malformed.
            if dots > 1 {
                return Err("unexpected '.' after blank node".into());
            }
            self.skip_ws();
            if !self.at_end() && self.peek() != Some('#') {
                return Err("unexpected content after '.'".into());
            }
            self.pending_dot = true;
        }
        Ok(label)
    }

    fn literal(&mut self) -> std::result::Result<Node, String> {
        self.bump(); // '"'
        let mut lexical = String::new();
        loop {
            match self.bump() {
                None => return Err("unterminated literal".into()),
                Some('"') => break,
                Some('\\') => match self.bump() {
                    Some('t') => lexical.push('\t'),
                    Some('b') => lexical.push('\u{8}'),
                    Some('n') => lexical.push('\n'),
                    Some('r') => lexical.push('\r'),
                    Some('f') => lexical.push('\u{c}'),
                    Some('"') => lexical.push('"'),
                    Some('\'') => lexical.push('\''),
                    Some('\\') => lexical.push('\\'),
                    Some('u') => lexical.push(self.hex_char(4)?),
                    Some('U') => lexical.push(self.hex_char(8)?),
                    _ => return Err("invalid escape in literal".into()),
                },
                Some(c) => lexical.push(c),
            }
        }
        match self.peek() {
            Some('@') => {
                self.bump();
                let mut lang = String::new();
                while let Some(c) = self.peek() {
                    if c.is_ascii_alphanumeric() || c == '-' {
                        lang.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
                if lang.is_empty() || !lang.starts_with(|c: char| c.is_ascii_alphabetic()) {
                    return Err("invalid language tag".into());
                }
                Ok(Node::lang_literal(lexical, lang))
            }
            Some('^') => {
                self.bump();
                if self.bump() != Some('^') || self.peek() != Some('<') {
                    return Err("expected '^^<datatype>'".into());
                }
                let datatype = self.iri()?;
                Ok(Node::typed_literal(lexical, datatype))
            }
            _ => Ok(Node::literal(lexical)),
        }
    }

    fn unicode_escape(&mut self) -> std::result::Result<char, String> {
        match self.bump() {
            Some('u') => self.hex_char(4),
            Some('U') => self.hex_char(8),
            _ => Err("invalid escape in IRI".into()),
        }
    }

    fn hex_char(&mut self, digits: usize) -> std::result::Result<char, String> {
        let mut value = 0u32;
        for _ in 0..digits {
            let d = self
                .bump()
                .and_then(|c| c.to_digit(16))
                .ok_or_else(|| "invalid hex escape".to_string())?;
            value = value * 16 + d;
        }
        char::from_u32(value).ok_or_else(|| "escape is not a valid code point".into())
    }
}
