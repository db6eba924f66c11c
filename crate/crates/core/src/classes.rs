//! Type classes from a converged similarity matrix.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::similarity::{CandidatePair, SimilarityMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ClassId(pub u32);

/// Disjoint-set forest with union by rank and path compression.
#[derive(Clone, Debug)]
pub struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSet {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub fn find(&mut self, mut node: usize) -> usize {
        let mut root = node;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[node] != root {
            let next = self.parent[node];
            self.parent[node] = root;
            node = next;
        }
        root
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Partition of subject nodes into disjoint classes.
///
/// Members are sorted by node id and classes are numbered by their smallest
/// member, so the map does not depend on how it was built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeClassMap {
    class_of: HashMap<NodeId, ClassId>,
    members: Vec<Vec<NodeId>>,
}

impl TypeClassMap {
    /// Builds a map from arbitrary groups; groups must be disjoint.
    pub fn from_groups<I>(groups: I) -> Self
    where
        I: IntoIterator<Item = Vec<NodeId>>,
    {
        let mut members: Vec<Vec<NodeId>> = groups
            .into_iter()
            .filter(|g| !g.is_empty())
            .map(|mut g| {
                g.sort_unstable();
                g.dedup();
                g
            })
            .collect();
        members.sort_unstable_by_key(|g| g[0]);
        let mut class_of = HashMap::new();
        for (i, group) in members.iter().enumerate() {
            for &u in group {
                let prev = class_of.insert(u, ClassId(i as u32));
                assert!(prev.is_none(), "node {u:?} listed in two classes");
            }
        }
        Self { class_of, members }
    }

    pub fn class_of(&self, u: NodeId) -> Option<ClassId> {
        self.class_of.get(&u).copied()
    }

    pub fn members(&self, c: ClassId) -> &[NodeId] {
        &self.members[c.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.class_of.len()
    }

    pub fn classes(&self) -> impl Iterator<Item = (ClassId, &[NodeId])> {
        self.members
            .iter()
            .enumerate()
            .map(|(i, m)| (ClassId(i as u32), m.as_slice()))
    }

    /// Whether every class of `self` lies inside a class of `coarser`.
    pub fn refines(&self, coarser: &TypeClassMap) -> bool {
        self.members.iter().all(|group| {
            let target = coarser.class_of(group[0]);
            target.is_some() && group.iter().all(|&u| coarser.class_of(u) == target)
        })
    }
}

/// Merges `u` and `v` whenever `1 - S(u, v) < epsilon`; subjects never
/// merged stay singletons.
pub fn create_classes(
    subjects: &[NodeId],
    similarity: &SimilarityMatrix,
    pairs: &[CandidatePair],
    epsilon: f64,
) -> Result<TypeClassMap> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in [0, 1], got {epsilon}"
        )));
    }
    let mut slot: BTreeMap<NodeId, usize> = BTreeMap::new();
    for &u in subjects {
        let next = slot.len();
        slot.entry(u).or_insert(next);
    }
    for pair in pairs {
        for u in [pair.u, pair.v] {
            let next = slot.len();
            slot.entry(u).or_insert(next);
        }
    }
    let mut sets = DisjointSet::new(slot.len());
    for pair in pairs {
        if 1.0 - similarity.get(pair.u, pair.v) < epsilon {
            sets.union(slot[&pair.u], slot[&pair.v]);
        }
    }
    let mut groups: BTreeMap<usize, Vec<NodeId>> = BTreeMap::new();
    for (&u, &i) in &slot {
        groups.entry(sets.find(i)).or_default().push(u);
    }
    Ok(TypeClassMap::from_groups(groups.into_values()))
}
