//! Identity clusters and link groups over the relation graph.
//!
//! Anaphoric and cataphoric edges merge markables into clusters (connected
//! components); bridging and split-antecedent edges never merge anything,
//! they become links *between* clusters. Cluster numbers are 1-based and
//! assigned by the document position of each cluster's earliest mention,
//! widest span first on ties, so output is stable under re-parsing.

use std::collections::HashMap;

use crate::brat::{validate_relations, RawDocument, RelationKind};
use crate::error::{Error, Result};

/// Union-find with path halving and union by size.
struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(len: usize) -> Self {
        UnionFind {
            parent: (0..len).collect(),
            size: vec![1; len],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, x: usize, y: usize) {
        let (mut xr, mut yr) = (self.find(x), self.find(y));
        if xr == yr {
            return;
        }
        if self.size[xr] < self.size[yr] {
            std::mem::swap(&mut xr, &mut yr);
        }
        self.parent[yr] = xr;
        self.size[xr] += self.size[yr];
    }
}

/// One identity cluster: markable ids in document order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cluster {
    pub number: u32,
    pub markables: Vec<String>,
}

/// A split-antecedent group: the antecedent clusters of one plural anaphor.
/// Multiple antecedent edges sharing the anaphor-side cluster form a single
/// group, so the group counts once in the statistics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitAnteGroup {
    pub antecedents: Vec<u32>,
    pub anaphor: u32,
}

/// Clusters plus the cross-cluster link structure of one document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterSet {
    pub clusters: Vec<Cluster>,
    /// (antecedent cluster, anaphor cluster) pairs, deduplicated and sorted.
    pub bridges: Vec<(u32, u32)>,
    pub split_antecedents: Vec<SplitAnteGroup>,
    /// Relation ids of cataphoric edges folded into identity clustering.
    /// The entity encoding is directionless; the direction survives here
    /// for reporting.
    pub cataphoric_edges: Vec<String>,
}

impl ClusterSet {
    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    /// Cluster number of a markable id.
    pub fn cluster_of(&self, markable: &str) -> Option<u32> {
        self.clusters
            .iter()
            .find(|c| c.markables.iter().any(|m| m == markable))
            .map(|c| c.number)
    }

    /// Anaphor clusters that take part in more than one bridging link.
    /// The scheme permits this; the report flags it.
    pub fn multi_bridge_anaphors(&self) -> Vec<u32> {
        let mut counts: HashMap<u32, usize> = HashMap::new();
        for (_, anaphor) in &self.bridges {
            *counts.entry(*anaphor).or_default() += 1;
        }
        let mut out: Vec<u32> = counts
            .into_iter()
            .filter(|(_, n)| *n > 1)
            .map(|(c, _)| c)
            .collect();
        out.sort_unstable();
        out
    }
}

/// Group markables into identity clusters and collect bridging and
/// split-antecedent links between the resulting cluster numbers.
///
/// Requires a relation graph free of self-references and dangling
/// references; run [`validate_relations`] first and resolve its findings.
pub fn build_clusters(doc: &RawDocument) -> Result<ClusterSet> {
    for finding in validate_relations(doc) {
        use crate::brat::RelationFinding::*;
        match finding {
            SelfReference { .. } | Dangling { .. } => {
                return Err(Error::DirtyRelationGraph {
                    finding: finding.to_string(),
                })
            }
            Duplicate { .. } => {} // harmless for component building
        }
    }

    let index_of: HashMap<&str, usize> = doc
        .markables
        .iter()
        .enumerate()
        .map(|(i, m)| (m.id.as_str(), i))
        .collect();

    let mut uf = UnionFind::new(doc.markables.len());
    let mut cataphoric_edges = Vec::new();
    for rel in &doc.relations {
        match rel.kind {
            RelationKind::Anaphoric | RelationKind::Cataphoric => {
                if rel.kind == RelationKind::Cataphoric {
                    cataphoric_edges.push(rel.id.clone());
                }
                let src = index_of[rel.source.as_str()];
                for target in &rel.targets {
                    uf.union(src, index_of[target.as_str()]);
                }
            }
            RelationKind::Bridging | RelationKind::SplitAntecedent => {}
        }
    }

    // Component members in declaration order, then cluster numbering by the
    // earliest mention's document position (start ascending, end descending).
    let mut members: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..doc.markables.len() {
        members.entry(uf.find(i)).or_default().push(i);
    }
    let mut component_list: Vec<Vec<usize>> = members.into_values().collect();
    for comp in &mut component_list {
        comp.sort_by_key(|&i| (doc.markables[i].order_key(), i));
    }
    component_list.sort_by_key(|comp| {
        let first = comp[0];
        (doc.markables[first].order_key(), first)
    });

    let mut number_of: HashMap<usize, u32> = HashMap::new();
    let clusters: Vec<Cluster> = component_list
        .iter()
        .enumerate()
        .map(|(k, comp)| {
            let number = (k + 1) as u32;
            for &i in comp {
                number_of.insert(i, number);
            }
            Cluster {
                number,
                markables: comp.iter().map(|&i| doc.markables[i].id.clone()).collect(),
            }
        })
        .collect();

    let cluster_num = |id: &str| number_of[&index_of[id]];

    let mut bridges: Vec<(u32, u32)> = doc
        .relations
        .iter()
        .filter(|r| r.kind == RelationKind::Bridging)
        .flat_map(|r| {
            let anaphor = cluster_num(&r.source);
            r.targets.iter().map(move |t| (cluster_num(t), anaphor))
        })
        .collect();
    bridges.sort_unstable();
    bridges.dedup();

    let mut split_by_anaphor: HashMap<u32, Vec<u32>> = HashMap::new();
    for rel in doc
        .relations
        .iter()
        .filter(|r| r.kind == RelationKind::SplitAntecedent)
    {
        let anaphor = cluster_num(&rel.source);
        let entry = split_by_anaphor.entry(anaphor).or_default();
        entry.extend(rel.targets.iter().map(|t| cluster_num(t)));
    }
    let mut split_antecedents: Vec<SplitAnteGroup> = split_by_anaphor
        .into_iter()
        .map(|(anaphor, mut antecedents)| {
            antecedents.sort_unstable();
            antecedents.dedup();
            SplitAnteGroup {
                antecedents,
                anaphor,
            }
        })
        .collect();
    split_antecedents.sort_by_key(|g| g.anaphor);

    Ok(ClusterSet {
        clusters,
        bridges,
        split_antecedents,
        cataphoric_edges,
    })
}

/// Count distinct grouped link clusters: `(bridging, split-antecedent)`.
/// A split-antecedent group with two antecedents counts once.
pub fn count_link_groups(cs: &ClusterSet) -> (usize, usize) {
    (cs.bridges.len(), cs.split_antecedents.len())
}
