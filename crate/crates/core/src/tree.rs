use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::concept::{ConceptError, ConceptId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("concept {child} has several parents: {parents:?}")]
    MultipleParents { child: ConceptId, parents: Vec<ConceptId> },
    #[error("cycle through {0}")]
    Cycle(ConceptId),
    #[error("line {line}: {message}")]
    EdgeList { line: usize, message: String },
}

/// A rooted forest of unique concepts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OntologyTree {
    nodes: BTreeSet<ConceptId>,
    edges: BTreeSet<(ConceptId, ConceptId)>,
}

impl OntologyTree {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a tree from edges. Nodes are the edge endpoints plus any
    /// extra `isolated` concepts. No shape checks are made; see
    /// [`OntologyTree::validate`].
    pub fn from_edges<E, N>(edges: E, isolated: N) -> OntologyTree
    where
        E: IntoIterator<Item = (ConceptId, ConceptId)>,
        N: IntoIterator<Item = ConceptId>,
    {
        let mut tree = OntologyTree::new();
        for (p, c) in edges {
            tree.add_edge(p, c);
        }
        for n in isolated {
            tree.add_node(n);
        }
        tree
    }

    pub fn add_node(&mut self, node: ConceptId) -> bool {
        self.nodes.insert(node)
    }

    pub fn add_edge(&mut self, parent: ConceptId, child: ConceptId) -> bool {
        self.nodes.insert(parent.clone());
        self.nodes.insert(child.clone());
        self.edges.insert((parent, child))
    }

    pub fn nodes(&self) -> &BTreeSet<ConceptId> {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeSet<(ConceptId, ConceptId)> {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains_edge(&self, parent: &str, child: &str) -> bool {
        self.edges
            .iter()
            .any(|(p, c)| p.as_str() == parent && c.as_str() == child)
    }

    /// Nodes without a parent, in token order.
    pub fn roots(&self) -> Vec<ConceptId> {
        let children: BTreeSet<&ConceptId> = self.edges.iter().map(|(_, c)| c).collect();
        self.nodes
            .iter()
            .filter(|n| !children.contains(n))
            .cloned()
            .collect()
    }

    /// Children of `parent`, in token order.
    pub fn children(&self, parent: &str) -> Vec<&ConceptId> {
        self.edges
            .iter()
            .filter(|(p, _)| p.as_str() == parent)
            .map(|(_, c)| c)
            .collect()
    }

    pub fn child_map(&self) -> BTreeMap<&ConceptId, Vec<&ConceptId>> {
        let mut map: BTreeMap<&ConceptId, Vec<&ConceptId>> = BTreeMap::new();
        for (p, c) in &self.edges {
            map.entry(p).or_default().push(c);
        }
        map
    }

    /// Checks that every node has at most one parent and there are no cycles.
    pub fn validate(&self) -> Result<(), TreeError> {
        let mut parent: BTreeMap<&ConceptId, &ConceptId> = BTreeMap::new();
        for (p, c) in &self.edges {
            if let Some(prev) = parent.insert(c, p) {
                let mut parents = vec![prev.clone(), p.clone()];
                parents.sort();
                return Err(TreeError::MultipleParents {
                    child: c.clone(),
                    parents,
                });
            }
        }
        // With unique parents, a cycle is a parent walk that never ends.
        let mut done: BTreeSet<&ConceptId> = BTreeSet::new();
        for start in &self.nodes {
            let mut path = BTreeSet::new();
            let mut cur = start;
            while !done.contains(cur) {
                if !path.insert(cur) {
                    return Err(TreeError::Cycle(cur.clone()));
                }
                match parent.get(cur) {
                    Some(p) => cur = p,
                    None => break,
                }
            }
            done.extend(path);
        }
        Ok(())
    }

    /// One `parent<TAB>child` line per edge, lines sorted.
    pub fn to_edge_list(&self) -> String {
        let mut lines: Vec<String> = self.edges.iter().map(|(p, c)| format!("{p}\t{c}")).collect();
        lines.sort();
        let mut out = String::new();
        for line in lines {
            out.push_str(&line);
            out.push('\n');
        }
        out
    }

    pub fn from_edge_list(text: &str) -> Result<OntologyTree, TreeError> {
        let mut tree = OntologyTree::new();
        for (i, line) in text.lines().enumerate() {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| TreeError::EdgeList { line: i + 1, message };
            let (p, c) = line
                .split_once('\t')
                .ok_or_else(|| err("expected parent<TAB>child".into()))?;
            let parse = |s: &str| ConceptId::new(s).map_err(|e: ConceptError| err(e.to_string()));
            let (p, c) = (parse(p)?, parse(c)?);
            if p == c {
                return Err(err("self-loop".into()));
            }
            tree.add_edge(p, c);
        }
        Ok(tree)
    }
}

/// Set difference between a candidate and a reference edge set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeDiff {
    pub missing: Vec<(ConceptId, ConceptId)>,
    pub spurious: Vec<(ConceptId, ConceptId)>,
    pub common: Vec<(ConceptId, ConceptId)>,
}

impl EdgeDiff {
    /// True when the two edge sets are identical.
    pub fn is_empty(&self) -> bool {
        self.missing.is_empty() && self.spurious.is_empty()
    }
}

pub fn diff_trees(candidate: &OntologyTree, truth: &OntologyTree) -> EdgeDiff {
    EdgeDiff {
        missing: truth.edges.difference(&candidate.edges).cloned().collect(),
        spurious: candidate.edges.difference(&truth.edges).cloned().collect(),
        common: candidate.edges.intersection(&truth.edges).cloned().collect(),
    }
}
