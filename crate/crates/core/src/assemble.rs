//! Turns accepted (chain, member) links into a forest.
//!
//! A concept accepted under more than one chain contradicts uniqueness. The
//! assembler reports it and keeps the strongest placement so that a forest
//! is always produced. Cycles are broken at their weakest edge.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::chain::MemberStats;
use crate::concept::ConceptId;
use crate::rules::ClassificationReport;
use crate::tree::OntologyTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InconsistencyKind {
    /// The concept was accepted under several parents.
    MultiplePositions,
    /// Accepted links formed a cycle through the concept.
    Cycle,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InconsistencyNote {
    pub kind: InconsistencyKind,
    pub concept: ConceptId,
    /// For [`InconsistencyKind::MultiplePositions`]: every parent the concept
    /// was accepted under, strongest first. For [`InconsistencyKind::Cycle`]:
    /// the concepts around the cycle, starting at `concept`.
    pub positions: Vec<ConceptId>,
    /// Parent the concept ended up under, if any.
    pub kept: Option<ConceptId>,
}

#[derive(Debug, Clone)]
struct Placement {
    parent: ConceptId,
    stats: MemberStats,
}

/// Strongest first: larger own increment, then larger sum, then parent key.
fn rank(a: &Placement, b: &Placement) -> Ordering {
    b.stats
        .own_inc
        .cmp(&a.stats.own_inc)
        .then(b.stats.sum().cmp(&a.stats.sum()))
        .then_with(|| a.parent.cmp(&b.parent))
}

fn reaches(parent_of: &BTreeMap<ConceptId, Placement>, from: &ConceptId, target: &ConceptId) -> bool {
    let mut cur = from;
    let mut seen = BTreeSet::new();
    loop {
        if cur == target {
            return true;
        }
        if !seen.insert(cur) {
            return false;
        }
        match parent_of.get(cur) {
            Some(p) => cur = &p.parent,
            None => return false,
        }
    }
}

/// Finds one cycle in the parent map and returns it as a list of children,
/// each followed (in the walk) by its parent.
fn find_cycle(parent_of: &BTreeMap<ConceptId, Placement>) -> Option<Vec<ConceptId>> {
    let mut done: BTreeSet<&ConceptId> = BTreeSet::new();
    for start in parent_of.keys() {
        let mut path: Vec<&ConceptId> = Vec::new();
        let mut on_path: BTreeSet<&ConceptId> = BTreeSet::new();
        let mut cur = start;
        loop {
            if done.contains(cur) {
                break;
            }
            if on_path.contains(cur) {
                let begin = path.iter().position(|n| *n == cur).expect("node is on path");
                return Some(path[begin..].iter().map(|n| (*n).clone()).collect());
            }
            on_path.insert(cur);
            path.push(cur);
            match parent_of.get(cur) {
                Some(p) => cur = &p.parent,
                None => break,
            }
        }
        done.extend(path);
    }
    None
}

pub fn assemble(report: &ClassificationReport) -> (OntologyTree, Vec<InconsistencyNote>) {
    let mut candidates: BTreeMap<ConceptId, Vec<Placement>> = BTreeMap::new();
    for (chain, member) in report.members() {
        if member.verdict.decision.is_included() {
            candidates.entry(member.token.clone()).or_default().push(Placement {
                parent: chain.key.clone(),
                stats: member.stats,
            });
        }
    }

    let mut notes = Vec::new();
    let mut parent_of: BTreeMap<ConceptId, Placement> = BTreeMap::new();
    let mut alternatives: BTreeMap<ConceptId, Vec<Placement>> = BTreeMap::new();
    for (child, mut placements) in candidates {
        placements.sort_by(rank);
        if placements.len() > 1 {
            notes.push(InconsistencyNote {
                kind: InconsistencyKind::MultiplePositions,
                concept: child.clone(),
                positions: placements.iter().map(|p| p.parent.clone()).collect(),
                kept: Some(placements[0].parent.clone()),
            });
        }
        let best = placements.remove(0);
        parent_of.insert(child.clone(), best);
        if !placements.is_empty() {
            alternatives.insert(child, placements);
        }
    }

    let mut cycle_notes = Vec::new();
    while let Some(cycle) = find_cycle(&parent_of) {
        // Weakest link: the placement that would rank lowest, ties by child.
        let weakest = cycle
            .iter()
            .max_by(|a, b| rank(&parent_of[*a], &parent_of[*b]).then_with(|| b.cmp(a)))
            .expect("cycle is non-empty")
            .clone();
        parent_of.remove(&weakest);

        let mut kept = None;
        if let Some(alts) = alternatives.get_mut(&weakest) {
            while !alts.is_empty() {
                let alt = alts.remove(0);
                if !reaches(&parent_of, &alt.parent, &weakest) {
                    kept = Some(alt.parent.clone());
                    parent_of.insert(weakest.clone(), alt);
                    break;
                }
            }
        }

        let start = cycle.iter().position(|c| *c == weakest).unwrap_or(0);
        let mut positions = cycle[start..].to_vec();
        positions.extend_from_slice(&cycle[..start]);
        cycle_notes.push(InconsistencyNote {
            kind: InconsistencyKind::Cycle,
            concept: weakest,
            positions,
            kept,
        });
    }

    for note in &mut notes {
        note.kept = parent_of.get(&note.concept).map(|p| p.parent.clone());
    }
    notes.extend(cycle_notes);

    let tree = OntologyTree::from_edges(parent_of.into_iter().map(|(child, p)| (p.parent, child)), []);
    (tree, notes)
}
