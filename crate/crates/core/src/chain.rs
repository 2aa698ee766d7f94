//! Dual-counter chain state.
//!
//! Every chain key owns a set of members. Each member carries two counters:
//! how often the member itself was presented to the chain (`own_inc`), and
//! how often any *other* member was presented to the chain after this one
//! first joined (`chain_inc`). Counters only ever increase.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::concept::{ConceptError, ConceptId, ObservationPair};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StoreError {
    #[error("unknown chain {0}")]
    UnknownChain(String),
    #[error("chain {0} appears more than once")]
    DuplicateChain(ConceptId),
    #[error("member {member} appears more than once in chain {key}")]
    DuplicateMember { key: ConceptId, member: ConceptId },
    #[error("chain {0} contains itself as a member")]
    SelfMember(ConceptId),
    #[error("chain {0} has no members")]
    EmptyChain(ConceptId),
    #[error("member {member} of chain {key}: {reason}")]
    InvalidStats {
        key: ConceptId,
        member: ConceptId,
        reason: &'static str,
    },
    #[error("join sequence {0} is used by more than one member")]
    DuplicateJoinSeq(u64),
    #[error("observation count {declared} does not match the sum of own increments {counted}")]
    ObservationMismatch { declared: u64, counted: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct MemberStats {
    pub own_inc: u64,
    pub chain_inc: u64,
    /// Global sequence number (1-based) of the observation that first put
    /// this member into the chain.
    pub join_seq: u64,
}

impl MemberStats {
    pub fn sum(&self) -> u64 {
        self.own_inc + self.chain_inc
    }

    /// Multiplies both counters by `k`, leaving `join_seq` alone.
    pub fn scaled(&self, k: u64) -> MemberStats {
        MemberStats {
            own_inc: self.own_inc * k,
            chain_inc: self.chain_inc * k,
            join_seq: self.join_seq,
        }
    }
}

#[derive(Debug, Clone, Default)]
struct Chain {
    members: Vec<(ConceptId, MemberStats)>,
    index: HashMap<ConceptId, usize>,
    observations: u64,
}

/// Mutable counter state. A single writer applies observations in order.
#[derive(Debug, Clone, Default)]
pub struct ChainStore {
    chains: HashMap<ConceptId, Chain>,
    observations: u64,
}

impl ChainStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Applies one chain part and returns its sequence number.
    pub fn observe(&mut self, pair: &ObservationPair) -> u64 {
        self.observations += 1;
        let seq = self.observations;
        let chain = self.chains.entry(pair.key().clone()).or_default();
        chain.observations += 1;

        // Every member already present is credited, then the observed member
        // is corrected back: it gets an own increment instead.
        for (_, stats) in chain.members.iter_mut() {
            stats.chain_inc += 1;
        }
        match chain.index.get(pair.member()) {
            Some(&i) => {
                let stats = &mut chain.members[i].1;
                stats.chain_inc -= 1;
                stats.own_inc += 1;
            }
            None => {
                chain.index.insert(pair.member().clone(), chain.members.len());
                chain.members.push((
                    pair.member().clone(),
                    MemberStats {
                        own_inc: 1,
                        chain_inc: 0,
                        join_seq: seq,
                    },
                ));
            }
        }
        seq
    }

    /// Validating variant of [`ChainStore::observe`] for raw tokens. A
    /// rejected pair leaves every counter untouched.
    pub fn observe_tokens(&mut self, key: &str, member: &str) -> Result<u64, ConceptError> {
        let pair = ObservationPair::parse(key, member)?;
        Ok(self.observe(&pair))
    }

    pub fn observations(&self) -> u64 {
        self.observations
    }

    pub fn chain_count(&self) -> usize {
        self.chains.len()
    }

    pub fn stats(&self, key: &str, member: &str) -> Option<MemberStats> {
        let chain = self.chains.get(key)?;
        chain.index.get(member).map(|&i| chain.members[i].1)
    }

    pub fn snapshot(&self) -> ChainSnapshot {
        let mut chains: Vec<ChainView> = self
            .chains
            .iter()
            .map(|(key, chain)| {
                let mut members: Vec<MemberEntry> = chain
                    .members
                    .iter()
                    .map(|(token, stats)| MemberEntry {
                        token: token.clone(),
                        stats: *stats,
                    })
                    .collect();
                members.sort_by(|a, b| a.token.cmp(&b.token));
                ChainView {
                    key: key.clone(),
                    observations: chain.observations,
                    members,
                }
            })
            .collect();
        chains.sort_by(|a, b| a.key.cmp(&b.key));
        ChainSnapshot {
            observations: self.observations,
            chains,
        }
    }

    /// Rebuilds a store from a validated snapshot.
    pub fn from_snapshot(snap: &ChainSnapshot) -> ChainStore {
        let chains = snap
            .chains
            .iter()
            .map(|view| {
                let mut members: Vec<(ConceptId, MemberStats)> = view
                    .members
                    .iter()
                    .map(|m| (m.token.clone(), m.stats))
                    .collect();
                members.sort_by_key(|(_, s)| s.join_seq);
                let index = members
                    .iter()
                    .enumerate()
                    .map(|(i, (t, _))| (t.clone(), i))
                    .collect();
                (
                    view.key.clone(),
                    Chain {
                        members,
                        index,
                        observations: view.observations,
                    },
                )
            })
            .collect();
        ChainStore {
            chains,
            observations: snap.observations,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MemberEntry {
    pub token: ConceptId,
    pub stats: MemberStats,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainView {
    pub key: ConceptId,
    pub observations: u64,
    /// Sorted by token.
    pub members: Vec<MemberEntry>,
}

impl ChainView {
    pub fn member(&self, token: &str) -> Option<&MemberEntry> {
        self.members
            .binary_search_by(|m| m.token.as_str().cmp(token))
            .ok()
            .map(|i| &self.members[i])
    }

    pub fn max_sum(&self) -> u64 {
        self.members.iter().map(|m| m.stats.sum()).max().unwrap_or(0)
    }

    pub fn max_own(&self) -> u64 {
        self.members.iter().map(|m| m.stats.own_inc).max().unwrap_or(0)
    }
}

/// Immutable view of a [`ChainStore`]. Chains and members are in
/// lexicographic token order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ChainSnapshot {
    pub observations: u64,
    pub chains: Vec<ChainView>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainTotals {
    pub members: usize,
    pub observations: u64,
    pub max_sum: u64,
}

impl ChainSnapshot {
    /// Builds a snapshot from explicit counter records, checking every
    /// invariant a replayed store would satisfy. Per-chain observation
    /// counts are derived from the own increments.
    pub fn from_records<I, M>(observations: u64, chains: I) -> Result<ChainSnapshot, StoreError>
    where
        I: IntoIterator<Item = (ConceptId, M)>,
        M: IntoIterator<Item = (ConceptId, MemberStats)>,
    {
        let mut views = Vec::new();
        let mut seen_keys = BTreeSet::new();
        let mut seen_seqs = BTreeSet::new();
        let mut counted = 0u64;
        for (key, members) in chains {
            if !seen_keys.insert(key.clone()) {
                return Err(StoreError::DuplicateChain(key));
            }
            let mut entries: Vec<MemberEntry> = members
                .into_iter()
                .map(|(token, stats)| MemberEntry { token, stats })
                .collect();
            if entries.is_empty() {
                return Err(StoreError::EmptyChain(key));
            }
            entries.sort_by(|a, b| a.token.cmp(&b.token));
            for pair in entries.windows(2) {
                if pair[0].token == pair[1].token {
                    return Err(StoreError::DuplicateMember {
                        key,
                        member: pair[0].token.clone(),
                    });
                }
            }
            let chain_obs: u64 = entries.iter().map(|m| m.stats.own_inc).sum();
            for m in &entries {
                let bad = |reason| StoreError::InvalidStats {
                    key: key.clone(),
                    member: m.token.clone(),
                    reason,
                };
                if m.token == key {
                    return Err(StoreError::SelfMember(key));
                }
                if m.stats.own_inc == 0 {
                    return Err(bad("own increment must be at least 1"));
                }
                if m.stats.chain_inc > chain_obs - m.stats.own_inc {
                    return Err(bad("chain increment exceeds other members' observations"));
                }
                if m.stats.join_seq == 0 || m.stats.join_seq > observations {
                    return Err(bad("join sequence out of range"));
                }
                if !seen_seqs.insert(m.stats.join_seq) {
                    return Err(StoreError::DuplicateJoinSeq(m.stats.join_seq));
                }
            }
            counted += chain_obs;
            views.push(ChainView {
                key,
                observations: chain_obs,
                members: entries,
            });
        }
        if counted != observations {
            return Err(StoreError::ObservationMismatch {
                declared: observations,
                counted,
            });
        }
        views.sort_by(|a, b| a.key.cmp(&b.key));
        Ok(ChainSnapshot {
            observations,
            chains: views,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.chains.is_empty()
    }

    pub fn chain(&self, key: &str) -> Option<&ChainView> {
        self.chains
            .binary_search_by(|c| c.key.as_str().cmp(key))
            .ok()
            .map(|i| &self.chains[i])
    }

    pub fn chain_totals(&self, key: &str) -> Result<ChainTotals, StoreError> {
        let chain = self
            .chain(key)
            .ok_or_else(|| StoreError::UnknownChain(key.to_string()))?;
        Ok(ChainTotals {
            members: chain.members.len(),
            observations: chain.observations,
            max_sum: chain.max_sum(),
        })
    }

    /// Multiplies every counter by `k` (join sequences are stretched so they
    /// stay within range).
    pub fn scaled(&self, k: u64) -> ChainSnapshot {
        ChainSnapshot {
            observations: self.observations * k,
            chains: self
                .chains
                .iter()
                .map(|c| ChainView {
                    key: c.key.clone(),
                    observations: c.observations * k,
                    members: c
                        .members
                        .iter()
                        .map(|m| MemberEntry {
                            token: m.token.clone(),
                            stats: MemberStats {
                                join_seq: m.stats.join_seq * k,
                                ..m.stats.scaled(k)
                            },
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}
