//! Include/exclude rules that separate genuine chain members from noise.
//!
//! Four exclusion rules are applied in a fixed order:
//!
//! 1. [`ExclusionReason::LowValue`]: the member's sum (own + chain increment)
//!    is appreciably below the strongest member of the same chain.
//! 2. [`ExclusionReason::RepeatedOwn`]: the member's own increment appears
//!    with exactly the same value in another chain, and it is not the
//!    concept's best occurrence. A concept has one true position, so a
//!    repeated small count marks a random placement.
//! 3. [`ExclusionReason::DominatedOwn`]: the own increment is not repeated
//!    exactly but is much smaller than the concept's best occurrence and
//!    close to another small occurrence.
//! 4. [`ExclusionReason::LowOwn`]: the own increment is itself small (within
//!    `small_band`) and much smaller than the strongest own increment in the
//!    same chain. This catches a single random placement that has nothing
//!    to be compared against elsewhere, e.g. a top-level concept presented
//!    once as somebody's member.
//!
//! Rules 1 to 3 never look at how the sum splits between own and chain
//! increment, so a 20:80 member and an 80:20 member are treated alike.
//! Rule 4 does, but only once the own increment is small in absolute terms.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chain::{ChainSnapshot, MemberStats};
use crate::concept::ConceptId;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RuleConfigError {
    #[error("{name} must be in (0, 1], got {value}")]
    RatioOutOfRange { name: &'static str, value: f64 },
}

/// Switches for individual rules. All rules are on by default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleSet {
    pub low_value: bool,
    pub repeated_own: bool,
    pub dominated_own: bool,
    pub low_own: bool,
}

impl Default for RuleSet {
    fn default() -> Self {
        RuleSet {
            low_value: true,
            repeated_own: true,
            dominated_own: true,
            low_own: true,
        }
    }
}

impl RuleSet {
    pub fn without(mut self, reason: ExclusionReason) -> RuleSet {
        match reason {
            ExclusionReason::LowValue => self.low_value = false,
            ExclusionReason::RepeatedOwn => self.repeated_own = false,
            ExclusionReason::DominatedOwn => self.dominated_own = false,
            ExclusionReason::LowOwn => self.low_own = false,
        }
        self
    }
}

/// Thresholds that make the qualitative rules concrete.
///
/// The defaults are calibrated so that the published verdict tables are
/// reproduced; they are not derived from first principles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RuleConfig {
    /// A member is low value when `sum < low_sum_ratio * chain max sum`.
    pub low_sum_ratio: f64,
    /// An own increment is "much smaller" when it is at most this fraction
    /// of the reference (the concept's largest own increment, or the chain's
    /// largest own increment for the low-own rule).
    pub repeat_dominance_ratio: f64,
    /// Two small own increments are "close" when they differ by at most
    /// this; an own increment at or below it counts as small.
    pub small_band: u64,
    /// Chains with fewer observations are flagged as low-data.
    pub min_chain_obs: u64,
    pub rules: RuleSet,
}

impl Default for RuleConfig {
    fn default() -> Self {
        RuleConfig {
            low_sum_ratio: 0.5,
            repeat_dominance_ratio: 0.5,
            small_band: 2,
            min_chain_obs: 10,
            rules: RuleSet::default(),
        }
    }
}

impl RuleConfig {
    pub fn validate(&self) -> Result<(), RuleConfigError> {
        let check = |name, value: f64| {
            if value > 0.0 && value <= 1.0 {
                Ok(())
            } else {
                Err(RuleConfigError::RatioOutOfRange { name, value })
            }
        };
        check("low_sum_ratio", self.low_sum_ratio)?;
        check("repeat_dominance_ratio", self.repeat_dominance_ratio)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExclusionReason {
    LowValue,
    RepeatedOwn,
    DominatedOwn,
    LowOwn,
}

impl ExclusionReason {
    /// Evaluation order.
    pub const PRECEDENCE: [ExclusionReason; 4] = [
        ExclusionReason::LowValue,
        ExclusionReason::RepeatedOwn,
        ExclusionReason::DominatedOwn,
        ExclusionReason::LowOwn,
    ];

    /// Short label used in rendered tables.
    pub fn label(self) -> &'static str {
        match self {
            ExclusionReason::LowValue => "low value",
            ExclusionReason::RepeatedOwn => "repeated",
            ExclusionReason::DominatedOwn => "dominated",
            ExclusionReason::LowOwn => "low own",
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ExclusionReason::LowValue => "low_value",
            ExclusionReason::RepeatedOwn => "repeated_own",
            ExclusionReason::DominatedOwn => "dominated_own",
            ExclusionReason::LowOwn => "low_own",
        }
    }

    pub fn rank(self) -> usize {
        Self::PRECEDENCE.iter().position(|r| *r == self).unwrap_or(usize::MAX)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Decision {
    Included,
    Excluded(ExclusionReason),
}

impl Decision {
    pub fn is_included(self) -> bool {
        matches!(self, Decision::Included)
    }

    pub fn reason(self) -> Option<ExclusionReason> {
        match self {
            Decision::Included => None,
            Decision::Excluded(r) => Some(r),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Confidence {
    Normal,
    LowData,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Verdict {
    pub decision: Decision,
    pub confidence: Confidence,
}

/// One appearance of a concept as a member of some chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occurrence {
    pub chain: ConceptId,
    pub own_inc: u64,
}

/// Every member occurrence in a snapshot, grouped by concept.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OccurrenceIndex {
    by_concept: BTreeMap<ConceptId, Vec<Occurrence>>,
}

impl OccurrenceIndex {
    /// Occurrences of each concept are ordered by own increment, largest
    /// first, then by chain key.
    pub fn build(snap: &ChainSnapshot) -> OccurrenceIndex {
        let mut by_concept: BTreeMap<ConceptId, Vec<Occurrence>> = BTreeMap::new();
        for chain in &snap.chains {
            for m in &chain.members {
                by_concept.entry(m.token.clone()).or_default().push(Occurrence {
                    chain: chain.key.clone(),
                    own_inc: m.stats.own_inc,
                });
            }
        }
        for occ in by_concept.values_mut() {
            occ.sort_by(|a, b| b.own_inc.cmp(&a.own_inc).then_with(|| a.chain.cmp(&b.chain)));
        }
        OccurrenceIndex { by_concept }
    }

    pub fn occurrences(&self, concept: &str) -> &[Occurrence] {
        self.by_concept.get(concept).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn len(&self) -> usize {
        self.by_concept.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_concept.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ConceptId, &[Occurrence])> {
        self.by_concept.iter().map(|(k, v)| (k, v.as_slice()))
    }
}

/// Everything the rules need to know about one (chain, member) entry.
#[derive(Debug, Clone, Copy)]
pub struct MemberContext<'a> {
    pub chain: &'a ConceptId,
    pub stats: MemberStats,
    pub chain_max_sum: u64,
    /// Largest own increment among the chain's members.
    pub chain_max_own: u64,
    pub chain_observations: u64,
}

/// Classifies one member. `occurrences` are all appearances of the member's
/// concept; the entry for `ctx.chain` itself is ignored if present.
pub fn classify_member(ctx: &MemberContext<'_>, occurrences: &[Occurrence], cfg: &RuleConfig) -> Verdict {
    let confidence = if ctx.chain_observations < cfg.min_chain_obs {
        Confidence::LowData
    } else {
        Confidence::Normal
    };
    Verdict {
        decision: decide(ctx, occurrences, cfg),
        confidence,
    }
}

fn decide(ctx: &MemberContext<'_>, occurrences: &[Occurrence], cfg: &RuleConfig) -> Decision {
    let own = ctx.stats.own_inc;
    let others: Vec<u64> = occurrences
        .iter()
        .filter(|o| &o.chain != ctx.chain)
        .map(|o| o.own_inc)
        .collect();
    let max_own = others.iter().copied().fold(own, u64::max);

    if cfg.rules.low_value && (ctx.stats.sum() as f64) < cfg.low_sum_ratio * ctx.chain_max_sum as f64 {
        return Decision::Excluded(ExclusionReason::LowValue);
    }

    // A tie at the top spares every occurrence; that case is left to the
    // assembler, which reports the concept as having several positions.
    if cfg.rules.repeated_own && own < max_own && others.contains(&own) {
        return Decision::Excluded(ExclusionReason::RepeatedOwn);
    }

    if cfg.rules.dominated_own {
        let small = cfg.repeat_dominance_ratio * max_own as f64;
        if own as f64 <= small
            && others
                .iter()
                .any(|&o| o as f64 <= small && o.abs_diff(own) <= cfg.small_band)
        {
            return Decision::Excluded(ExclusionReason::DominatedOwn);
        }
    }

    if cfg.rules.low_own
        && own <= cfg.small_band
        && own as f64 <= cfg.repeat_dominance_ratio * ctx.chain_max_own as f64
    {
        return Decision::Excluded(ExclusionReason::LowOwn);
    }

    Decision::Included
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassifiedMember {
    pub token: ConceptId,
    pub stats: MemberStats,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassifiedChain {
    pub key: ConceptId,
    pub observations: u64,
    pub max_sum: u64,
    pub max_own: u64,
    /// Sorted by token.
    pub members: Vec<ClassifiedMember>,
}

impl ClassifiedChain {
    pub fn member(&self, token: &str) -> Option<&ClassifiedMember> {
        self.members.iter().find(|m| m.token.as_str() == token)
    }
}

/// Verdicts for every (chain, member) entry of a snapshot.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ClassificationReport {
    pub chains: Vec<ClassifiedChain>,
}

impl ClassificationReport {
    pub fn chain(&self, key: &str) -> Option<&ClassifiedChain> {
        self.chains.iter().find(|c| c.key.as_str() == key)
    }

    pub fn verdict(&self, key: &str, member: &str) -> Option<Verdict> {
        self.chain(key)?.member(member).map(|m| m.verdict)
    }

    pub fn members(&self) -> impl Iterator<Item = (&ClassifiedChain, &ClassifiedMember)> {
        self.chains.iter().flat_map(|c| c.members.iter().map(move |m| (c, m)))
    }

    pub fn included_count(&self) -> usize {
        self.members().filter(|(_, m)| m.verdict.decision.is_included()).count()
    }

    pub fn exclusion_counts(&self) -> BTreeMap<ExclusionReason, usize> {
        let mut counts: BTreeMap<ExclusionReason, usize> =
            ExclusionReason::PRECEDENCE.iter().map(|r| (*r, 0)).collect();
        for (_, m) in self.members() {
            if let Some(r) = m.verdict.decision.reason() {
                *counts.entry(r).or_default() += 1;
            }
        }
        counts
    }
}

pub fn classify_all(snap: &ChainSnapshot, cfg: &RuleConfig) -> ClassificationReport {
    let index = OccurrenceIndex::build(snap);
    let chains = snap
        .chains
        .iter()
        .map(|chain| {
            let max_sum = chain.max_sum();
            let max_own = chain.max_own();
            let members = chain
                .members
                .iter()
                .map(|m| {
                    let ctx = MemberContext {
                        chain: &chain.key,
                        stats: m.stats,
                        chain_max_sum: max_sum,
                        chain_max_own: max_own,
                        chain_observations: chain.observations,
                    };
                    ClassifiedMember {
                        token: m.token.clone(),
                        stats: m.stats,
                        verdict: classify_member(&ctx, index.occurrences(m.token.as_str()), cfg),
                    }
                })
                .collect();
            ClassifiedChain {
                key: chain.key.clone(),
                observations: chain.observations,
                max_sum,
                max_own,
                members,
            }
        })
        .collect();
    ClassificationReport { chains }
}
