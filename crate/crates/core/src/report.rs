//! JSON form of a classification report.
//!
//! ```json
//! {"chains":[{"key":"John","observations":92,"max_sum":92,"members":[
//!   {"token":"jon_accessing","own":26,"chain":66,"sum":92,"join_seq":1,
//!    "verdict":"included","confidence":"normal"}]}],
//!  "exclusions":{"low_value":0,"repeated_own":0,"dominated_own":0,"low_own":0},
//!  "inconsistencies":[]}
//! ```
//!
//! `reason` is present only on excluded members, `metrics` only when the
//! report comes from an experiment with a known ground truth.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::assemble::{InconsistencyKind, InconsistencyNote};
use crate::eval::SeedResult;
use crate::rules::{ClassificationReport, Confidence, Decision, ExclusionReason};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictJson {
    Included,
    Excluded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemberJson {
    pub token: String,
    pub own: u64,
    pub chain: u64,
    pub sum: u64,
    pub join_seq: u64,
    pub verdict: VerdictJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<ExclusionReason>,
    pub confidence: Confidence,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainJson {
    pub key: String,
    pub observations: u64,
    pub max_sum: u64,
    pub members: Vec<MemberJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InconsistencyJson {
    pub kind: String,
    pub concept: String,
    pub positions: Vec<String>,
    pub kept: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsJson {
    pub seed: u64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub exact: bool,
    pub covered_all_edges: bool,
    pub corrupted_parts: usize,
    pub truth_edges: usize,
    pub reconstructed_edges: usize,
    pub missing: Vec<[String; 2]>,
    pub spurious: Vec<[String; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub chains: Vec<ChainJson>,
    pub exclusions: BTreeMap<ExclusionReason, usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<MetricsJson>,
    pub inconsistencies: Vec<InconsistencyJson>,
}

impl ReportJson {
    pub fn new(report: &ClassificationReport, notes: &[InconsistencyNote]) -> ReportJson {
        let chains = report
            .chains
            .iter()
            .map(|c| ChainJson {
                key: c.key.to_string(),
                observations: c.observations,
                max_sum: c.max_sum,
                members: c
                    .members
                    .iter()
                    .map(|m| MemberJson {
                        token: m.token.to_string(),
                        own: m.stats.own_inc,
                        chain: m.stats.chain_inc,
                        sum: m.stats.sum(),
                        join_seq: m.stats.join_seq,
                        verdict: match m.verdict.decision {
                            Decision::Included => VerdictJson::Included,
                            Decision::Excluded(_) => VerdictJson::Excluded,
                        },
                        reason: m.verdict.decision.reason(),
                        confidence: m.verdict.confidence,
                    })
                    .collect(),
            })
            .collect();
        let inconsistencies = notes
            .iter()
            .map(|n| InconsistencyJson {
                kind: match n.kind {
                    InconsistencyKind::MultiplePositions => "multiple_positions".into(),
                    InconsistencyKind::Cycle => "cycle".into(),
                },
                concept: n.concept.to_string(),
                positions: n.positions.iter().map(|p| p.to_string()).collect(),
                kept: n.kept.as_ref().map(|k| k.to_string()),
            })
            .collect();
        ReportJson {
            chains,
            exclusions: report.exclusion_counts(),
            metrics: None,
            inconsistencies,
        }
    }

    pub fn from_seed_result(result: &SeedResult) -> ReportJson {
        let pairs = |edges: &[(crate::ConceptId, crate::ConceptId)]| -> Vec<[String; 2]> {
            edges.iter().map(|(p, c)| [p.to_string(), c.to_string()]).collect()
        };
        let mut json = ReportJson::new(&result.report, &result.inconsistencies);
        json.metrics = Some(MetricsJson {
            seed: result.seed,
            precision: result.metrics.precision,
            recall: result.metrics.recall,
            f1: result.metrics.f1,
            exact: result.metrics.exact,
            covered_all_edges: result.covered_all_edges,
            corrupted_parts: result.corrupted_parts,
            truth_edges: result.truth.edge_count(),
            reconstructed_edges: result.reconstruction.edge_count(),
            missing: pairs(&result.diff.missing),
            spurious: pairs(&result.diff.spurious),
        });
        json
    }

    /// Compact single-line JSON.
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("report serialises")
    }
}

/// JSON Schema (draft 2020-12) describing [`ReportJson`].
pub const REPORT_SCHEMA: &str = include_str!("../schema/report.schema.json");
