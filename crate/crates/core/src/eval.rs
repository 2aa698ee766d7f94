//! End-to-end experiments: generate or load a ground-truth ontology, sample
//! chain parts, count, classify, assemble and compare against the truth.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::assemble::{assemble, InconsistencyNote};
use crate::chain::ChainStore;
use crate::ontology::{generate_ontology, sample_pairs, GeneratorConfig, SampleError, SamplerConfig};
use crate::rules::{classify_all, ClassificationReport, Decision, ExclusionReason, RuleConfig, RuleConfigError};
use crate::tree::{diff_trees, EdgeDiff, OntologyTree};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExperimentError {
    #[error("experiment needs at least one seed")]
    NoSeeds,
    #[error(transparent)]
    Rules(#[from] RuleConfigError),
    #[error(transparent)]
    Sample(#[from] SampleError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OntologySource {
    /// A fresh ontology is generated per seed; `seed` in the config is ignored.
    Generated(GeneratorConfig),
    Fixed(OntologyTree),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub ontology: OntologySource,
    pub presentations: usize,
    pub noise_every: usize,
    pub rules: RuleConfig,
    pub seeds: Vec<u64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            ontology: OntologySource::Generated(GeneratorConfig::default()),
            presentations: 300,
            noise_every: 10,
            rules: RuleConfig::default(),
            seeds: vec![1],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub exact: bool,
}

impl EdgeMetrics {
    /// Precision is 1 for an empty candidate and recall is 1 for an empty
    /// truth, so that identical empty trees score as an exact match.
    pub fn from_diff(diff: &EdgeDiff) -> EdgeMetrics {
        let common = diff.common.len() as f64;
        let candidate = common + diff.spurious.len() as f64;
        let truth = common + diff.missing.len() as f64;
        let precision = if candidate == 0.0 { 1.0 } else { common / candidate };
        let recall = if truth == 0.0 { 1.0 } else { common / truth };
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        EdgeMetrics {
            precision,
            recall,
            f1,
            exact: diff.is_empty(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeedResult {
    pub seed: u64,
    pub truth: OntologyTree,
    pub reconstruction: OntologyTree,
    pub diff: EdgeDiff,
    pub metrics: EdgeMetrics,
    pub exclusions: BTreeMap<ExclusionReason, usize>,
    pub inconsistencies: Vec<InconsistencyNote>,
    /// Whether the uncorrupted chain parts hit every true edge at least once.
    pub covered_all_edges: bool,
    pub corrupted_parts: usize,
    pub report: ClassificationReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub runs: Vec<SeedResult>,
}

impl ExperimentResult {
    pub fn mean_f1(&self) -> f64 {
        if self.runs.is_empty() {
            return 0.0;
        }
        self.runs.iter().map(|r| r.metrics.f1).sum::<f64>() / self.runs.len() as f64
    }

    pub fn exact_count(&self) -> usize {
        self.runs.iter().filter(|r| r.metrics.exact).count()
    }
}

/// Runs the full pipeline once against a given ground truth.
pub fn run_once(truth: &OntologyTree, sampler: &SamplerConfig, rules: &RuleConfig) -> Result<SeedResult, ExperimentError> {
    rules.validate()?;
    let sample = sample_pairs(truth, sampler)?;

    let mut store = ChainStore::new();
    for pair in &sample.pairs {
        store.observe(pair);
    }
    let report = classify_all(&store.snapshot(), rules);
    let (reconstruction, inconsistencies) = assemble(&report);
    let diff = diff_trees(&reconstruction, truth);

    let mut seen = std::collections::BTreeSet::new();
    for p in sample.clean_pairs() {
        seen.insert((p.key(), p.member()));
    }
    let covered_all_edges = truth.edges().iter().all(|(p, c)| seen.contains(&(p, c)));

    Ok(SeedResult {
        seed: sampler.seed,
        truth: truth.clone(),
        metrics: EdgeMetrics::from_diff(&diff),
        exclusions: report.exclusion_counts(),
        reconstruction,
        diff,
        inconsistencies,
        covered_all_edges,
        corrupted_parts: sample.corrupted.len(),
        report,
    })
}

/// Runs every seed in order. With a generated ontology, each seed both
/// generates the truth and drives the sampler.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult, ExperimentError> {
    if cfg.seeds.is_empty() {
        return Err(ExperimentError::NoSeeds);
    }
    let runs = cfg
        .seeds
        .iter()
        .map(|&seed| {
            let truth = match &cfg.ontology {
                OntologySource::Generated(g) => generate_ontology(&GeneratorConfig { seed, ..*g }),
                OntologySource::Fixed(t) => t.clone(),
            };
            let sampler = SamplerConfig {
                presentations: cfg.presentations,
                noise_every: cfg.noise_every,
                seed,
            };
            run_once(&truth, &sampler, &cfg.rules)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ExperimentResult { runs })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown chain {0}")]
pub struct UnknownChain(pub String);

pub const TABLE_HEADER: &str = "Chain or concept\tOwn Inc\tChain Inc\tSum\tIn Chain\tReason Not";

/// Tab-separated table of one chain, strongest member first.
pub fn render_table(report: &ClassificationReport, key: &str) -> Result<String, UnknownChain> {
    let chain = report.chain(key).ok_or_else(|| UnknownChain(key.to_string()))?;
    let mut rows: Vec<_> = chain.members.iter().collect();
    rows.sort_by(|a, b| b.stats.sum().cmp(&a.stats.sum()).then_with(|| a.token.cmp(&b.token)));

    let mut out = format!("Chain: {}\n", chain.key);
    for m in rows {
        let _ = write!(out, "{}\t{}\t{}\t{}", m.token, m.stats.own_inc, m.stats.chain_inc, m.stats.sum());
        match m.verdict.decision {
            Decision::Included => out.push_str("\tok\n"),
            Decision::Excluded(reason) => {
                let _ = writeln!(out, "\tx\t{}", reason.label());
            }
        }
    }
    Ok(out)
}

/// All chains, in key order, under one header.
pub fn render_tables(report: &ClassificationReport) -> String {
    let mut out = String::from(TABLE_HEADER);
    out.push('\n');
    for chain in &report.chains {
        out.push_str(&render_table(report, chain.key.as_str()).expect("chain comes from the report"));
    }
    out
}
