use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::concept::{ConceptId, ObservationPair};
use crate::tree::OntologyTree;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SampleError {
    #[error("ontology has no edges")]
    EmptyOntology,
    #[error("noise needs at least 3 concepts, ontology has {0}")]
    InsufficientVocabulary(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplerConfig {
    pub presentations: usize,
    /// Every `noise_every`-th chain part is corrupted; 0 disables noise.
    pub noise_every: usize,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            presentations: 300,
            noise_every: 10,
            seed: 0,
        }
    }
}

/// Sampled chain parts plus the positions that were corrupted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    pub pairs: Vec<ObservationPair>,
    /// Indices into `pairs`, ascending.
    pub corrupted: Vec<usize>,
}

impl Sample {
    pub fn clean_pairs(&self) -> impl Iterator<Item = &ObservationPair> {
        let mut corrupted = self.corrupted.iter().peekable();
        self.pairs.iter().enumerate().filter_map(move |(i, p)| {
            if corrupted.peek() == Some(&&i) {
                corrupted.next();
                None
            } else {
                Some(p)
            }
        })
    }
}

/// Draws chain parts uniformly from the tree's edges. Every
/// `noise_every`-th part has one of its two concepts (chosen by a fair coin)
/// replaced by a different concept of the same ontology.
pub fn sample_pairs(tree: &OntologyTree, cfg: &SamplerConfig) -> Result<Sample, SampleError> {
    let edges: Vec<&(ConceptId, ConceptId)> = tree.edges().iter().collect();
    if edges.is_empty() {
        return Err(SampleError::EmptyOntology);
    }
    let concepts: Vec<&ConceptId> = tree.nodes().iter().collect();
    if cfg.noise_every > 0 && cfg.presentations >= cfg.noise_every && concepts.len() < 3 {
        return Err(SampleError::InsufficientVocabulary(concepts.len()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut pairs = Vec::with_capacity(cfg.presentations);
    let mut corrupted = Vec::new();
    for i in 0..cfg.presentations {
        let (parent, child) = edges[rng.random_range(0..edges.len())];
        let noisy = cfg.noise_every > 0 && (i + 1) % cfg.noise_every == 0;
        let pair = if noisy {
            corrupted.push(i);
            let replace_parent = rng.random_bool(0.5);
            let (replaced, kept) = if replace_parent { (parent, child) } else { (child, parent) };
            let replacement = loop {
                let c = concepts[rng.random_range(0..concepts.len())];
                if c != replaced && c != kept {
                    break c.clone();
                }
            };
            if replace_parent {
                ObservationPair::new(replacement, kept.clone())
            } else {
                ObservationPair::new(kept.clone(), replacement)
            }
        } else {
            ObservationPair::new(parent.clone(), child.clone())
        };
        pairs.push(pair.expect("sampled pairs are never self-loops"));
    }
    Ok(Sample { pairs, corrupted })
}
